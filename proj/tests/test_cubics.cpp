#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <random>

#include "umbilic4/harmonic.hpp"
#include "umbilic4/stabilizer.hpp"

using namespace umbilic4;
using AS = AlgebraicScalar;

namespace {

Eigen::Matrix4d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::Matrix4d m;
  for (int i = 0; i < 16; ++i) m.data()[i] = n(rng);
  Eigen::HouseholderQR<Eigen::Matrix4d> qr(m);
  Eigen::Matrix4d q = qr.householderQ();
  if (q.determinant() < 0) q.col(0) *= -1;
  return q;
}

CubicD random_harmonic(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Vec16 c;
  for (int k = 0; k < 16; ++k) c(k) = n(rng);
  return from_harmonic_coords(c);
}

Eigen::Vector4d random_point(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return {n(rng), n(rng), n(rng), n(rng)};
}

// Laplacian by central second differences; exact for cubics up to rounding.
Eigen::Vector4d fd_laplacian_gradient_free(const CubicD& p, const Eigen::Vector4d& x) {
  Eigen::Vector4d out;
  const double h = 0.5;
  double lap = 0;
  for (int i = 0; i < 4; ++i) {
    Eigen::Vector4d e = Eigen::Vector4d::Zero();
    e(i) = h;
    lap += (p(x + e) - 2 * p(x) + p(x - e)) / (h * h);
  }
  out << lap, 0, 0, 0;
  return out;
}

double coeff_distance(const CubicD& a, const CubicD& b) { return max_abs_coeff(a - b); }

const CubicD kHarmonic2 = continuous_normal_form(2);  // x1(x1²-x2²-x3²-x4²)
const CubicD kX234 = cubic_from_terms({{1, 2, 3, 4}});

}  // namespace

TEST(Cubic, MonomialOrderAndEvaluation) {
  EXPECT_EQ(monomial_name(0), "x1^3");
  EXPECT_EQ(monomial_name(1), "x1^2*x2");
  EXPECT_EQ(monomial_name(5), "x1*x2*x3");
  EXPECT_EQ(monomial_name(19), "x4^3");
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n;
  for (int t = 0; t < 20; ++t) {
    CubicD p;
    for (auto& c : p.coeffs) c = n(rng);
    auto x = random_point(rng);
    auto h = p.tensor();
    double direct = 0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c) direct += h[tidx(a, b, c)] * x(a) * x(b) * x(c);
    EXPECT_NEAR(direct, p(x), 1e-13 * (1 + std::abs(direct)));
    EXPECT_LT(coeff_distance(CubicD::from_tensor(h), p), 1e-14);
  }
}

TEST(Cubic, LaplacianExamples) {
  for (double c : laplacian(kX234)) EXPECT_EQ(c, 0.0);
  for (double c : laplacian(kHarmonic2)) EXPECT_EQ(c, 0.0);
  auto lap = laplacian(mono(0, 0, 0));
  EXPECT_EQ(lap[0], 6.0);
  EXPECT_EQ(lap[1], 0.0);
}

TEST(Cubic, LaplacianMatchesFiniteDifferences) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n;
  for (int t = 0; t < 20; ++t) {
    CubicD p;
    for (auto& c : p.coeffs) c = n(rng);
    auto x = random_point(rng);
    auto lap = laplacian(p);
    double expected = lap[0] * x(0) + lap[1] * x(1) + lap[2] * x(2) + lap[3] * x(3);
    EXPECT_NEAR(fd_laplacian_gradient_free(p, x)(0), expected, 1e-9 * (1 + std::abs(expected)));
  }
}

TEST(Cubic, HarmonicProjection) {
  EXPECT_LT(coeff_distance(harmonic_project(kHarmonic2), kHarmonic2), 1e-15);
  CubicD radial = cubic_from_terms({{1, 1, 1, 1}, {1, 1, 2, 2}, {1, 1, 3, 3}, {1, 1, 4, 4}});
  EXPECT_LT(max_abs_coeff(harmonic_project(radial)), 1e-15);
  EXPECT_LT(coeff_distance(harmonic_project(mono(0, 0, 0)), 0.5 * kHarmonic2), 1e-15);
  CubicX exact = harmonic_project(mono<AS>(0, 0, 0));
  EXPECT_EQ(exact.coeffs[0], AS::ratio(1, 2));
  EXPECT_EQ(exact.coeffs[monomial_index(0, 1, 1)], AS::ratio(-1, 2));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n;
  for (int t = 0; t < 10; ++t) {
    CubicD p;
    for (auto& c : p.coeffs) c = n(rng);
    auto h = harmonic_project(p);
    for (double c : laplacian(h)) EXPECT_NEAR(c, 0.0, 1e-12);
    EXPECT_LT(coeff_distance(harmonic_project(h), h), 1e-13);
  }
}

TEST(Cubic, ActionExamples) {
  CubicD p = continuous_normal_form(4);
  EXPECT_LT(coeff_distance(act(Eigen::Matrix4d::Identity(), p), p), 1e-15);
  Eigen::Matrix4d d = Eigen::Vector4d(1, -1, -1, 1).asDiagonal();
  EXPECT_LT(coeff_distance(act(d, p), p), 1e-15);
  EXPECT_LT(coeff_distance(act(plane_rotation(2 * M_PI / 3, 0), p), p), 1e-14);
  EXPECT_GT(coeff_distance(act(plane_rotation(M_PI / 3, 0), p), p), 0.5);
}

TEST(Cubic, ActionIsSubstitution) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    auto a = random_rotation(rng);
    auto p = random_harmonic(rng);
    auto x = random_point(rng);
    Eigen::RowVector4d xa = x.transpose() * a;
    EXPECT_NEAR(act(a, p)(x), p(xa), 1e-12);
  }
}

TEST(Cubic, ActionComposesAndPreservesHarmonicity) {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 20; ++t) {
    auto a = random_rotation(rng), b = random_rotation(rng);
    auto p = random_harmonic(rng), q = random_harmonic(rng);
    EXPECT_LT(coeff_distance(act(Eigen::Matrix4d(a * b), p), act(a, act(b, p))), 1e-12);
    for (double c : laplacian(act(a, p))) EXPECT_NEAR(c, 0.0, 1e-12);
    EXPECT_NEAR(sphere_inner(act(a, p), act(a, q)), sphere_inner(p, q), 1e-10);
  }
}

TEST(Cubic, AlgebraActionMatchesFiniteDifference) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n;
  EXPECT_LT(max_abs_coeff(algebra_act(Eigen::Matrix4d::Zero(), kHarmonic2)), 1e-15);
  auto rot34 = skew_basis()[5];
  EXPECT_LT(max_abs_coeff(algebra_act(rot34, continuous_normal_form(4))), 1e-15);
  for (int t = 0; t < 10; ++t) {
    Eigen::Matrix4d x;
    for (int i = 0; i < 16; ++i) x.data()[i] = n(rng);
    x = x - x.transpose().eval();
    x /= x.norm();
    auto p = random_harmonic(rng);
    p *= 1.0 / max_abs_coeff(p);
    const double h = 1e-6;
    Eigen::Matrix4d e = Eigen::Matrix4d(h * x).exp();
    CubicD fd = (1.0 / h) * (act(e, p) - p);
    CubicD an = algebra_act(x, p);
    EXPECT_GT(max_abs_coeff(an), 1e-3);
    // Forward difference: relative agreement at the stated step; central difference: O(h²).
    EXPECT_LT(coeff_distance(fd, an), 1e-6 * (1 + max_abs_coeff(an)));
    const double hc = 1e-4;
    CubicD central = (0.5 / hc) * (act(Eigen::Matrix4d(Eigen::Matrix4d(hc * x).exp()), p) -
                                   act(Eigen::Matrix4d(Eigen::Matrix4d(-hc * x).exp()), p));
    EXPECT_LT(coeff_distance(central, an), 1e-8);
  }
}

TEST(Harmonic, BasisIsOrthonormalAndHarmonic) {
  const auto& b = harmonic_basis();
  for (int i = 0; i < 16; ++i) {
    for (double c : laplacian(b[i])) EXPECT_NEAR(c, 0.0, 1e-12);
    for (int j = 0; j < 16; ++j) EXPECT_NEAR(sphere_inner(b[i], b[j]), i == j ? 1.0 : 0.0, 1e-12);
  }
}

TEST(Harmonic, SphereInnerMatchesMonteCarloFreeQuadrature) {
  // E[x1^2 x2^2 x3^2] on S^3 = 1/192 and E[x1^6] = 15/192.
  EXPECT_NEAR(sphere_inner(kX234, kX234), 1.0 / 192, 1e-15);
  EXPECT_NEAR(sphere_inner(mono(0, 0, 0), mono(0, 0, 0)), 15.0 / 192, 1e-15);
}

TEST(Harmonic, RepIsOrthogonalHomomorphism) {
  std::mt19937_64 rng(13);
  EXPECT_LT((rep_matrix(Eigen::Matrix4d::Identity()) - Mat16::Identity()).norm(), 1e-12);
  for (int t = 0; t < 100; ++t) {
    auto a = random_rotation(rng), b = random_rotation(rng);
    Mat16 ra = rep_matrix(a);
    EXPECT_LT((rep_matrix(a * b) - ra * rep_matrix(b)).norm(), 1e-10);
    EXPECT_LT((ra * rep_matrix(a.transpose()) - Mat16::Identity()).norm(), 1e-10);
  }
}

TEST(Harmonic, TraceOfIIByPointSubstitution) {
  // Independent route: evaluate b_k(x·A) at sample points and fit onto the basis.
  Eigen::Matrix4d a = Eigen::Vector4d(1, 1, -1, -1).asDiagonal();
  std::mt19937_64 rng(14);
  const int npts = 60;
  Eigen::MatrixXd design(npts, 16);
  std::vector<Eigen::Vector4d> pts;
  for (int p = 0; p < npts; ++p) pts.push_back(random_point(rng));
  const auto& b = harmonic_basis();
  for (int p = 0; p < npts; ++p)
    for (int k = 0; k < 16; ++k) design(p, k) = b[k](pts[p]);
  double trace = 0;
  for (int k = 0; k < 16; ++k) {
    Eigen::VectorXd rhs(npts);
    for (int p = 0; p < npts; ++p) {
      Eigen::RowVector4d xa = pts[p].transpose() * a;
      rhs(p) = b[k](xa);
    }
    Eigen::VectorXd coef = design.colPivHouseholderQr().solve(rhs);
    trace += coef(k);
  }
  EXPECT_NEAR(trace, 0.0, 1e-10);  // frozen value of the substitution oracle
  EXPECT_NEAR(rep_matrix(a).trace(), trace, 1e-10);
}

TEST(Harmonic, FixedSubspaceTetrahedral) {
  auto gens = so4_generators_exact("T");
  auto ex = fixed_subspace_exact(gens);
  ASSERT_EQ(ex.dim, 2);
  std::vector<Eigen::Matrix4d> ng;
  for (const auto& g : gens) ng.push_back(to_eigen(g));
  auto fs = fixed_subspace(ng);
  ASSERT_EQ(fs.dim, 2);
  for (const CubicD& target : {kHarmonic2, kX234}) {
    CubicD proj;
    for (const auto& b : fs.basis) proj += sphere_inner(b, target) * b;
    EXPECT_LT(coeff_distance(proj, target), 1e-10);
  }
}

TEST(Harmonic, FixedSubspaceOctahedralPlus) {
  auto ex = fixed_subspace_exact(so4_generators_exact("O+"));
  ASSERT_EQ(ex.dim, 1);
  CubicD b = to_double(ex.basis[0]);
  b *= 1.0 / b.coeffs[monomial_index(1, 2, 3)];
  EXPECT_LT(coeff_distance(b, kX234), 1e-15);
}

TEST(Harmonic, FixedSubspaceIcosahedralPlusExact) {
  auto ex = fixed_subspace_exact(so4_generators_exact("I+"));
  ASSERT_EQ(ex.dim, 1);
  CubicX b = ex.basis[0];
  AS lead = b.coeffs[0];
  ASSERT_FALSE(lead.is_zero());
  for (auto& c : b.coeffs) c = c / lead;
  CubicX expect;
  expect.coeffs[monomial_index(0, 0, 0)] = AS(1);
  expect.coeffs[monomial_index(0, 1, 1)] = AS(-1);
  expect.coeffs[monomial_index(0, 2, 2)] = AS(-1);
  expect.coeffs[monomial_index(0, 3, 3)] = AS(-1);
  expect.coeffs[monomial_index(1, 2, 3)] = AS(0, 0, 2);
  EXPECT_EQ(b, expect) << cubic_to_json(b).dump();
}

TEST(Harmonic, FixedDimensionIsConjugationInvariant) {
  std::mt19937_64 rng(15);
  for (const std::string label : {"T", "O", "O+"}) {
    auto g = build_so4_subgroup(label);
    auto a = random_rotation(rng);
    std::vector<Eigen::Matrix4d> conj;
    for (const auto& m : g.generators) conj.push_back(a * m * a.transpose());
    EXPECT_EQ(fixed_subspace(g.generators).dim, fixed_subspace(conj).dim) << label;
  }
}

TEST(Stabilizer, NormalFormDimensions) {
  const int expected[6] = {6, 3, 1, 1, 1, 1};
  for (int c = 1; c <= 6; ++c) EXPECT_EQ(stabilizer_algebra(continuous_normal_form(c, 1.0, 0.7, 0.4)).algebra_dim,
                                         expected[c - 1])
      << "case " << c;
  CubicD case3 = cubic_from_terms({{1, 1, 1, 3}, {-1, 2, 2, 3}, {2, 1, 2, 4}});
  EXPECT_EQ(stabilizer_algebra(case3).algebra_dim, 1);
}

TEST(Stabilizer, GenericCubicsHaveTrivialAlgebra) {
  for (int seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    EXPECT_EQ(stabilizer_algebra(random_harmonic(rng)).algebra_dim, 0) << seed;
  }
}

TEST(Stabilizer, DimensionIsOrbitInvariant) {
  std::mt19937_64 rng(16);
  for (int c = 1; c <= 6; ++c) {
    auto p = continuous_normal_form(c, 1.0, 0.7, 0.4);
    auto a = random_rotation(rng);
    EXPECT_EQ(stabilizer_algebra(act(a, p)).algebra_dim, stabilizer_algebra(p).algebra_dim);
  }
}

TEST(Stabilizer, CheckedGroups) {
  auto t = build_so4_subgroup("T");
  auto rep = stabilizer_algebra(kX234, 1e-9, {{"T", t.elements}, {"I", build_so4_subgroup("I").elements}});
  EXPECT_TRUE(rep.checked_groups["T"]);
  EXPECT_FALSE(rep.checked_groups["I"]);
}

TEST(Stabilizer, TetrahedralPencil) {
  auto t = build_so4_subgroup("T");
  auto iplus = so4_generators_exact("I+");
  for (double s : {0.3, 1.0, 2.5, 7.0}) {
    auto p = continuous_normal_form(2) + s * kX234;
    EXPECT_EQ(stabilizer_algebra(p).algebra_dim, 0);
  }
  // Exact membership: the I+ generators fix r·x1(...) + s·x2x3x4 iff s = 2√5·r.
  auto exact_pencil = [](const AS& s) {
    CubicX p;
    p.coeffs[monomial_index(0, 0, 0)] = AS(1);
    for (int k = 1; k < 4; ++k) p.coeffs[monomial_index(0, k, k)] = AS(-1);
    p.coeffs[monomial_index(1, 2, 3)] = s;
    return p;
  };
  auto fixed_by_all = [&](const CubicX& p) {
    for (const auto& g : iplus)
      if (!(act(g, p) == p)) return false;
    return true;
  };
  EXPECT_TRUE(fixed_by_all(exact_pencil(AS(0, 0, 2))));
  EXPECT_FALSE(fixed_by_all(exact_pencil(AS(0, 0, -2))));
  EXPECT_FALSE(fixed_by_all(exact_pencil(AS(4))));
  EXPECT_FALSE(fixed_by_all(exact_pencil(AS(Rational(447, 100)))));
  EXPECT_EQ(stabilizer_algebra(to_double(exact_pencil(AS(0, 0, 2)))).algebra_dim, 0);
}

TEST(Classify, NormalForms) {
  EXPECT_EQ(classify_continuous_orbit(continuous_normal_form(2)), "SO(3)");
  EXPECT_EQ(classify_continuous_orbit(continuous_normal_form(3)), "O(2)-speed-(1,2)");
  EXPECT_EQ(classify_continuous_orbit(continuous_normal_form(4)), "SO(2)⋉S3");
  EXPECT_EQ(classify_continuous_orbit(continuous_normal_form(5, 1.0, 0, 1.0)), "O(2)-reducible");
  EXPECT_EQ(classify_continuous_orbit(continuous_normal_form(6, 1.0, 0.8, 0.5)), "SO(2)");
  // r = 3v in case 5 lands on case 2.
  auto special = continuous_normal_form(5, 3.0, 0, 1.0);
  EXPECT_LT(coeff_distance(special, 6.0 * continuous_normal_form(2)), 1e-14);
  EXPECT_EQ(classify_continuous_orbit(special), "SO(3)");
  EXPECT_EQ(classify_continuous_orbit(CubicD{}), "SO(4)");
}

TEST(Classify, InvariantUnderRandomRotation) {
  std::mt19937_64 rng(17);
  const std::vector<std::pair<CubicD, std::string>> cases = {
      {continuous_normal_form(3), "O(2)-speed-(1,2)"},
      {continuous_normal_form(4), "SO(2)⋉S3"},
      {continuous_normal_form(5, -0.6, 0, 0.9), "O(2)-reducible"},
      {continuous_normal_form(6, 1.0, 0.8, 0.5), "SO(2)"}};
  for (int t = 0; t < 5; ++t)
    for (const auto& [p, label] : cases) EXPECT_EQ(classify_continuous_orbit(act(random_rotation(rng), p)), label);
}

TEST(Classify, Errors) {
  std::mt19937_64 rng(18);
  EXPECT_THROW(classify_continuous_orbit(random_harmonic(rng)), std::invalid_argument);
}

TEST(Lemmas, StarFamily) {
  auto generic = check_lemma_stabilizers(LemmaFamily::Star, 1.0, 0.6, 0.3, 0.7);
  EXPECT_EQ(generic.label, "Z3");
  EXPECT_TRUE(generic.verified);
  auto order18 = check_lemma_stabilizers(LemmaFamily::Star, 1.0, 0.0, 0.4, 0.9);
  EXPECT_EQ(order18.label, "order-18");
  EXPECT_TRUE(order18.verified);
  auto d3 = check_lemma_stabilizers(LemmaFamily::Star, 1.0, 0.5, 0.8, 0.0);
  EXPECT_EQ(d3.label, "D3");
  EXPECT_TRUE(d3.verified);
  auto cont = check_lemma_stabilizers(LemmaFamily::Star, 0.0, 0.5, 0.8, 0.1);
  EXPECT_EQ(cont.label, "continuous");
  EXPECT_EQ(cont.condition, "r=0");
  EXPECT_TRUE(cont.verified);
}

TEST(Lemmas, StarUEqualsVEqualsZeroIsDihedral) {
  // r = s = 1, u = v = 0: the order-18 elements do not all fix this cubic; D3 does.
  auto res = check_lemma_stabilizers(LemmaFamily::Star, 1.0, 1.0, 0.0, 0.0);
  EXPECT_EQ(res.label, "D3");
  EXPECT_TRUE(res.verified);
  auto p = lemma_cubic(LemmaFamily::Star, 1.0, 1.0, 0.0, 0.0);
  EXPECT_GT(fixed_residual(p, {plane_rotation(0, 2 * M_PI / 3)}), 0.1);
}

TEST(Lemmas, DoubleStarFamily) {
  auto d6 = check_lemma_stabilizers(LemmaFamily::DoubleStar, 0.0, 1.0, 1.0, 0.0);
  EXPECT_EQ(d6.label, "D6");
  EXPECT_TRUE(d6.verified);
  auto d6r = check_lemma_stabilizers(LemmaFamily::DoubleStar, 0.0, 1.0, 0.6, -0.8);
  EXPECT_EQ(d6r.label, "D6");
  EXPECT_TRUE(d6r.verified);
  auto d3 = check_lemma_stabilizers(LemmaFamily::DoubleStar, 1.0, 0.0, 0.5, 0.9);
  EXPECT_EQ(d3.label, "D3");
  EXPECT_TRUE(d3.verified);
  auto z3 = check_lemma_stabilizers(LemmaFamily::DoubleStar, 1.0, 0.7, 0.5, 0.9);
  EXPECT_EQ(z3.label, "Z3");
  EXPECT_TRUE(z3.verified);
  auto cont = check_lemma_stabilizers(LemmaFamily::DoubleStar, 1.0, 0.0, 0.0, 0.0);
  EXPECT_EQ(cont.label, "continuous");
  EXPECT_TRUE(cont.verified);
}
