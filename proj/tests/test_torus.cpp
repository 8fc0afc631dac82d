#include <gtest/gtest.h>

#include <chrono>
#include <complex>
#include <numeric>
#include <random>
#include <set>

#include "umbilic4/stabilizer.hpp"
#include "umbilic4/torus.hpp"

using namespace umbilic4;

namespace {

std::set<std::string> names_of(const std::vector<int>& conds) {
  std::set<std::string> out;
  for (int k : conds) out.insert(condition_names()[k]);
  return out;
}

TorusElement te(long p1, long q1, long p2, long q2) { return {Rational(p1, q1), Rational(p2, q2)}; }

std::vector<TorusElement> lattice(int max_den) {
  std::vector<Rational> fr;
  for (long q = 1; q <= max_den; ++q)
    for (long p = 0; p < q; ++p)
      if (std::gcd(p, q) == 1) fr.emplace_back(p, q);
  std::vector<TorusElement> out;
  for (const auto& a : fr)
    for (const auto& b : fr) out.emplace_back(a, b);
  return out;
}

// Oracle: weyl images computed directly as the 8 signed permutations.
std::vector<TorusElement> weyl_images(const TorusElement& g) {
  return {{g.r, g.s}, {g.r, -g.s}, {-g.r, g.s}, {-g.r, -g.s},
          {g.s, g.r}, {g.s, -g.r}, {-g.s, g.r}, {-g.s, -g.r}};
}

}  // namespace

TEST(TorusElement, ReducesIntoUnitInterval) {
  TorusElement g(Rational(-1, 3), Rational(7, 4));
  EXPECT_EQ(g.r, Rational(2, 3));
  EXPECT_EQ(g.s, Rational(3, 4));
  EXPECT_EQ(element_order(g), 12);
  EXPECT_EQ(element_order(te(0, 1, 0, 1)), 1);
}

TEST(Conditions, Examples) {
  EXPECT_EQ(names_of(satisfied_conditions(te(2, 3, 1, 6))), (std::set<std::string>{"3r", "2s+r"}));
  EXPECT_EQ(satisfied_conditions(te(0, 1, 0, 1)).size(), 8u);
  EXPECT_EQ(names_of(satisfied_conditions(te(3, 5, 1, 5))), (std::set<std::string>{"2s+r", "2r-s"}));
  EXPECT_TRUE(satisfied_conditions(te(1, 7, 2, 7)).empty() == false);  // 2r - s = 0
  EXPECT_TRUE(satisfied_conditions(te(1, 7, 1, 11)).empty());
}

TEST(Conditions, IndependentCountDropsImpliedTriples) {
  EXPECT_EQ(independent_condition_count(satisfied_conditions(te(0, 1, 1, 7))), 1);
  EXPECT_EQ(independent_condition_count(satisfied_conditions(te(0, 1, 0, 1))), 6);
}

TEST(TorusMatrix, RotatesComplexCoordinates) {
  const double r = 0.13, s = 0.71;
  const Eigen::Matrix4d a = torus_matrix(r, s);
  const Eigen::RowVector4d x(0.3, -1.1, 0.7, 0.2);
  const Eigen::RowVector4d y = x * a;
  const std::complex<double> z1(x(0), x(1)), z2(x(2), x(3));
  const std::complex<double> i(0, 1);
  const auto w1 = std::exp(2 * M_PI * i * r) * z1, w2 = std::exp(2 * M_PI * i * s) * z2;
  EXPECT_NEAR(y(0), w1.real(), 1e-14);
  EXPECT_NEAR(y(1), w1.imag(), 1e-14);
  EXPECT_NEAR(y(2), w2.real(), 1e-14);
  EXPECT_NEAR(y(3), w2.imag(), 1e-14);
}

TEST(FixedBasis, DimensionsOfRepresentatives) {
  const std::vector<std::pair<TorusElement, int>> cases = {
      {te(2, 3, 1, 6), 4}, {te(3, 5, 1, 5), 4}, {te(1, 2, 1, 4), 4},
      {te(2, 3, 0, 1), 6}, {te(2, 3, 1, 3), 8}, {te(1, 2, 0, 1), 8}};
  for (const auto& [g, dim] : cases) {
    auto b = fixed_cubic_basis(g);
    EXPECT_EQ(b.dim, dim) << g.to_string();
    EXPECT_LT(b.max_fix_residual, 1e-13) << g.to_string();
    EXPECT_EQ(fixed_subspace({torus_matrix(g)}).dim, dim) << g.to_string();
  }
}

TEST(FixedBasis, OrderSixSpansReZ1CubedAndZ1Z2Squared) {
  auto b = fixed_cubic_basis(te(2, 3, 1, 6));
  const auto& gens = weight_generators();
  std::vector<CubicD> expected = {gens[0].re, gens[0].im, gens[2].re, gens[2].im};  // z1³, z1 z2²
  Eigen::MatrixXd got(kHarmonicDim, b.dim), both(kHarmonicDim, b.dim + 4);
  for (int k = 0; k < b.dim; ++k) got.col(k) = harmonic_coords(b.basis[k]);
  both << got, got;
  for (int k = 0; k < 4; ++k) both.col(b.dim + k) = harmonic_coords(expected[k]);
  EXPECT_EQ(Eigen::FullPivLU<Eigen::MatrixXd>(got).rank(), 4);
  EXPECT_EQ(Eigen::FullPivLU<Eigen::MatrixXd>(both).rank(), 4);
}

TEST(FixedBasis, ConditionThreeBasisMatchesExplicitCubic) {
  // 2r + s ∈ ℤ gives (x1² - x2²)x3 - 2x1x2x4 and its partner.
  auto b = fixed_cubic_basis(te(1, 7, 5, 7));
  ASSERT_EQ(names_of(b.conditions), (std::set<std::string>{"2r+s"}));
  const CubicD explicit_re = cubic_from_terms({{1, 1, 1, 3}, {-1, 2, 2, 3}, {-2, 1, 2, 4}});
  EXPECT_LT(max_abs_coeff(b.basis[0] - explicit_re), 1e-15);
}

TEST(FixedBasis, EmptyWhenNoConditionHolds) {
  auto b = fixed_cubic_basis(te(1, 7, 1, 11));
  EXPECT_EQ(b.dim, 0);
  EXPECT_EQ(fixed_subspace({torus_matrix(te(1, 7, 1, 11))}).dim, 0);
}

TEST(FixedBasis, AgreesWithRepresentationKernelOnLattice) {
  for (const auto& g : lattice(12)) {
    auto b = fixed_cubic_basis(g);
    ASSERT_EQ(b.dim, fixed_subspace({torus_matrix(g)}).dim) << g.to_string();
    ASSERT_LT(b.max_fix_residual, 1e-12) << g.to_string();
  }
}

TEST(WeightDecomposition, SixteenLabelsWithExpectedGenerator) {
  auto wd = weight_decomposition();
  ASSERT_EQ(wd.size(), 16u);
  std::set<std::pair<int, int>> labels;
  for (const auto& c : wd) {
    labels.insert({c.weight.a, c.weight.b});
    EXPECT_EQ((std::abs(c.weight.a) + std::abs(c.weight.b)) % 2, 1);
  }
  EXPECT_EQ(labels.size(), 16u);
  // z1² z̄2 with z1 = x1 + i x2, z2 = x3 + i x4.
  auto it = std::find_if(wd.begin(), wd.end(), [](const ComplexCubic& c) { return c.weight == WeightLabel{2, -1}; });
  ASSERT_NE(it, wd.end());
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  for (int t = 0; t < 10; ++t) {
    Eigen::Vector4d x(n(rng), n(rng), n(rng), n(rng));
    std::complex<double> z1(x(0), x(1)), z2(x(2), x(3));
    auto v = z1 * z1 * std::conj(z2);
    EXPECT_NEAR(it->re(x), v.real(), 1e-12);
    EXPECT_NEAR(it->im(x), v.imag(), 1e-12);
  }
}

TEST(WeightDecomposition, EigenvalueOnZ2Cubed) {
  auto wd = weight_decomposition();
  auto it = std::find_if(wd.begin(), wd.end(), [](const ComplexCubic& c) { return c.weight == WeightLabel{0, 3}; });
  const Eigen::Matrix4d a = torus_matrix(0, 1.0 / 3);
  EXPECT_LT(max_abs_coeff(act(a, it->re) - it->re), 1e-14);
  EXPECT_LT(max_abs_coeff(act(a, it->im) - it->im), 1e-14);
}

TEST(WeightDecomposition, RepresentationIsDiagonal) {
  auto wd = weight_decomposition();
  Eigen::Matrix<std::complex<double>, 16, 16> w;
  for (int k = 0; k < 16; ++k)
    w.col(k) = harmonic_coords(wd[k].re).cast<std::complex<double>>() +
               std::complex<double>(0, 1) * harmonic_coords(wd[k].im).cast<std::complex<double>>();
  const Eigen::Matrix<std::complex<double>, 16, 16> winv = w.inverse();
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> den(1, 40);
  for (int t = 0; t < 20; ++t) {
    int q1 = den(rng), q2 = den(rng);
    TorusElement g(Rational(std::uniform_int_distribution<int>(0, q1 - 1)(rng), q1),
                   Rational(std::uniform_int_distribution<int>(0, q2 - 1)(rng), q2));
    const Eigen::Matrix<std::complex<double>, 16, 16> d =
        winv * rep_matrix(torus_matrix(g)).cast<std::complex<double>>() * w;
    double off = 0;
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < 16; ++j)
        if (i != j) off = std::max(off, std::abs(d(i, j)));
    EXPECT_LT(off, 1e-12) << g.to_string();
    for (int k = 0; k < 16; ++k) {
      const double phase = 2 * M_PI * (wd[k].weight.a * g.r.get_d() + wd[k].weight.b * g.s.get_d());
      EXPECT_LT(std::abs(d(k, k) - std::polar(1.0, phase)), 1e-12) << g.to_string() << " k=" << k;
    }
  }
}

TEST(Weyl, Examples) {
  EXPECT_EQ(weyl_reduce(te(1, 6, 2, 3)), te(2, 3, 1, 6));
  EXPECT_EQ(weyl_reduce(te(0, 1, 0, 1)), te(0, 1, 0, 1));
  EXPECT_EQ(weyl_reduce(te(2, 7, 3, 11)), weyl_reduce(te(2, 7, 8, 11)));
}

TEST(Weyl, ConstantOnOrbitsAndIdempotent) {
  for (const auto& g : lattice(10)) {
    const TorusElement rep = weyl_reduce(g);
    ASSERT_TRUE(in_chamber(rep)) << g.to_string();
    ASSERT_EQ(weyl_reduce(rep), rep) << g.to_string();
    for (const auto& im : weyl_images(g)) ASSERT_EQ(weyl_reduce(im), rep) << g.to_string();
    // Fixed dimension is a class function.
    ASSERT_EQ(fixed_cubic_basis(rep).dim, fixed_cubic_basis(g).dim) << g.to_string();
  }
}

TEST(SmallOrders, SevenCasesUpToDenominatorSixty) {
  const auto t0 = std::chrono::steady_clock::now();
  auto scan = enumerate_small_orders(60);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_LT(secs, 60.0);
  EXPECT_LE(scan.max_order_hit, 6);
  ASSERT_EQ(scan.cases.size(), 7u);
  std::vector<long> orders;
  for (const auto& c : scan.cases) orders.push_back(c.order);
  EXPECT_EQ(orders, (std::vector<long>{6, 5, 4, 3, 3, 2, 1}));
  auto has = [&](long order, const TorusElement& g, int dim) {
    return std::any_of(scan.cases.begin(), scan.cases.end(),
                       [&](const SmallOrderCase& c) { return c.order == order && c.g == g && c.fixed_dim == dim; });
  };
  EXPECT_TRUE(has(6, te(2, 3, 1, 6), 4));
  EXPECT_TRUE(has(5, te(3, 5, 1, 5), 4));
  EXPECT_TRUE(has(4, te(1, 2, 1, 4), 4));
  EXPECT_TRUE(has(3, te(2, 3, 0, 1), 6));
  EXPECT_TRUE(has(3, te(2, 3, 1, 3), 8));
  EXPECT_TRUE(has(2, te(1, 2, 0, 1), 8));
  EXPECT_TRUE(has(1, te(0, 1, 0, 1), 16));
  for (const auto& c : scan.cases) EXPECT_EQ(c.fixed_dim, fixed_subspace({torus_matrix(c.g)}).dim);
}

TEST(SmallOrders, SingleConditionLeavesContinuousStabilizer) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  int checked = 0;
  for (const auto& g : lattice(12)) {
    auto conds = satisfied_conditions(g);
    if (independent_condition_count(conds) != 1) continue;
    auto b = fixed_cubic_basis(g);
    CubicD p;
    for (const auto& q : b.basis) p += n(rng) * q;
    ASSERT_GE(stabilizer_algebra(p).algebra_dim, 1) << g.to_string();
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(Json, ScanTable) {
  auto j = to_json(enumerate_small_orders(8));
  EXPECT_EQ(j["cases"].size(), 7u);
  EXPECT_EQ(j["cases"][0]["r"], "2/3");
  EXPECT_EQ(j["cases"][0]["s"], "1/6");
  EXPECT_EQ(to_json(fixed_cubic_basis(te(1, 2, 0, 1)))["dim"], 8);
}
