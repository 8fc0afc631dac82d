#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "umbilic4/groups.hpp"

using namespace umbilic4;
using AS = AlgebraicScalar;

namespace {

QuatX q(int w, int x, int y, int z) { return {AS(w), AS(x), AS(y), AS(z)}; }

QuatD random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  QuatD v{n(rng), n(rng), n(rng), n(rng)};
  double s = std::sqrt(v.norm2());
  return {v.w / s, v.x / s, v.y / s, v.z / s};
}

bool contains(const std::vector<MatX>& set, const MatX& m) {
  for (const auto& e : set)
    if (e == m) return true;
  return false;
}

}  // namespace

TEST(Quaternion, UnitRules) {
  EXPECT_EQ(q(0, 1, 0, 0) * q(0, 0, 1, 0), q(0, 0, 0, 1));
  EXPECT_EQ(q(0, 0, 1, 0) * q(0, 0, 0, 1), q(0, 1, 0, 0));
  EXPECT_EQ(q(0, 0, 0, 1) * q(0, 1, 0, 0), q(0, 0, 1, 0));
  EXPECT_EQ(q(0, 1, 0, 0) * q(0, 1, 0, 0), q(-1, 0, 0, 0));
  auto t = quat_t();
  EXPECT_EQ(q(1, 0, 0, 0) * t, t);
  EXPECT_EQ(t * t * t, q(-1, 0, 0, 0));
}

TEST(Quaternion, NormIsMultiplicative) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  for (int k = 0; k < 50; ++k) {
    QuatD a{n(rng), n(rng), n(rng), n(rng)}, b{n(rng), n(rng), n(rng), n(rng)};
    EXPECT_NEAR((a * b).norm2(), a.norm2() * b.norm2(), 1e-10 * a.norm2() * b.norm2());
  }
}

TEST(RotationPair, KnownMatrices) {
  EXPECT_EQ(rotation_from_pair(q(1, 0, 0, 0), q(1, 0, 0, 0)), identity4<AS>());
  MatX ii = rotation_from_pair(q(0, 1, 0, 0), q(0, 1, 0, 0));
  MatX diag{};
  diag[0][0] = 1; diag[1][1] = 1; diag[2][2] = -1; diag[3][3] = -1;
  EXPECT_EQ(ii, diag);
  // [t,t] fixes 1 and cycles i -> j -> k
  MatX tt = rotation_from_pair(quat_t(), quat_t());
  MatX cyc{};
  cyc[0][0] = 1; cyc[2][1] = 1; cyc[3][2] = 1; cyc[1][3] = 1;
  EXPECT_EQ(tt, cyc);
}

TEST(RotationPair, RejectsNonUnit) {
  EXPECT_THROW(rotation_from_pair(q(1, 1, 0, 0), q(1, 0, 0, 0)), std::invalid_argument);
}

TEST(RotationPair, DoubleCoverAndHomomorphism) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 100; ++k) {
    auto l1 = random_unit(rng), r1 = random_unit(rng), l2 = random_unit(rng), r2 = random_unit(rng);
    Eigen::Matrix4d a = to_eigen(rotation_from_pair(l1, r1));
    Eigen::Matrix4d b = to_eigen(rotation_from_pair(l2, r2));
    Eigen::Matrix4d ab = to_eigen(rotation_from_pair(l1 * l2, r1 * r2));
    EXPECT_LT((a * b - ab).norm(), 1e-12);
    EXPECT_LT((a - to_eigen(rotation_from_pair(-l1, -r1))).norm(), 1e-15);
    EXPECT_LT((a.transpose() * a - Eigen::Matrix4d::Identity()).norm(), 1e-12);
    EXPECT_NEAR(a.determinant(), 1.0, 1e-12);
  }
}

TEST(RotationPair, CanonicalForm) {
  RotationPair<AS> p{-quat_t(), -quat_o()};
  auto c = p.canonical();
  EXPECT_EQ(c.left, quat_t());
  EXPECT_EQ(c.right, quat_o());
  EXPECT_TRUE(p == (RotationPair<AS>{quat_t(), quat_o()}));
}

TEST(BinarySubgroups, Orders) {
  EXPECT_EQ(build_binary_subgroup_exact(BinaryKind::T).size(), 24u);
  EXPECT_EQ(build_binary_subgroup_exact(BinaryKind::O).size(), 48u);
  EXPECT_EQ(build_binary_subgroup_exact(BinaryKind::I).size(), 120u);
  EXPECT_EQ(build_binary_subgroup_exact(BinaryKind::IPlus).size(), 120u);
  EXPECT_EQ(build_binary_subgroup(BinaryKind::D, 3).size(), 12u);
}

TEST(BinarySubgroups, ClosedAndDistinct) {
  for (auto kind : {BinaryKind::T, BinaryKind::O, BinaryKind::I, BinaryKind::IPlus}) {
    auto g = build_binary_subgroup_exact(kind);
    std::set<std::string> keys;
    auto key = [](const QuatX& x) {
      return x.w.to_string() + "|" + x.x.to_string() + "|" + x.y.to_string() + "|" + x.z.to_string();
    };
    for (const auto& x : g) {
      EXPECT_EQ(x.norm2(), AS(1));
      keys.insert(key(x));
    }
    ASSERT_EQ(keys.size(), g.size());
    for (const auto& a : g)
      for (const auto& b : g) ASSERT_TRUE(keys.count(key(a * b)));
  }
}

TEST(BinarySubgroups, CyclicFour) {
  auto c4 = build_binary_subgroup(BinaryKind::C, 4);
  ASSERT_EQ(c4.size(), 4u);
  const double expect[4][4] = {{1, 0, 0, 0}, {0, 0, 0, 1}, {-1, 0, 0, 0}, {0, 0, 0, -1}};
  for (int k = 0; k < 4; ++k)
    for (int c = 0; c < 4; ++c) EXPECT_NEAR(c4[k][c], expect[k][c], 1e-15);
}

TEST(BinarySubgroups, Sqrt5AutomorphismInvolutive) {
  auto i = build_binary_subgroup_exact(BinaryKind::I);
  for (const auto& p : i) {
    QuatX pp{p.w.conj5(), p.x.conj5(), p.y.conj5(), p.z.conj5()};
    QuatX back{pp.w.conj5(), pp.x.conj5(), pp.y.conj5(), pp.z.conj5()};
    EXPECT_EQ(back, p);
  }
}

TEST(SO4Subgroups, OrdersAndCentralSymmetry) {
  const std::map<std::string, std::size_t> expected = {{"T", 12}, {"O", 24}, {"O+", 24}, {"I", 60}, {"I+", 60}};
  for (const auto& [label, order] : expected) {
    auto g = build_so4_subgroup(label);
    EXPECT_EQ(g.order(), order) << label;
    EXPECT_FALSE(contains_minus_identity(g)) << label;
    for (const auto& m : g.exact_elements) {
      EXPECT_EQ(transpose(m) * m, identity4<AS>());
      EXPECT_EQ(determinant(m), AS(1));
    }
  }
}

TEST(SO4Subgroups, TetrahedralInsideBothOctahedral) {
  auto t = build_so4_subgroup("T"), o = build_so4_subgroup("O"), op = build_so4_subgroup("O+");
  for (const auto& m : t.exact_elements) {
    EXPECT_TRUE(contains(o.exact_elements, m));
    EXPECT_TRUE(contains(op.exact_elements, m));
  }
}

TEST(SO4Subgroups, IPlusHasNoFixedAxis) {
  auto g = build_so4_subgroup("I+");
  Eigen::MatrixXd stack(4 * g.generators.size(), 4);
  for (std::size_t k = 0; k < g.generators.size(); ++k)
    stack.block(4 * k, 0, 4, 4) = g.generators[k] - Eigen::Matrix4d::Identity();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stack);
  EXPECT_GT(svd.singularValues().minCoeff(), 1e-3);
}

TEST(Closure, SmallCases) {
  EXPECT_EQ(group_closure_order(std::vector<MatX>{identity4<AS>()}), 1u);
  auto gens = so4_generators_exact("T");
  gens.push_back(rotation_from_pair(quat_o(), -quat_o()));
  EXPECT_EQ(group_closure_order(gens), 24u);
  EXPECT_THROW(group_closure_order(so4_generators_exact("I"), 30), std::runtime_error);
}

TEST(Families, CyclicMatchesBruteForce) {
  // Independent enumeration of (p^i c^a, q^{si} d^b) modulo ±.
  auto brute = [](int m, int n, int r, int s) {
    std::set<std::vector<long long>> seen;
    auto kq = [](double a) { return QuatD{std::cos(a), 0, 0, std::sin(a)}; };
    for (int i = 0; i < 2 * m * r; ++i)
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < n; ++b) {
          QuatD l = kq(M_PI * i / (m * r) + 2 * M_PI * a / m);
          QuatD rr = kq(M_PI * s * i / (n * r) + 2 * M_PI * b / n);
          Eigen::Matrix4d mm = to_eigen(rotation_from_pair(l, rr));
          std::vector<long long> key;
          for (int x = 0; x < 16; ++x) key.push_back(std::llround(mm.data()[x] * 1e6));
          seen.insert(key);
        }
    return seen.size();
  };
  EXPECT_EQ(build_so4_subgroup("cyclic", {1, 1, 3, 1}).order(), 3u);
  EXPECT_EQ(brute(1, 1, 3, 1), 3u);
  for (auto p : {FamilyParams{3, 5, 2, 1}, FamilyParams{1, 3, 5, 3}, FamilyParams{3, 3, 4, 3}}) {
    auto g = build_so4_subgroup("cyclic", p);
    EXPECT_EQ(g.order(), static_cast<std::size_t>(p.m * p.n * p.r));
    EXPECT_EQ(g.order(), brute(p.m, p.n, p.r, p.s));
    EXPECT_FALSE(contains_minus_identity(g));
    auto d = build_so4_subgroup("dihedral", p);
    EXPECT_EQ(d.order(), static_cast<std::size_t>(2 * p.m * p.n * p.r));
    EXPECT_FALSE(contains_minus_identity(d));
  }
}

TEST(Families, RejectsEvenParameters) {
  EXPECT_THROW(build_so4_subgroup("cyclic", {2, 1, 3, 1}), std::invalid_argument);
  EXPECT_THROW(build_so4_subgroup("dihedral", {1, 4, 3, 1}), std::invalid_argument);
}

TEST(GroupJson, ExactStrings) {
  auto j = to_json(build_so4_subgroup("O"));
  EXPECT_EQ(j["order"], 24);
  EXPECT_EQ(j["elements"].size(), 24u);
  EXPECT_EQ(j["elements"][0].size(), 16u);
  EXPECT_TRUE(j["elements"][0][0].is_string());
}
