#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <array>
#include <initializer_list>
#include <string>

#include "umbilic4/field.hpp"
#include "umbilic4/quat.hpp"

namespace umbilic4 {

inline constexpr int kNumMonomials = 20;

/// Monomial x_i x_j x_k with 0 <= i <= j <= k <= 3; index order is lexicographic in (i, j, k):
/// x1³, x1²x2, x1²x3, x1²x4, x1x2², x1x2x3, ..., x4³.
struct Monomial {
  int i, j, k;
};

const std::array<Monomial, kNumMonomials>& monomials();
int monomial_index(int a, int b, int c);  // any argument order
/// Number of distinct orderings of (i, j, k): 1, 3 or 6.
int monomial_multiplicity(int m);
/// "x1^2*x3" style name (1-based variables).
std::string monomial_name(int m);

template <class T>
using Tensor3 = std::array<T, 64>;
inline constexpr int tidx(int a, int b, int c) { return 16 * a + 4 * b + c; }

/// Cubic form P(x) = Σ coeffs[m]·x^m, equivalently Σ h_ijk x_i x_j x_k with h fully symmetric.
template <class T>
struct SymmetricCubic {
  std::array<T, kNumMonomials> coeffs{};

  /// Fully symmetric h with h_ijk = coeff / multiplicity.
  Tensor3<T> tensor() const {
    Tensor3<T> h{};
    const auto& ms = monomials();
    for (int m = 0; m < kNumMonomials; ++m) {
      if (exactly_zero(coeffs[m])) continue;
      T v = coeffs[m] / T(monomial_multiplicity(m));
      const int idx[3] = {ms[m].i, ms[m].j, ms[m].k};
      const int perm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
      for (const auto& p : perm) h[tidx(idx[p[0]], idx[p[1]], idx[p[2]])] = v;
    }
    return h;
  }

  /// Collects Σ t_abc x_a x_b x_c; t need not be symmetric.
  static SymmetricCubic from_tensor(const Tensor3<T>& t) {
    SymmetricCubic out;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c)
          if (!exactly_zero(t[tidx(a, b, c)])) out.coeffs[monomial_index(a, b, c)] += t[tidx(a, b, c)];
    return out;
  }

  template <class V>
  T operator()(const V& x) const {
    T acc{};
    const auto& ms = monomials();
    for (int m = 0; m < kNumMonomials; ++m) acc += coeffs[m] * x[ms[m].i] * x[ms[m].j] * x[ms[m].k];
    return acc;
  }

  SymmetricCubic& operator+=(const SymmetricCubic& o) {
    for (int m = 0; m < kNumMonomials; ++m) coeffs[m] += o.coeffs[m];
    return *this;
  }
  SymmetricCubic& operator-=(const SymmetricCubic& o) {
    for (int m = 0; m < kNumMonomials; ++m) coeffs[m] -= o.coeffs[m];
    return *this;
  }
  SymmetricCubic& operator*=(const T& s) {
    for (auto& c : coeffs) c *= s;
    return *this;
  }
  friend SymmetricCubic operator+(SymmetricCubic a, const SymmetricCubic& b) { return a += b; }
  friend SymmetricCubic operator-(SymmetricCubic a, const SymmetricCubic& b) { return a -= b; }
  friend SymmetricCubic operator*(const T& s, SymmetricCubic a) { return a *= s; }
  friend bool operator==(const SymmetricCubic& a, const SymmetricCubic& b) { return a.coeffs == b.coeffs; }
};

using CubicD = SymmetricCubic<double>;
using CubicX = SymmetricCubic<AlgebraicScalar>;

/// Single-monomial cubic with coefficient 1, e.g. mono(0,1,1) = x1 x2².
template <class T = double>
SymmetricCubic<T> mono(int a, int b, int c) {
  SymmetricCubic<T> p;
  p.coeffs[monomial_index(a, b, c)] = T(1);
  return p;
}

struct CubicTerm {
  double coeff;
  int a, b, c;  // 1-based variable indices
};

/// Builds Σ coeff·x_a x_b x_c, e.g. {{1, 1, 1, 1}, {-3, 1, 2, 2}} = x1³ - 3x1x2².
CubicD cubic_from_terms(std::initializer_list<CubicTerm> terms);

/// P(M y) as a cubic in y, i.e. act(Mᵀ, P).
CubicD substitute(const CubicD& p, const Eigen::Matrix4d& m);

/// ΔP as a linear form: (ΔP)_k = 6 Σ_i h_iik.
template <class T>
std::array<T, 4> laplacian(const SymmetricCubic<T>& p) {
  auto h = p.tensor();
  std::array<T, 4> out{};
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i) out[k] += T(6) * h[tidx(i, i, k)];
  return out;
}

/// |x|²·ℓ as a cubic.
template <class T>
SymmetricCubic<T> radial_times(const std::array<T, 4>& l) {
  SymmetricCubic<T> out;
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i) out.coeffs[monomial_index(i, i, k)] += l[k];
  return out;
}

/// Harmonic part H = P - |x|²·ΔP/12, using Δ(|x|² x_k) = 12 x_k on ℝ⁴.
template <class T>
SymmetricCubic<T> harmonic_project(const SymmetricCubic<T>& p) {
  auto lap = laplacian(p);
  for (auto& v : lap) v = v / T(12);
  return p - radial_times(lap);
}

/// (A·P)(x) = P(xA) with x a row vector: h'_abc = Σ A_ai A_bj A_ck h_ijk.
template <class T>
SymmetricCubic<T> act(const Mat4<T>& a, const SymmetricCubic<T>& p) {
  Tensor3<T> h = p.tensor(), t1{}, t2{}, t3{};
  for (int x = 0; x < 4; ++x)
    for (int i = 0; i < 4; ++i) {
      if (exactly_zero(a[x][i])) continue;
      for (int j = 0; j < 16; ++j) t1[16 * x + j] += a[x][i] * h[16 * i + j];
    }
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y)
      for (int j = 0; j < 4; ++j) {
        if (exactly_zero(a[y][j])) continue;
        for (int k = 0; k < 4; ++k) t2[tidx(x, y, k)] += a[y][j] * t1[tidx(x, j, k)];
      }
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y)
      for (int z = 0; z < 4; ++z)
        for (int k = 0; k < 4; ++k) {
          if (exactly_zero(a[z][k])) continue;
          t3[tidx(x, y, z)] += a[z][k] * t2[tidx(x, y, k)];
        }
  return SymmetricCubic<T>::from_tensor(t3);
}

CubicD act(const Eigen::Matrix4d& a, const CubicD& p);

/// d/dt P(x·exp(tX)) at t = 0.
CubicD algebra_act(const Eigen::Matrix4d& x, const CubicD& p);

CubicD to_double(const CubicX& p);
Eigen::Matrix<double, kNumMonomials, 1> to_vector(const CubicD& p);
CubicD from_vector(const Eigen::Matrix<double, kNumMonomials, 1>& v);

double max_abs_coeff(const CubicD& p);

/// Standard skew basis E_ab = e_a e_bᵀ - e_b e_aᵀ, (a,b) = (0,1),(0,2),(0,3),(1,2),(1,3),(2,3).
const std::array<Eigen::Matrix4d, 6>& skew_basis();

/// Block rotation diag(R(α), R(β)) acting on (x1,x2) and (x3,x4) as column vectors.
Eigen::Matrix4d plane_rotation(double alpha, double beta);

nlohmann::json cubic_to_json(const CubicD& p);
nlohmann::json cubic_to_json(const CubicX& p);
/// Accepts {"coeffs": [...]} or a bare 20-array; entries are numbers or exact strings.
CubicD cubic_from_json(const nlohmann::json& j);

}  // namespace umbilic4
