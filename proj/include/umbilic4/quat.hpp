#pragma once

#include <Eigen/Dense>

#include <array>
#include <stdexcept>

#include "umbilic4/field.hpp"

namespace umbilic4 {

template <class T>
using Mat4 = std::array<std::array<T, 4>, 4>;

template <class T>
struct Quaternion {
  T w{}, x{}, y{}, z{};

  T& operator[](int k) { return k == 0 ? w : k == 1 ? x : k == 2 ? y : z; }
  const T& operator[](int k) const { return k == 0 ? w : k == 1 ? x : k == 2 ? y : z; }

  Quaternion conj() const { return {w, -x, -y, -z}; }
  T norm2() const { return w * w + x * x + y * y + z * z; }
  Quaternion operator-() const { return {-w, -x, -y, -z}; }

  friend Quaternion operator*(const Quaternion& a, const Quaternion& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
  }
  friend Quaternion operator+(const Quaternion& a, const Quaternion& b) {
    return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend Quaternion operator*(const T& s, const Quaternion& q) { return {s * q.w, s * q.x, s * q.y, s * q.z}; }
  friend bool operator==(const Quaternion& a, const Quaternion& b) {
    return a.w == b.w && a.x == b.x && a.y == b.y && a.z == b.z;
  }
};

using QuatX = Quaternion<AlgebraicScalar>;
using QuatD = Quaternion<double>;

inline QuatD to_double(const QuatX& q) {
  return {q.w.to_double(), q.x.to_double(), q.y.to_double(), q.z.to_double()};
}

/// Unordered pair [l, r] = {(l, r), (-l, -r)}; canonical form has the first nonzero
/// component of `left` positive.
template <class T>
struct RotationPair {
  Quaternion<T> left, right;

  RotationPair canonical() const {
    for (int k = 0; k < 4; ++k) {
      int sg = sign_of(left[k]);
      if (sg > 0) return *this;
      if (sg < 0) return {-left, -right};
    }
    return *this;
  }
  friend bool operator==(const RotationPair& a, const RotationPair& b) {
    auto ca = a.canonical(), cb = b.canonical();
    return ca.left == cb.left && ca.right == cb.right;
  }
};

namespace detail {
inline bool is_unit(const QuatX& q) { return q.norm2() == AlgebraicScalar(1); }
inline bool is_unit(const QuatD& q) { return std::abs(q.norm2() - 1.0) < 1e-12; }
}  // namespace detail

/// Matrix of x -> l x r̄ in the basis {1, i, j, k}, acting on column vectors.
template <class T>
Mat4<T> rotation_from_pair(const Quaternion<T>& l, const Quaternion<T>& r) {
  if (!detail::is_unit(l) || !detail::is_unit(r))
    throw std::invalid_argument("rotation_from_pair: quaternions must be unit");
  Mat4<T> m{};
  const Quaternion<T> rb = r.conj();
  for (int col = 0; col < 4; ++col) {
    Quaternion<T> e{};
    e[col] = T(1);
    Quaternion<T> img = l * e * rb;
    for (int row = 0; row < 4; ++row) m[row][col] = img[row];
  }
  return m;
}

template <class T>
Mat4<T> rotation_from_pair(const RotationPair<T>& p) {
  return rotation_from_pair(p.left, p.right);
}

template <class T>
Mat4<T> identity4() {
  Mat4<T> m{};
  for (int i = 0; i < 4; ++i) m[i][i] = T(1);
  return m;
}

template <class T>
Mat4<T> operator*(const Mat4<T>& a, const Mat4<T>& b) {
  Mat4<T> c{};
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) {
      if (exactly_zero(a[i][k])) continue;
      for (int j = 0; j < 4; ++j) c[i][j] += a[i][k] * b[k][j];
    }
  return c;
}

template <class T>
Mat4<T> transpose(const Mat4<T>& a) {
  Mat4<T> t{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) t[i][j] = a[j][i];
  return t;
}

template <class T>
Mat4<T> negate(Mat4<T> a) {
  for (auto& row : a)
    for (auto& v : row) v = -v;
  return a;
}

/// Determinant by elimination over the field T.
template <class T>
T determinant(Mat4<T> a) {
  T det(1);
  for (int c = 0; c < 4; ++c) {
    int piv = -1;
    for (int r = c; r < 4; ++r)
      if (!exactly_zero(a[r][c])) { piv = r; break; }
    if (piv < 0) return T(0);
    if (piv != c) { std::swap(a[piv], a[c]); det = -det; }
    det *= a[c][c];
    for (int r = c + 1; r < 4; ++r) {
      if (exactly_zero(a[r][c])) continue;
      T f = a[r][c] / a[c][c];
      for (int k = c; k < 4; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

inline Eigen::Matrix4d to_eigen(const Mat4<AlgebraicScalar>& a) {
  Eigen::Matrix4d m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = a[i][j].to_double();
  return m;
}

inline Eigen::Matrix4d to_eigen(const Mat4<double>& a) {
  Eigen::Matrix4d m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = a[i][j];
  return m;
}

inline Mat4<double> from_eigen(const Eigen::Matrix4d& m) {
  Mat4<double> a{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a[i][j] = m(i, j);
  return a;
}

}  // namespace umbilic4
