#include "umbilic4/cubic.hpp"

#include <algorithm>
#include <stdexcept>

namespace umbilic4 {

const std::array<Monomial, kNumMonomials>& monomials() {
  static const auto table = [] {
    std::array<Monomial, kNumMonomials> t{};
    int m = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j)
        for (int k = j; k < 4; ++k) t[m++] = {i, j, k};
    return t;
  }();
  return table;
}

int monomial_index(int a, int b, int c) {
  static const auto lookup = [] {
    std::array<int, 64> l{};
    const auto& ms = monomials();
    for (int m = 0; m < kNumMonomials; ++m) l[tidx(ms[m].i, ms[m].j, ms[m].k)] = m;
    return l;
  }();
  int s[3] = {a, b, c};
  std::sort(s, s + 3);
  return lookup[tidx(s[0], s[1], s[2])];
}

int monomial_multiplicity(int m) {
  const auto& x = monomials()[m];
  if (x.i == x.j && x.j == x.k) return 1;
  if (x.i == x.j || x.j == x.k) return 3;
  return 6;
}

std::string monomial_name(int m) {
  const auto& x = monomials()[m];
  int count[4] = {0, 0, 0, 0};
  ++count[x.i];
  ++count[x.j];
  ++count[x.k];
  std::string out;
  for (int v = 0; v < 4; ++v) {
    if (!count[v]) continue;
    if (!out.empty()) out += '*';
    out += "x" + std::to_string(v + 1);
    if (count[v] > 1) out += "^" + std::to_string(count[v]);
  }
  return out;
}

CubicD cubic_from_terms(std::initializer_list<CubicTerm> terms) {
  CubicD p;
  for (const auto& t : terms) p.coeffs[monomial_index(t.a - 1, t.b - 1, t.c - 1)] += t.coeff;
  return p;
}

CubicD act(const Eigen::Matrix4d& a, const CubicD& p) { return act(from_eigen(a), p); }

CubicD substitute(const CubicD& p, const Eigen::Matrix4d& m) { return act(Eigen::Matrix4d(m.transpose()), p); }

CubicD algebra_act(const Eigen::Matrix4d& x, const CubicD& p) {
  // (d/dt) h'_abc = X_ai h_ibc + X_bi h_aic + X_ci h_abi
  auto h = p.tensor();
  Tensor3<double> out{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        double v = 0;
        for (int i = 0; i < 4; ++i)
          v += x(a, i) * h[tidx(i, b, c)] + x(b, i) * h[tidx(a, i, c)] + x(c, i) * h[tidx(a, b, i)];
        out[tidx(a, b, c)] = v;
      }
  return CubicD::from_tensor(out);
}

CubicD to_double(const CubicX& p) {
  CubicD out;
  for (int m = 0; m < kNumMonomials; ++m) out.coeffs[m] = p.coeffs[m].to_double();
  return out;
}

Eigen::Matrix<double, kNumMonomials, 1> to_vector(const CubicD& p) {
  Eigen::Matrix<double, kNumMonomials, 1> v;
  for (int m = 0; m < kNumMonomials; ++m) v(m) = p.coeffs[m];
  return v;
}

CubicD from_vector(const Eigen::Matrix<double, kNumMonomials, 1>& v) {
  CubicD p;
  for (int m = 0; m < kNumMonomials; ++m) p.coeffs[m] = v(m);
  return p;
}

double max_abs_coeff(const CubicD& p) {
  double mx = 0;
  for (double c : p.coeffs) mx = std::max(mx, std::abs(c));
  return mx;
}

const std::array<Eigen::Matrix4d, 6>& skew_basis() {
  static const auto basis = [] {
    std::array<Eigen::Matrix4d, 6> b;
    int n = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        b[n].setZero();
        b[n](i, j) = 1;
        b[n](j, i) = -1;
        ++n;
      }
    return b;
  }();
  return basis;
}

Eigen::Matrix4d plane_rotation(double alpha, double beta) {
  Eigen::Matrix4d r = Eigen::Matrix4d::Zero();
  r(0, 0) = r(1, 1) = std::cos(alpha);
  r(1, 0) = std::sin(alpha);
  r(0, 1) = -std::sin(alpha);
  r(2, 2) = r(3, 3) = std::cos(beta);
  r(3, 2) = std::sin(beta);
  r(2, 3) = -std::sin(beta);
  return r;
}

namespace {
nlohmann::json monomial_names() {
  auto names = nlohmann::json::array();
  for (int m = 0; m < kNumMonomials; ++m) names.push_back(monomial_name(m));
  return names;
}
}  // namespace

nlohmann::json cubic_to_json(const CubicD& p) {
  return {{"monomials", monomial_names()}, {"coeffs", p.coeffs}};
}

nlohmann::json cubic_to_json(const CubicX& p) {
  auto coeffs = nlohmann::json::array();
  for (const auto& c : p.coeffs) coeffs.push_back(c.to_string());
  return {{"monomials", monomial_names()}, {"coeffs", coeffs}};
}

CubicD cubic_from_json(const nlohmann::json& j) {
  const nlohmann::json& arr = j.is_object() ? j.at("coeffs") : j;
  if (!arr.is_array() || arr.size() != kNumMonomials)
    throw std::invalid_argument("cubic needs exactly 20 coefficients");
  CubicD p;
  for (int m = 0; m < kNumMonomials; ++m) {
    const auto& v = arr[m];
    if (v.is_number())
      p.coeffs[m] = v.get<double>();
    else if (v.is_string())
      p.coeffs[m] = AlgebraicScalar::parse(v.get<std::string>()).to_double();
    else
      throw std::invalid_argument("cubic coefficient must be a number or string");
  }
  return p;
}

}  // namespace umbilic4
