#include "umbilic4/groups.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace umbilic4 {

namespace {

using AS = AlgebraicScalar;

QuatX qx(AS w, AS x, AS y, AS z) { return {std::move(w), std::move(x), std::move(y), std::move(z)}; }

std::vector<QuatX> quaternion_group_q8() {
  std::vector<QuatX> out;
  for (int k = 0; k < 4; ++k)
    for (int sg : {1, -1}) {
      QuatX q{};
      q[k] = AS(sg);
      out.push_back(q);
    }
  return out;
}

std::vector<QuatX> cosets(const QuatX& g, int count, const std::vector<QuatX>& base) {
  std::vector<QuatX> out;
  QuatX pw = qx(1, 0, 0, 0);
  for (int k = 0; k < count; ++k) {
    for (const auto& b : base) out.push_back(pw * b);
    pw = pw * g;
  }
  return out;
}

QuatX conj5(const QuatX& q) { return {q.w.conj5(), q.x.conj5(), q.y.conj5(), q.z.conj5()}; }

QuatD kexp(double angle) { return {std::cos(angle), 0.0, 0.0, std::sin(angle)}; }

QuatD power(QuatD q, int e) {
  QuatD out{1.0, 0.0, 0.0, 0.0};
  for (int k = 0; k < e; ++k) out = out * q;
  return out;
}

// Rounded entries used as a hash key; elements of the groups here are far apart.
std::string numeric_key(const Eigen::Matrix4d& m) {
  std::string key;
  key.reserve(16 * 12);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      long long v = std::llround(m(i, j) * 1e8);
      if (v == 0) v = 0;  // avoid -0
      key += std::to_string(v);
      key += ',';
    }
  return key;
}

Eigen::Matrix4d pair_matrix(const QuatD& l, const QuatD& r) {
  return to_eigen(rotation_from_pair(l, r));
}

MatX pair_matrix(const QuatX& l, const QuatX& r) { return rotation_from_pair(l, r); }

}  // namespace

QuatX quat_t() { return qx(AS::ratio(1, 2), AS::ratio(1, 2), AS::ratio(1, 2), AS::ratio(1, 2)); }
QuatX quat_o() {
  AS h(0, Rational(1, 2));  // 1/√2 = √2/2
  return qx(h, h, 0, 0);
}
QuatX quat_g() {
  // 1/(2τ) + (τ/2) i + ½ j with τ = (1+√5)/2
  return qx(AS(Rational(-1, 4), 0, Rational(1, 4)), AS(Rational(1, 4), 0, Rational(1, 4)),
            AS::ratio(1, 2), 0);
}
QuatX quat_g_plus() { return conj5(quat_g()); }

std::vector<QuatX> build_binary_subgroup_exact(BinaryKind kind) {
  auto t = cosets(quat_t(), 3, quaternion_group_q8());
  switch (kind) {
    case BinaryKind::T:
      return t;
    case BinaryKind::O: {
      auto out = t;
      for (const auto& q : t) out.push_back(quat_o() * q);
      return out;
    }
    case BinaryKind::I:
      return cosets(quat_g(), 5, t);
    case BinaryKind::IPlus:
      return cosets(quat_g_plus(), 5, t);
    default:
      throw std::invalid_argument("exact binary subgroup needs T, O, I or I+");
  }
}

std::vector<QuatD> build_binary_subgroup(BinaryKind kind, int n) {
  std::vector<QuatD> out;
  switch (kind) {
    case BinaryKind::C:
      if (n < 1) throw std::invalid_argument("C_n needs n >= 1");
      for (int k = 0; k < n; ++k) out.push_back(kexp(2.0 * M_PI * k / n));
      return out;
    case BinaryKind::D: {
      if (n < 1) throw std::invalid_argument("D_n needs n >= 1");
      auto c = build_binary_subgroup(BinaryKind::C, 2 * n);
      const QuatD i{0.0, 1.0, 0.0, 0.0};
      out = c;
      for (const auto& q : c) out.push_back(i * q);
      return out;
    }
    default:
      for (const auto& q : build_binary_subgroup_exact(kind)) out.push_back(to_double(q));
      return out;
  }
}

std::vector<MatX> so4_generators_exact(const std::string& label) {
  const QuatX i = qx(0, 1, 0, 0), j = qx(0, 0, 1, 0), t = quat_t();
  std::vector<MatX> gens = {pair_matrix(i, i), pair_matrix(j, j), pair_matrix(t, t)};
  if (label == "T") return gens;
  if (label == "O") {
    gens.push_back(pair_matrix(quat_o(), quat_o()));
    return gens;
  }
  if (label == "O+") {
    gens.push_back(pair_matrix(quat_o(), -quat_o()));
    return gens;
  }
  if (label == "I") {
    gens.push_back(pair_matrix(quat_g(), quat_g()));
    return gens;
  }
  if (label == "I+") {
    gens.push_back(pair_matrix(quat_g_plus(), quat_g()));
    return gens;
  }
  throw std::invalid_argument("unknown exact group label: " + label);
}

std::vector<MatX> close_group(const std::vector<MatX>& gens, std::size_t cap) {
  if (gens.empty()) throw std::invalid_argument("group closure needs at least one generator");
  std::vector<MatX> elems{identity4<AS>()};
  std::unordered_map<std::string, std::vector<std::size_t>> index;
  index[numeric_key(to_eigen(elems[0]))].push_back(0);
  for (std::size_t head = 0; head < elems.size(); ++head) {
    for (const auto& g : gens) {
      MatX prod = elems[head] * g;
      auto& bucket = index[numeric_key(to_eigen(prod))];
      bool seen = false;
      for (auto idx : bucket)
        if (elems[idx] == prod) { seen = true; break; }
      if (seen) continue;
      if (elems.size() >= cap) throw std::runtime_error("not closed at cap");
      bucket.push_back(elems.size());
      elems.push_back(std::move(prod));
    }
  }
  return elems;
}

std::vector<Eigen::Matrix4d> close_group(const std::vector<Eigen::Matrix4d>& gens, std::size_t cap) {
  if (gens.empty()) throw std::invalid_argument("group closure needs at least one generator");
  std::vector<Eigen::Matrix4d> elems{Eigen::Matrix4d::Identity()};
  std::unordered_map<std::string, std::size_t> index{{numeric_key(elems[0]), 0}};
  for (std::size_t head = 0; head < elems.size(); ++head) {
    for (const auto& g : gens) {
      Eigen::Matrix4d prod = elems[head] * g;
      auto key = numeric_key(prod);
      if (index.count(key)) continue;
      if (elems.size() >= cap) throw std::runtime_error("not closed at cap");
      index.emplace(std::move(key), elems.size());
      elems.push_back(prod);
    }
  }
  return elems;
}

std::size_t group_closure_order(const std::vector<MatX>& gens, std::size_t cap) {
  return close_group(gens, cap).size();
}

std::size_t group_closure_order(const std::vector<Eigen::Matrix4d>& gens, std::size_t cap) {
  return close_group(gens, cap).size();
}

FiniteGroup build_so4_subgroup(const std::string& label, const FamilyParams& p) {
  FiniteGroup g;
  if (label == "cyclic" || label == "dihedral") {
    if (p.m < 1 || p.n < 1 || p.r < 1) throw std::invalid_argument("m, n, r must be positive");
    if (p.m % 2 == 0 || p.n % 2 == 0) throw std::invalid_argument("m and n must be odd");
    if (std::gcd(p.s, 2 * p.r) != 1) throw std::invalid_argument("s must be coprime to 2r");
    // p generates C_2mr, q generates C_2nr; the pair (p, q^s) realises ψ_s.
    QuatD pq = kexp(M_PI / (p.m * p.r)), qq = kexp(M_PI / (p.n * p.r));
    const QuatD one{1.0, 0.0, 0.0, 0.0};
    g.generators = {pair_matrix(pq, power(qq, ((p.s % (2 * p.n * p.r)) + 2 * p.n * p.r) % (2 * p.n * p.r))),
                    pair_matrix(kexp(2.0 * M_PI / p.m), one), pair_matrix(one, kexp(2.0 * M_PI / p.n))};
    if (label == "dihedral") {
      const QuatD i{0.0, 1.0, 0.0, 0.0};
      g.generators.push_back(pair_matrix(i, i));
    }
    g.label = label + "(m=" + std::to_string(p.m) + ",n=" + std::to_string(p.n) +
              ",r=" + std::to_string(p.r) + ",s=" + std::to_string(p.s) + ") [floating point]";
    g.elements = close_group(g.generators);
    return g;
  }
  g.exact = true;
  g.label = label;
  g.exact_generators = so4_generators_exact(label);
  g.exact_elements = close_group(g.exact_generators);
  for (const auto& m : g.exact_generators) g.generators.push_back(to_eigen(m));
  for (const auto& m : g.exact_elements) g.elements.push_back(to_eigen(m));
  return g;
}

bool contains_minus_identity(const FiniteGroup& g) {
  if (g.exact) {
    const MatX minus = negate(identity4<AlgebraicScalar>());
    for (const auto& m : g.exact_elements)
      if (m == minus) return true;
    return false;
  }
  for (const auto& m : g.elements)
    if ((m + Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-10) return true;
  return false;
}

nlohmann::json to_json(const FiniteGroup& g, bool exact_strings) {
  nlohmann::json out;
  out["label"] = g.label;
  out["order"] = g.order();
  out["exact"] = g.exact;
  auto& elems = out["elements"] = nlohmann::json::array();
  for (std::size_t k = 0; k < g.order(); ++k) {
    nlohmann::json row = nlohmann::json::array();
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        if (g.exact && exact_strings)
          row.push_back(g.exact_elements[k][i][j].to_string());
        else
          row.push_back(g.elements[k](i, j));
      }
    elems.push_back(std::move(row));
  }
  return out;
}

}  // namespace umbilic4
