#include "umbilic4/torus.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace umbilic4 {

namespace {

Rational frac(const Rational& x) {
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  Rational out = x - Rational(fl);
  out.canonicalize();
  return out;
}

bool is_integer(const Rational& x) { return x.get_den() == 1; }

constexpr int kCoef[8][2] = {{3, 0}, {1, 0}, {2, 1}, {2, -1}, {1, 2}, {-1, 2}, {0, 3}, {0, 1}};

}  // namespace

TorusElement::TorusElement(const Rational& r_, const Rational& s_) : r(frac(r_)), s(frac(s_)) {}

std::string TorusElement::to_string() const { return "(" + r.get_str() + "," + s.get_str() + ")"; }

const std::array<std::string, 8>& condition_names() {
  static const std::array<std::string, 8> names = {"3r", "r", "2r+s", "2r-s", "2s+r", "2s-r", "3s", "s"};
  return names;
}

const std::array<WeightLabel, 8>& condition_weights() {
  static const std::array<WeightLabel, 8> w = {
      WeightLabel{3, 0}, {1, 0}, {2, 1}, {2, -1}, {1, 2}, {-1, 2}, {0, 3}, {0, 1}};
  return w;
}

int independent_condition_count(const std::vector<int>& conds) {
  std::set<int> c(conds.begin(), conds.end());
  if (c.count(1)) c.erase(0);
  if (c.count(7)) c.erase(6);
  return static_cast<int>(c.size());
}

std::vector<int> satisfied_conditions(const TorusElement& g) {
  std::vector<int> out;
  for (int k = 0; k < 8; ++k) {
    Rational v = kCoef[k][0] * g.r + kCoef[k][1] * g.s;
    v.canonicalize();
    if (is_integer(v)) out.push_back(k);
  }
  return out;
}

Eigen::Matrix4d torus_matrix(double r, double s) {
  return plane_rotation(2 * M_PI * r, 2 * M_PI * s).transpose();
}

Eigen::Matrix4d torus_matrix(const TorusElement& g) { return torus_matrix(g.r.get_d(), g.s.get_d()); }

FixedCubicBasis fixed_cubic_basis(const TorusElement& g) {
  FixedCubicBasis out;
  out.conditions = satisfied_conditions(g);
  const auto& gens = weight_generators();
  const Eigen::Matrix4d a = torus_matrix(g);
  for (int k : out.conditions) {
    const WeightLabel w = condition_weights()[k];
    auto it = std::find_if(gens.begin(), gens.end(), [&](const ComplexCubic& c) { return c.weight == w; });
    for (const CubicD* part : {&it->re, &it->im}) {
      out.basis.push_back(*part);
      out.max_fix_residual = std::max(out.max_fix_residual, max_abs_coeff(act(a, *part) - *part));
    }
  }
  out.dim = static_cast<int>(out.basis.size());
  return out;
}

long element_order(const TorusElement& g) {
  return std::lcm(g.r.get_den().get_si(), g.s.get_den().get_si());
}

bool in_chamber(const TorusElement& g) { return g.s >= 0 && g.s <= g.r && g.s <= 1 - g.r; }

TorusElement weyl_reduce(const TorusElement& g) {
  std::vector<TorusElement> images;
  for (int swap = 0; swap < 2; ++swap)
    for (int sr : {1, -1})
      for (int ss : {1, -1}) {
        Rational a = swap ? g.s : g.r, b = swap ? g.r : g.s;
        images.emplace_back(sr * a, ss * b);
      }
  const TorusElement* best = nullptr;
  for (const auto& im : images) {
    if (!in_chamber(im)) continue;
    if (!best || im.r > best->r || (im.r == best->r && im.s < best->s)) best = &im;
  }
  // Every orbit meets the chamber; the fallback is unreachable for reduced inputs.
  return best ? *best : g;
}

SmallOrderScan enumerate_small_orders(int max_den) {
  SmallOrderScan scan;
  scan.max_den = max_den;
  // Distinct reduced fractions p/q in [0, 1) with q <= max_den.
  std::vector<std::pair<long, long>> fr;
  for (long q = 1; q <= max_den; ++q)
    for (long p = 0; p < q; ++p)
      if (std::gcd(p, q) == 1) fr.emplace_back(p, q);
  for (const auto& [pr, qr] : fr)
    for (const auto& [ps, qs] : fr) {
      // chamber: s <= r and s <= 1 - r
      if (ps * qr > pr * qs || ps * qr > (qr - pr) * qs) continue;
      ++scan.scanned;
      std::vector<int> conds;
      const long den = qr * qs;
      for (int k = 0; k < 8; ++k) {
        long num = kCoef[k][0] * pr * qs + kCoef[k][1] * ps * qr;
        if (num % den == 0) conds.push_back(k);
      }
      if (independent_condition_count(conds) < 2) continue;
      // The closed chamber still identifies some boundary points, e.g. (r, 0) ~ (1-r, 0).
      TorusElement g = weyl_reduce(TorusElement(Rational(pr, qr), Rational(ps, qs)));
      if (std::any_of(scan.cases.begin(), scan.cases.end(), [&](const SmallOrderCase& c) { return c.g == g; }))
        continue;
      long order = std::lcm(qr, qs);
      scan.max_order_hit = std::max(scan.max_order_hit, order);
      scan.cases.push_back({order, g, fixed_cubic_basis(g).dim, conds});
    }
  std::stable_sort(scan.cases.begin(), scan.cases.end(),
                   [](const SmallOrderCase& a, const SmallOrderCase& b) { return a.order > b.order; });
  return scan;
}

nlohmann::json to_json(const FixedCubicBasis& b) {
  nlohmann::json conds = nlohmann::json::array();
  for (int k : b.conditions) conds.push_back(condition_names()[k]);
  nlohmann::json basis = nlohmann::json::array();
  for (const auto& p : b.basis) basis.push_back(p.coeffs);
  return {{"conditions", conds}, {"dim", b.dim}, {"basis", basis}, {"max_fix_residual", b.max_fix_residual}};
}

nlohmann::json to_json(const SmallOrderScan& scan) {
  nlohmann::json cases = nlohmann::json::array();
  for (const auto& c : scan.cases) {
    nlohmann::json conds = nlohmann::json::array();
    for (int k : c.conditions) conds.push_back(condition_names()[k]);
    cases.push_back({{"order", c.order},
                     {"r", c.g.r.get_str()},
                     {"s", c.g.s.get_str()},
                     {"fixed_dim", c.fixed_dim},
                     {"conditions", conds}});
  }
  return {{"max_den", scan.max_den},
          {"scanned", scan.scanned},
          {"max_order_hit", scan.max_order_hit},
          {"cases", cases}};
}

}  // namespace umbilic4
