#include "umbilic4/stabilizer.hpp"

#include <cmath>
#include <complex>

#include "umbilic4/harmonic.hpp"
#include "umbilic4/linalg.hpp"

namespace umbilic4 {

namespace {

Eigen::Matrix4d diag4(double a, double b, double c, double d) {
  return Eigen::Vector4d(a, b, c, d).asDiagonal();
}

bool fixes(const CubicD& p, const Eigen::Matrix4d& g, double tol) {
  return fixed_residual(p, {g}) <= tol;
}

}  // namespace

double fixed_residual(const CubicD& p, const std::vector<Eigen::Matrix4d>& elements) {
  const double norm = max_abs_coeff(p);
  if (norm == 0) return 0;
  double worst = 0;
  for (const auto& g : elements) worst = std::max(worst, max_abs_coeff(act(g, p) - p) / norm);
  return worst;
}

StabilizerReport stabilizer_algebra(const CubicD& p, double rel_tol, const std::vector<NamedGroup>& groups,
                                    double group_tol) {
  const auto& basis = skew_basis();
  Eigen::Matrix<double, kHarmonicDim, 6> m;
  for (int a = 0; a < 6; ++a) m.col(a) = harmonic_coords(algebra_act(basis[a], p));
  auto ker = numeric_kernel(m, rel_tol);
  StabilizerReport rep;
  rep.algebra_dim = ker.dim;
  rep.singular_values = ker.singular_values;
  for (int k = 0; k < ker.dim; ++k) {
    Eigen::Matrix4d x = Eigen::Matrix4d::Zero();
    for (int a = 0; a < 6; ++a) x += ker.basis(a, k) * basis[a];
    rep.algebra_basis.push_back(x);
  }
  for (const auto& g : groups) rep.checked_groups[g.label] = fixed_residual(p, g.elements) <= group_tol;
  return rep;
}

CubicD continuous_normal_form(int which, double r, double s, double v) {
  switch (which) {
    case 1:
      return {};
    case 2:
      return r * cubic_from_terms({{1, 1, 1, 1}, {-1, 1, 2, 2}, {-1, 1, 3, 3}, {-1, 1, 4, 4}});
    case 3:
      return r * cubic_from_terms({{1, 1, 1, 3}, {-1, 2, 2, 3}, {2, 1, 2, 4}});
    case 4:
      return r * cubic_from_terms({{1, 1, 1, 1}, {-3, 1, 2, 2}});
    case 5:
      return continuous_normal_form(4, r) +
             3 * v * cubic_from_terms({{1, 1, 1, 1}, {1, 1, 2, 2}, {-2, 1, 3, 3}, {-2, 1, 4, 4}});
    case 6:
      return continuous_normal_form(5, r, s, v) + s * cubic_from_terms({{3, 1, 1, 2}, {-1, 2, 2, 2}});
    default:
      throw std::invalid_argument("normal form index must be 1..6");
  }
}

std::string classify_continuous_orbit(const CubicD& p, double rel_tol, double tol) {
  auto rep = stabilizer_algebra(p, rel_tol);
  switch (rep.algebra_dim) {
    case 0:
      throw std::invalid_argument("stabilizer algebra is trivial; no continuous stabilizer");
    case 6:
      return "SO(4)";
    case 3:
      return "SO(3)";
    case 1:
      break;
    default:
      throw OrbitAnomaly("not on a continuous-stabilizer orbit: stabilizer algebra has dimension " +
                         std::to_string(rep.algebra_dim));
  }
  const Eigen::Matrix4d& x = rep.algebra_basis[0];
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(x, Eigen::ComputeFullV);
  const Eigen::Vector4d sv = svd.singularValues();
  // A skew generator has singular values (p, p, q, q): the two rotation speeds.
  if (std::abs(sv(0) - sv(1)) > tol * sv(0) || std::abs(sv(2) - sv(3)) > tol * sv(0))
    throw OrbitAnomaly("not on a continuous-stabilizer orbit: generator is not a torus element");
  const double ratio = sv(2) / sv(0);
  if (std::abs(ratio - 0.5) < tol) return "O(2)-speed-(1,2)";
  if (ratio > tol)
    throw OrbitAnomaly("not on a continuous-stabilizer orbit: speeds " + std::to_string(ratio) + ":1");

  // Frame with the fixed plane of the generator in (y1, y2) and its rotation plane in (y3, y4).
  Eigen::Matrix4d f;
  f << svd.matrixV().col(2), svd.matrixV().col(3), svd.matrixV().col(0), svd.matrixV().col(1);
  if (f.determinant() < 0) f.col(3) *= -1;
  CubicD q = substitute(p, f);

  if (fixes(q, plane_rotation(2 * M_PI / 3, 0), tol)) return "SO(2)⋉S3";

  // Remaining invariant part ℓ(y1,y2)·(y1²+y2²-2y3²-2y4²); turn ℓ onto y1, then test the flip.
  const CubicD q1 = cubic_from_terms({{1, 1, 1, 1}, {1, 1, 2, 2}, {-2, 1, 3, 3}, {-2, 1, 4, 4}});
  const CubicD q2 = cubic_from_terms({{1, 1, 1, 2}, {1, 2, 2, 2}, {-2, 2, 3, 3}, {-2, 2, 4, 4}});
  const double l1 = sphere_inner(q, q1), l2 = sphere_inner(q, q2);
  CubicD aligned = substitute(q, plane_rotation(std::atan2(l2, l1), 0));
  return fixes(aligned, diag4(1, -1, 1, -1), tol) ? "O(2)-reducible" : "SO(2)";
}

CubicD lemma_cubic(LemmaFamily family, double r, double s, double u, double v) {
  if (family == LemmaFamily::Star)
    return r * cubic_from_terms({{1, 1, 1, 1}, {-3, 1, 2, 2}}) +
           s * cubic_from_terms({{1, 3, 3, 3}, {1, 3, 4, 4}, {-2, 1, 1, 3}, {-2, 2, 2, 3}}) +
           u * cubic_from_terms({{1, 3, 3, 3}, {-3, 3, 4, 4}}) +
           v * cubic_from_terms({{1, 4, 4, 4}, {-3, 3, 3, 4}});
  return u * cubic_from_terms({{1, 1, 1, 1}, {-3, 1, 2, 2}}) +
         v * cubic_from_terms({{3, 1, 1, 2}, {-1, 2, 2, 2}}) +
         r * cubic_from_terms({{1, 1, 1, 3}, {-1, 2, 2, 3}, {-2, 1, 2, 4}}) +
         s * cubic_from_terms({{1, 1, 3, 3}, {-1, 1, 4, 4}, {-2, 2, 3, 4}});
}

LemmaResult check_lemma_stabilizers(LemmaFamily family, double r, double s, double u, double v, double zero_tol,
                                    double fix_tol) {
  auto zero = [&](double x) { return std::abs(x) <= zero_tol; };
  LemmaResult res;
  res.cubic = lemma_cubic(family, r, s, u, v);
  const Eigen::Matrix4d flip = diag4(1, -1, 1, -1);

  std::map<std::string, Eigen::Matrix4d> must_fix, must_not_fix;
  if (family == LemmaFamily::Star) {
    const Eigen::Matrix4d g = plane_rotation(4 * M_PI / 3, 0);
    if (zero(r) || (zero(s) && zero(u) && zero(v))) {
      res.label = "continuous";
      res.condition = zero(r) ? "r=0" : "s=u=v=0";
    } else if (zero(s)) {
      // u Re z2³ - v Im z2³ = Re((u+iv) z2³): rotate z2 to make the coefficient real.
      res.label = "order-18";
      res.condition = "s=0 (z2 rotated so that v=0)";
      res.normalization = plane_rotation(0, -std::atan2(v, u) / 3);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          auto rot = plane_rotation(2 * M_PI * i / 3, 2 * M_PI * j / 3);
          must_fix["rot(" + std::to_string(i) + "," + std::to_string(j) + ")"] = rot;
          must_fix["ref(" + std::to_string(i) + "," + std::to_string(j) + ")"] = rot * flip;
        }
    } else if (zero(v)) {
      res.label = "D3";
      res.condition = zero(u - 3 * s) ? "v=0, u=3s" : "v=0";
      must_fix["g"] = g;
      must_fix["flip{x2,x4}"] = flip;
      must_not_fix["rot(0,1)"] = plane_rotation(0, 2 * M_PI / 3);
    } else {
      res.label = "Z3";
      res.condition = "generic";
      must_fix["g"] = g;
      must_not_fix["flip{x2,x4}"] = flip;
    }
  } else {
    const Eigen::Matrix4d g = plane_rotation(2 * M_PI / 3, 2 * M_PI / 3);
    const double arg1 = std::atan2(-v, u);  // phase of u - iv, the z1³ coefficient
    if ((zero(r) && zero(s)) || (zero(u) && zero(v) && (zero(r) || zero(s)))) {
      res.label = "continuous";
      res.condition = zero(r) && zero(s) ? "r=s=0" : (zero(r) ? "u=v=r=0" : "u=v=s=0");
    } else if (zero(r)) {
      // z1 -> e^{iα}z1, z2 -> e^{-iα/2}z2 keeps Re(z1 z2²) and makes the z1³ coefficient real.
      const double alpha = -arg1 / 3;
      res.label = "D6";
      res.condition = "r=0 (rotated so that v=0)";
      res.normalization = plane_rotation(alpha, -alpha / 2);
      must_fix["a"] = plane_rotation(4 * M_PI / 3, M_PI / 3);
      must_fix["flip{x2,x4}"] = flip;
    } else if (zero(s) || zero(v)) {
      res.label = "D3";
      if (zero(s)) {
        const double alpha = -arg1 / 3;
        res.condition = "s=0 (rotated so that v=0)";
        res.normalization = plane_rotation(alpha, -2 * alpha);
      } else {
        res.condition = "v=0";
      }
      must_fix["g"] = g;
      must_fix["flip{x2,x4}"] = flip;
      must_not_fix["a"] = plane_rotation(4 * M_PI / 3, M_PI / 3);
    } else {
      res.label = "Z3";
      res.condition = "generic";
      must_fix["g"] = g;
      must_not_fix["flip{x2,x4}"] = flip;
    }
  }

  res.normalized = substitute(res.cubic, res.normalization);
  auto stab = stabilizer_algebra(res.normalized);
  res.algebra_dim = stab.algebra_dim;
  if (res.label == "continuous") {
    res.verified = stab.algebra_dim >= 1;
    return res;
  }
  bool ok = stab.algebra_dim == 0;
  for (const auto& [name, m] : must_fix) {
    double rr = fixed_residual(res.normalized, {m});
    res.residuals[name] = rr;
    ok = ok && rr <= fix_tol;
  }
  for (const auto& [name, m] : must_not_fix) {
    double rr = fixed_residual(res.normalized, {m});
    res.residuals[name] = rr;
    ok = ok && rr > fix_tol;
  }
  res.verified = ok;
  return res;
}

nlohmann::json to_json(const StabilizerReport& rep) {
  nlohmann::json j;
  j["algebra_dim"] = rep.algebra_dim;
  auto basis = nlohmann::json::array();
  for (const auto& x : rep.algebra_basis) {
    auto rows = nlohmann::json::array();
    for (int i = 0; i < 4; ++i) rows.push_back({x(i, 0), x(i, 1), x(i, 2), x(i, 3)});
    basis.push_back(rows);
  }
  j["algebra_basis"] = basis;
  j["singular_values"] = std::vector<double>(rep.singular_values.data(),
                                             rep.singular_values.data() + rep.singular_values.size());
  j["checked_groups"] = rep.checked_groups;
  return j;
}

nlohmann::json to_json(const LemmaResult& res) {
  return {{"label", res.label},           {"condition", res.condition},
          {"cubic", cubic_to_json(res.cubic)}, {"normalized", cubic_to_json(res.normalized)},
          {"residuals", res.residuals},   {"algebra_dim", res.algebra_dim},
          {"verified", res.verified}};
}

}  // namespace umbilic4
