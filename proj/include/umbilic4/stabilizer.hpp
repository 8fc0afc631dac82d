#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "umbilic4/cubic.hpp"

namespace umbilic4 {

struct StabilizerReport {
  int algebra_dim = 0;
  std::vector<Eigen::Matrix4d> algebra_basis;
  Eigen::VectorXd singular_values;
  std::map<std::string, bool> checked_groups;
};

struct NamedGroup {
  std::string label;
  std::vector<Eigen::Matrix4d> elements;
};

/// Kernel of P -> [algebra_act(E_a, P)]_a (16×6 in harmonic coordinates). Singular values at
/// most rel_tol·σ_max count as zero.
StabilizerReport stabilizer_algebra(const CubicD& p, double rel_tol = 1e-9,
                                    const std::vector<NamedGroup>& groups = {}, double group_tol = 1e-9);

/// max‖act(g,P) - P‖ / ‖P‖ over the elements (coefficient max-norm; 0 for P = 0).
double fixed_residual(const CubicD& p, const std::vector<Eigen::Matrix4d>& elements);

/// Thrown when a cubic's stabilizer does not match any continuous normal form.
struct OrbitAnomaly : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Labels: "SO(4)", "SO(3)", "O(2)-speed-(1,2)", "SO(2)⋉S3", "O(2)-reducible", "SO(2)".
/// Throws std::invalid_argument if the stabilizer algebra is trivial.
std::string classify_continuous_orbit(const CubicD& p, double rel_tol = 1e-9, double tol = 1e-6);

/// Normal forms with continuous stabilizer, case 1..6 (case 1 is the zero cubic):
/// 2: r x1(x1²-x2²-x3²-x4²), 3: r[(x1²-x2²)x3 + 2x1x2x4], 4: r(x1³-3x1x2²),
/// 5: case 4 + 3v x1(x1²+x2²-2x3²-2x4²), 6: case 5 + s(3x1²x2 - x2³).
CubicD continuous_normal_form(int which, double r = 1.0, double s = 1.0, double v = 1.0);

enum class LemmaFamily { Star, DoubleStar };

/// star:       r Re z1³ + s x3(x3²+x4²-2x1²-2x2²) + u(x3³-3x3x4²) + v(x4³-3x3²x4)
/// doublestar: u Re z1³ + v Im z1³ + r Re(z1²z2) + s Re(z1z2²)
CubicD lemma_cubic(LemmaFamily family, double r, double s, double u, double v);

struct LemmaResult {
  std::string label;      // continuous, order-18, D6, D3, Z3
  std::string condition;  // which parameter relation selected the label
  CubicD cubic;
  CubicD normalized;      // after the torus rotation used for the check
  Eigen::Matrix4d normalization = Eigen::Matrix4d::Identity();
  std::map<std::string, double> residuals;  // per checked element; fixing ones should be ~0
  int algebra_dim = 0;
  bool verified = false;
};

LemmaResult check_lemma_stabilizers(LemmaFamily family, double r, double s, double u, double v,
                                    double zero_tol = 1e-12, double fix_tol = 1e-10);

nlohmann::json to_json(const StabilizerReport& rep);
nlohmann::json to_json(const LemmaResult& res);

}  // namespace umbilic4
