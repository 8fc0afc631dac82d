#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "umbilic4/cubic.hpp"

namespace umbilic4 {

using State = Eigen::VectorXd;

struct ConservedQuantity {
  std::string label;
  std::function<double(const State&)> evaluate;
};

/// Invariants of a structure-equation system, moved along the coframe directions e_1..e_n dual
/// to ω_1..ω_n. Free functions of the integral elements (u_k, m_k) are carried as trailing state
/// entries with zero derivative.
struct FlowSystem {
  std::string label;
  std::vector<std::string> variables;
  int directions = 1;
  /// d(state)(e_a), a in [0, directions)
  std::function<State(const State&, int)> field;
  /// dω_k(e_a, e_b) for k, a, b < directions; absent for one-direction systems
  std::function<double(const State&, int, int, int)> domega;
  /// empty string when admissible, otherwise the violated condition
  std::function<std::string(const State&)> admissible;
  std::vector<ConservedQuantity> conserved;

  int dim() const { return static_cast<int>(variables.size()); }
  int index(const std::string& name) const;
};

/// so3-case, o2-case, tetra-case, octa-case, d3-conical, product-case.
FlowSystem flow_system(const std::string& label);
std::vector<std::string> flow_system_labels();
/// Named values override a generic admissible default state.
State make_state(const FlowSystem& sys, const nlohmann::json& values = nlohmann::json::object());

struct PathSegment {
  Eigen::VectorXd direction;  // coefficients of e_1..e_n
  double length = 1;
};

struct Trajectory {
  std::vector<double> arclength;
  std::vector<State> states;
  std::vector<std::vector<double>> conserved;  // per state, in FlowSystem::conserved order
  std::optional<std::string> boundary;         // set when the flow left the admissible region
};

/// Classical RK4 with fixed step along each segment (segment length / ceil(length / step)).
Trajectory flow(const FlowSystem& sys, const State& init, const std::vector<PathSegment>& path, double step);
/// A unit-length path along e_a.
std::vector<PathSegment> straight_path(const FlowSystem& sys, int direction, double length = 1);

/// Max over the trajectory of |Q - Q(start)| / |Q(start)|, or the absolute change when
/// |Q(start)| < 1e-12.
std::map<std::string, double> conserved_report(const FlowSystem& sys, const Trajectory& traj);

struct MixedPartialReport {
  std::vector<double> steps;
  std::vector<double> defects;
  double order = 0;  // log2 ratio of the last two defects; 0 when no pair exists
};

/// Φ_b(h)∘Φ_a(h) - Φ_a(h)∘Φ_b(h) + h²Σ_k dω_k(e_a,e_b) V_k, divided by h, for steps h, h/2, h/4.
/// The bracket term is [e_a, e_b] = -Σ_k dω_k(e_a, e_b) e_k, so the defect is O(h²) exactly when
/// the structure equations are compatible.
MixedPartialReport mixed_partial_check(const FlowSystem& sys, const State& x, int a, int b, double h = 0.05);

/// Order of the conserved-quantity drift of the RK4 integrator: log2 ratio of drifts at step and
/// step/2 on a path of the given length.
double integrator_order(const FlowSystem& sys, const State& init, const std::vector<PathSegment>& path,
                        double step, int quantity = 0);

struct CoframeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Orthonormal coframe ω_i = Σ_μ W(x)_iμ dx^μ on a coordinate box in ℝ⁴, with the cubic
/// C = Σ h_ijk ω_i ω_j ω_k in the same coframe.
struct MetricCubicPair {
  std::string label;
  std::function<Eigen::Matrix4d(const Eigen::Vector4d&)> coframe;
  std::function<Tensor3<double>(const Eigen::Vector4d&)> cubic;
  Eigen::Vector4d lower, upper;
};

/// Flat metric with the zero cubic.
MetricCubicPair flat_pair();
/// g = (dθ² + cos²4θ dσ²)/(c² cos^{5/2}4θ) on θ × S³ with S³ in the stereographic chart
/// y ↦ (2y, 1 - |y|²)/(1 + |y|²), coframe ω_1 = dθ/(c cos^{5/4}4θ),
/// ω_{1+i} = 2dy_i/(c cos^{1/4}4θ (1 + |y|²)), and C = 3c cos^{5/4}4θ·ω_1(ω_2² + ω_3² + ω_4² - ω_1²).
/// The box is |θ| ≤ theta_max, |y_i| ≤ 1/2, away from the chart's antipode.
MetricCubicPair so3_pair(double c = 1, double cubic_scale = 1, double theta_max = M_PI / 64);
/// Same geometry with the coframe replaced by R·ω and the cubic transformed accordingly.
MetricCubicPair rotate_pair(const MetricCubicPair& pair, const Eigen::Matrix4d& rotation);

struct GaussCodazziResidual {
  double gauss = 0;    // max ‖dα + α∧α - β∧β‖ over the grid, frame components
  double codazzi = 0;  // max ‖dβ + β∧α + α∧β‖
  double max() const { return std::max(gauss, codazzi); }
};

/// Connection α from dω_i = -α_ij∧ω_j, β_ij = h_ijk ω_k, exterior derivatives by central
/// differences with step h (nested for dα), on a grid of n points per axis.
GaussCodazziResidual gauss_codazzi_residual(const MetricCubicPair& pair, int n, double h);

struct GaussCodazziConvergence {
  double h = 0;
  GaussCodazziResidual at_h, at_half;
  double order = 0;
};
GaussCodazziConvergence gauss_codazzi_convergence(const MetricCubicPair& pair, int n, double h);

/// rows × cols matrix whose entries are linear forms in the π's: coeffs[row][col][π].
struct TableauMatrix {
  std::string name;
  std::vector<std::string> pi_names;
  int rows = 0, cols = 0;
  std::vector<std::vector<std::vector<double>>> coeffs;
};

/// JSON: {"name", "pi": [names], "cols": n, "rows": [[{"pi1": c, ...}, ...], ...]}, each row
/// a list of cols entries, each entry a sparse map from π names to coefficients.
TableauMatrix tableau_from_json(const nlohmann::json& j);
TableauMatrix load_tableau(const std::string& path);

struct CartanCharacters {
  std::vector<int> s;  // s_1..s_cols
  int rank = 0;        // number of independent π's in the tableau
  int trials = 0;
};

/// Generic-flag characters: for random integer changes of coframe basis, r_k is the rank of the
/// linear forms in the first k transformed columns (exact rational elimination); r_k is maximized
/// over trials and s_k = r_k - r_{k-1}. Deterministic in the seed.
CartanCharacters cartan_characters(const TableauMatrix& t, int trials = 32, std::uint64_t seed = 1);

nlohmann::json to_json(const Trajectory& t, const FlowSystem& sys);
nlohmann::json to_json(const MixedPartialReport& r);
nlohmann::json to_json(const GaussCodazziConvergence& c);
nlohmann::json to_json(const CartanCharacters& c);

}  // namespace umbilic4
