#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <complex>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <string>

#include "umbilic4/cubic.hpp"
#include "umbilic4/groups.hpp"

namespace umbilic4 {

using Complex = std::complex<double>;
using Params4 = Eigen::Vector4d;
using Point4c = Eigen::Vector4cd;    // a point of ℂ⁴ ≅ ℝ⁸, z = x + iy
using Jacobian4c = Eigen::Matrix4cd;  // column a = ∂z/∂u_a

/// Parameter outside a chart's domain, or family parameters that define no submanifold.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
/// Tangent vectors fail to span a 4-plane.
struct FrameError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
/// Finite-difference second fundamental form failed its symmetry check.
struct ExtractionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class JacobianMode { Analytic, FiniteDifference };

struct ImmersionChart {
  std::string family;
  nlohmann::json params;
  std::function<Point4c(const Params4&)> map;
  std::function<Jacobian4c(const Params4&)> jacobian;  // empty when no closed form is known
  Params4 lower, upper;                                 // parameter box
  double phase = 0;                                     // calibration Im(e^{iθ}Ω)
  double scale_hint = 1;

  Point4c operator()(const Params4& u) const { return map(u); }
  /// Analytic Jacobian when available and requested, otherwise central differences with step h.
  Jacobian4c jacobian_at(const Params4& u, JacobianMode mode = JacobianMode::Analytic, double h = 1e-5) const;
  bool contains(const Params4& u) const;
  /// Uniform sample from the middle 80% of the box.
  Params4 sample_interior(std::mt19937_64& rng) const;
};

/// Holomorphic functions available to the product and graph families, by name:
/// exp, sin, square, cube, identity.
struct HolomorphicFunction {
  std::string name;
  std::function<Complex(Complex)> value, derivative;
};
HolomorphicFunction holomorphic_function(const std::string& name);

/// Families and their parameters (defaults in brackets):
///   flat-plane                     u -> (u, 0)
///   harvey-lawson {c [1], component [0]}   (φ, α, β, γ) -> ρe^{iφ}·u(α,β,γ), ρ⁴ sin 4φ = c
///   hl-torus {a [2^{1/5}], c [0], eps [0.01]}   (ψ, θ1, θ2, θ3), |z0|² - |zk|² = c, Re Πz = a
///   octahedral-cone                (ρ, θ1, θ2, θ3) -> ρ/2·e^{iθk}, Σθ = π/2
///   asympt-conical {c [1], eps [0.01]}   (φ, θ1, θ2, θ3) -> ρe^{iφ}/2·e^{iθk}, ρ⁴ cos 4φ = c
///   product-r2 {f [exp]}           Σ × ℝ², Σ = {v = f(u)}, u = x1 - ix2, v = y1 + iy2
///   product-curves {f [exp], g [cube]}   Σ1 × Σ2, second factor in u2 = x3 - ix4, v2 = y3 + iy4
///   j-graph {coeffs [1, 0.5, -0.3, 0.2]}   w2 = ∂Φ/∂w1, w4 = ∂Φ/∂w3 over (w1, w3) for the cubic
///                                  Φ = c0 w1³ + c1 w1²w3 + c2 w1 w3² + c3 w3³, w1 = x1 - ix2,
///                                  w2 = y1 + iy2, w3 = x3 - ix4, w4 = y3 + iy4
///   lagrangian-plane               span{∂x1, ∂y2, ∂x3, ∂x4}
ImmersionChart make_family(const std::string& label, const nlohmann::json& params = nlohmann::json::object());

/// Chart composed with z -> U z + b.
ImmersionChart transform_chart(const ImmersionChart& chart, const Eigen::Matrix4cd& unitary, const Point4c& shift);

struct FrameData {
  Point4c point;
  Eigen::Matrix4cd tangent;    // orthonormal e1..e4 as columns (real inner product on ℂ⁴)
  Eigen::Matrix4d param_dirs;  // columns c_i with Jacobian·c_i = e_i
  Eigen::Matrix4cd normal() const { return Complex(0, 1) * tangent; }
};

/// Gram-Schmidt on the Jacobian columns in order. Throws FrameError below relative rank 1e-8.
FrameData tangent_frame(const ImmersionChart& chart, const Params4& u, JacobianMode mode = JacobianMode::Analytic,
                        double fd_step = 1e-5);

/// Real inner product Re⟨a, b⟩ and Kähler form ω(a, b) on ℂ⁴.
double real_dot(const Point4c& a, const Point4c& b);
double kahler_form(const Point4c& a, const Point4c& b);

struct SLResidual {
  double omega = 0;     // max |ω(e_i, e_j)|
  double im_omega = 0;  // |Im(e^{iθ} Ω(e1..e4))|
};

SLResidual sl_residual(const ImmersionChart& chart, const Params4& u, JacobianMode mode = JacobianMode::Analytic,
                       double fd_step = 1e-5);
SLResidual sl_residual(const ImmersionChart& chart, const Params4& u, double phase,
                       JacobianMode mode = JacobianMode::Analytic, double fd_step = 1e-5);

struct CubicExtract {
  Tensor3<double> raw{};  // unsymmetrized ⟨∂²x(c_i, c_j), Je_k⟩
  Tensor3<double> h{};    // symmetrized
  CubicD cubic;           // Σ h_ijk y_i y_j y_k
  FrameData frame;
  double fd_step = 0;
  double norm = 0;             // Frobenius norm of h
  double symmetry_defect = 0;  // max |raw_ijk - raw_σ(ijk)| / norm
  double trace_defect = 0;     // max_k |Σ_i h_iik| / norm
};

/// Second fundamental form in the Gram-Schmidt frame, by central differences of the Jacobian along
/// the frame's parameter directions. Throws ExtractionError if the symmetry defect exceeds
/// 1e-4·‖h‖ (plus 1e-10 absolute, so a totally geodesic chart passes).
CubicExtract fundamental_cubic(const ImmersionChart& chart, const Params4& u, double fd_step = 1e-4);

/// log2 of the ratio of successive differences of the raw tensor at steps h, h/2, h/4.
double fd_convergence_order(const ImmersionChart& chart, const Params4& u, double h = 1e-2);

/// Orthogonal R with adapted frame = Gram-Schmidt frame · R, so the adapted cubic is
/// substitute(extract.cubic, R). Harvey-Lawson: identity (e1 already along the profile curve).
/// Torus-invariant charts (hl-torus, asympt-conical, octahedral-cone): e1 is the profile
/// direction orthogonal to the torus orbit and e2..e4 = L·(2/3·𝟙𝟙ᵀ - I), with L the symmetric
/// orthonormalization of ∂θ1, ∂θ2, ∂θ3. Other families: identity.
Eigen::Matrix4d adapted_alignment(const ImmersionChart& chart, const Params4& u,
                                  JacobianMode mode = JacobianMode::Analytic);

/// ‖act(g, P) - P‖ / ‖P‖ for each element (keys "g0", "g1", ...), P = substitute(cubic, alignment).
std::map<std::string, double> symmetry_check(const CubicExtract& extract, const FiniteGroup& group,
                                             const Eigen::Matrix4d& alignment = Eigen::Matrix4d::Identity());
double max_residual(const std::map<std::string, double>& residuals);

struct AlignmentSearch {
  Eigen::Matrix4d rotation = Eigen::Matrix4d::Identity();
  double residual = 0;  // max symmetry residual after rotating
  int restarts = 0;
};

/// Diagnostic: Nelder-Mead over so(4) exponential coordinates minimizing Σ_g ‖act(g,P) - P‖²
/// for P = substitute(cubic, R), from random starts.
AlignmentSearch search_alignment(const CubicD& cubic, const FiniteGroup& group, int restarts = 50,
                                 std::uint64_t seed = 1);

/// Hyper-Kähler forms on ℝ⁸ with coordinates (x, y):
///   ζ1 = Σ dx_i∧dy_i, ζ2 = dx1∧dx2 + dx3∧dx4 - dy1∧dy2 - dy3∧dy4,
///   ζ3 = dx1∧dy2 - dx2∧dy1 + dx3∧dy4 - dx4∧dy3.
double zeta1(const Point4c& a, const Point4c& b);
double zeta2(const Point4c& a, const Point4c& b);
double zeta3(const Point4c& a, const Point4c& b);

struct HyperkahlerResidual {
  double zeta1 = 0, zeta3 = 0;  // max over tangent frame pairs
};
HyperkahlerResidual hyperkahler_check(const ImmersionChart& chart, const Params4& u,
                                      JacobianMode mode = JacobianMode::Analytic);

nlohmann::json to_json(const SLResidual& r);
nlohmann::json to_json(const CubicExtract& e);

}  // namespace umbilic4
