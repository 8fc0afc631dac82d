#include "umbilic4/geom.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "umbilic4/stabilizer.hpp"

namespace umbilic4 {

namespace {

const Complex kI(0, 1);

double param_or(const nlohmann::json& p, const char* key, double fallback) {
  return p.contains(key) ? p.at(key).get<double>() : fallback;
}

std::string string_or(const nlohmann::json& p, const char* key, const std::string& fallback) {
  return p.contains(key) ? p.at(key).get<std::string>() : fallback;
}

void reject_unknown(const nlohmann::json& p, std::initializer_list<const char*> keys) {
  if (!p.is_object()) throw DomainError("family parameters must be a JSON object");
  for (const auto& [k, v] : p.items())
    if (std::none_of(keys.begin(), keys.end(), [&](const char* s) { return k == s; }))
      throw DomainError("unknown family parameter: " + k);
}

Eigen::Vector4d sphere_point(double a, double b, double g) {
  return {std::cos(a), std::sin(a) * std::cos(b), std::sin(a) * std::sin(b) * std::cos(g),
          std::sin(a) * std::sin(b) * std::sin(g)};
}

Eigen::Matrix<double, 4, 3> sphere_jacobian(double a, double b, double g) {
  const double ca = std::cos(a), sa = std::sin(a), cb = std::cos(b), sb = std::sin(b), cg = std::cos(g),
               sg = std::sin(g);
  Eigen::Matrix<double, 4, 3> j;
  j << -sa, 0, 0,                   //
      ca * cb, -sa * sb, 0,         //
      ca * sb * cg, sa * cb * cg, -sa * sb * sg,  //
      ca * sb * sg, sa * cb * sg, sa * sb * cg;
  return j;
}

// z_k = radius_k e^{iθ_k} with θ0 = total - θ1 - θ2 - θ3.
Point4c torus_point(const std::array<double, 4>& radius, double total, const Params4& u) {
  const double th[4] = {total - u(1) - u(2) - u(3), u(1), u(2), u(3)};
  Point4c z;
  for (int k = 0; k < 4; ++k) z(k) = std::polar(radius[k], th[k]);
  return z;
}

// Columns ∂/∂θk (k = 1..3) of a torus chart: i z_k e_k - i z_0 e_0.
void torus_angle_columns(const Point4c& z, Jacobian4c& j) {
  for (int k = 1; k < 4; ++k) {
    j.col(k).setZero();
    j(k, k) = kI * z(k);
    j(0, k) = -kI * z(0);
  }
}

Params4 box(double a0, double a1, double a2, double a3) { return {a0, a1, a2, a3}; }

ImmersionChart base_chart(const std::string& family, const nlohmann::json& params) {
  ImmersionChart c;
  c.family = family;
  c.params = params;
  return c;
}

ImmersionChart flat_plane(const nlohmann::json& p) {
  reject_unknown(p, {});
  auto c = base_chart("flat-plane", p);
  c.map = [](const Params4& u) -> Point4c { return u.cast<Complex>(); };
  c.jacobian = [](const Params4&) -> Jacobian4c { return Jacobian4c::Identity(); };
  c.lower = Params4::Constant(-1);
  c.upper = Params4::Constant(1);
  return c;
}

ImmersionChart lagrangian_plane(const nlohmann::json& p) {
  reject_unknown(p, {});
  auto c = base_chart("lagrangian-plane", p);
  c.map = [](const Params4& u) -> Point4c { return {u(0), kI * u(1), u(2), u(3)}; };
  c.jacobian = [](const Params4&) -> Jacobian4c {
    Jacobian4c j = Jacobian4c::Identity();
    j(1, 1) = kI;
    return j;
  };
  c.lower = Params4::Constant(-1);
  c.upper = Params4::Constant(1);
  c.phase = M_PI / 2;  // Ω(e) = i
  return c;
}

ImmersionChart harvey_lawson(const nlohmann::json& p) {
  reject_unknown(p, {"c", "component", "eps"});
  const double cc = param_or(p, "c", 1.0), eps = param_or(p, "eps", 0.01);
  auto c = base_chart("harvey-lawson", p);
  if (cc == 0) {
    // Four planes e^{ikπ/4}ℝ⁴; chart on one of them.
    const int k = p.contains("component") ? p.at("component").get<int>() : 0;
    if (k < 0 || k > 3) throw DomainError("harvey-lawson component must be 0..3");
    const Complex rot = std::polar(1.0, k * M_PI / 4);
    c.map = [rot](const Params4& u) -> Point4c { return rot * u.cast<Complex>(); };
    c.jacobian = [rot](const Params4&) -> Jacobian4c { return rot * Jacobian4c::Identity(); };
    c.lower = Params4::Constant(-1);
    c.upper = Params4::Constant(1);
    // Ω = e^{ikπ} = ±1 on these planes, so phase 0 for every component.
    return c;
  }
  auto rho = [cc](double phi) {
    const double s = std::sin(4 * phi);
    if (cc * s <= 0) throw DomainError("harvey-lawson: need c·sin 4φ > 0");
    return std::pow(cc / s, 0.25);
  };
  c.map = [rho](const Params4& u) -> Point4c {
    return std::polar(rho(u(0)), u(0)) * sphere_point(u(1), u(2), u(3)).cast<Complex>();
  };
  c.jacobian = [rho](const Params4& u) -> Jacobian4c {
    const double r = rho(u(0)), dr = -r * std::cos(4 * u(0)) / std::sin(4 * u(0));
    const Complex w = std::polar(r, u(0)), dw = (dr + kI * r) * std::polar(1.0, u(0));
    Jacobian4c j;
    j.col(0) = dw * sphere_point(u(1), u(2), u(3)).cast<Complex>();
    j.rightCols<3>() = w * sphere_jacobian(u(1), u(2), u(3)).cast<Complex>();
    return j;
  };
  if (cc > 0) {
    c.lower = box(eps, eps, eps, -M_PI);
    c.upper = box(M_PI / 4 - eps, M_PI - eps, M_PI - eps, M_PI);
  } else {
    c.lower = box(-M_PI / 4 + eps, eps, eps, -M_PI);
    c.upper = box(-eps, M_PI - eps, M_PI - eps, M_PI);
  }
  c.scale_hint = std::pow(std::abs(cc), 0.25);
  return c;
}

ImmersionChart hl_torus(const nlohmann::json& p) {
  reject_unknown(p, {"a", "c", "eps"});
  const double a = param_or(p, "a", std::pow(2.0, 0.2)), cc = param_or(p, "c", 0.0), eps = param_or(p, "eps", 0.01);
  if (a <= 0) throw DomainError("hl-torus: need a > 0");
  auto c = base_chart("hl-torus", p);
  // t = |z1|² solves t³(t + c) = a²/cos²ψ; the left side increases for t > max(0, -c).
  auto solve_t = [a, cc](double psi) {
    const double cp = std::cos(psi);
    if (cp <= 0) throw DomainError("hl-torus: need cos ψ > 0");
    const double target = a * a / (cp * cp);
    auto f = [&](double t) { return t * t * t * (t + cc) - target; };
    double lo = std::max(0.0, -cc), hi = lo + 1;
    while (f(hi) < 0) hi *= 2;
    for (int it = 0; it < 200 && hi - lo > 1e-17 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (f(mid) < 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  c.map = [solve_t, cc](const Params4& u) -> Point4c {
    const double t = solve_t(u(0));
    return torus_point({std::sqrt(t + cc), std::sqrt(t), std::sqrt(t), std::sqrt(t)}, u(0), u);
  };
  c.jacobian = [solve_t, a, cc](const Params4& u) -> Jacobian4c {
    const double t = solve_t(u(0)), cp = std::cos(u(0));
    const double dt = 2 * a * a * std::sin(u(0)) / (cp * cp * cp) / (4 * t * t * t + 3 * cc * t * t);
    const double r0 = std::sqrt(t + cc), r = std::sqrt(t);
    const Point4c z = torus_point({r0, r, r, r}, u(0), u);
    Jacobian4c j;
    // θ0 moves with ψ as well as the radii.
    j(0, 0) = (dt / (2 * r0) + kI * r0) * (z(0) / r0);
    for (int k = 1; k < 4; ++k) j(k, 0) = dt / (2 * r) * (z(k) / r);
    torus_angle_columns(z, j);
    return j;
  };
  c.lower = box(-M_PI / 2 + 4 * eps, -M_PI, -M_PI, -M_PI);
  c.upper = box(M_PI / 2 - 4 * eps, M_PI, M_PI, M_PI);
  c.scale_hint = std::pow(a, 0.25);
  return c;
}

ImmersionChart octahedral_cone(const nlohmann::json& p) {
  reject_unknown(p, {});
  auto c = base_chart("octahedral-cone", p);
  c.map = [](const Params4& u) -> Point4c {
    return torus_point({u(0) / 2, u(0) / 2, u(0) / 2, u(0) / 2}, M_PI / 2, u);
  };
  c.jacobian = [](const Params4& u) -> Jacobian4c {
    const Point4c z = torus_point({u(0) / 2, u(0) / 2, u(0) / 2, u(0) / 2}, M_PI / 2, u);
    Jacobian4c j;
    j.col(0) = z / u(0);
    torus_angle_columns(z, j);
    return j;
  };
  c.lower = box(0.5, -M_PI, -M_PI, -M_PI);
  c.upper = box(2.0, M_PI, M_PI, M_PI);
  // Πz ∈ iℝ makes Ω real on the tangent plane.
  c.phase = 0;
  return c;
}

ImmersionChart asympt_conical(const nlohmann::json& p) {
  reject_unknown(p, {"c", "eps"});
  const double cc = param_or(p, "c", 1.0), eps = param_or(p, "eps", 0.01);
  if (cc == 0) throw DomainError("asympt-conical: c = 0 is the cone itself");
  auto c = base_chart("asympt-conical", p);
  auto rho = [cc](double phi) {
    const double k = std::cos(4 * phi);
    if (cc * k <= 0) throw DomainError("asympt-conical: need c·cos 4φ > 0");
    return std::pow(cc / k, 0.25);
  };
  auto link = [](const Params4& u) { return torus_point({0.5, 0.5, 0.5, 0.5}, M_PI / 2, u); };
  c.map = [rho, link](const Params4& u) -> Point4c { return std::polar(rho(u(0)), u(0)) * link(u); };
  c.jacobian = [rho, link](const Params4& u) -> Jacobian4c {
    const double r = rho(u(0)), dr = r * std::tan(4 * u(0));
    const Point4c s = link(u);
    const Complex w = std::polar(r, u(0)), dw = (dr + kI * r) * std::polar(1.0, u(0));
    Jacobian4c j;
    j.col(0) = dw * s;
    torus_angle_columns(w * s, j);
    return j;
  };
  if (cc > 0) {
    c.lower = box(-M_PI / 8 + eps, -M_PI, -M_PI, -M_PI);
    c.upper = box(M_PI / 8 - eps, M_PI, M_PI, M_PI);
  } else {
    c.lower = box(M_PI / 8 + eps, -M_PI, -M_PI, -M_PI);
    c.upper = box(3 * M_PI / 8 - eps, M_PI, M_PI, M_PI);
  }
  // w³·w' is imaginary when Re w⁴ is constant.
  c.phase = M_PI / 2;
  c.scale_hint = std::pow(std::abs(cc), 0.25);
  return c;
}

// (a, b) -> (z_first, z_second) for the curve v = f(u), u = x_first - i x_second, v = y_first + i y_second.
struct CurveFactor {
  HolomorphicFunction f;
  std::pair<Complex, Complex> point(double a, double b) const {
    const Complex v = f.value({a, b});
    return {Complex(a, v.real()), Complex(-b, v.imag())};
  }
  // Columns ∂/∂a, ∂/∂b.
  std::array<std::pair<Complex, Complex>, 2> tangent(double a, double b) const {
    const Complex d = f.derivative({a, b});
    const Complex da = d, db = kI * d;
    return {{{Complex(1, da.real()), Complex(0, da.imag())}, {Complex(0, db.real()), Complex(-1, db.imag())}}};
  }
};

ImmersionChart product_r2(const nlohmann::json& p) {
  reject_unknown(p, {"f"});
  auto c = base_chart("product-r2", p);
  CurveFactor s{holomorphic_function(string_or(p, "f", "exp"))};
  c.map = [s](const Params4& u) -> Point4c {
    auto [z1, z2] = s.point(u(0), u(1));
    return {z1, z2, u(2), u(3)};
  };
  c.jacobian = [s](const Params4& u) -> Jacobian4c {
    auto t = s.tangent(u(0), u(1));
    Jacobian4c j = Jacobian4c::Zero();
    for (int a = 0; a < 2; ++a) {
      j(0, a) = t[a].first;
      j(1, a) = t[a].second;
    }
    j(2, 2) = 1;
    j(3, 3) = 1;
    return j;
  };
  c.lower = Params4::Constant(-1);
  c.upper = Params4::Constant(1);
  return c;
}

ImmersionChart product_curves(const nlohmann::json& p) {
  reject_unknown(p, {"f", "g"});
  auto c = base_chart("product-curves", p);
  CurveFactor s1{holomorphic_function(string_or(p, "f", "exp"))};
  CurveFactor s2{holomorphic_function(string_or(p, "g", "cube"))};
  c.map = [s1, s2](const Params4& u) -> Point4c {
    auto [z1, z2] = s1.point(u(0), u(1));
    auto [z3, z4] = s2.point(u(2), u(3));
    return {z1, z2, z3, z4};
  };
  c.jacobian = [s1, s2](const Params4& u) -> Jacobian4c {
    auto t1 = s1.tangent(u(0), u(1));
    auto t2 = s2.tangent(u(2), u(3));
    Jacobian4c j = Jacobian4c::Zero();
    for (int a = 0; a < 2; ++a) {
      j(0, a) = t1[a].first;
      j(1, a) = t1[a].second;
      j(2, 2 + a) = t2[a].first;
      j(3, 2 + a) = t2[a].second;
    }
    return j;
  };
  // Keep the cube factor away from its flat point at the origin.
  c.lower = box(-1, -1, 0.3, -1);
  c.upper = box(1, 1, 1.3, 1);
  return c;
}

ImmersionChart j_graph(const nlohmann::json& p) {
  reject_unknown(p, {"coeffs"});
  std::array<double, 4> k = {1.0, 0.5, -0.3, 0.2};
  if (p.contains("coeffs")) {
    auto v = p.at("coeffs").get<std::vector<double>>();
    if (v.size() != 4) throw DomainError("j-graph: coeffs must have 4 entries");
    std::copy(v.begin(), v.end(), k.begin());
  }
  auto c = base_chart("j-graph", p);
  // Φ = k0 w1³ + k1 w1²w3 + k2 w1w3² + k3 w3³; returns (w2, w4) = ∇Φ and the Hessian.
  auto grad = [k](Complex w1, Complex w3) {
    return std::pair<Complex, Complex>{3 * k[0] * w1 * w1 + 2 * k[1] * w1 * w3 + k[2] * w3 * w3,
                                       k[1] * w1 * w1 + 2 * k[2] * w1 * w3 + 3 * k[3] * w3 * w3};
  };
  auto hess = [k](Complex w1, Complex w3) {
    return std::array<Complex, 3>{6 * k[0] * w1 + 2 * k[1] * w3, 2 * k[1] * w1 + 2 * k[2] * w3,
                                  2 * k[2] * w1 + 6 * k[3] * w3};
  };
  c.map = [grad](const Params4& u) -> Point4c {
    const Complex w1(u(0), u(1)), w3(u(2), u(3));
    auto [w2, w4] = grad(w1, w3);
    return {Complex(w1.real(), w2.real()), Complex(-w1.imag(), w2.imag()), Complex(w3.real(), w4.real()),
            Complex(-w3.imag(), w4.imag())};
  };
  c.jacobian = [hess](const Params4& u) -> Jacobian4c {
    const Complex w1(u(0), u(1)), w3(u(2), u(3));
    const auto h = hess(w1, w3);
    Jacobian4c j;
    for (int a = 0; a < 4; ++a) {
      const Complex d1 = a == 0 ? 1.0 : (a == 1 ? kI : Complex(0));
      const Complex d3 = a == 2 ? 1.0 : (a == 3 ? kI : Complex(0));
      const Complex d2 = h[0] * d1 + h[1] * d3, d4 = h[1] * d1 + h[2] * d3;
      j(0, a) = Complex(d1.real(), d2.real());
      j(1, a) = Complex(-d1.imag(), d2.imag());
      j(2, a) = Complex(d3.real(), d4.real());
      j(3, a) = Complex(-d3.imag(), d4.imag());
    }
    return j;
  };
  c.lower = Params4::Constant(-1);
  c.upper = Params4::Constant(1);
  return c;
}

Eigen::Matrix<double, 8, 4> real_form(const Jacobian4c& j) {
  Eigen::Matrix<double, 8, 4> a;
  a.topRows<4>() = j.real();
  a.bottomRows<4>() = j.imag();
  return a;
}

Tensor3<double> raw_second_form(const ImmersionChart& chart, const Params4& u, const FrameData& f, double h,
                                JacobianMode mode) {
  Tensor3<double> raw{};
  for (int j = 0; j < 4; ++j) {
    const Params4 dj = f.param_dirs.col(j);
    const Jacobian4c d = (chart.jacobian_at(u + h * dj, mode) - chart.jacobian_at(u - h * dj, mode)) / (2 * h);
    for (int i = 0; i < 4; ++i) {
      const Point4c second = d * f.param_dirs.col(i).cast<Complex>();
      for (int k = 0; k < 4; ++k) raw[tidx(i, j, k)] = real_dot(second, kI * f.tangent.col(k));
    }
  }
  return raw;
}

double frobenius(const Tensor3<double>& t) {
  double s = 0;
  for (double v : t) s += v * v;
  return std::sqrt(s);
}

JacobianMode default_mode(const ImmersionChart& chart) {
  return chart.jacobian ? JacobianMode::Analytic : JacobianMode::FiniteDifference;
}

bool is_torus_family(const std::string& f) {
  return f == "hl-torus" || f == "asympt-conical" || f == "octahedral-cone";
}

}  // namespace

Jacobian4c ImmersionChart::jacobian_at(const Params4& u, JacobianMode mode, double h) const {
  if (mode == JacobianMode::Analytic && jacobian) return jacobian(u);
  Jacobian4c j;
  for (int a = 0; a < 4; ++a) {
    Params4 e = Params4::Zero();
    e(a) = h;
    j.col(a) = (map(u + e) - map(u - e)) / (2 * h);
  }
  return j;
}

bool ImmersionChart::contains(const Params4& u) const {
  return (u.array() >= lower.array()).all() && (u.array() <= upper.array()).all();
}

Params4 ImmersionChart::sample_interior(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unit(0.1, 0.9);
  Params4 u;
  for (int a = 0; a < 4; ++a) u(a) = lower(a) + unit(rng) * (upper(a) - lower(a));
  return u;
}

HolomorphicFunction holomorphic_function(const std::string& name) {
  if (name == "exp") return {name, [](Complex z) { return std::exp(z); }, [](Complex z) { return std::exp(z); }};
  if (name == "sin") return {name, [](Complex z) { return std::sin(z); }, [](Complex z) { return std::cos(z); }};
  if (name == "square") return {name, [](Complex z) { return z * z; }, [](Complex z) { return 2.0 * z; }};
  if (name == "cube") return {name, [](Complex z) { return z * z * z; }, [](Complex z) { return 3.0 * z * z; }};
  if (name == "identity") return {name, [](Complex z) { return z; }, [](Complex) { return Complex(1); }};
  throw DomainError("unknown holomorphic function: " + name);
}

ImmersionChart make_family(const std::string& label, const nlohmann::json& params) {
  const nlohmann::json p = params.is_null() ? nlohmann::json::object() : params;
  if (label == "flat-plane") return flat_plane(p);
  if (label == "harvey-lawson") return harvey_lawson(p);
  if (label == "hl-torus") return hl_torus(p);
  if (label == "octahedral-cone") return octahedral_cone(p);
  if (label == "asympt-conical") return asympt_conical(p);
  if (label == "product-r2") return product_r2(p);
  if (label == "product-curves") return product_curves(p);
  if (label == "j-graph") return j_graph(p);
  if (label == "lagrangian-plane") return lagrangian_plane(p);
  throw DomainError("unknown family: " + label);
}

ImmersionChart transform_chart(const ImmersionChart& chart, const Eigen::Matrix4cd& unitary, const Point4c& shift) {
  if ((unitary.adjoint() * unitary - Eigen::Matrix4cd::Identity()).norm() > 1e-12)
    throw std::invalid_argument("transform_chart: matrix is not unitary");
  ImmersionChart out = chart;
  auto map = chart.map;
  out.map = [map, unitary, shift](const Params4& u) -> Point4c { return unitary * map(u) + shift; };
  if (chart.jacobian) {
    auto jac = chart.jacobian;
    out.jacobian = [jac, unitary](const Params4& u) -> Jacobian4c { return unitary * jac(u); };
  }
  out.phase = chart.phase - std::arg(unitary.determinant());
  return out;
}

double real_dot(const Point4c& a, const Point4c& b) { return a.dot(b).real(); }
double kahler_form(const Point4c& a, const Point4c& b) { return a.dot(b).imag(); }

FrameData tangent_frame(const ImmersionChart& chart, const Params4& u, JacobianMode mode, double fd_step) {
  const Eigen::Matrix<double, 8, 4> a = real_form(chart.jacobian_at(u, mode, fd_step));
  const Eigen::Vector4d sv = Eigen::JacobiSVD<Eigen::Matrix<double, 8, 4>>(a).singularValues();
  if (!(sv(3) > 1e-8 * sv(0))) throw FrameError("Jacobian is rank deficient at this point");
  Eigen::HouseholderQR<Eigen::Matrix<double, 8, 4>> qr(a);
  Eigen::Matrix<double, 8, 4> q = qr.householderQ() * Eigen::Matrix<double, 8, 4>::Identity();
  Eigen::Matrix4d r = qr.matrixQR().topRows<4>().triangularView<Eigen::Upper>();
  // Positive diagonal makes Q the Gram-Schmidt frame in column order.
  for (int k = 0; k < 4; ++k)
    if (r(k, k) < 0) {
      r.row(k) *= -1;
      q.col(k) *= -1;
    }
  FrameData f;
  f.point = chart.map(u);
  f.tangent.real() = q.topRows<4>();
  f.tangent.imag() = q.bottomRows<4>();
  f.param_dirs = r.triangularView<Eigen::Upper>().solve(Eigen::Matrix4d::Identity());
  return f;
}

SLResidual sl_residual(const ImmersionChart& chart, const Params4& u, JacobianMode mode, double fd_step) {
  return sl_residual(chart, u, chart.phase, mode, fd_step);
}

SLResidual sl_residual(const ImmersionChart& chart, const Params4& u, double phase, JacobianMode mode,
                       double fd_step) {
  const FrameData f = tangent_frame(chart, u, mode, fd_step);
  SLResidual r;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) r.omega = std::max(r.omega, std::abs(kahler_form(f.tangent.col(i), f.tangent.col(j))));
  r.im_omega = std::abs((std::polar(1.0, phase) * f.tangent.determinant()).imag());
  return r;
}

CubicExtract fundamental_cubic(const ImmersionChart& chart, const Params4& u, double fd_step) {
  const JacobianMode mode = default_mode(chart);
  CubicExtract e;
  e.frame = tangent_frame(chart, u, mode);
  e.fd_step = fd_step;
  e.raw = raw_second_form(chart, u, e.frame, fd_step, mode);
  static constexpr int perm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  double asym = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) {
        const int idx[3] = {i, j, k};
        double sum = 0;
        for (const auto& p : perm) {
          const double v = e.raw[tidx(idx[p[0]], idx[p[1]], idx[p[2]])];
          sum += v;
          asym = std::max(asym, std::abs(v - e.raw[tidx(i, j, k)]));
        }
        e.h[tidx(i, j, k)] = sum / 6;
      }
  e.norm = frobenius(e.h);
  if (asym > 1e-4 * e.norm + 1e-10)
    throw ExtractionError("second fundamental form is not symmetric (defect " + std::to_string(asym) +
                          "); step too large or chart not special Lagrangian");
  e.symmetry_defect = e.norm > 0 ? asym / e.norm : 0;
  double tr = 0;
  for (int k = 0; k < 4; ++k) {
    double s = 0;
    for (int i = 0; i < 4; ++i) s += e.h[tidx(i, i, k)];
    tr = std::max(tr, std::abs(s));
  }
  e.trace_defect = e.norm > 0 ? tr / e.norm : 0;
  e.cubic = CubicD::from_tensor(e.h);
  return e;
}

double fd_convergence_order(const ImmersionChart& chart, const Params4& u, double h) {
  const JacobianMode mode = default_mode(chart);
  const FrameData f = tangent_frame(chart, u, mode);
  Tensor3<double> t[3];
  for (int n = 0; n < 3; ++n) t[n] = raw_second_form(chart, u, f, h / (1 << n), mode);
  Tensor3<double> d01, d12;
  for (int m = 0; m < 64; ++m) {
    d01[m] = t[0][m] - t[1][m];
    d12[m] = t[1][m] - t[2][m];
  }
  return std::log2(frobenius(d01) / frobenius(d12));
}

Eigen::Matrix4d adapted_alignment(const ImmersionChart& chart, const Params4& u, JacobianMode mode) {
  if (!is_torus_family(chart.family)) return Eigen::Matrix4d::Identity();
  const Jacobian4c j = chart.jacobian_at(u, mode);
  const FrameData f = tangent_frame(chart, u, mode);
  const Eigen::Matrix<Complex, 4, 3> v = j.rightCols<3>();
  const Eigen::Matrix3d gram = (v.adjoint() * v).real();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(gram);
  const Eigen::Matrix3d inv_sqrt =
      es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  const Eigen::Matrix<Complex, 4, 3> l = v * inv_sqrt.cast<Complex>();
  Point4c n = j.col(0);
  for (int k = 0; k < 3; ++k) n -= real_dot(l.col(k), n) * l.col(k);
  n /= std::sqrt(real_dot(n, n));
  // Half-turn about (1,1,1) puts the cubic in the 𝕋-invariant normal form.
  const Eigen::Matrix3d half_turn = 2.0 / 3 * Eigen::Matrix3d::Ones() - Eigen::Matrix3d::Identity();
  Eigen::Matrix4cd adapted;
  adapted.col(0) = n;
  adapted.rightCols<3>() = l * half_turn.cast<Complex>();
  Eigen::Matrix4d r;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) r(a, b) = real_dot(f.tangent.col(a), adapted.col(b));
  return r;
}

std::map<std::string, double> symmetry_check(const CubicExtract& extract, const FiniteGroup& group,
                                             const Eigen::Matrix4d& alignment) {
  const CubicD p = substitute(extract.cubic, alignment);
  std::map<std::string, double> out;
  for (std::size_t k = 0; k < group.elements.size(); ++k)
    out["g" + std::to_string(k)] = fixed_residual(p, {group.elements[k]});
  return out;
}

double max_residual(const std::map<std::string, double>& residuals) {
  double m = 0;
  for (const auto& [k, v] : residuals) m = std::max(m, v);
  return m;
}

AlignmentSearch search_alignment(const CubicD& cubic, const FiniteGroup& group, int restarts, std::uint64_t seed) {
  using Vec6 = Eigen::Matrix<double, 6, 1>;
  const auto& basis = skew_basis();
  auto rotation = [&](const Vec6& x) {
    Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
    for (int a = 0; a < 6; ++a) s += x(a) * basis[a];
    return Eigen::Matrix4d(s.exp());
  };
  const double scale = std::max(max_abs_coeff(cubic), 1e-300);
  auto objective = [&](const Vec6& x) {
    const CubicD p = substitute(cubic, rotation(x));
    double s = 0;
    for (const auto& g : group.elements) s += to_vector(act(g, p) - p).squaredNorm();
    return s / (scale * scale);
  };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  AlignmentSearch best;
  best.residual = std::numeric_limits<double>::infinity();
  Vec6 best_x = Vec6::Zero();
  double best_f = std::numeric_limits<double>::infinity();
  for (int run = 0; run < restarts; ++run) {
    // Nelder-Mead with standard coefficients.
    std::array<Vec6, 7> simplex;
    std::array<double, 7> fv;
    for (int a = 0; a < 6; ++a) simplex[0](a) = angle(rng);
    for (int v = 1; v < 7; ++v) {
      simplex[v] = simplex[0];
      simplex[v](v - 1) += 0.3;
    }
    for (int v = 0; v < 7; ++v) fv[v] = objective(simplex[v]);
    for (int it = 0; it < 600; ++it) {
      std::array<int, 7> order;
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](int x, int y) { return fv[x] < fv[y]; });
      const int lo = order[0], hi = order[6], second = order[5];
      if (fv[hi] - fv[lo] < 1e-16) break;
      Vec6 centroid = Vec6::Zero();
      for (int v = 0; v < 7; ++v)
        if (v != hi) centroid += simplex[v] / 6;
      const Vec6 xr = centroid + (centroid - simplex[hi]);
      const double fr = objective(xr);
      if (fr < fv[lo]) {
        const Vec6 xe = centroid + 2 * (centroid - simplex[hi]);
        const double fe = objective(xe);
        if (fe < fr) simplex[hi] = xe, fv[hi] = fe;
        else simplex[hi] = xr, fv[hi] = fr;
      } else if (fr < fv[second]) {
        simplex[hi] = xr, fv[hi] = fr;
      } else {
        const Vec6 xc = centroid + 0.5 * (simplex[hi] - centroid);
        const double fc = objective(xc);
        if (fc < fv[hi]) {
          simplex[hi] = xc, fv[hi] = fc;
        } else {
          for (int v = 0; v < 7; ++v)
            if (v != lo) simplex[v] = simplex[lo] + 0.5 * (simplex[v] - simplex[lo]), fv[v] = objective(simplex[v]);
        }
      }
    }
    const int lo = static_cast<int>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    if (fv[lo] < best_f) best_f = fv[lo], best_x = simplex[lo];
  }
  best.rotation = rotation(best_x);
  best.restarts = restarts;
  best.residual = fixed_residual(substitute(cubic, best.rotation), group.elements);
  return best;
}

double zeta1(const Point4c& a, const Point4c& b) { return kahler_form(a, b); }

double zeta2(const Point4c& a, const Point4c& b) {
  auto xx = [&](int i, int j) { return a(i).real() * b(j).real() - a(j).real() * b(i).real(); };
  auto yy = [&](int i, int j) { return a(i).imag() * b(j).imag() - a(j).imag() * b(i).imag(); };
  return xx(0, 1) + xx(2, 3) - yy(0, 1) - yy(2, 3);
}

double zeta3(const Point4c& a, const Point4c& b) {
  // dx_i∧dy_j
  auto xy = [&](int i, int j) { return a(i).real() * b(j).imag() - a(j).imag() * b(i).real(); };
  return xy(0, 1) - xy(1, 0) + xy(2, 3) - xy(3, 2);
}

HyperkahlerResidual hyperkahler_check(const ImmersionChart& chart, const Params4& u, JacobianMode mode) {
  const FrameData f = tangent_frame(chart, u, mode);
  HyperkahlerResidual r;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      r.zeta1 = std::max(r.zeta1, std::abs(zeta1(f.tangent.col(i), f.tangent.col(j))));
      r.zeta3 = std::max(r.zeta3, std::abs(zeta3(f.tangent.col(i), f.tangent.col(j))));
    }
  return r;
}

nlohmann::json to_json(const SLResidual& r) { return {{"omega", r.omega}, {"im_omega", r.im_omega}}; }

nlohmann::json to_json(const CubicExtract& e) {
  return {{"cubic", cubic_to_json(e.cubic)},
          {"norm", e.norm},
          {"symmetry_defect", e.symmetry_defect},
          {"trace_defect", e.trace_defect},
          {"fd_step", e.fd_step}};
}

}  // namespace umbilic4
