#include "umbilic4/eds.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <tuple>

#include "umbilic4/linalg.hpp"

namespace umbilic4 {

namespace {

// dω_k = Σ coeff ω_a∧ω_b, listed as (k, a, b, coeff index into a small per-system lambda).
using DOmegaTerms = std::vector<std::tuple<int, int, int, std::function<double(const State&)>>>;

std::function<double(const State&, int, int, int)> domega_from(DOmegaTerms terms) {
  return [terms = std::move(terms)](const State& x, int k, int a, int b) {
    double out = 0;
    for (const auto& [tk, ta, tb, f] : terms) {
      if (tk != k) continue;
      if (ta == a && tb == b) out += f(x);
      if (ta == b && tb == a) out -= f(x);
    }
    return out;
  };
}

FlowSystem so3_case() {
  FlowSystem s;
  s.label = "so3-case";
  s.variables = {"r", "t"};
  s.field = [](const State& x, int) {
    const double r = x(0), t = x(1);
    State d(2);
    d << -5 * r * t, 4 * r * r - t * t;
    return d;
  };
  s.admissible = [](const State& x) { return x(0) > 0 ? "" : "r > 0"; };
  s.conserved = {{"r^(8/5)+t^2*r^(-2/5)", [](const State& x) {
                    return std::pow(x(0), 1.6) + x(1) * x(1) * std::pow(x(0), -0.4);
                  }}};
  return s;
}

FlowSystem o2_case() {
  FlowSystem s;
  s.label = "o2-case";
  s.variables = {"r", "v", "t1", "t2"};
  s.directions = 2;
  s.field = [](const State& x, int a) {
    const double r = x(0), v = x(1), t1 = x(2), t2 = x(3);
    const double q = t1 * t1 + t2 * t2 + 1;
    State d(4);
    if (a == 0)
      d << -t1 * (3 * r * r - r * v + 6 * v * v), -t1 * v * (7 * v + r), r * q + v * (5 * t1 * t1 - 3 * t2 * t2 + 5),
          8 * v * t1 * t2;
    else
      d << t2 * (r - 3 * v) * (3 * r - 2 * v), t2 * v * (r - 3 * v), 0, (v - r) * q;
    return d;
  };
  s.domega = domega_from({{0, 0, 1, [](const State& x) { return (x(0) - 3 * x(1)) * x(3); }},
                          {1, 0, 1, [](const State& x) { return (x(0) - x(1)) * x(2); }}});
  s.admissible = [](const State& x) -> std::string {
    if (x(1) <= 0) return "v > 0";
    if (x(0) <= x(1)) return "r > v";
    return "";
  };
  s.conserved = {
      {"(t1^2+t2^2+1)*v^(4/5)*(r-3v)/(r-v)^(3/5)",
       [](const State& x) {
         const double r = x(0), v = x(1), t1 = x(2), t2 = x(3);
         return (t1 * t1 + t2 * t2 + 1) * std::pow(v, 0.8) * (r - 3 * v) / std::pow(r - v, 0.6);
       }},
      {"(t2^2*(r-3v)+(r-v)*(t1^2+1))*v^(7/5)/(r-v)^(4/5)", [](const State& x) {
         const double r = x(0), v = x(1), t1 = x(2), t2 = x(3);
         return (t2 * t2 * (r - 3 * v) + (r - v) * (t1 * t1 + 1)) * std::pow(v, 1.4) / std::pow(r - v, 0.8);
       }}};
  return s;
}

FlowSystem tetra_case() {
  FlowSystem s;
  s.label = "tetra-case";
  s.variables = {"r", "s"};
  s.field = [](const State& x, int) {
    const double r = x(0), sv = x(1);
    const double q = std::sqrt(std::max(0.0, sv * sv - r * r));
    State d(2);
    d << -5 * r * q, -sv * q;
    return d;
  };
  s.admissible = [](const State& x) -> std::string {
    return x(1) * x(1) - x(0) * x(0) < 1e-12 ? "s^2 - r^2 > 0" : "";
  };
  s.conserved = {{"r/s^5", [](const State& x) { return x(0) / std::pow(x(1), 5); }}};
  return s;
}

FlowSystem octa_case() {
  FlowSystem s;
  s.label = "octa-case";
  s.variables = {"s"};
  s.field = [](const State& x, int) {
    State d(1);
    d << -x(0) * x(0);
    return d;
  };
  s.admissible = [](const State& x) { return x(0) != 0 ? "" : "s != 0"; };
  return s;
}

FlowSystem d3_conical() {
  FlowSystem s;
  s.label = "d3-conical";
  s.variables = {"r", "s", "t1", "t2", "t3", "t4", "t5", "m1", "m2", "m3", "m4"};
  s.directions = 4;
  s.field = [](const State& x, int a) {
    const double r = x(0), sv = x(1), t1 = x(2), t2 = x(3), t3 = x(4), t4 = x(5), t5 = x(6);
    const double m1 = x(7), m2 = x(8), m3 = x(9), m4 = x(10);
    State d = State::Zero(11);
    switch (a) {
      case 0:
        d(0) = -3 * r * t4;
        d(3) = m1;
        d(4) = m3;
        d(5) = m4;
        d(6) = m2 / 3;
        break;
      case 1:
        d(0) = 3 * r * t3;
        d(3) = m2;
        d(4) = m4 - 2 * r * r + t1 * t1 + t2 * t2 + t3 * t3 + t4 * t4 + 15 * t5 * t5 + sv * sv;
        d(5) = -(m3 + 2 * t2 * t5);
        d(6) = -m1 / 3;
        break;
      case 2:
        d(0) = -r * t1;
        d(1) = -5 * sv * t1;
        d(2) = 4 * sv * sv - t1 * t1;
        d(3) = -t1 * t2;
        d(4) = -t1 * t3;
        d(5) = -t1 * t4;
        d(6) = -t1 * t5;
        break;
      default:
        d(0) = r * t2;
        d(3) = t1 * t1 + t2 * t2 + sv * sv - 9 * t5 * t5;
        d(4) = t2 * t3 - 2 * t4 * t5 + m2 / 3;
        d(5) = 2 * t3 * t5 + t2 * t4 - m1 / 3;
        d(6) = 2 * t2 * t5;
    }
    return d;
  };
  auto t = [](int i) { return [i](const State& x) { return x(1 + i); }; };
  auto scaled = [](int i, double c) { return [i, c](const State& x) { return c * x(1 + i); }; };
  s.domega = domega_from({{0, 2, 0, t(1)},
                          {0, 3, 0, scaled(2, -1)},
                          {0, 3, 1, scaled(5, -2)},
                          {0, 0, 1, t(3)},
                          {1, 0, 1, t(4)},
                          {1, 1, 2, scaled(1, -1)},
                          {1, 1, 3, t(2)},
                          {1, 3, 0, scaled(5, 2)},
                          {3, 0, 1, scaled(5, 6)},
                          {3, 2, 3, t(1)}});
  s.admissible = [](const State& x) -> std::string {
    if (x(0) <= 0) return "r > 0";
    if (x(1) <= 0) return "s > 0";
    return "";
  };
  s.conserved = {{"s^(8/5)+t1^2*s^(-2/5)", [](const State& x) {
                    return std::pow(x(1), 1.6) + x(2) * x(2) * std::pow(x(1), -0.4);
                  }}};
  return s;
}

FlowSystem product_case() {
  FlowSystem s;
  s.label = "product-case";
  s.variables = {"r", "v", "t1", "t2", "t3", "t4", "u1", "u2", "u3", "u4"};
  s.directions = 4;
  s.field = [](const State& x, int a) {
    const double r = x(0), v = x(1), t1 = x(2), t2 = x(3), t3 = x(4), t4 = x(5);
    const double u1 = x(6), u2 = x(7), u3 = x(8), u4 = x(9);
    State d = State::Zero(10);
    switch (a) {
      case 0:
        d(0) = -3 * r * t4;
        d(4) = u3;
        d(5) = u4;
        break;
      case 1:
        d(0) = 3 * r * t3;
        d(4) = t3 * t3 + t4 * t4 - 2 * r * r + u4;
        d(5) = -u3;
        break;
      case 2:
        d(1) = -3 * v * t2;
        d(2) = u1;
        d(3) = u2;
        break;
      default:
        d(1) = 3 * v * t1;
        d(2) = t1 * t1 + t2 * t2 - 2 * v * v + u2;
        d(3) = -u1;
    }
    return d;
  };
  auto t = [](int i) { return [i](const State& x) { return x(1 + i); }; };
  s.domega = domega_from({{0, 0, 1, t(3)}, {1, 0, 1, t(4)}, {2, 2, 3, t(1)}, {3, 2, 3, t(2)}});
  s.admissible = [](const State& x) -> std::string {
    if (x(0) <= 0) return "r > 0";
    if (x(1) <= 0) return "v > 0";
    return "";
  };
  return s;
}

const std::map<std::string, std::vector<double>>& default_states() {
  static const std::map<std::string, std::vector<double>> d = {
      {"so3-case", {1, 0}},
      {"o2-case", {2, 0.5, 0.3, -0.2}},
      {"tetra-case", {std::pow(0.8, 5), 0.8}},
      {"octa-case", {1}},
      {"d3-conical", {1, 1, 0.2, 0.1, -0.1, 0.3, 0.05, 0, 0, 0, 0}},
      {"product-case", {1, 0.7, 0.1, -0.2, 0.3, 0.1, 0, 0, 0, 0}}};
  return d;
}

State combined_field(const FlowSystem& sys, const State& x, const Eigen::VectorXd& dir) {
  State out = State::Zero(sys.dim());
  for (int a = 0; a < sys.directions; ++a)
    if (dir(a) != 0) out += dir(a) * sys.field(x, a);
  return out;
}

State rk4_step(const FlowSystem& sys, const State& x, const Eigen::VectorXd& dir, double h) {
  const State k1 = combined_field(sys, x, dir);
  const State k2 = combined_field(sys, x + 0.5 * h * k1, dir);
  const State k3 = combined_field(sys, x + 0.5 * h * k2, dir);
  const State k4 = combined_field(sys, x + h * k3, dir);
  return x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
}

State flow_along(const FlowSystem& sys, State x, int a, double time, int substeps) {
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(sys.directions);
  dir(a) = 1;
  for (int i = 0; i < substeps; ++i) x = rk4_step(sys, x, dir, time / substeps);
  return x;
}

std::vector<double> evaluate_conserved(const FlowSystem& sys, const State& x) {
  std::vector<double> out;
  for (const auto& q : sys.conserved) out.push_back(q.evaluate(x));
  return out;
}

}  // namespace

int FlowSystem::index(const std::string& name) const {
  auto it = std::find(variables.begin(), variables.end(), name);
  if (it == variables.end()) throw std::invalid_argument(label + ": no variable " + name);
  return static_cast<int>(it - variables.begin());
}

std::vector<std::string> flow_system_labels() {
  return {"so3-case", "o2-case", "tetra-case", "octa-case", "d3-conical", "product-case"};
}

FlowSystem flow_system(const std::string& label) {
  if (label == "so3-case") return so3_case();
  if (label == "o2-case") return o2_case();
  if (label == "tetra-case") return tetra_case();
  if (label == "octa-case") return octa_case();
  if (label == "d3-conical") return d3_conical();
  if (label == "product-case") return product_case();
  throw std::invalid_argument("unknown flow system: " + label);
}

State make_state(const FlowSystem& sys, const nlohmann::json& values) {
  const auto& d = default_states().at(sys.label);
  State x = Eigen::Map<const State>(d.data(), static_cast<Eigen::Index>(d.size()));
  if (!values.is_object()) throw std::invalid_argument("initial state must be a JSON object");
  for (const auto& [k, v] : values.items()) x(sys.index(k)) = v.get<double>();
  return x;
}

std::vector<PathSegment> straight_path(const FlowSystem& sys, int direction, double length) {
  PathSegment seg;
  seg.direction = Eigen::VectorXd::Zero(sys.directions);
  seg.direction(direction) = 1;
  seg.length = length;
  return {seg};
}

Trajectory flow(const FlowSystem& sys, const State& init, const std::vector<PathSegment>& path, double step) {
  if (init.size() != sys.dim()) throw std::invalid_argument(sys.label + ": wrong state dimension");
  if (step <= 0) throw std::invalid_argument("step must be positive");
  Trajectory out;
  if (const auto bad = sys.admissible(init); !bad.empty()) {
    out.boundary = "initial state violates " + bad;
    return out;
  }
  State x = init;
  double s = 0;
  out.arclength.push_back(s);
  out.states.push_back(x);
  out.conserved.push_back(evaluate_conserved(sys, x));
  for (const auto& seg : path) {
    if (seg.direction.size() != sys.directions)
      throw std::invalid_argument(sys.label + ": path direction needs " + std::to_string(sys.directions) +
                                  " components");
    const double speed = seg.direction.norm();
    const int n = std::max(1, static_cast<int>(std::ceil(seg.length / step - 1e-9)));
    const double h = seg.length / n;
    for (int i = 0; i < n; ++i) {
      const State next = rk4_step(sys, x, seg.direction, h);
      if (const auto bad = sys.admissible(next); !bad.empty() || !next.allFinite()) {
        out.boundary = "halted at arclength " + std::to_string(s) + ": " + (bad.empty() ? "non-finite state" : bad);
        return out;
      }
      x = next;
      s += h * speed;
      out.arclength.push_back(s);
      out.states.push_back(x);
      out.conserved.push_back(evaluate_conserved(sys, x));
    }
  }
  return out;
}

std::map<std::string, double> conserved_report(const FlowSystem& sys, const Trajectory& traj) {
  std::map<std::string, double> out;
  for (std::size_t q = 0; q < sys.conserved.size(); ++q) {
    double drift = 0;
    if (!traj.conserved.empty()) {
      const double q0 = traj.conserved.front()[q];
      const double denom = std::abs(q0) < 1e-12 ? 1.0 : std::abs(q0);
      for (const auto& c : traj.conserved) drift = std::max(drift, std::abs(c[q] - q0) / denom);
    }
    out[sys.conserved[q].label] = drift;
  }
  return out;
}

MixedPartialReport mixed_partial_check(const FlowSystem& sys, const State& x, int a, int b, double h) {
  MixedPartialReport rep;
  for (int level = 0; level < 3; ++level, h /= 2) {
    rep.steps.push_back(h);
    if (sys.directions < 2 || a == b || !sys.domega) {
      rep.defects.push_back(0);
      continue;
    }
    // Sub-steps keep the RK4 error (h⁵/16⁴) well below the O(h³) commutator being measured.
    const int sub = 16;
    const State ab = flow_along(sys, flow_along(sys, x, a, h, sub), b, h, sub);
    const State ba = flow_along(sys, flow_along(sys, x, b, h, sub), a, h, sub);
    State bracket = State::Zero(sys.dim());
    for (int k = 0; k < sys.directions; ++k) bracket -= sys.domega(x, k, a, b) * sys.field(x, k);
    rep.defects.push_back((ab - ba - h * h * bracket).cwiseAbs().maxCoeff() / h);
  }
  const double d1 = rep.defects[1], d2 = rep.defects[2];
  rep.order = (d1 > 0 && d2 > 0) ? std::log2(d1 / d2) : 0;
  return rep;
}

double integrator_order(const FlowSystem& sys, const State& init, const std::vector<PathSegment>& path, double step,
                        int quantity) {
  auto drift = [&](double h) {
    const auto t = flow(sys, init, path, h);
    return conserved_report(sys, t).at(sys.conserved.at(quantity).label);
  };
  return std::log2(drift(step) / drift(step / 2));
}

MetricCubicPair flat_pair() {
  MetricCubicPair p;
  p.label = "flat";
  p.coframe = [](const Eigen::Vector4d&) { return Eigen::Matrix4d::Identity().eval(); };
  p.cubic = [](const Eigen::Vector4d&) { return Tensor3<double>{}; };
  p.lower = Eigen::Vector4d::Constant(-1);
  p.upper = Eigen::Vector4d::Constant(1);
  return p;
}

MetricCubicPair so3_pair(double c, double cubic_scale, double theta_max) {
  MetricCubicPair p;
  p.label = "so3";
  p.coframe = [c](const Eigen::Vector4d& x) {
    const double k = std::cos(4 * x(0));
    if (k <= 0) throw CoframeError("so3 pair: cos 4θ must be positive");
    const double conf = 2 / (1 + x.tail<3>().squaredNorm());
    Eigen::Matrix4d w = Eigen::Matrix4d::Zero();
    w(0, 0) = 1 / (c * std::pow(k, 1.25));
    for (int i = 1; i < 4; ++i) w(i, i) = conf / (c * std::pow(k, 0.25));
    return w;
  };
  p.cubic = [c, cubic_scale](const Eigen::Vector4d& x) {
    const double r = cubic_scale * c * std::pow(std::cos(4 * x(0)), 1.25);
    Tensor3<double> h{};
    h[tidx(0, 0, 0)] = -3 * r;
    for (int i = 1; i < 4; ++i) h[tidx(0, i, i)] = h[tidx(i, 0, i)] = h[tidx(i, i, 0)] = r;
    return h;
  };
  p.lower = Eigen::Vector4d(-theta_max, -0.5, -0.5, -0.5);
  p.upper = Eigen::Vector4d(theta_max, 0.5, 0.5, 0.5);
  return p;
}

MetricCubicPair rotate_pair(const MetricCubicPair& pair, const Eigen::Matrix4d& rot) {
  MetricCubicPair p = pair;
  p.label = pair.label + "-rotated";
  p.coframe = [f = pair.coframe, rot](const Eigen::Vector4d& x) { return Eigen::Matrix4d(rot * f(x)); };
  p.cubic = [f = pair.cubic, rot](const Eigen::Vector4d& x) {
    const Tensor3<double> h = f(x);
    Tensor3<double> out{};
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c) {
          double s = 0;
          for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
              for (int k = 0; k < 4; ++k) s += rot(a, i) * rot(b, j) * rot(c, k) * h[tidx(i, j, k)];
          out[tidx(a, b, c)] = s;
        }
    return out;
  };
  return p;
}

namespace {

// A 1-form-valued 4×4 matrix: forms[i][j] is the coordinate covector of the (i,j) entry.
using FormMatrix = std::array<std::array<Eigen::Vector4d, 4>, 4>;
// A 2-form-valued 4×4 matrix, coordinate components.
using TwoFormMatrix = std::array<std::array<Eigen::Matrix4d, 4>, 4>;

// Maps connection coefficients A[i][j][k] = α_ij(P_k), i < j, to dω_i(P_a, P_b), a < b.
const Eigen::Matrix<double, 24, 24>& connection_solver() {
  static const Eigen::Matrix<double, 24, 24> inv = [] {
    auto pair_index = [](int i, int j) {
      int n = 0;
      for (int p = 0; p < 4; ++p)
        for (int q = p + 1; q < 4; ++q, ++n)
          if (p == i && q == j) return n;
      return -1;
    };
    Eigen::Matrix<double, 24, 24> m = Eigen::Matrix<double, 24, 24>::Zero();
    // dω_i(P_a, P_b) = α_ia(P_b) - α_ib(P_a), with α_ij = -α_ji.
    auto coef = [&](int i, int j, int k) -> std::pair<int, double> {
      if (i == j) return {-1, 0.0};
      if (i < j) return {pair_index(i, j) * 4 + k, 1.0};
      return {pair_index(j, i) * 4 + k, -1.0};
    };
    for (int i = 0; i < 4; ++i)
      for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
          const int row = i * 6 + pair_index(a, b);
          if (auto [c, s] = coef(i, a, b); c >= 0) m(row, c) += s;
          if (auto [c, s] = coef(i, b, a); c >= 0) m(row, c) -= s;
        }
    return Eigen::Matrix<double, 24, 24>(m.inverse());
  }();
  return inv;
}

Eigen::Matrix4d checked_coframe(const MetricCubicPair& pair, const Eigen::Vector4d& x) {
  const Eigen::Matrix4d w = pair.coframe(x);
  if (!w.allFinite() || std::abs(w.determinant()) < 1e-12) throw CoframeError(pair.label + ": degenerate coframe");
  return w;
}

// Coordinate components of dω_i.
std::array<Eigen::Matrix4d, 4> coframe_derivative(const MetricCubicPair& pair, const Eigen::Vector4d& x, double h) {
  std::array<Eigen::Matrix4d, 4> dw;  // dw[mu](i, nu) = ∂_mu W_i,nu
  for (int mu = 0; mu < 4; ++mu) {
    Eigen::Vector4d e = Eigen::Vector4d::Zero();
    e(mu) = h;
    dw[mu] = (checked_coframe(pair, x + e) - checked_coframe(pair, x - e)) / (2 * h);
  }
  std::array<Eigen::Matrix4d, 4> out;
  for (int i = 0; i < 4; ++i)
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) out[i](mu, nu) = dw[mu](i, nu) - dw[nu](i, mu);
  return out;
}

FormMatrix connection_forms(const MetricCubicPair& pair, const Eigen::Vector4d& x, double h) {
  const Eigen::Matrix4d w = checked_coframe(pair, x);
  const Eigen::Matrix4d p = w.inverse();
  const auto dom = coframe_derivative(pair, x, h);
  Eigen::Matrix<double, 24, 1> t;
  for (int i = 0; i < 4; ++i) {
    const Eigen::Matrix4d frame = p.transpose() * dom[i] * p;
    int n = 0;
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b, ++n) t(i * 6 + n) = frame(a, b);
  }
  const Eigen::Matrix<double, 24, 1> coeff = connection_solver() * t;
  FormMatrix alpha;
  for (int i = 0; i < 4; ++i) alpha[i][i].setZero();
  int n = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j, ++n) {
      Eigen::Vector4d frame_comp = coeff.segment<4>(n * 4);
      alpha[i][j] = w.transpose() * frame_comp;
      alpha[j][i] = -alpha[i][j];
    }
  return alpha;
}

FormMatrix second_fundamental_forms(const MetricCubicPair& pair, const Eigen::Vector4d& x) {
  const Eigen::Matrix4d w = checked_coframe(pair, x);
  const Tensor3<double> hc = pair.cubic(x);
  FormMatrix beta;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Eigen::Vector4d c;
      for (int k = 0; k < 4; ++k) c(k) = hc[tidx(i, j, k)];
      beta[i][j] = w.transpose() * c;
    }
  return beta;
}

Eigen::Matrix4d wedge(const Eigen::Vector4d& a, const Eigen::Vector4d& b) {
  return a * b.transpose() - b * a.transpose();
}

TwoFormMatrix exterior_derivative(const std::function<FormMatrix(const Eigen::Vector4d&)>& f,
                                  const Eigen::Vector4d& x, double h) {
  std::array<FormMatrix, 4> plus, minus;
  for (int mu = 0; mu < 4; ++mu) {
    Eigen::Vector4d e = Eigen::Vector4d::Zero();
    e(mu) = h;
    plus[mu] = f(x + e);
    minus[mu] = f(x - e);
  }
  TwoFormMatrix out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Eigen::Matrix4d d;  // d(mu, nu) = ∂_mu f_nu
      for (int mu = 0; mu < 4; ++mu) d.row(mu) = ((plus[mu][i][j] - minus[mu][i][j]) / (2 * h)).transpose();
      out[i][j] = d - d.transpose();
    }
  return out;
}

double frame_norm(const TwoFormMatrix& m, const Eigen::Matrix4d& p) {
  double s = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const Eigen::Matrix4d f = p.transpose() * m[i][j] * p;
      s += 0.5 * f.squaredNorm();  // each a < b pair counted once
    }
  return std::sqrt(s);
}

}  // namespace

GaussCodazziResidual gauss_codazzi_residual(const MetricCubicPair& pair, int n, double h) {
  if (n < 1) throw std::invalid_argument("grid needs at least one point per axis");
  GaussCodazziResidual res;
  auto alpha_at = [&](const Eigen::Vector4d& x) { return connection_forms(pair, x, h); };
  auto beta_at = [&](const Eigen::Vector4d& x) { return second_fundamental_forms(pair, x); };
  const int total = n * n * n * n;
  for (int idx = 0; idx < total; ++idx) {
    Eigen::Vector4d x;
    for (int mu = 0, rem = idx; mu < 4; ++mu, rem /= n) {
      const double f = n == 1 ? 0.5 : static_cast<double>(rem % n) / (n - 1);
      x(mu) = pair.lower(mu) + f * (pair.upper(mu) - pair.lower(mu));
    }
    const Eigen::Matrix4d p = checked_coframe(pair, x).inverse();
    const FormMatrix a = alpha_at(x), b = beta_at(x);
    TwoFormMatrix g = exterior_derivative(alpha_at, x, h), k = exterior_derivative(beta_at, x, h);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int m = 0; m < 4; ++m) {
          g[i][j] += wedge(a[i][m], a[m][j]) - wedge(b[i][m], b[m][j]);
          k[i][j] += wedge(b[i][m], a[m][j]) + wedge(a[i][m], b[m][j]);
        }
    res.gauss = std::max(res.gauss, frame_norm(g, p));
    res.codazzi = std::max(res.codazzi, frame_norm(k, p));
  }
  return res;
}

GaussCodazziConvergence gauss_codazzi_convergence(const MetricCubicPair& pair, int n, double h) {
  GaussCodazziConvergence c;
  c.h = h;
  c.at_h = gauss_codazzi_residual(pair, n, h);
  c.at_half = gauss_codazzi_residual(pair, n, h / 2);
  c.order = (c.at_h.max() > 0 && c.at_half.max() > 0) ? std::log2(c.at_h.max() / c.at_half.max()) : 0;
  return c;
}

TableauMatrix tableau_from_json(const nlohmann::json& j) {
  TableauMatrix t;
  t.name = j.value("name", "");
  t.pi_names = j.at("pi").get<std::vector<std::string>>();
  t.cols = j.at("cols").get<int>();
  const auto& rows = j.at("rows");
  t.rows = static_cast<int>(rows.size());
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != t.cols) throw std::invalid_argument("tableau row has wrong length");
    std::vector<std::vector<double>> r;
    for (const auto& entry : row) {
      std::vector<double> c(t.pi_names.size(), 0.0);
      for (const auto& [name, v] : entry.items()) {
        auto it = std::find(t.pi_names.begin(), t.pi_names.end(), name);
        if (it == t.pi_names.end()) throw std::invalid_argument("tableau entry uses unknown form " + name);
        c[it - t.pi_names.begin()] = v.get<double>();
      }
      r.push_back(std::move(c));
    }
    t.coeffs.push_back(std::move(r));
  }
  return t;
}

TableauMatrix load_tableau(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open tableau file " + path);
  return tableau_from_json(nlohmann::json::parse(in));
}

namespace {

int exact_rank(const std::vector<std::vector<Rational>>& rows, int ncols) {
  if (rows.empty()) return 0;
  return ncols - static_cast<int>(exact_nullspace(rows, ncols).size());
}

}  // namespace

CartanCharacters cartan_characters(const TableauMatrix& t, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const int m = static_cast<int>(t.pi_names.size());
  std::vector<std::vector<std::vector<Rational>>> coeffs(t.rows);
  for (int r = 0; r < t.rows; ++r)
    for (int c = 0; c < t.cols; ++c) {
      std::vector<Rational> v(m);
      for (int k = 0; k < m; ++k) v[k] = Rational(t.coeffs[r][c][k]);
      coeffs[r].push_back(std::move(v));
    }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dist(-7, 7);
  std::vector<int> best(t.cols + 1, 0);
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<std::vector<Rational>> g;
    do {
      g.assign(t.cols, std::vector<Rational>(t.cols));
      for (auto& row : g)
        for (auto& v : row) v = dist(rng);
    } while (exact_rank(g, t.cols) < t.cols);
    std::vector<std::vector<Rational>> forms;
    for (int k = 1; k <= t.cols; ++k) {
      // Column k-1 of the tableau in the new basis: Σ_j T[row][j]·g[j][k-1].
      for (int r = 0; r < t.rows; ++r) {
        std::vector<Rational> v(m, Rational(0));
        for (int j = 0; j < t.cols; ++j)
          if (g[j][k - 1] != 0)
            for (int q = 0; q < m; ++q) v[q] += coeffs[r][j][q] * g[j][k - 1];
        forms.push_back(std::move(v));
      }
      best[k] = std::max(best[k], exact_rank(forms, m));
    }
  }
  CartanCharacters out;
  out.trials = trials;
  for (int k = 1; k <= t.cols; ++k) out.s.push_back(best[k] - best[k - 1]);
  out.rank = best[t.cols];
  return out;
}

nlohmann::json to_json(const Trajectory& t, const FlowSystem& sys) {
  nlohmann::json states = nlohmann::json::array();
  for (std::size_t i = 0; i < t.states.size(); ++i) {
    nlohmann::json s = {{"arclength", t.arclength[i]}};
    for (int k = 0; k < sys.dim(); ++k) s[sys.variables[k]] = t.states[i](k);
    nlohmann::json q = nlohmann::json::object();
    for (std::size_t c = 0; c < sys.conserved.size(); ++c) q[sys.conserved[c].label] = t.conserved[i][c];
    s["conserved"] = q;
    states.push_back(s);
  }
  nlohmann::json drift = nlohmann::json::object();
  for (const auto& [k, v] : conserved_report(sys, t)) drift[k] = v;
  return {{"system", sys.label},
          {"steps", t.states.empty() ? 0 : t.states.size() - 1},
          {"boundary", t.boundary ? nlohmann::json(*t.boundary) : nlohmann::json(nullptr)},
          {"max_relative_drift", drift},
          {"trajectory", states}};
}

nlohmann::json to_json(const MixedPartialReport& r) {
  return {{"steps", r.steps}, {"defects", r.defects}, {"order", r.order}};
}

nlohmann::json to_json(const GaussCodazziConvergence& c) {
  return {{"h", c.h},
          {"gauss", c.at_h.gauss},
          {"codazzi", c.at_h.codazzi},
          {"gauss_half_step", c.at_half.gauss},
          {"codazzi_half_step", c.at_half.codazzi},
          {"order", c.order}};
}

nlohmann::json to_json(const CartanCharacters& c) {
  return {{"characters", c.s}, {"rank", c.rank}, {"trials", c.trials}};
}

}  // namespace umbilic4
