#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "umbilic4/acceptance.hpp"
#include "umbilic4/eds.hpp"
#include "umbilic4/geom.hpp"
#include "umbilic4/groups.hpp"
#include "umbilic4/harmonic.hpp"
#include "umbilic4/report.hpp"
#include "umbilic4/stabilizer.hpp"
#include "umbilic4/torus.hpp"

using namespace umbilic4;
using nlohmann::json;

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Options {
  std::uint64_t seed = 1;
  double tol_scale = 1;
  std::string output;
  std::string format = "json";

  // groups
  std::string label = "T";
  FamilyParams family;
  bool numeric = false;
  // cubic
  std::string coeffs;
  double rel_tol = 1e-9;
  // torus
  int max_den = 60;
  bool json_table = false;
  std::string r = "0", s = "0";
  // geom
  std::string geom_family = "harvey-lawson";
  std::string params = "{}";
  int samples = 20;
  double phase = NAN;
  double fd_step = 1e-4;
  // eds
  std::string system = "so3-case";
  std::string init = "{}";
  std::string path;
  double step = 1e-3;
  int dir_a = 0, dir_b = 1;
  std::string pair = "so3";
  double pair_c = 1, cubic_scale = 1, theta_max = M_PI / 64;
  double h = 1e-3;
  int grid = 3;
  std::string tableau;
  int trials = 32;
  std::string expect;
  // suite
  std::vector<std::string> filter;
  std::vector<std::string> tol_overrides;
  std::string data_dir;
};

json parse_json_arg(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(what + ": invalid JSON (" + e.what() + ")");
  }
}

Rational parse_rational(const std::string& text) {
  try {
    Rational q(text);
    q.canonicalize();
    return q;
  } catch (const std::exception&) {
    throw UsageError("not a rational number: " + text);
  }
}

Report base_report(const Options& o, const std::vector<std::string>& command) {
  Report rep;
  rep.command = command;
  rep.seed = o.seed;
  return rep;
}

void tally(Report& rep, bool pass) { (pass ? rep.passed : rep.failed)++; }

Report cmd_groups_build(const Options& o, const std::vector<std::string>& cmd) {
  Report rep = base_report(o, cmd);
  const FiniteGroup g = build_so4_subgroup(o.label, o.family);
  rep.results = to_json(g, !o.numeric);
  rep.results["contains_minus_identity"] = contains_minus_identity(g);
  tally(rep, true);
  return rep;
}

Report cmd_cubic_stabilizer(const Options& o, const std::vector<std::string>& cmd) {
  Report rep = base_report(o, cmd);
  rep.tolerances["rel_tol"] = o.rel_tol;
  const CubicD p = cubic_from_json(parse_json_arg(o.coeffs, "--coeffs"));
  const StabilizerReport st = stabilizer_algebra(p, o.rel_tol);
  rep.results = to_json(st);
  rep.results["cubic"] = cubic_to_json(p);
  rep.results["laplacian_max"] = [&] {
    double m = 0;
    for (double v : laplacian(p)) m = std::max(m, std::abs(v));
    return m;
  }();
  if (st.algebra_dim > 0) {
    try {
      rep.results["orbit"] = classify_continuous_orbit(p, o.rel_tol);
    } catch (const OrbitAnomaly& e) {
      rep.results["orbit"] = std::string("anomaly: ") + e.what();
    }
  }
  tally(rep, true);
  return rep;
}

Report cmd_cubic_fixed(const Options& o, const std::vector<std::string>& cmd) {
  Report rep = base_report(o, cmd);
  const ExactFixedSubspace ex = fixed_subspace_exact(so4_generators_exact(o.label));
  json basis = json::array();
  for (const auto& b : ex.basis) basis.push_back(cubic_to_json(b));
  rep.results = {{"label", o.label}, {"dim", ex.dim}, {"basis", basis}};
  tally(rep, true);
  return rep;
}

Report cmd_torus_scan(const Options& o, const std::vector<std::string>& cmd) {
  Report rep = base_report(o, cmd);
  if (o.max_den < 1) throw UsageError("--max-den must be positive");
  const SmallOrderScan scan = enumerate_small_orders(o.max_den);
  rep.results = to_json(scan);
  tally(rep, scan.max_order_hit <= 6);
  return rep;
}

Report cmd_torus_fixed(const Options& o, const std::vector<std::string>& cmd) {
  Report rep = base_report(o, cmd);
  const TorusElement g(parse_rational(o.r), parse_rational(o.s));
  const FixedCubicBasis b = fixed_cubic_basis(g);
  rep.results = to_json(b);
  rep.results["element"] = g.to_string();
  rep.results["order"] = element_order(g);
  rep.results["chamber_representative"] = weyl_reduce(g).to_string();
  rep.results["kernel_dim"] = fixed_subspace({torus_matrix(g)}).dim;
  tally(rep, rep.results["kernel_dim"].get<int>() == b.dim);
  return rep;
}

Report cmd_geom_verify(const Options& o, const std::vector<std::string>& cmd) {
  Report rep = base_report(o, cmd);
  if (o.samples < 1) throw UsageError("--samples must be positive");
  const ImmersionChart chart = make_family(o.geom_family, parse_json_arg(o.params, "--params"));
  const double phase = std::isnan(o.phase) ? chart.phase : o.phase;
  const double tol_an = 1e-8 * o.tol_scale, tol_fd = 1e-5 * o.tol_scale;
  rep.tolerances = {{"analytic", tol_an}, {"fd", tol_fd}, {"fd_jacobian_step", 1e-5}, {"cubic_fd_step", o.fd_step}};
  std::mt19937_64 rng(o.seed);
  json points = json::array();
  double worst_an = 0, worst_fd = 0;
  for (int t = 0; t < o.samples; ++t) {
    const Params4 u = chart.sample_interior(rng);
    const SLResidual a = sl_residual(chart, u, phase, JacobianMode::Analytic);
    const SLResidual f = sl_residual(chart, u, phase, JacobianMode::FiniteDifference, 1e-5);
    worst_an = std::max({worst_an, a.omega, a.im_omega});
    worst_fd = std::max({worst_fd, f.omega, f.im_omega});
    json pt = {{"u", {u(0), u(1), u(2), u(3)}}, {"analytic", to_json(a)}, {"fd", to_json(f)}};
    try {
      const CubicExtract e = fundamental_cubic(chart, u, o.fd_step);
      pt["cubic_norm"] = e.norm;
      pt["symmetry_defect"] = e.symmetry_defect;
      pt["trace_defect"] = e.trace_defect;
      pt["stabilizer_dim"] = stabilizer_algebra(e.cubic, 1e-6).algebra_dim;
      pt["convergence_order"] = fd_convergence_order(chart, u);
    } catch (const ExtractionError& e) {
      pt["cubic_error"] = e.what();
    }
    points.push_back(pt);
  }
  rep.results = {{"family", chart.family}, {"params", chart.params}, {"phase", phase},
                 {"max_analytic", worst_an}, {"max_fd", worst_fd}, {"points", points}};
  tally(rep, worst_an < tol_an);
  tally(rep, worst_fd < tol_fd);
  return rep;
}

std::vector<PathSegment> parse_path(const FlowSystem& sys, const std::string& text) {
  if (text.empty()) return straight_path(sys, 0);
  const json j = parse_json_arg(text, "--path");
  if (!j.is_array()) throw UsageError("--path must be a list of {\"direction\": [...], \"length\": L}");
  std::vector<PathSegment> path;
  for (const auto& seg : j) {
    if (!seg.is_object() || !seg.contains("direction")) throw UsageError("path segment needs a direction");
    for (const auto& [key, _] : seg.items())
      if (key != "direction" && key != "length") throw UsageError("unknown path key: " + key);
    const auto dir = seg.at("direction").get<std::vector<double>>();
    PathSegment p;
    p.direction = Eigen::Map<const Eigen::VectorXd>(dir.data(), static_cast<Eigen::Index>(dir.size()));
    p.length = seg.value("length", 1.0);
    path.push_back(p);
  }
  return path;
}

Report cmd_eds_flow(const Options& o, const std::vector<std::string>& cmd) {
  Report rep = base_report(o, cmd);
  const FlowSystem sys = flow_system(o.system);
  const State x = make_state(sys, parse_json_arg(o.init, "--init"));
  const Trajectory traj = flow(sys, x, parse_path(sys, o.path), o.step);
  const double tol = 1e-7 * o.tol_scale;
  rep.tolerances = {{"drift", tol}, {"step", o.step}};
  const auto drift = conserved_report(sys, traj);
  rep.results = {{"trajectory", to_json(traj, sys)}, {"drift", drift}};
  for (const auto& [label, d] : drift) tally(rep, d < tol);
  return rep;
}

Report cmd_eds_mixed(const Options& o, const std::vector<std::string>& cmd) {
  Report rep = base_report(o, cmd);
  const FlowSystem sys = flow_system(o.system);
  const State x = make_state(sys, parse_json_arg(o.init, "--init"));
  if (o.dir_a < 0 || o.dir_b < 0 || o.dir_a >= sys.directions || o.dir_b >= sys.directions)
    throw UsageError("direction index out of range for " + sys.label);
  const MixedPartialReport r = mixed_partial_check(sys, x, o.dir_a, o.dir_b, o.h);
  rep.tolerances = {{"order_min", 1.5}, {"zero_defect", 1e-12 * o.tol_scale}};
  rep.results = to_json(r);
  const bool zero = !r.defects.empty() && r.defects.back() < 1e-12 * o.tol_scale;
  tally(rep, zero || r.order >= 1.5);
  return rep;
}

Report cmd_eds_gc(const Options& o, const std::vector<std::string>& cmd) {
  Report rep = base_report(o, cmd);
  if (o.grid < 1 || !(o.h > 0)) throw UsageError("--grid and --h must be positive");
  MetricCubicPair pair;
  if (o.pair == "so3")
    pair = so3_pair(o.pair_c, o.cubic_scale, o.theta_max);
  else if (o.pair == "flat")
    pair = flat_pair();
  else
    throw UsageError("unknown pair: " + o.pair + " (so3, flat)");
  const GaussCodazziConvergence c = gauss_codazzi_convergence(pair, o.grid, o.h);
  const double tol = 1e-4 * o.tol_scale;
  rep.tolerances = {{"residual", tol}};
  rep.results = to_json(c);
  rep.results["pair"] = pair.label;
  tally(rep, c.at_h.max() < tol);
  return rep;
}

Report cmd_eds_characters(const Options& o, const std::vector<std::string>& cmd) {
  Report rep = base_report(o, cmd);
  std::string file = o.tableau;
  if (file.find('/') == std::string::npos && file.find(".json") == std::string::npos)
    file = (o.data_dir.empty() ? default_data_dir() : o.data_dir) + "/tableaux/" + file + ".json";
  const TableauMatrix t = load_tableau(file);
  const CartanCharacters c = cartan_characters(t, o.trials, o.seed);
  rep.results = to_json(c);
  rep.results["tableau"] = t.name;
  if (!o.expect.empty()) {
    std::vector<int> want;
    std::stringstream ss(o.expect);
    for (std::string item; std::getline(ss, item, ',');) {
      try {
        want.push_back(std::stoi(item));
      } catch (const std::exception&) {
        throw UsageError("--expect must be comma-separated integers");
      }
    }
    rep.results["expected"] = want;
    tally(rep, want == c.s);
  } else {
    tally(rep, true);
  }
  return rep;
}

Report cmd_suite(const Options& o, const std::vector<std::string>& cmd) {
  AcceptanceConfig cfg;
  cfg.seed = o.seed;
  cfg.tol_scale = o.tol_scale;
  cfg.data_dir = o.data_dir;
  for (const auto& f : o.filter) {
    std::stringstream ss(f);
    for (std::string item; std::getline(ss, item, ',');)
      if (!item.empty()) cfg.filter.push_back(item);
  }
  for (const auto& kv : o.tol_overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--tol expects name=value");
    try {
      cfg.tol_overrides[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    } catch (const std::logic_error&) {
      throw UsageError("--tol value is not a number: " + kv);
    }
  }
  return suite_acceptance(cfg, cmd);
}

std::string render(const Report& rep, const std::string& format, bool suite, bool scan) {
  const json j = rep.to_json();
  if (format == "json") return dump_json(j) + "\n";
  std::ostringstream out;
  if (suite) {
    const auto& rows = j["results"]["criteria"];
    if (format == "csv") {
      out << "id,name,module,pass\n";
      for (const auto& r : rows)
        out << r["id"].get<int>() << "," << r["name"].get<std::string>() << "," << r["module"].get<std::string>()
            << "," << (r["pass"].get<bool>() ? "true" : "false") << "\n";
    } else {
      for (const auto& r : rows) {
        out << (r["pass"].get<bool>() ? "PASS" : "FAIL") << "  " << r["id"].get<int>() << "  "
            << r["name"].get<std::string>() << "\n";
        for (const auto& f : r["failures"]) out << "        " << f.get<std::string>() << "\n";
      }
      out << rep.passed << " passed, " << rep.failed << " failed\n";
    }
    return out.str();
  }
  if (scan) {
    const auto& cases = j["results"]["cases"];
    if (format == "csv") out << "order,r,s,fixed_dim\n";
    for (const auto& c : cases) {
      const std::string r = c["r"].get<std::string>(), s = c["s"].get<std::string>();
      if (format == "csv")
        out << c["order"] << "," << r << "," << s << "," << c["fixed_dim"] << "\n";
      else
        out << "order " << c["order"] << "  (" << r << ", " << s << ")  dim " << c["fixed_dim"] << "\n";
    }
    return out.str();
  }
  if (format == "csv") throw UsageError("csv output is available for suite acceptance and torus scan");
  return dump_json(j) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"umbilic4: special Lagrangian fundamental cubic toolkit"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  auto* seed_opt = app.add_option("--seed", o.seed, "random seed (env UMBILIC4_SEED)");
  auto* scale_opt =
      app.add_option("--tol-scale", o.tol_scale, "multiplier for residual tolerances (env UMBILIC4_TOL_SCALE)")
          ->check(CLI::PositiveNumber);
  app.add_option("--output", o.output, "write the report to a file instead of stdout");
  app.add_option("--format", o.format, "json, pretty or csv")->check(CLI::IsMember({"json", "pretty", "csv"}));
  app.add_option("--data-dir", o.data_dir, "directory holding tableaux/");
  app.set_version_flag("--version", kToolVersion);

  std::function<Report(const Options&, const std::vector<std::string>&)> action;
  bool suite = false, scan = false;

  auto* groups = app.add_subcommand("groups", "finite subgroups of SO(4)")->require_subcommand(1);
  auto* gbuild = groups->add_subcommand("build", "close a labelled group");
  gbuild->add_option("--label", o.label, "T, O, O+, I, I+, cyclic, dihedral")->required();
  gbuild->add_option("--m", o.family.m);
  gbuild->add_option("--n", o.family.n);
  gbuild->add_option("--r", o.family.r);
  gbuild->add_option("--s", o.family.s);
  gbuild->add_flag("--numeric", o.numeric, "floating-point element entries");
  gbuild->callback([&] { action = cmd_groups_build; });

  auto* cubic = app.add_subcommand("cubic", "cubic polynomials")->require_subcommand(1);
  auto* cstab = cubic->add_subcommand("stabilizer", "stabilizer algebra of a cubic");
  cstab->add_option("--coeffs", o.coeffs, "JSON: 20 coefficients or {\"coeffs\": [...]}")->required();
  cstab->add_option("--rel-tol", o.rel_tol)->check(CLI::PositiveNumber);
  cstab->callback([&] { action = cmd_cubic_stabilizer; });
  auto* cfixed = cubic->add_subcommand("fixed", "exact fixed harmonic cubics of a group");
  cfixed->add_option("--group", o.label, "T, O, O+, I, I+")->required();
  cfixed->callback([&] { action = cmd_cubic_fixed; });

  auto* torus = app.add_subcommand("torus", "maximal torus classification")->require_subcommand(1);
  auto* tscan = torus->add_subcommand("scan", "enumerate small-order fixing elements");
  tscan->add_option("--max-den", o.max_den);
  tscan->add_flag("--json", o.json_table, "emit the JSON report (default unless --format is set)");
  tscan->callback([&] {
    action = cmd_torus_scan;
    scan = true;
  });
  auto* tfixed = torus->add_subcommand("fixed", "fixed cubics of one torus element");
  tfixed->add_option("--r", o.r, "rational, e.g. 2/3")->required();
  tfixed->add_option("--s", o.s)->required();
  tfixed->callback([&] { action = cmd_torus_fixed; });

  auto* geom = app.add_subcommand("geom", "special Lagrangian charts")->require_subcommand(1);
  auto* gverify = geom->add_subcommand("verify", "calibration residuals and fundamental cubics");
  gverify->add_option("--family", o.geom_family)->required();
  gverify->add_option("--params", o.params, "JSON object of family parameters");
  gverify->add_option("--samples", o.samples);
  gverify->add_option("--phase", o.phase, "calibration phase (default: the chart's)");
  gverify->add_option("--fd-step", o.fd_step)->check(CLI::PositiveNumber);
  gverify->add_option("--report", o.output, "alias for --output");
  gverify->callback([&] { action = cmd_geom_verify; });

  auto* eds = app.add_subcommand("eds", "structure equations")->require_subcommand(1);
  auto* eflow = eds->add_subcommand("flow", "integrate along a path of coframe directions");
  eflow->add_option("--system", o.system)->required();
  eflow->add_option("--init", o.init, "JSON object of named state values");
  eflow->add_option("--path", o.path, "JSON list of {direction, length}");
  eflow->add_option("--step", o.step);
  eflow->callback([&] { action = cmd_eds_flow; });
  auto* emixed = eds->add_subcommand("mixed", "mixed-partial compatibility of two directions");
  emixed->add_option("--system", o.system)->required();
  emixed->add_option("--init", o.init);
  emixed->add_option("--a", o.dir_a);
  emixed->add_option("--b", o.dir_b);
  emixed->add_option("--h", o.h)->check(CLI::PositiveNumber);
  emixed->callback([&] {
    if (emixed->count("--h") == 0) o.h = 0.05;
    action = cmd_eds_mixed;
  });
  auto* egc = eds->add_subcommand("gc", "Gauss-Codazzi residual of a metric/cubic pair");
  egc->add_option("--pair", o.pair, "so3 or flat");
  egc->add_option("--c", o.pair_c);
  egc->add_option("--cubic-scale", o.cubic_scale);
  egc->add_option("--theta-max", o.theta_max);
  egc->add_option("--h", o.h);
  egc->add_option("--grid", o.grid);
  egc->callback([&] { action = cmd_eds_gc; });
  auto* echar = eds->add_subcommand("characters", "Cartan characters of a tableau");
  echar->add_option("--tableau", o.tableau, "file, or a shipped name (so2s3, d3_conical, z3_case2)")->required();
  echar->add_option("--trials", o.trials);
  echar->add_option("--expect", o.expect, "comma-separated characters to compare against");
  echar->callback([&] { action = cmd_eds_characters; });

  auto* suite_cmd = app.add_subcommand("suite", "acceptance battery")->require_subcommand(1);
  auto* acc = suite_cmd->add_subcommand("acceptance", "run the acceptance criteria");
  acc->add_option("--filter", o.filter, "module names or criterion ids (comma-separated or repeated)");
  acc->add_option("--tol", o.tol_overrides, "tolerance override name=value (repeatable)");
  acc->callback([&] {
    action = cmd_suite;
    suite = true;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (seed_opt->count() == 0) o.seed = seed_from_env(o.seed);
    if (scale_opt->count() == 0) o.tol_scale = tol_scale_from_env();
    if (scan && o.json_table) o.format = "json";
    std::vector<std::string> command(argv + 1, argv + argc);
    const auto t0 = std::chrono::steady_clock::now();
    Report rep = action(o, command);
    rep.seed = o.seed;
    if (rep.timing_ms == 0)
      rep.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    const std::string text = render(rep, o.format, suite, scan);
    if (o.output.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(o.output);
      if (!f) throw UsageError("cannot write " + o.output);
      f << text;
    }
    return rep.ok() ? 0 : 1;
  } catch (const std::exception& e) {
    // bad flags, inputs outside a domain, unreadable files
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
