#include "cli.hpp"

#include "svg_plot.hpp"

#include <consortium/equilibria.hpp>
#include <consortium/io.hpp>
#include <consortium/objectives.hpp>
#include <consortium/optimizer.hpp>
#include <consortium/pareto.hpp>
#include <consortium/params_io.hpp>
#include <consortium/sim.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

namespace consortium::tools {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NumericalFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

struct Options {
  // global
  std::string params_file;
  std::string out_dir = ".";
  std::string format = "csv";
  int threads = 1;
  std::uint64_t seed = 42;

  // shared numeric flags
  double alpha = 0.5;
  double d = 0.5;
  bool d_given = false;
  double s_in = 1.0;
  std::optional<double> theta;
  int theta_n = 101;
  std::optional<int> grid_n;
  std::optional<double> z;
  std::vector<double> sin_list;

  // command-specific
  std::string objective;
  int contour_n = 0;
  double t_end = 500.0;
  double rtol = 1e-8;
  double atol = 1e-10;
  double perturb = 0.01;
  std::vector<double> x0;
  bool stop_at_convergence = false;
  bool theta_profile = false;
  bool plot = false;
  int reach_n = 200;
  std::string manifest;
};

/// Output directory plus the list of files written, for the manifest.
class Outputs {
public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  std::ofstream open(const std::string& name) {
    files_.push_back(name);
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir_ / name).string());
    return f;
  }

  void write_json(const std::string& name, const json& j) {
    auto f = open(name);
    f << j.dump(2) << '\n';
  }

  fs::path path(const std::string& name) {
    files_.push_back(name);
    return dir_ / name;
  }

  const std::vector<std::string>& files() const { return files_; }

private:
  fs::path dir_;
  std::vector<std::string> files_;
};

struct RunContext {
  const Options& opt;
  Model model;
  std::string params_source;
  Outputs outputs;
  json config = json::object();
  std::ostream& out;
};

Control control_from(const Options& o) {
  require(o.alpha > 0.0 && o.alpha < 1.0, "--alpha must lie in (0,1)");
  require(o.d > 0.0, "--d must be positive");
  require(o.s_in > 0.0, "--s-in must be positive");
  return {o.alpha, o.d, o.s_in};
}

bool tabular_json(const Options& o) { return o.format == "json"; }

std::string table_name(const Options& o, const std::string& stem) { return stem + (tabular_json(o) ? ".json" : ".csv"); }

// --- commands ----------------------------------------------------------------

void cmd_params(RunContext& ctx) {
  json j = ctx.model.params();
  j["rho_dilution_bound"] = ctx.model.params().rho_dilution_bound();
  j["yield_batch_limit"] = batch_limit_yield(ctx.model, 1.0);
  ctx.outputs.write_json("params.json", j);
  auto f = ctx.outputs.open("params.txt");
  f << format_params(ctx.model.params());
  ctx.out << format_params(ctx.model.params());
}

void cmd_equilibria(RunContext& ctx) {
  const Control u = control_from(ctx.opt);
  ctx.config["control"] = u;
  const EquilibriumReport report = classify(ctx.model, u);
  ctx.outputs.write_json("equilibria.json", report);
  ctx.out << "regime " << to_string(report.regime) << "  d1 " << format_double(report.d1) << "  d2 "
          << format_double(report.d2) << '\n';
  if (report.x11) ctx.out << "coexistence c* = " << format_double(report.x11->state.c) << '\n';
}

void cmd_classify(RunContext& ctx) {
  const Control u = control_from(ctx.opt);
  ctx.config["control"] = u;
  const EquilibriumReport report = classify(ctx.model, u);
  json j;
  j["control"] = u;
  j["d1"] = report.d1;
  j["d2"] = report.d2;
  j["regime"] = to_string(report.regime);
  j["exists"] = {{"x0", true}, {"x10", report.x10.has_value()}, {"x11", report.x11.has_value()}};
  j["stability"] = {{"x0", to_string(report.x0.stability)},
                    {"x10", report.x10 ? json(to_string(report.x10->stability)) : json(nullptr)},
                    {"x11", report.x11 ? json(to_string(report.x11->stability)) : json(nullptr)}};
  if (const auto expected = expected_stability(report.regime)) {
    j["expected"] = {{"x0", to_string(expected->x0)},
                     {"x10", expected->x10 ? json(to_string(*expected->x10)) : json(nullptr)},
                     {"x11", expected->x11 ? json(to_string(*expected->x11)) : json(nullptr)}};
  } else {
    j["expected"] = nullptr;
  }
  ctx.outputs.write_json("classify.json", j);
  ctx.out << to_string(report.regime) << '\n';
}

void cmd_simulate(RunContext& ctx) {
  const auto& o = ctx.opt;
  const Control u = control_from(o);
  require(o.t_end > 0.0, "--t-end must be positive");
  require(o.rtol > 0.0 && o.atol > 0.0, "--rtol and --atol must be positive");
  require(o.perturb >= 0.0, "--perturb must be nonnegative");

  State x0;
  std::string origin;
  if (!o.x0.empty()) {
    require(o.x0.size() == 5, "--x0 needs five comma-separated values s,e,v,q,c");
    x0 = {o.x0[0], o.x0[1], o.x0[2], o.x0[3], o.x0[4]};
    require(ctx.model.in_state_space(x0), "--x0 lies outside the state space (negative entry or q < q_min)");
    origin = "given";
  } else {
    const EquilibriumReport report = classify(ctx.model, u);
    if (report.x11) {
      x0 = report.x11->state;
      origin = "x11";
    } else if (report.x10) {
      x0 = report.x10->state;
      x0.c = 0.1;
      origin = "x10+algae";
    } else {
      x0 = {u.s_in, 0.1, 0.1, 2.0 * ctx.model.params().q_min, 0.1};
      origin = "generic";
    }
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    auto a = x0.to_array();
    for (double& v : a) v *= 1.0 + o.perturb * unit(rng);
    x0 = State::from_array(a);
    x0.q = std::max(x0.q, ctx.model.params().q_min);
  }

  IntegrateOptions io;
  io.rtol = o.rtol;
  io.atol = o.atol;
  io.stop_at_convergence = o.stop_at_convergence;
  const Trajectory traj = integrate(ctx.model, x0, u, o.t_end, io);

  ctx.config["control"] = u;
  ctx.config["x0"] = x0;
  ctx.config["x0_origin"] = origin;
  ctx.config["t_end"] = o.t_end;
  ctx.config["rtol"] = o.rtol;
  ctx.config["atol"] = o.atol;
  ctx.config["perturb"] = o.perturb;
  ctx.config["stop_at_convergence"] = o.stop_at_convergence;

  if (tabular_json(o)) {
    json rows = json::array();
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      json r = traj.states[i];
      r["t"] = traj.times[i];
      rows.push_back(r);
    }
    ctx.outputs.write_json("trajectory.json", rows);
  } else {
    auto f = ctx.outputs.open("trajectory.csv");
    write_trajectory_csv(f, traj);
  }

  // Nearest closed-form equilibrium at the end of the run.
  std::string nearest = "none";
  double distance = std::numeric_limits<double>::infinity();
  const auto consider = [&](const char* name, const State& eq) {
    const double dist = relative_distance(traj.states.back(), eq);
    if (dist < distance) distance = dist, nearest = name;
  };
  consider("x0", equilibrium_x0(ctx.model, u));
  try {
    consider("x10", equilibrium_x10(ctx.model, u));
  } catch (const ExistenceError&) {
  }
  try {
    consider("x11", equilibrium_x11(ctx.model, u));
  } catch (const ExistenceError&) {
  }

  json summary;
  summary["control"] = u;
  summary["x0"] = x0;
  summary["terminal_event"] = to_string(traj.terminal_event);
  summary["terminal_time"] = traj.times.back();
  summary["terminal_state"] = traj.states.back();
  summary["steps"] = traj.times.size() - 1;
  summary["rejected_steps"] = traj.rejected_steps;
  summary["nearest_equilibrium"] = nearest;
  summary["nearest_distance"] = distance;
  ctx.outputs.write_json("simulate.json", summary);
  ctx.out << to_string(traj.terminal_event) << " at t = " << format_double(traj.times.back()) << ", nearest "
          << nearest << '\n';
  if (traj.terminal_event == TerminalEvent::StepFailure) throw NumericalFailure("integration step size underflow");
}

void write_contour(RunContext& ctx, double s_in, int n) {
  const ControlGrid grid = make_control_grid(ctx.model, s_in, n);
  if (tabular_json(ctx.opt)) {
    json rows = json::array();
    for (double d : grid.ds)
      for (double a : grid.alphas) {
        const Control u{a, d, s_in};
        if (!in_admissible(ctx.model, u)) continue;
        json r = evaluate(ctx.model, u);
        r["alpha"] = a;
        r["d"] = d;
        r["s_in"] = s_in;
        rows.push_back(r);
      }
    ctx.outputs.write_json("contour.json", rows);
    return;
  }
  auto f = ctx.outputs.open("contour.csv");
  write_objective_row_header(f);
  for (double d : grid.ds)
    for (double a : grid.alphas) {
      const Control u{a, d, s_in};
      if (in_admissible(ctx.model, u)) write_objective_row(f, u, evaluate(ctx.model, u));
    }
}

void cmd_optimize(RunContext& ctx) {
  const auto& o = ctx.opt;
  require(o.s_in > 0.0, "--s-in must be positive");
  const int grid_n = o.grid_n.value_or(400);
  require(grid_n == 0 || grid_n >= 2, "--grid-n must be 0 (no oracle) or at least 2");
  require(o.contour_n == 0 || o.contour_n >= 2, "--contour-n must be 0 or at least 2");
  ctx.config["objective"] = o.objective;
  ctx.config["s_in"] = o.s_in;
  ctx.config["grid_n"] = grid_n;
  ctx.config["contour_n"] = o.contour_n;

  json j;
  j["objective"] = o.objective;
  j["s_in"] = o.s_in;
  OptimOptions opts;
  opts.oracle_n = grid_n;
  opts.threads = o.threads;

  if (o.objective == "pout" || o.objective == "ptheta") {
    Objective objective = Objective::productivity();
    if (o.objective == "ptheta") {
      require(o.theta.has_value(), "--theta is required for ptheta");
      require(*o.theta >= 0.0 && *o.theta <= 1.0, "--theta must lie in [0,1]");
      objective = Objective::net_profit(*o.theta);
      j["theta"] = *o.theta;
      ctx.config["theta"] = *o.theta;
    }
    const OptimResult r = maximize(ctx.model, objective, o.s_in, opts);
    j["result"] = r;
    if (!r.boundary_supremum) j["objectives"] = evaluate(ctx.model, r.u_star);
    if (grid_n > 0) {
      const GridBest g = grid_oracle(ctx.model, objective, o.s_in, grid_n, o.threads);
      j["oracle"] = {{"u", g.u}, {"value", g.value}, {"admissible_points", g.admissible_points}};
    }
    ctx.out << "u* = (" << format_double(r.u_star.alpha) << ", " << format_double(r.u_star.d) << ")  value "
            << format_double(r.value) << (r.boundary_supremum ? "  [boundary supremum]" : "") << '\n';
  } else if (o.objective == "yield-alpha") {
    require(o.d_given, "--d is required for yield-alpha");
    require(o.d > 0.0, "--d must be positive");
    ctx.config["d"] = o.d;
    const YieldAlphaResult r = maximize_yield_alpha(ctx.model, o.d, o.s_in);
    j["d"] = o.d;
    j["result"] = r;
    j["global_argmax"] = yield_global_argmax(ctx.model);
    ctx.out << "alpha* = " << format_double(r.alpha_star) << "  yield " << format_double(r.yield) << '\n';
  } else {
    throw ValidationError("objective must be one of pout, ptheta, yield-alpha");
  }
  ctx.outputs.write_json("optimize.json", j);
  if (o.contour_n > 0) write_contour(ctx, o.s_in, o.contour_n);
}

std::vector<double> sorted_feeds(const std::vector<double>& list) {
  for (double s : list) require(s > 0.0, "--sin-list values must be positive");
  for (std::size_t i = 1; i < list.size(); ++i) require(list[i] > list[i - 1], "--sin-list must be strictly ascending");
  return list;
}

void write_reachable(RunContext& ctx, const std::vector<ReachableCloud>& clouds, json& summary) {
  json entries = json::array();
  for (std::size_t k = 0; k < clouds.size(); ++k) {
    const auto& c = clouds[k];
    const std::string name = table_name(ctx.opt, "reachable_" + std::to_string(k));
    if (tabular_json(ctx.opt)) {
      json pts = json::array();
      for (const auto& p : c.points) pts.push_back({{"alpha", p.u.alpha}, {"d", p.u.d}, {"p_out", p.p_out}, {"p_in", p.p_in}});
      ctx.outputs.write_json(name, {{"s_in", c.s_in}, {"points", pts}});
    } else {
      auto f = ctx.outputs.open(name);
      write_reachable_csv(f, c);
    }
    double max_in = 0.0;
    for (const auto& p : c.points) max_in = std::max(max_in, p.p_in);
    entries.push_back({{"s_in", c.s_in}, {"file", name}, {"points", c.points.size()}, {"d_max", c.d_max},
                       {"max_p_in", max_in}});
  }
  const auto violations = nesting_violations(ctx.model, clouds);
  summary["clouds"] = entries;
  summary["nesting_violations"] = violations.size();
}

PlotSeries cloud_series(const ReachableCloud& c, const std::string& color) {
  PlotSeries s;
  s.label = "reachable, s_in = " + format_double(c.s_in);
  s.color = color;
  for (const auto& p : c.points) s.points.emplace_back(p.p_out, p.p_in);
  return s;
}

const char* palette(std::size_t k) {
  static const char* colors[] = {"#9ecae1", "#fdae6b", "#a1d99b", "#bcbddc", "#fc9272"};
  return colors[k % 5];
}

void cmd_pareto(RunContext& ctx) {
  const auto& o = ctx.opt;
  require(o.s_in > 0.0, "--s-in must be positive");
  require(o.theta_n >= 2, "--theta-n must be at least 2");
  const int grid_n = o.grid_n.value_or(400);
  require(grid_n >= 100, "--grid-n must be at least 100 for the dominance check");
  require(o.reach_n >= 2, "--reach-n must be at least 2");
  if (o.theta_profile) require(o.z.has_value(), "--theta-profile needs --z");
  if (o.z) require(*o.z > 0.0, "--z must be positive");
  const auto feeds = sorted_feeds(o.sin_list);

  ctx.config["s_in"] = o.s_in;
  ctx.config["theta_n"] = o.theta_n;
  ctx.config["grid_n"] = grid_n;
  ctx.config["reach_n"] = o.reach_n;
  ctx.config["sin_list"] = feeds;
  ctx.config["z"] = o.z ? json(*o.z) : json(nullptr);
  ctx.config["theta_profile"] = o.theta_profile;
  ctx.config["plot"] = o.plot;

  const auto thetas = uniform_thetas(o.theta_n);
  const auto front = sweep_front(ctx.model, o.s_in, thetas);
  const std::string front_name = table_name(o, "front");
  if (tabular_json(o)) {
    ctx.outputs.write_json(front_name, front);
  } else {
    auto f = ctx.outputs.open(front_name);
    write_front_csv(f, front);
  }

  const auto violations = dominance_check(ctx.model, front, grid_n, o.s_in, 1e-9, o.threads);
  const auto grid_front = grid_pareto_set(ctx.model, o.s_in, grid_n, o.threads);
  json report;
  report["s_in"] = o.s_in;
  report["grid_n"] = grid_n;
  report["slack"] = 1e-9;
  report["front_points"] = front.size();
  std::size_t failed = 0;
  json failures = json::array();
  for (const auto& p : front)
    if (!p.solved) ++failed, failures.push_back({{"theta", p.theta}, {"error", p.error}});
  report["failed_solves"] = failures;
  report["violation_count"] = violations.size();
  json first = json::array();
  for (std::size_t i = 0; i < violations.size() && i < 100; ++i) first.push_back(violations[i]);
  report["violations"] = first;
  report["grid_front_points"] = grid_front.size();
  report["grid_front_discrepancy"] = front_discrepancy(front, grid_front);
  ctx.out << front.size() << " front points, " << violations.size() << " dominance violations, " << failed
          << " failed solves\n";

  std::vector<ReachableCloud> clouds;
  if (!feeds.empty()) {
    clouds = reachable_set(ctx.model, feeds, o.reach_n, o.threads);
    json reach;
    write_reachable(ctx, clouds, reach);
    report["reachable"] = reach;
  }
  ctx.outputs.write_json("dominance.json", report);

  std::vector<ProfileRow> profile;
  if (o.theta_profile) {
    profile = front_vs_theta_profile(ctx.model, *o.z, thetas);
    const std::string name = table_name(o, "profile");
    if (tabular_json(o)) {
      ctx.outputs.write_json(name, profile);
    } else {
      auto f = ctx.outputs.open(name);
      write_profile_csv(f, profile);
    }
  }

  if (o.plot) {
    PlotSpec spec{"Pareto front, s_in = " + format_double(o.s_in), "P_out [g/L/day]", "P_in [g/L/day]", {}};
    const auto own = reachable_set(ctx.model, {o.s_in}, o.reach_n, o.threads);
    spec.series.push_back(cloud_series(own.front(), "#c6dbef"));
    PlotSeries line{"weighted-sum front", {}, "#d62728", true};
    for (const auto& p : front)
      if (p.solved) line.points.emplace_back(p.p_out, p.p_in);
    spec.series.push_back(line);
    write_svg_plot(ctx.outputs.path("front.svg"), spec);

    if (!clouds.empty()) {
      PlotSpec rs{"Reachable sets", "P_out [g/L/day]", "P_in [g/L/day]", {}};
      for (std::size_t k = clouds.size(); k-- > 0;) rs.series.push_back(cloud_series(clouds[k], palette(k)));
      write_svg_plot(ctx.outputs.path("reachable.svg"), rs);
    }
    if (!profile.empty()) {
      PlotSpec ps{"Optimal controls vs theta, z = " + format_double(*o.z), "theta", "value", {}};
      PlotSeries a{"alpha*", {}, "#1f77b4", true}, d{"d*", {}, "#ff7f0e", true}, s{"s_in*", {}, "#2ca02c", true};
      PlotSeries po{"P_out", {}, "#9467bd", true}, pi{"P_in", {}, "#8c564b", true};
      for (const auto& r : profile) {
        a.points.emplace_back(r.theta, r.alpha);
        d.points.emplace_back(r.theta, r.d);
        s.points.emplace_back(r.theta, r.s_in);
        po.points.emplace_back(r.theta, r.p_out);
        pi.points.emplace_back(r.theta, r.p_in);
      }
      ps.series = {a, d, s, po, pi};
      write_svg_plot(ctx.outputs.path("profile.svg"), ps);
    }
  }
  if (front.empty()) throw NumericalFailure("empty Pareto front");
}

void cmd_hessian_map(RunContext& ctx) {
  const auto& o = ctx.opt;
  require(o.s_in > 0.0, "--s-in must be positive");
  const int grid_n = o.grid_n.value_or(100);
  require(grid_n >= 2, "--grid-n must be at least 2");
  ctx.config["s_in"] = o.s_in;
  ctx.config["grid_n"] = grid_n;

  const auto cells = hessian_map_g0(ctx.model, o.s_in, grid_n, o.threads);
  const std::string name = table_name(o, "hessian_map");
  if (tabular_json(o)) {
    ctx.outputs.write_json(name, cells);
  } else {
    auto f = ctx.outputs.open(name);
    write_hessian_map_csv(f, cells);
  }
  std::map<std::string, std::size_t> counts{{"POS_DEF", 0}, {"NEG_DEF", 0}, {"NON_DEF", 0}, {"SINGULAR", 0}, {"ABSENT", 0}};
  for (const auto& c : cells) ++counts[c.in_domain ? to_string(c.classification) : "ABSENT"];
  ctx.outputs.write_json("hessian_map_summary.json", {{"s_in", o.s_in}, {"grid_n", grid_n}, {"counts", counts}});
  for (const auto& [k, v] : counts) ctx.out << k << ' ' << v << '\n';
}

void cmd_reachable(RunContext& ctx) {
  const auto& o = ctx.opt;
  const auto feeds = sorted_feeds(o.sin_list.empty() ? std::vector<double>{0.5, 1.0, 2.0} : o.sin_list);
  const int grid_n = o.grid_n.value_or(200);
  require(grid_n >= 2, "--grid-n must be at least 2");
  ctx.config["sin_list"] = feeds;
  ctx.config["grid_n"] = grid_n;
  const auto clouds = reachable_set(ctx.model, feeds, grid_n, o.threads);
  json summary;
  write_reachable(ctx, clouds, summary);
  ctx.outputs.write_json("reachable.json", summary);
  ctx.out << clouds.size() << " clouds, " << summary["nesting_violations"].get<std::size_t>()
          << " nesting violations\n";
}

// --- driver ------------------------------------------------------------------

std::vector<std::string> manifest_args(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--out") {
      ++i;
      continue;
    }
    if (args[i].rfind("--out=", 0) == 0) continue;
    out.push_back(args[i]);
  }
  return out;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_parsed(CLI::App& app, Options& o, const std::vector<std::string>& args, std::ostream& out) {
  std::string command;
  for (const auto* sub : app.get_subcommands()) command = sub->get_name();
  require(!command.empty(), "a subcommand is required (see --help)");
  require(o.format == "csv" || o.format == "json", "--format must be csv or json");
  require(o.threads >= 1, "--threads must be at least 1");

  ModelParams params;
  std::string source = "default";
  std::string path = o.params_file;
  if (path.empty()) {
    if (const char* env = std::getenv("CONSORTIUM_PARAMS"); env != nullptr && *env != '\0') path = env;
  }
  if (!path.empty()) {
    params = load_params_file(path);
    source = path;
  }

  if (command == "optimize") o.d_given = app.get_subcommand("optimize")->count("--d") > 0;
  RunContext ctx{o, Model(params), source, Outputs(o.out_dir), json::object(), out};

  if (command == "params") cmd_params(ctx);
  else if (command == "equilibria") cmd_equilibria(ctx);
  else if (command == "classify") cmd_classify(ctx);
  else if (command == "simulate") cmd_simulate(ctx);
  else if (command == "optimize") cmd_optimize(ctx);
  else if (command == "pareto") cmd_pareto(ctx);
  else if (command == "hessian-map") cmd_hessian_map(ctx);
  else if (command == "reachable") cmd_reachable(ctx);

  json manifest;
  manifest["tool"] = "consortium";
  manifest["version"] = kVersion;
  manifest["command"] = command;
  manifest["argv"] = manifest_args(args);
  manifest["params"] = ctx.model.params();
  manifest["params_source"] = ctx.params_source;
  manifest["format"] = o.format;
  manifest["seed"] = o.seed;
  manifest["config"] = ctx.config;
  manifest["outputs"] = ctx.outputs.files();
  std::ofstream f(fs::path(o.out_dir) / "run_manifest.json", std::ios::binary);
  f << manifest.dump(2) << '\n';
  return kExitOk;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Steady-state analysis and optimization of an algal-bacterial consortium chemostat", "consortium"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  app.add_option("--params", o.params_file, "Parameter file (key = value); default $CONSORTIUM_PARAMS");
  app.add_option("--out", o.out_dir, "Output directory");
  app.add_option("--format", o.format, "Tabular output format: csv or json");
  app.add_option("--threads", o.threads, "Worker threads for grid evaluations");
  app.add_option("--seed", o.seed, "Seed for randomized perturbations");

  const auto control_flags = [&](CLI::App* sub) {
    sub->add_option("--alpha", o.alpha, "Resource allocation fraction in (0,1)");
    sub->add_option("--d", o.d, "Dilution rate [1/day]");
    sub->add_option("--s-in", o.s_in, "Input substrate [g/L]");
  };

  app.add_subcommand("params", "Write the resolved biological parameters")->fallthrough();

  auto* eq = app.add_subcommand("equilibria", "Closed-form equilibria, thresholds, residuals and eigenvalues");
  control_flags(eq);
  eq->fallthrough();

  auto* cl = app.add_subcommand("classify", "Regime and stability labels for a control");
  control_flags(cl);
  cl->fallthrough();

  auto* sim = app.add_subcommand("simulate", "Integrate the dynamics from a perturbed equilibrium or --x0");
  control_flags(sim);
  sim->add_option("--t-end", o.t_end, "Final time [day]");
  sim->add_option("--rtol", o.rtol, "Relative tolerance");
  sim->add_option("--atol", o.atol, "Absolute tolerance");
  sim->add_option("--perturb", o.perturb, "Relative random perturbation of the default initial state");
  sim->add_option("--x0", o.x0, "Initial state s,e,v,q,c")->delimiter(',');
  sim->add_flag("--stop-at-convergence", o.stop_at_convergence, "Stop once the right-hand side vanishes");
  sim->fallthrough();

  auto* opt = app.add_subcommand("optimize", "Maximize P_out, P_theta, or P_yield in alpha at fixed d");
  opt->add_option("objective", o.objective, "pout | ptheta | yield-alpha")->required();
  opt->add_option("--s-in", o.s_in, "Input substrate [g/L]");
  opt->add_option("--theta", o.theta, "Weight for ptheta in [0,1]");
  opt->add_option("--d", o.d, "Dilution rate for yield-alpha");
  opt->add_option("--grid-n", o.grid_n, "Grid oracle resolution (0 disables)");
  opt->add_option("--contour-n", o.contour_n, "Write an n x n objective grid (0 disables)");
  opt->fallthrough();

  auto* par = app.add_subcommand("pareto", "Weighted-sum Pareto front, dominance check, s_in analysis");
  par->add_option("--s-in", o.s_in, "Input substrate [g/L]");
  par->add_option("--theta-n", o.theta_n, "Number of uniformly spaced weights");
  par->add_option("--grid-n", o.grid_n, "Dominance-check grid resolution");
  par->add_option("--reach-n", o.reach_n, "Reachable-set grid resolution");
  par->add_option("--z", o.z, "Upper bound on s_in for the profile");
  par->add_option("--sin-list", o.sin_list, "Feeds for reachable sets, ascending")->delimiter(',');
  par->add_flag("--theta-profile", o.theta_profile, "Optimal (alpha, d, s_in) vs theta over B(z)");
  par->add_flag("--plot", o.plot, "Also write SVG plots");
  par->fallthrough();

  auto* hm = app.add_subcommand("hessian-map", "Definiteness map of the Hessian of psi_alpha_inv");
  hm->add_option("--s-in", o.s_in, "Input substrate [g/L]");
  hm->add_option("--grid-n", o.grid_n, "Grid resolution");
  hm->fallthrough();

  auto* rs = app.add_subcommand("reachable", "Images of U(s_in) in the (P_out, P_in) plane");
  rs->add_option("--sin-list", o.sin_list, "Feeds, ascending")->delimiter(',');
  rs->add_option("--grid-n", o.grid_n, "Grid resolution");
  rs->fallthrough();

  auto* rp = app.add_subcommand("replay", "Re-run the command recorded in a run manifest");
  rp->add_option("manifest", o.manifest, "Path to run_manifest.json")->required();
  rp->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  if (app.got_subcommand("replay")) {
    std::ifstream in(o.manifest, std::ios::binary);
    require(static_cast<bool>(in), "cannot read manifest " + o.manifest);
    const json manifest = json::parse(in);
    auto replay_args = manifest.at("argv").get<std::vector<std::string>>();
    replay_args.push_back("--out");
    replay_args.push_back(o.out_dir);
    return dispatch(replay_args, out, err);
  }
  return run_parsed(app, o, args, out);
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ParamsFormatError& e) {
    err << "error: parameter file: " << e.what() << '\n';
    return kExitValidation;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const ExistenceError& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const NotAdmissibleError& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const OptimizationError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed manifest: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

} // namespace consortium::tools
