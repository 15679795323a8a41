// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include "cli.hpp"

#include <consortium/equilibria.hpp>
#include <consortium/objectives.hpp>
#include <consortium/optimizer.hpp>
#include <consortium/pareto.hpp>
#include <consortium/sim.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace consortium;
namespace fs = std::filesystem;

namespace {

const Model model;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && secs > budget_s) {
    r.pass = false;
    r.detail += " [over time budget]";
  }
  failures += !r.pass;
  std::printf("%s [%02d] %s: %s (%.2fs", r.pass ? "PASS" : "FAIL", id, name, r.detail.c_str(), secs);
  if (budget_s > 0) std::printf(" / budget %.0fs", budget_s);
  std::printf(")\n");
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Control sample_admissible(std::mt19937_64& rng, double s_in) {
  const double d_max = max_admissible_dilution(model, s_in);
  std::uniform_real_distribution<double> a(0.0, 1.0), d(0.0, d_max);
  for (;;) {
    const Control u{a(rng), d(rng), s_in};
    if (u.alpha > 0.0 && u.d > 0.0 && in_admissible(model, u)) return u;
  }
}

bool off_boundary(const EquilibriumReport& r, double margin) {
  return std::abs(r.control.d - r.d1) > margin && std::abs(r.control.d - r.d2) > margin;
}

Outcome equilibrium_residuals() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> a(0.0, 1.0), d(0.0, 0.9), s(0.2, 3.0);
  double worst = 0.0;
  int x10 = 0, x11 = 0, drawn = 0;
  while (drawn < 500) {
    const Control u{a(rng), d(rng), s(rng)};
    if (!(u.alpha > 0.0 && u.d > 0.0 && in_admissible(model, u))) continue;
    ++drawn;
    const State c = equilibrium_x11(model, u);
    worst = std::max(worst, max_norm(model.ode_rhs(c, u)));
    ++x11;
    if (u.d < washout_threshold(model, u.alpha, u.s_in)) {
      worst = std::max(worst, max_norm(model.ode_rhs(equilibrium_x10(model, u), u)));
      ++x10;
    }
  }
  return {worst < 1e-10, fmt("%d x11 + %d x10 states, max residual %.3g (tol 1e-10)", x11, x10, worst)};
}

Outcome stability_consistency() {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> a(0.01, 0.99), d(0.01, 4.0), s(0.2, 3.0);
  int checked = 0, mismatches = 0;
  std::map<Regime, int> regimes;
  while (checked < 200) {
    const Control u{a(rng), d(rng), s(rng)};
    const auto r = classify(model, u);
    if (!off_boundary(r, 1e-3)) continue;
    const auto expected = expected_stability(r.regime);
    if (!expected) continue;
    ++checked;
    ++regimes[r.regime];
    mismatches += r.x0.stability != expected->x0;
    if (r.x10) mismatches += r.x10->stability != expected->x10;
    if (r.x11) mismatches += r.x11->stability != expected->x11;
  }

  std::uniform_real_distribution<double> pos(0.05, 2.0);
  int probes = 0, conclusive = 0, disagree = 0;
  while (probes < 30) {
    const Control u{a(rng), d(rng) * 0.6, s(rng)};
    const auto r = classify(model, u);
    if (!off_boundary(r, 1e-2) || r.regime == Regime::Boundary) continue;
    ++probes;
    const State x0{pos(rng), pos(rng), pos(rng), model.params().q_min + pos(rng), pos(rng)};
    const auto c = converge_to_equilibrium(model, x0, u);
    if (!c.conclusive) continue;
    ++conclusive;
    const Attractor want = r.regime == Regime::CoexistenceGas    ? Attractor::X11
                           : r.regime == Regime::AlgalWashoutGas ? Attractor::X10
                                                                 : Attractor::X0;
    disagree += c.attractor != want;
  }
  return {mismatches == 0 && disagree == 0 && conclusive > 0,
          fmt("%d controls (%d coexist / %d algal washout / %d washout), %d label mismatches; %d probes, %d conclusive, "
              "%d attractor disagreements",
              checked, regimes[Regime::CoexistenceGas], regimes[Regime::AlgalWashoutGas],
              regimes[Regime::TotalWashoutGas], mismatches, probes, conclusive, disagree)};
}

Outcome log_concavity() {
  std::mt19937_64 rng(107);
  std::uniform_real_distribution<double> lam(0.0, 1.0);
  int violations = 0;
  double worst = -1e300;
  for (int i = 0; i < 1000; ++i) {
    const Control u1 = sample_admissible(rng, 1.0), u2 = sample_admissible(rng, 1.0);
    const double l = lam(rng);
    const Control m{l * u1.alpha + (1 - l) * u2.alpha, l * u1.d + (1 - l) * u2.d, 1.0};
    const double gap = l * std::log(p_out(model, u1)) + (1 - l) * std::log(p_out(model, u2)) -
                       std::log(p_out(model, m));
    worst = std::max(worst, gap);
    violations += gap > 1e-9;
  }
  return {violations == 0, fmt("1000 pairs, %d violations, max chord excess %.3g (slack 1e-9)", violations, worst)};
}

Outcome yield_decreasing() {
  std::mt19937_64 rng(109);
  std::uniform_real_distribution<double> a(0.0, 1.0);
  int violations = 0, slices = 0;
  while (slices < 100) {
    const double alpha = a(rng);
    if (!(alpha > 0.0)) continue;
    ++slices;
    const double d1 = psi_alpha(model, alpha, 1.0);
    std::vector<double> ds(50);
    std::uniform_real_distribution<double> dd(0.0, d1);
    for (double& d : ds) do d = dd(rng); while (!(d > 0.0));
    std::sort(ds.begin(), ds.end());
    for (std::size_t k = 1; k < ds.size(); ++k) {
      if (ds[k] == ds[k - 1]) continue;
      violations += !(p_yield(model, Control{alpha, ds[k], 1.0}) < p_yield(model, Control{alpha, ds[k - 1], 1.0}));
    }
  }
  return {violations == 0, fmt("%d alpha-slices x 50 d-samples, %d violations", slices, violations)};
}

Outcome yield_global_maximum() {
  const YieldArgmax g = yield_global_argmax(model);
  const double expected = 3.666666666666667;
  bool ok = g.alpha == 1.0 && g.d == 0.0 && std::abs(g.value - expected) <= 1e-9;
  std::string detail = fmt("argmax (%.17g, %.17g) value %.12f", g.alpha, g.d, g.value);
  for (double d : {0.1, 0.3, 0.5}) {
    const auto r = maximize_yield_alpha(model, d, 1.0);
    ok = ok && g.value > r.yield;
    detail += fmt("; d=%.1f: %.6f", d, r.yield);
  }
  return {ok, detail};
}

Outcome optimizer_oracle() {
  double worst_gap = 0.0, worst_spread = 0.0;
  int solves = 0;
  for (double s_in : {0.5, 1.0, 2.0}) {
    const auto oracle = [&](const Objective& o) { return grid_oracle(model, o, s_in, 400).value; };
    const OptimResult r = maximize_p_out(model, s_in);
    worst_gap = std::max(worst_gap, std::abs(r.value - oracle(Objective::productivity())));
    ++solves;
    for (double theta : {0.3, 0.5, 0.7, 0.9, 1.0}) {
      const OptimResult t = maximize_p_theta(model, theta, s_in);
      worst_gap = std::max(worst_gap, std::abs(t.value - oracle(Objective::net_profit(theta))));
      ++solves;
    }
    const auto runs = multi_start_p_out(model, s_in, spread_starts(model, s_in, 8));
    for (const auto& x : runs)
      for (const auto& y : runs)
        worst_spread = std::max({worst_spread, std::abs(x.u_star.alpha - y.u_star.alpha), std::abs(x.u_star.d - y.u_star.d)});
  }
  return {worst_gap <= 1e-4 && worst_spread < 1e-5,
          fmt("%d solves, max oracle gap %.3g (tol 1e-4), multi-start spread %.3g (tol 1e-5)", solves, worst_gap,
              worst_spread)};
}

Outcome pareto_dominance() {
  const auto front = sweep_front(model, 1.0, uniform_thetas(101));
  int unsolved = 0;
  for (const auto& p : front) unsolved += !p.solved;
  const auto violations = dominance_check(model, front, 400, 1.0, 1e-9);
  return {front.size() == 101 && unsolved == 0 && violations.empty(),
          fmt("%zu front points, %d unsolved, %zu violations on 400x400 grid", front.size(), unsolved,
              violations.size())};
}

Outcome theta0_law() {
  std::mt19937_64 rng(113);
  std::uniform_real_distribution<double> a(0.0, 1.0), dd(0.0, 1.02);
  int outside = 0;
  for (int i = 0; i < 1000;) {
    const double alpha = a(rng), d = dd(rng);
    if (!(alpha > 0.0 && d > 0.0 && d < 1.02 * (1 - 1e-9))) continue;
    ++i;
    const double t = theta0(model, alpha, d);
    outside += !(t > 0.0 && t < 1.0);
  }

  int sign_errors = 0, jump_errors = 0, tested = 0;
  const auto thetas = uniform_thetas(1001);
  std::uniform_real_distribution<double> d_adm(0.0, 0.9);
  while (tested < 100) {
    const double alpha = a(rng), d = d_adm(rng);
    const auto base = alpha > 0.0 && d > 0.0 ? try_psi_alpha_inv(model, alpha, d) : std::nullopt;
    if (!base) continue;
    ++tested;
    const double t0 = theta0(model, alpha, d);
    const double s = *base + 0.5, h = 1e-4;
    for (double theta : {t0 - 1e-6, t0 + 1e-6}) {
      if (theta < 0.0 || theta > 1.0) continue;
      const double fd =
          (p_theta(model, Control{alpha, d, s + h}, theta) - p_theta(model, Control{alpha, d, s - h}, theta)) / (2 * h);
      sign_errors += (fd > 0.0) != (theta > t0);
    }
    int jumps = 0;
    FeedChoice previous = FeedChoice::Indifferent;
    for (double theta : thetas) {
      const FeedChoice c = sin_boundary_choice(model, alpha, d, theta, 2.0).choice;
      if (c == FeedChoice::Indifferent) continue;
      if (previous != FeedChoice::Indifferent && c != previous) ++jumps;
      previous = c;
    }
    jump_errors += jumps != 1;
  }

  const auto profile = front_vs_theta_profile(model, 2.0, uniform_thetas(101));
  std::set<double> feeds;
  for (const auto& row : profile) feeds.insert(row.s_in);
  const bool feeds_ok = std::includes(std::set<double>{0.0, 2.0}.begin(), std::set<double>{0.0, 2.0}.end(),
                                      feeds.begin(), feeds.end());
  return {outside == 0 && sign_errors == 0 && jump_errors == 0 && feeds_ok,
          fmt("theta0 outside (0,1): %d/1000; sign flips off theta0: %d/100; continuations without exactly one "
              "jump: %d/100; profile feeds {%s}",
              outside, sign_errors, jump_errors, [&] {
                std::string s;
                for (double f : feeds) s += (s.empty() ? "" : ", ") + fmt("%g", f);
                return s;
              }().c_str())};
}

Outcome hessian_map() {
  const auto cells = hessian_map_g0(model, 1.0, 100);
  int non_def = 0, definite = 0, absent = 0;
  for (const auto& c : cells) {
    if (!c.in_domain) {
      ++absent;
      continue;
    }
    non_def += c.classification == Definiteness::NonDef;
    definite += c.classification == Definiteness::PosDef || c.classification == Definiteness::NegDef;
  }
  return {non_def > 0 && definite > 0,
          fmt("100x100 grid: %d non-definite, %d definite, %d outside U", non_def, definite, absent)};
}

Outcome reachable_nesting() {
  const auto clouds = reachable_set(model, {0.5, 1.0, 2.0}, 200);
  const auto violations = nesting_violations(model, clouds);
  return {violations.empty(), fmt("cloud sizes %zu/%zu/%zu, %zu nesting violations", clouds[0].points.size(),
                                  clouds[1].points.size(), clouds[2].points.size(), violations.size())};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    files[e.path().filename().string()] = {std::istreambuf_iterator<char>(in), {}};
  }
  return files;
}

Outcome reproducibility() {
  const fs::path root = fs::temp_directory_path() / "consortium_acceptance";
  fs::remove_all(root);
  const std::vector<std::vector<std::string>> commands{
      {"params"},
      {"equilibria", "--alpha", "0.5", "--d", "0.5", "--s-in", "1.0"},
      {"classify", "--alpha", "0.2", "--d", "1.5"},
      {"simulate", "--alpha", "0.5", "--d", "0.5", "--t-end", "200", "--seed", "7"},
      {"optimize", "pout", "--s-in", "1.0", "--contour-n", "50"},
      {"optimize", "ptheta", "--theta", "0.6", "--s-in", "2.0"},
      {"--format", "json", "optimize", "yield-alpha", "--d", "0.5"},
      {"pareto", "--s-in", "1", "--z", "2", "--theta-profile", "--sin-list", "0.5,1,2", "--plot", "--threads", "2"},
      {"hessian-map", "--s-in", "1", "--grid-n", "100"},
      {"--format", "json", "reachable", "--sin-list", "0.5,1,2", "--grid-n", "100"},
  };
  int identical = 0, k = 0;
  std::string bad;
  for (const auto& cmd : commands) {
    const fs::path a = root / ("a" + std::to_string(k)), b = root / ("b" + std::to_string(k));
    std::vector<std::string> args{"--out", a.string()};
    args.insert(args.end(), cmd.begin(), cmd.end());
    std::ostringstream sink;
    const int ca = tools::run_cli(args, sink, sink);
    const int cb = tools::run_cli({"--out", b.string(), "replay", (a / "run_manifest.json").string()}, sink, sink);
    if (ca == 0 && cb == 0 && snapshot(a) == snapshot(b) && snapshot(a).size() > 1) {
      ++identical;
    } else {
      bad += " " + cmd[0];
    }
    ++k;
  }
  fs::remove_all(root);
  return {identical == k, fmt("%d/%d commands byte-identical on replay%s", identical, k, bad.c_str())};
}

} // namespace

int main() {
  report(1, "equilibrium residuals", 5, equilibrium_residuals);
  report(2, "stability table consistency", 120, stability_consistency);
  report(3, "log-concavity of P_out", 1, log_concavity);
  report(4, "yield decreasing in d", 0, yield_decreasing);
  report(5, "yield global maximum", 0, yield_global_maximum);
  report(6, "optimizer vs grid oracle", 60, optimizer_oracle);
  report(7, "global Pareto optimality", 0, pareto_dominance);
  report(8, "theta0 threshold and feed boundary", 0, theta0_law);
  report(9, "Hessian definiteness map", 0, hessian_map);
  report(10, "reachable-set nesting", 0, reachable_nesting);
  report(11, "reproducibility", 0, reproducibility);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
