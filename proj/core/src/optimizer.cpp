#include "consortium/optimizer.hpp"

#include "consortium/equilibria.hpp"
#include "consortium/objectives.hpp"
#include "consortium/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace consortium {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGolden = 0.61803398874989484820;

// Below this dilution a P_theta maximizer is reported as the d -> 0 supremum.
constexpr double kBoundaryDilution = 1e-8;

using Point = std::array<double, 2>; // (alpha, d)

struct SimplexResult {
  Point x{};
  double f = kInf;
  int iterations = 0;
  bool converged = false;
};

// Nelder-Mead minimization in two variables. f returns +inf outside the
// feasible set; x0 must be feasible.
SimplexResult nelder_mead(const std::function<double(const Point&)>& f, const Point& x0, const Point& step,
                          int max_iterations, double x_tol) {
  struct Vertex {
    Point x;
    double f;
  };
  std::array<Vertex, 3> s{};
  s[0] = {x0, f(x0)};
  for (int k = 0; k < 2; ++k) {
    Point x = x0;
    double h = step[k];
    double fx = kInf;
    for (int tries = 0; tries < 60; ++tries) {
      x = x0;
      x[k] += h;
      fx = f(x);
      if (std::isfinite(fx)) break;
      h = (tries % 2 == 0) ? -h : -0.5 * h; // try the other side, then shrink
    }
    s[k + 1] = {x, fx};
  }

  const auto sort = [&] { std::sort(s.begin(), s.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; }); };
  const auto diameter = [&] {
    double m = 0.0;
    for (int k = 1; k < 3; ++k)
      for (int j = 0; j < 2; ++j) m = std::max(m, std::abs(s[k].x[j] - s[0].x[j]));
    return m;
  };
  const auto along = [](const Point& c, const Point& w, double t) {
    return Point{c[0] + t * (w[0] - c[0]), c[1] + t * (w[1] - c[1])};
  };

  SimplexResult out;
  int it = 0;
  for (; it < max_iterations; ++it) {
    sort();
    if (diameter() < x_tol) {
      out.converged = true;
      break;
    }
    const Point c{0.5 * (s[0].x[0] + s[1].x[0]), 0.5 * (s[0].x[1] + s[1].x[1])};
    const Point xr = along(c, s[2].x, -1.0);
    const double fr = f(xr);
    if (fr < s[0].f) {
      const Point xe = along(c, s[2].x, -2.0);
      const double fe = f(xe);
      s[2] = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
      continue;
    }
    if (fr < s[1].f) {
      s[2] = {xr, fr};
      continue;
    }
    bool shrink = false;
    if (fr < s[2].f) {
      const Point xc = along(c, xr, 0.5);
      const double fc = f(xc);
      if (fc <= fr) s[2] = {xc, fc};
      else shrink = true;
    } else {
      const Point xc = along(c, s[2].x, 0.5);
      const double fc = f(xc);
      if (fc < s[2].f) s[2] = {xc, fc};
      else shrink = true;
    }
    if (shrink) {
      for (int k = 1; k < 3; ++k) {
        s[k].x = along(s[0].x, s[k].x, 0.5);
        s[k].f = f(s[k].x);
      }
    }
  }
  sort();
  out.x = s[0].x;
  out.f = s[0].f;
  out.iterations = it;
  return out;
}

double golden_max(const std::function<double(double)>& f, double lo, double hi, double tol) {
  double a = lo, b = hi;
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 500 && b - a > tol; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = f(x1);
    }
  }
  return f1 >= f2 ? x1 : x2;
}

// Smallest x in (lo, hi) with pred(x) true, given pred(lo) false and pred(hi) true.
double bisect_transition(const std::function<bool(double)>& pred, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (pred(mid) ? hi : lo) = mid;
  }
  return hi;
}

double barrier_terms(const Model& model, const Control& u) {
  const auto threshold = try_psi_alpha_inv(model, u.alpha, u.d);
  if (!threshold || !(*threshold < u.s_in)) return -kInf;
  return std::log(u.s_in - *threshold) + std::log(u.alpha) + std::log1p(-u.alpha) + std::log(u.d);
}

// Objective in the form the simplex search sees it. Productivity is searched
// in log form; its maximizer is the same.
std::optional<double> search_value(const Model& model, const Objective& objective, const Control& u) {
  const auto v = objective_value(model, objective, u);
  if (!v) return std::nullopt;
  if (objective.kind == Objective::Kind::POut) return *v > 0.0 ? std::optional<double>(std::log(*v)) : std::nullopt;
  return v;
}

Control default_start(const Model& model, double s_in) {
  return {0.5, 0.5 * psi_alpha(model, 0.5, s_in), s_in};
}

} // namespace

std::optional<double> objective_value(const Model& model, const Objective& objective, const Control& u) noexcept {
  if (!in_admissible(model, u)) return std::nullopt;
  const auto out = p_out_extended(model, u);
  if (!out) return std::nullopt;
  switch (objective.kind) {
    case Objective::Kind::POut:
      return *out;
    case Objective::Kind::PTheta:
      return objective.theta * *out - (1.0 - objective.theta) * u.d * u.s_in;
    case Objective::Kind::PYield:
      return *out / (u.d * u.s_in);
  }
  return std::nullopt;
}

double max_admissible_dilution(const Model& model, double s_in) {
  if (!(s_in > 0.0)) throw DomainError("max_admissible_dilution: s_in must be positive");
  const double a = golden_max([&](double alpha) { return psi_alpha(model, alpha, s_in); }, 1e-9, 1.0 - 1e-9, 1e-10);
  return psi_alpha(model, a, s_in);
}

ControlGrid make_control_grid(const Model& model, double s_in, int n) {
  if (n < 2) throw DomainError("grid resolution must be at least 2");
  ControlGrid grid;
  grid.s_in = s_in;
  grid.d_max = max_admissible_dilution(model, s_in);
  grid.alphas.resize(n);
  grid.ds.resize(n);
  for (int i = 0; i < n; ++i) {
    grid.alphas[i] = static_cast<double>(i + 1) / (n + 1);
    grid.ds[i] = grid.d_max * static_cast<double>(i + 1) / (n + 1);
  }
  return grid;
}

GridBest grid_oracle(const Model& model, const Objective& objective, double s_in, int n, int threads) {
  const ControlGrid grid = make_control_grid(model, s_in, n);
  struct RowBest {
    std::optional<GridBest> best;
    std::size_t count = 0;
  };
  std::vector<RowBest> rows(grid.ds.size());
  parallel_for(grid.ds.size(), threads, [&](std::size_t j) {
    RowBest row;
    for (double alpha : grid.alphas) {
      const Control u{alpha, grid.ds[j], s_in};
      const auto v = objective_value(model, objective, u);
      if (!v) continue;
      ++row.count;
      if (!row.best || *v > row.best->value) row.best = GridBest{u, *v, 0};
    }
    rows[j] = row;
  });

  std::optional<GridBest> best;
  std::size_t count = 0;
  for (const auto& row : rows) {
    count += row.count;
    if (row.best && (!best || row.best->value > best->value)) best = row.best;
  }
  if (!best) throw InfeasibleError("grid oracle: no admissible grid point");
  best->admissible_points = count;
  return *best;
}

OptimResult maximize(const Model& model, const Objective& objective, double s_in, const OptimOptions& opts) {
  if (!(s_in > 0.0)) throw DomainError("maximize: s_in must be positive");
  if (objective.kind == Objective::Kind::PTheta) validate_theta(objective.theta);

  Control start = default_start(model, s_in);
  if (opts.start) {
    const Control candidate{opts.start->alpha, opts.start->d, s_in};
    if (search_value(model, objective, candidate)) start = candidate;
  }
  const double d_scale = std::max(start.d, 1e-3);

  Point x{start.alpha, start.d};
  int iterations = 0;
  bool converged = true;

  const auto run_stage = [&](double barrier, const Point& step) {
    const auto f = [&](const Point& p) {
      const Control u{p[0], p[1], s_in};
      const auto v = search_value(model, objective, u);
      if (!v) return kInf;
      if (barrier == 0.0) return -*v;
      const double b = barrier_terms(model, u);
      return std::isfinite(b) ? -(*v + barrier * b) : kInf;
    };
    const SimplexResult r = nelder_mead(f, x, step, opts.max_iterations, opts.x_tol);
    iterations += r.iterations;
    if (std::isfinite(r.f)) x = r.x;
    return r;
  };

  for (double barrier : opts.barrier_weights) {
    run_stage(barrier, {0.05, 0.1 * d_scale});
  }
  // Unbarriered polish with fresh simplices until the value stops moving.
  double previous = kInf;
  for (int restart = 0; restart < 6; ++restart) {
    const double scale = restart == 0 ? 1e-2 : 1e-4;
    const SimplexResult r = run_stage(0.0, {scale, scale * std::max(x[1], 1e-6)});
    converged = r.converged;
    if (std::abs(previous - r.f) <= 1e-15 * (1.0 + std::abs(r.f))) break;
    previous = r.f;
  }

  OptimResult result;
  result.u_star = {x[0], x[1], s_in};
  result.iterations = iterations;
  result.converged = converged;
  result.value = *objective_value(model, objective, result.u_star);

  if (objective.kind == Objective::Kind::PTheta && x[1] < kBoundaryDilution && result.value <= 0.0) {
    result.boundary_supremum = true;
    result.u_star.d = 0.0;
    result.value = 0.0;
  }

  if (opts.oracle_n > 0) {
    const GridBest oracle = grid_oracle(model, objective, s_in, opts.oracle_n, opts.threads);
    result.oracle_gap = std::abs(result.value - oracle.value);
  }
  if (!converged) {
    throw OptimizationError("maximize: iteration cap reached before convergence", result);
  }
  return result;
}

OptimResult maximize_p_out(const Model& model, double s_in, const OptimOptions& opts) {
  return maximize(model, Objective::productivity(), s_in, opts);
}

OptimResult maximize_p_theta(const Model& model, double theta, double s_in, const OptimOptions& opts) {
  validate_theta(theta);
  return maximize(model, Objective::net_profit(theta), s_in, opts);
}

std::vector<Control> spread_starts(const Model& model, double s_in, int count) {
  std::vector<Control> starts;
  starts.reserve(count);
  for (int k = 0; k < count; ++k) {
    const double alpha = count > 1 ? 0.1 + 0.8 * k / (count - 1) : 0.5;
    const double frac = (k % 2 == 0) ? 0.2 : 0.7;
    starts.push_back({alpha, frac * psi_alpha(model, alpha, s_in), s_in});
  }
  return starts;
}

std::vector<OptimResult> multi_start_p_out(const Model& model, double s_in, const std::vector<Control>& starts,
                                           const OptimOptions& opts) {
  std::vector<OptimResult> out;
  out.reserve(starts.size());
  for (const auto& start : starts) {
    OptimOptions o = opts;
    o.start = start;
    out.push_back(maximize_p_out(model, s_in, o));
  }
  return out;
}

YieldAlphaResult maximize_yield_alpha(const Model& model, double d, double s_in) {
  if (!(d > 0.0)) throw DomainError("maximize_yield_alpha: d must be positive");
  if (!(s_in > 0.0)) throw DomainError("maximize_yield_alpha: s_in must be positive");
  const auto& p = model.params();
  const auto infeasible = [&] {
    std::ostringstream os;
    os.precision(17);
    os << "no admissible alpha for d = " << d << " at s_in = " << s_in;
    return InfeasibleError(os.str());
  };
  if (!(d < p.rho_dilution_bound())) throw infeasible();

  const double alpha_dom = 1.0 - d / p.phi_max; // phi_inv(d / (1 - alpha)) needs alpha below this
  const auto threshold = [&](double alpha) {
    const auto t = try_psi_alpha_inv(model, alpha, d);
    return t ? *t : kInf;
  };
  const double a_min = golden_max([&](double a) { return -threshold(a); }, 0.0, alpha_dom, 1e-14);
  if (!(threshold(a_min) < s_in)) throw infeasible();

  const auto admissible = [&](double a) { return a > 0.0 && a < 1.0 && threshold(a) < s_in; };
  YieldAlphaResult out;
  out.alpha_lo = bisect_transition(admissible, 0.0, a_min);
  out.alpha_hi = bisect_transition([&](double a) { return !admissible(a); }, a_min, alpha_dom);

  const auto yield_at = [&](double a) {
    const auto v = objective_value(model, Objective::yield(), Control{a, d, s_in});
    return v ? *v : -kInf;
  };
  out.alpha_star = golden_max(yield_at, out.alpha_lo, out.alpha_hi, 1e-10);
  out.yield = yield_at(out.alpha_star);
  return out;
}

YieldArgmax yield_global_argmax(const Model& model) {
  YieldArgmax out;
  out.value = batch_limit_yield(model, 1.0);
  return out;
}

const char* to_string(Definiteness d) {
  switch (d) {
    case Definiteness::PosDef: return "POS_DEF";
    case Definiteness::NegDef: return "NEG_DEF";
    case Definiteness::NonDef: return "NON_DEF";
    case Definiteness::Singular: return "SINGULAR";
  }
  return "?";
}

std::optional<Hessian2> hessian_g0(const Model& model, double alpha, double d) {
  const auto g = [&](double a, double dd) { return try_psi_alpha_inv(model, a, dd); };
  const auto at_step = [&](double ha, double hd) -> std::optional<Hessian2> {
    const auto c = g(alpha, d);
    const auto ap = g(alpha + ha, d), am = g(alpha - ha, d);
    const auto dp = g(alpha, d + hd), dm = g(alpha, d - hd);
    const auto pp = g(alpha + ha, d + hd), pm = g(alpha + ha, d - hd);
    const auto mp = g(alpha - ha, d + hd), mm = g(alpha - ha, d - hd);
    if (!c || !ap || !am || !dp || !dm || !pp || !pm || !mp || !mm) return std::nullopt;
    Hessian2 h{};
    h.aa = (*ap - 2.0 * *c + *am) / (ha * ha);
    h.dd = (*dp - 2.0 * *c + *dm) / (hd * hd);
    h.ad = ((*pp - *pm) - (*mp - *mm)) / (4.0 * ha * hd);
    h.da = ((*pp - *mp) - (*pm - *mm)) / (4.0 * ha * hd);
    return h;
  };
  const double ha = 1e-5 * alpha;
  const double hd = 1e-5 * d;
  const auto coarse = at_step(ha, hd);
  const auto fine = at_step(0.5 * ha, 0.5 * hd);
  if (!coarse || !fine) return std::nullopt;
  const auto rich = [](double f, double c) { return (4.0 * f - c) / 3.0; };
  return Hessian2{rich(fine->aa, coarse->aa), rich(fine->ad, coarse->ad), rich(fine->da, coarse->da),
                  rich(fine->dd, coarse->dd)};
}

Definiteness classify_definiteness(double eig_min, double eig_max, double threshold) {
  if (eig_min > threshold) return Definiteness::PosDef;
  if (eig_max < -threshold) return Definiteness::NegDef;
  if (eig_min < -threshold && eig_max > threshold) return Definiteness::NonDef;
  return Definiteness::Singular;
}

std::vector<HessianMapCell> hessian_map_g0(const Model& model, double s_in, int n, int threads) {
  const ControlGrid grid = make_control_grid(model, s_in, n);
  std::vector<HessianMapCell> cells(grid.alphas.size() * grid.ds.size());
  parallel_for(grid.ds.size(), threads, [&](std::size_t j) {
    for (std::size_t i = 0; i < grid.alphas.size(); ++i) {
      HessianMapCell& cell = cells[j * grid.alphas.size() + i];
      cell.alpha = grid.alphas[i];
      cell.d = grid.ds[j];
      if (!in_admissible(model, Control{cell.alpha, cell.d, s_in})) continue;
      const auto h = hessian_g0(model, cell.alpha, cell.d);
      if (!h) continue;
      cell.in_domain = true;
      cell.h_aa = h->aa;
      cell.h_ad = 0.5 * (h->ad + h->da);
      cell.h_dd = h->dd;
      const double mean = 0.5 * (cell.h_aa + cell.h_dd);
      const double radius = std::hypot(0.5 * (cell.h_aa - cell.h_dd), cell.h_ad);
      cell.eig_min = mean - radius;
      cell.eig_max = mean + radius;
      cell.classification = classify_definiteness(cell.eig_min, cell.eig_max);
    }
  });
  return cells;
}

} // namespace consortium
