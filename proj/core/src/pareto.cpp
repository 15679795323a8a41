#include "consortium/pareto.hpp"

#include "consortium/equilibria.hpp"
#include "consortium/objectives.hpp"
#include "consortium/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace consortium {

namespace {

ParetoPoint solve_weighted(const Model& model, double s_in, double theta, const OptimOptions& optim) {
  ParetoPoint pt;
  pt.theta = theta;
  pt.u_star = {0.0, 0.0, s_in};
  try {
    const OptimResult r = maximize_p_theta(model, theta, s_in, optim);
    pt.u_star = r.u_star;
    pt.boundary_supremum = r.boundary_supremum;
    if (r.boundary_supremum) {
      pt.p_out = 0.0;
      pt.p_in = 0.0;
    } else {
      pt.p_out = p_out(model, r.u_star);
      pt.p_in = p_in(r.u_star);
    }
    pt.p_theta = theta * pt.p_out - (1.0 - theta) * pt.p_in;
  } catch (const std::exception& e) {
    pt.solved = false;
    pt.error = e.what();
  }
  return pt;
}

// Staircase of a point cloud: points sorted by P_in ascending with the
// running maximum of P_out.
struct Staircase {
  std::vector<double> p_in;
  std::vector<double> best_out;

  explicit Staircase(const std::vector<ReachablePoint>& pts) {
    std::vector<std::pair<double, double>> v;
    v.reserve(pts.size());
    for (const auto& p : pts) v.emplace_back(p.p_in, p.p_out);
    std::sort(v.begin(), v.end());
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& [in, out] : v) {
      best = std::max(best, out);
      p_in.push_back(in);
      best_out.push_back(best);
    }
  }

  /// Largest P_out among points with P_in <= in (or -inf).
  double max_out_up_to(double in) const {
    const auto it = std::upper_bound(p_in.begin(), p_in.end(), in);
    if (it == p_in.begin()) return -std::numeric_limits<double>::infinity();
    return best_out[static_cast<std::size_t>(it - p_in.begin()) - 1];
  }
};

} // namespace

const char* to_string(FeedChoice c) {
  switch (c) {
    case FeedChoice::Zero: return "ZERO";
    case FeedChoice::UpperBound: return "UPPER_BOUND";
    case FeedChoice::Fixed: return "FIXED";
    case FeedChoice::Indifferent: return "INDIFFERENT";
  }
  return "?";
}

std::vector<double> uniform_thetas(int n) {
  if (n < 2) throw DomainError("uniform_thetas: need at least 2 weights");
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = static_cast<double>(i) / (n - 1);
  return out;
}

bool dominates(double out_a, double in_a, double out_b, double in_b) {
  return out_a >= out_b && in_a <= in_b && (out_a > out_b || in_a < in_b);
}

std::vector<ParetoPoint> filter_non_dominated(const std::vector<ParetoPoint>& points) {
  std::vector<ParetoPoint> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    bool dominated = false;
    if (p.solved) {
      for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
        const auto& q = points[j];
        dominated = j != i && q.solved && dominates(q.p_out, q.p_in, p.p_out, p.p_in);
      }
    }
    if (!dominated) out.push_back(p);
  }
  return out;
}

std::vector<ParetoPoint> sweep_front(const Model& model, double s_in, const std::vector<double>& thetas,
                                     const SweepOptions& opts) {
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    validate_theta(thetas[i]);
    if (i > 0 && thetas[i] < thetas[i - 1]) throw DomainError("sweep_front: theta grid must be ascending");
  }
  std::vector<ParetoPoint> points(thetas.size());
  if (opts.warm_start) {
    OptimOptions optim = opts.optim;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      points[i] = solve_weighted(model, s_in, thetas[i], optim);
      if (points[i].solved && !points[i].boundary_supremum) optim.start = points[i].u_star;
    }
  } else {
    parallel_for(thetas.size(), opts.threads,
                 [&](std::size_t i) { points[i] = solve_weighted(model, s_in, thetas[i], opts.optim); });
  }
  return filter_non_dominated(points);
}

std::vector<DominanceViolation> dominance_check(const Model& model, const std::vector<ParetoPoint>& points,
                                                int grid_n, double s_in, double slack, int threads) {
  if (points.empty()) return {};
  const ControlGrid grid = make_control_grid(model, s_in, grid_n);

  std::vector<std::vector<DominanceViolation>> per_row(grid.ds.size());
  parallel_for(grid.ds.size(), threads, [&](std::size_t j) {
    for (double alpha : grid.alphas) {
      const Control u{alpha, grid.ds[j], s_in};
      const auto out = objective_value(model, Objective::productivity(), u);
      if (!out) continue;
      const double in = u.d * s_in;
      for (std::size_t k = 0; k < points.size(); ++k) {
        const auto& f = points[k];
        if (!f.solved) continue;
        const bool better_out = *out > f.p_out + slack && in <= f.p_in;
        const bool better_in = in < f.p_in - slack && *out >= f.p_out;
        if (better_out || better_in) per_row[j].push_back({k, u, *out, in});
      }
    }
  });
  std::vector<DominanceViolation> out;
  for (auto& row : per_row) out.insert(out.end(), row.begin(), row.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.point_index < b.point_index; });
  return out;
}

FeedDecision sin_boundary_choice(const Model& model, double alpha, double d, double theta, double z) {
  validate_theta(theta);
  if (!(z > 0.0)) throw DomainError("sin_boundary_choice: z must be positive");
  FeedDecision out;
  out.theta0 = theta0(model, alpha, d);
  if (std::abs(theta - out.theta0) <= 1e-12) {
    out.choice = FeedChoice::Indifferent;
    out.s_in = z;
  } else if (theta > out.theta0) {
    out.choice = FeedChoice::UpperBound;
    out.s_in = z;
  } else {
    out.choice = FeedChoice::Zero;
    out.s_in = 0.0;
  }
  return out;
}

std::vector<ReachableCloud> reachable_set(const Model& model, const std::vector<double>& s_in_list, int grid_n,
                                          int threads) {
  std::vector<ReachableCloud> clouds;
  for (double s_in : s_in_list) {
    const ControlGrid grid = make_control_grid(model, s_in, grid_n);
    std::vector<std::vector<ReachablePoint>> rows(grid.ds.size());
    parallel_for(grid.ds.size(), threads, [&](std::size_t j) {
      for (double alpha : grid.alphas) {
        const Control u{alpha, grid.ds[j], s_in};
        const auto out = objective_value(model, Objective::productivity(), u);
        if (out) rows[j].push_back({u, *out, u.d * s_in});
      }
    });
    ReachableCloud cloud;
    cloud.s_in = s_in;
    cloud.d_max = grid.d_max;
    for (auto& row : rows) cloud.points.insert(cloud.points.end(), row.begin(), row.end());
    clouds.push_back(std::move(cloud));
  }
  return clouds;
}

std::vector<NestingViolation> nesting_violations(const Model& model, const std::vector<ReachableCloud>& clouds) {
  std::vector<NestingViolation> out;
  for (std::size_t b = 0; b < clouds.size(); ++b) {
    const Staircase stairs(clouds[b].points);
    for (std::size_t a = 0; a < clouds.size(); ++a) {
      if (!(clouds[a].s_in < clouds[b].s_in)) continue;
      const double ratio = clouds[a].s_in / clouds[b].s_in;
      for (std::size_t k = 0; k < clouds[a].points.size(); ++k) {
        const auto& p = clouds[a].points[k];
        if (stairs.max_out_up_to(p.p_in) >= p.p_out) continue;
        const Control witness{p.u.alpha, p.u.d * ratio, clouds[b].s_in};
        const auto w = objective_value(model, Objective::productivity(), witness);
        if (w && *w >= p.p_out && witness.d * witness.s_in <= p.p_in) continue;
        out.push_back({a, b, k});
      }
    }
  }
  return out;
}

std::vector<ProfileRow> front_vs_theta_profile(const Model& model, double z, const std::vector<double>& thetas,
                                               const SweepOptions& opts) {
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    validate_theta(thetas[i]);
    if (i > 0 && thetas[i] < thetas[i - 1]) throw DomainError("front_vs_theta_profile: theta grid must be ascending");
  }
  if (!(z > 0.0)) throw DomainError("front_vs_theta_profile: z must be positive");

  std::vector<ProfileRow> rows;
  rows.reserve(thetas.size());
  OptimOptions optim = opts.optim;
  for (double theta : thetas) {
    const ParetoPoint pt = solve_weighted(model, z, theta, optim);
    if (!pt.solved) throw std::runtime_error("front_vs_theta_profile: weighted solve failed at theta = " +
                                             std::to_string(theta) + ": " + pt.error);
    if (opts.warm_start && !pt.boundary_supremum) optim.start = pt.u_star;

    ProfileRow row;
    row.theta = theta;
    row.alpha = pt.u_star.alpha;
    row.d = pt.u_star.d;
    row.theta0 = theta0(model, row.alpha, row.d);
    if (!pt.boundary_supremum && pt.p_theta > 0.0) {
      row.choice = FeedChoice::UpperBound;
      row.s_in = z;
      row.p_out = pt.p_out;
      row.p_in = pt.p_in;
      row.p_theta = pt.p_theta;
    } else {
      row.choice = FeedChoice::Zero;
      row.s_in = 0.0;
      row.p_out = 0.0;
      row.p_in = 0.0;
      row.p_theta = 0.0;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<ReachablePoint> grid_pareto_set(const Model& model, double s_in, int grid_n, int threads) {
  auto cloud = std::move(reachable_set(model, {s_in}, grid_n, threads).front().points);
  // Sort by P_in ascending, P_out descending; keep strict records of P_out.
  std::sort(cloud.begin(), cloud.end(), [](const auto& a, const auto& b) {
    return a.p_in != b.p_in ? a.p_in < b.p_in : a.p_out > b.p_out;
  });
  std::vector<ReachablePoint> front;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : cloud) {
    if (p.p_out > best) {
      front.push_back(p);
      best = p.p_out;
    }
  }
  return front;
}

double front_discrepancy(const std::vector<ParetoPoint>& front, const std::vector<ReachablePoint>& grid_front) {
  std::vector<std::pair<double, double>> curve; // (p_in, p_out)
  for (const auto& p : front)
    if (p.solved) curve.emplace_back(p.p_in, p.p_out);
  if (curve.empty()) return std::numeric_limits<double>::infinity();
  std::sort(curve.begin(), curve.end());

  double worst = 0.0;
  for (const auto& g : grid_front) {
    double reach;
    if (g.p_in >= curve.back().first) {
      reach = curve.back().second;
    } else if (g.p_in <= curve.front().first) {
      reach = curve.front().second;
    } else {
      const auto hi = std::upper_bound(curve.begin(), curve.end(), std::make_pair(g.p_in, -1e300));
      const auto lo = hi - 1;
      const double t = (g.p_in - lo->first) / (hi->first - lo->first);
      reach = lo->second + t * (hi->second - lo->second);
    }
    worst = std::max(worst, g.p_out - reach);
  }
  return worst;
}

} // namespace consortium
