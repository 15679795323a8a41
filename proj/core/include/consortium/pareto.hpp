#pragma once

/**
 * @file
 * Productivity-vs-feed trade-off: Pareto front of
 *   max { P_out(u), -P_in(u) }  over U(s_in)
 * by the weighting method (theta sweep), global dominance checks against a
 * grid of U, the s_in boundary analysis on B(z) = U(z) x (0, z), and the
 * reachable sets in the (P_out, P_in) plane.
 */

#include "consortium/model.hpp"
#include "consortium/optimizer.hpp"

#include <string>
#include <vector>

namespace consortium {

enum class FeedChoice { Zero, UpperBound, Fixed, Indifferent };
const char* to_string(FeedChoice c);

struct ParetoPoint {
  double theta = 0.0;
  Control u_star;
  double p_out = 0.0;
  double p_in = 0.0;
  double p_theta = 0.0;
  FeedChoice s_in_choice = FeedChoice::Fixed;
  bool solved = true;            ///< false: the weighted solve failed, see `error`
  bool boundary_supremum = false; ///< d -> 0 limit point (P_out = P_in = 0)
  std::string error;
};

/// n weights evenly spaced on [0, 1] (n >= 2).
std::vector<double> uniform_thetas(int n = 101);

struct SweepOptions {
  OptimOptions optim;
  /// Start each solve from the previous optimum. Sequential and deterministic.
  bool warm_start = true;
  /// Parallel workers over theta; only honored with warm_start disabled.
  int threads = 1;
};

/// Weighted-sum sweep at fixed s_in. Failed solves stay in the output with
/// solved = false; dominated solved points are dropped.
std::vector<ParetoPoint> sweep_front(const Model& model, double s_in, const std::vector<double>& thetas,
                                     const SweepOptions& opts = {});

/// a dominates b: no worse in both objectives, strictly better in one.
bool dominates(double out_a, double in_a, double out_b, double in_b);

/// Drops solved points dominated by another solved point.
std::vector<ParetoPoint> filter_non_dominated(const std::vector<ParetoPoint>& points);

struct DominanceViolation {
  std::size_t point_index = 0;
  Control grid_control;
  double grid_p_out = 0.0;
  double grid_p_in = 0.0;
};

/// Grid point g violates front point f when g beats f by more than `slack` in
/// one objective and is no worse in the other.
std::vector<DominanceViolation> dominance_check(const Model& model, const std::vector<ParetoPoint>& points,
                                                int grid_n, double s_in, double slack = 1e-9, int threads = 1);

struct FeedDecision {
  FeedChoice choice = FeedChoice::Indifferent;
  double s_in = 0.0;
  double theta0 = 0.0;
};

/// Optimal feed on [0, z] for fixed (alpha, d): z when theta > theta0,
/// 0 (degenerate, empty U) when theta < theta0, Indifferent within 1e-12.
FeedDecision sin_boundary_choice(const Model& model, double alpha, double d, double theta, double z);

struct ReachablePoint {
  Control u;
  double p_out = 0.0;
  double p_in = 0.0;
};

struct ReachableCloud {
  double s_in = 0.0;
  double d_max = 0.0;
  std::vector<ReachablePoint> points;
};

/// Images of the U(s_in) grids under (P_out, P_in).
std::vector<ReachableCloud> reachable_set(const Model& model, const std::vector<double>& s_in_list, int grid_n,
                                          int threads = 1);

struct NestingViolation {
  std::size_t smaller = 0; ///< cloud index
  std::size_t larger = 0;
  std::size_t point_index = 0;
};

/// Every point of a smaller-feed cloud must be achieved or dominated at each
/// larger feed. Witnesses are the larger cloud's grid points and, for each
/// point, the equal-feed-rate control (alpha, d s_in / s_in') evaluated exactly.
std::vector<NestingViolation> nesting_violations(const Model& model, const std::vector<ReachableCloud>& clouds);

struct ProfileRow {
  double theta = 0.0;
  double alpha = 0.0;
  double d = 0.0;
  double s_in = 0.0;
  double p_out = 0.0;
  double p_in = 0.0;
  double p_theta = 0.0;
  double theta0 = 0.0; ///< at (alpha, d)
  FeedChoice choice = FeedChoice::UpperBound;
};

/// Optimal (alpha, d, s_in) over the closure of B(z) for each theta. s_in*
/// is z or the degenerate 0; (alpha, d) are the maximizers at s_in = z.
std::vector<ProfileRow> front_vs_theta_profile(const Model& model, double z, const std::vector<double>& thetas,
                                               const SweepOptions& opts = {});

/// Non-dominated subset of the U(s_in) grid image.
std::vector<ReachablePoint> grid_pareto_set(const Model& model, double s_in, int grid_n, int threads = 1);

/// Largest P_out shortfall of the swept front (piecewise-linear in P_in)
/// below the grid non-dominated set. Positive values mean the sweep missed
/// part of the grid front.
double front_discrepancy(const std::vector<ParetoPoint>& front, const std::vector<ReachablePoint>& grid_front);

} // namespace consortium
