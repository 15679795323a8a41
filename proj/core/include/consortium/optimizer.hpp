#pragma once

/**
 * @file
 * Maximization of the steady-state criteria over the coexistence set
 * U(s_in) = {(alpha, d) : psi_alpha_inv(d) < s_in} at a fixed feed.
 *
 * The scalar problems are solved by Nelder-Mead simplex descent on a
 * log-barrier objective with barrier continuation, followed by an
 * unbarriered polish. Every maximizer can be cross-checked against an
 * exhaustive grid oracle.
 */

#include "consortium/model.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace consortium {

/// Criterion to maximize over U(s_in).
struct Objective {
  enum class Kind { POut, PTheta, PYield };
  Kind kind = Kind::POut;
  double theta = 1.0; ///< used by PTheta only

  static Objective productivity() { return {Kind::POut, 1.0}; }
  static Objective net_profit(double theta) { return {Kind::PTheta, theta}; }
  static Objective yield() { return {Kind::PYield, 1.0}; }
};

/// Value of `objective` at u, empty outside the coexistence set.
std::optional<double> objective_value(const Model& model, const Objective& objective, const Control& u) noexcept;

struct OptimOptions {
  std::vector<double> barrier_weights{1e-2, 1e-4, 1e-6};
  int max_iterations = 20000;    ///< Nelder-Mead iterations per stage
  double x_tol = 1e-12;          ///< simplex diameter at termination
  std::optional<Control> start;  ///< initial (alpha, d); s_in is ignored
  int oracle_n = 0;              ///< grid oracle resolution, 0 disables it
  int threads = 1;               ///< workers for the oracle grid
};

struct OptimResult {
  Control u_star;
  double value = 0.0;
  int iterations = 0;
  std::optional<double> oracle_gap; ///< |value - best grid value|
  bool converged = false;
  /// Supremum approached on the d -> 0 edge, outside the open set U.
  bool boundary_supremum = false;
};

/// Iteration cap reached before the simplex collapsed; best iterate attached.
class OptimizationError : public std::runtime_error {
public:
  OptimizationError(const std::string& what, OptimResult best) : std::runtime_error(what), best_(best) {}
  const OptimResult& best() const noexcept { return best_; }

private:
  OptimResult best_;
};

/// No admissible control for the requested slice.
class InfeasibleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Largest dilution in U(s_in), i.e. max over alpha of psi_alpha(alpha, s_in).
double max_admissible_dilution(const Model& model, double s_in);

/// Evaluation grid over (0,1) x (0, max_admissible_dilution): interior points
/// alpha_i = (i+1)/(n+1), d_j = D (j+1)/(n+1).
struct ControlGrid {
  double s_in = 0.0;
  double d_max = 0.0;
  std::vector<double> alphas;
  std::vector<double> ds;
};
ControlGrid make_control_grid(const Model& model, double s_in, int n);

struct GridBest {
  Control u;
  double value = 0.0;
  std::size_t admissible_points = 0;
};

/// Exhaustive n x n evaluation restricted to U. Ties go to the smallest d,
/// then the smallest alpha. Throws InfeasibleError on an empty grid.
GridBest grid_oracle(const Model& model, const Objective& objective, double s_in, int n, int threads = 1);

OptimResult maximize(const Model& model, const Objective& objective, double s_in, const OptimOptions& opts = {});
OptimResult maximize_p_out(const Model& model, double s_in, const OptimOptions& opts = {});
OptimResult maximize_p_theta(const Model& model, double theta, double s_in, const OptimOptions& opts = {});

/// `count` feasible starting points spread across U(s_in).
std::vector<Control> spread_starts(const Model& model, double s_in, int count);

/// Runs maximize_p_out from each start in turn.
std::vector<OptimResult> multi_start_p_out(const Model& model, double s_in, const std::vector<Control>& starts,
                                           const OptimOptions& opts = {});

struct YieldAlphaResult {
  double alpha_star = 0.0;
  double yield = 0.0;
  double alpha_lo = 0.0; ///< admissible alpha interval at this d
  double alpha_hi = 0.0;
};

/// Golden-section maximization of alpha -> P_yield(alpha, d) on the
/// admissible alpha interval. Throws InfeasibleError if no alpha is admissible.
YieldAlphaResult maximize_yield_alpha(const Model& model, double d, double s_in);

struct YieldArgmax {
  double alpha = 1.0;
  double d = 0.0;
  double value = 0.0;
  bool batch_degenerate = true;
};

/// Yield maximum over the closure of U: the batch corner (1, 0).
YieldArgmax yield_global_argmax(const Model& model);

enum class Definiteness { PosDef, NegDef, NonDef, Singular };
const char* to_string(Definiteness d);

struct HessianMapCell {
  double alpha = 0.0;
  double d = 0.0;
  bool in_domain = false; ///< false: outside U or stencil leaves psi's domain
  Definiteness classification = Definiteness::Singular;
  double h_aa = 0.0;
  double h_ad = 0.0;
  double h_dd = 0.0;
  double eig_min = 0.0;
  double eig_max = 0.0;
};

/// Finite-difference Hessian of g0(alpha, d) = psi_alpha_inv(d) at a point,
/// relative step 1e-5 with one Richardson refinement. Empty when the stencil
/// leaves psi_alpha_inv's domain.
struct Hessian2 {
  double aa, ad, da, dd;
};
std::optional<Hessian2> hessian_g0(const Model& model, double alpha, double d);

Definiteness classify_definiteness(double eig_min, double eig_max, double threshold = 1e-9);

/// Definiteness of the g0 Hessian on the n x n control grid of U(s_in),
/// row-major in d then alpha.
std::vector<HessianMapCell> hessian_map_g0(const Model& model, double s_in, int n, int threads = 1);

} // namespace consortium
