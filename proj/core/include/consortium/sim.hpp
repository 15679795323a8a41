#pragma once

#include "consortium/model.hpp"

#include <optional>
#include <vector>

namespace consortium {

enum class TerminalEvent { Converged, MaxTime, StepFailure };
const char* to_string(TerminalEvent e);

struct IntegrateOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double h_init = 1e-3;
  double h_min = 1e-12;
  double h_max = 5.0;
  /// Terminal states with ||ode_rhs||_inf below this are reported Converged.
  double convergence_tol = 1e-9;
  /// End the run as soon as the convergence test passes.
  bool stop_at_convergence = false;
  /// Fixed step size; disables error control when set.
  std::optional<double> fixed_step;
  std::size_t max_steps = 20'000'000;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  Control control;
  TerminalEvent terminal_event = TerminalEvent::MaxTime;
  std::size_t rejected_steps = 0;
};

/// Dormand-Prince 5(4) with PI step-size control. Accepted states are
/// projected onto Omega (negative concentrations clipped to 0, q to q_min).
/// Throws DomainError if x0 lies outside Omega or u is invalid.
Trajectory integrate(const Model& model, const State& x0, const Control& u, double t_end,
                     const IntegrateOptions& opts = {});

enum class Attractor { X0, X10, X11, None };
const char* to_string(Attractor a);

struct ConvergenceReport {
  State terminal;
  double time = 0.0;
  TerminalEvent event = TerminalEvent::MaxTime;
  Attractor attractor = Attractor::None;
  /// Relative distance (per-component scale floored at 1e-3) to the nearest equilibrium.
  double distance = 0.0;
  bool conclusive = false;
  /// x0 had e = 0 or c = 0, where the stability statements do not apply.
  bool outside_stability_domain = false;
};

/// Integrates until ||ode_rhs||_inf < tol or t_max, then attributes the
/// terminal state to the nearest existing closed-form equilibrium.
ConvergenceReport converge_to_equilibrium(const Model& model, const State& x0, const Control& u, double tol = 1e-9,
                                          double t_max = 2000.0);

/// Component-wise relative distance max_i |a_i - b_i| / max(|b_i|, floor).
double relative_distance(const State& a, const State& b, double floor = 1e-3);

} // namespace consortium
