#include "consortium/sim.hpp"

#include "consortium/equilibria.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace consortium {

namespace {

using Vec = std::array<double, 5>;

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b_hat (error weights)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

Vec to_vec(const State& x) { return x.to_array(); }
State to_state(const Vec& v) { return State::from_array(v); }

struct Stepper {
  const Model& model;
  Control u;

  Vec f(const Vec& y) const { return to_vec(model.ode_rhs_unchecked(to_state(y), u)); }

  // One DP step from (y, k1). Returns y5 and the error estimate; k7 = f(y5).
  void step(const Vec& y, const Vec& k1, double h, Vec& y5, Vec& err, Vec& k7) const {
    Vec tmp{};
    const auto comb = [&](std::initializer_list<std::pair<double, const Vec*>> terms) {
      for (int i = 0; i < 5; ++i) {
        double s = 0.0;
        for (const auto& [a, k] : terms) s += a * (*k)[i];
        tmp[i] = y[i] + h * s;
      }
      return tmp;
    };
    const Vec k2 = f(comb({{a21, &k1}}));
    const Vec k3 = f(comb({{a31, &k1}, {a32, &k2}}));
    const Vec k4 = f(comb({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const Vec k5 = f(comb({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const Vec k6 = f(comb({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    y5 = comb({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    k7 = f(y5);
    for (int i = 0; i < 5; ++i) {
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    }
  }
};

void project(Vec& y, double q_min) {
  for (int i : {0, 1, 2, 4}) y[i] = std::max(y[i], 0.0);
  y[3] = std::max(y[3], q_min);
}

// Row-sum norm of the Jacobian bounds its spectral radius. Keeping h times it
// inside the real stability interval of the tableau (about 3.3) stops the
// step controller from parking on the stability edge, where perturbations
// near a steady state stop decaying.
double stiffness_step_cap(const Model& model, const Vec& y, const Control& u) {
  const Jacobian jac = model.jacobian(to_state(y), u);
  double norm = 0.0;
  for (const auto& row : jac) {
    double sum = 0.0;
    for (double x : row) sum += std::abs(x);
    norm = std::max(norm, sum);
  }
  return norm > 0.0 ? 2.0 / norm : std::numeric_limits<double>::infinity();
}

double max_abs(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

} // namespace

const char* to_string(TerminalEvent e) {
  switch (e) {
    case TerminalEvent::Converged: return "CONVERGED";
    case TerminalEvent::MaxTime: return "MAX_TIME";
    case TerminalEvent::StepFailure: return "STEP_FAILURE";
  }
  return "?";
}

const char* to_string(Attractor a) {
  switch (a) {
    case Attractor::X0: return "x0";
    case Attractor::X10: return "x10";
    case Attractor::X11: return "x11";
    case Attractor::None: return "none";
  }
  return "?";
}

Trajectory integrate(const Model& model, const State& x0, const Control& u, double t_end,
                     const IntegrateOptions& opts) {
  validate_dynamics_control(u);
  if (!model.in_state_space(x0)) throw DomainError("integrate: initial state outside Omega");
  if (!(t_end > 0.0)) throw DomainError("integrate: t_end must be positive");
  if (!(opts.rtol > 0.0) || !(opts.atol > 0.0)) throw DomainError("integrate: tolerances must be positive");

  const double q_min = model.params().q_min;
  const Stepper stepper{model, u};

  Trajectory traj;
  traj.control = u;
  traj.times.push_back(0.0);
  traj.states.push_back(x0);

  Vec y = to_vec(x0);
  Vec k1 = stepper.f(y);
  double t = 0.0;
  double h = opts.fixed_step ? *opts.fixed_step : std::min(opts.h_init, opts.h_max);
  double err_prev = 1e-4;
  bool stop_converged = false;

  Vec y5{}, err{}, k7{};
  std::size_t steps = 0;
  while (t < t_end && steps < opts.max_steps) {
    const bool last = t + h >= t_end;
    const double h_try = last ? t_end - t : h;

    stepper.step(y, k1, h_try, y5, err, k7);

    double err_norm = 0.0;
    if (!opts.fixed_step) {
      double sum = 0.0;
      for (int i = 0; i < 5; ++i) {
        const double scale = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
        sum += (err[i] / scale) * (err[i] / scale);
      }
      err_norm = std::sqrt(sum / 5.0);
      if (!std::isfinite(err_norm)) err_norm = 1e10;
    }

    if (err_norm <= 1.0) {
      ++steps;
      t = last ? t_end : t + h_try;
      y = y5;
      project(y, q_min);
      k1 = stepper.f(y);
      traj.times.push_back(t);
      traj.states.push_back(to_state(y));
      if (opts.stop_at_convergence && max_abs(k1) < opts.convergence_tol) {
        stop_converged = true;
        break;
      }
      if (!opts.fixed_step) {
        // PI controller (Hairer-Wanner, beta = 0.04).
        const double e = std::max(err_norm, 1e-10);
        double fac = std::pow(e, 0.17) * std::pow(err_prev, -0.04) / 0.9;
        fac = std::clamp(fac, 0.2, 10.0);
        h = std::min({h_try / fac, opts.h_max, stiffness_step_cap(model, y, u)});
        if (last) h = std::max(h, h_try);
        err_prev = std::max(err_norm, 1e-4);
      }
    } else {
      ++traj.rejected_steps;
      const double fac = std::clamp(std::pow(err_norm, 0.17) / 0.9, 1.0, 10.0);
      h = h_try / fac;
      if (h < opts.h_min) {
        traj.terminal_event = TerminalEvent::StepFailure;
        return traj;
      }
    }
  }

  const bool converged = stop_converged || max_abs(stepper.f(y)) < opts.convergence_tol;
  traj.terminal_event = converged ? TerminalEvent::Converged : TerminalEvent::MaxTime;
  return traj;
}

double relative_distance(const State& a, const State& b, double floor) {
  const auto va = a.to_array();
  const auto vb = b.to_array();
  double m = 0.0;
  for (int i = 0; i < 5; ++i) m = std::max(m, std::abs(va[i] - vb[i]) / std::max(std::abs(vb[i]), floor));
  return m;
}

ConvergenceReport converge_to_equilibrium(const Model& model, const State& x0, const Control& u, double tol,
                                          double t_max) {
  IntegrateOptions opts;
  opts.convergence_tol = tol;
  opts.stop_at_convergence = true;
  const Trajectory traj = integrate(model, x0, u, t_max, opts);

  ConvergenceReport report;
  report.terminal = traj.states.back();
  report.time = traj.times.back();
  report.event = traj.terminal_event;
  report.outside_stability_domain = x0.e == 0.0 || x0.c == 0.0;

  std::vector<std::pair<Attractor, State>> candidates{{Attractor::X0, equilibrium_x0(model, u)}};
  try {
    candidates.emplace_back(Attractor::X10, equilibrium_x10(model, u));
  } catch (const ExistenceError&) {
  }
  try {
    candidates.emplace_back(Attractor::X11, equilibrium_x11(model, u));
  } catch (const ExistenceError&) {
  }

  report.distance = std::numeric_limits<double>::infinity();
  for (const auto& [label, eq] : candidates) {
    const double dist = relative_distance(report.terminal, eq);
    if (dist < report.distance) {
      report.distance = dist;
      report.attractor = label;
    }
  }
  report.conclusive = report.event == TerminalEvent::Converged && report.distance < 1e-3;
  if (!report.conclusive) report.attractor = report.distance < 1e-3 ? report.attractor : Attractor::None;
  return report;
}

} // namespace consortium
