#include "consortium/equilibria.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace consortium {

namespace {

// Relative gap kept between the bisection bracket and the psi_alpha_inv pole.
constexpr double kSupGuard = 1e-10;

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "alpha must lie in (0,1) (got " << alpha << ")";
    throw DomainError(os.str());
  }
}

EquilibriumInfo describe(const Model& model, const State& x, const Control& u) {
  EquilibriumInfo info;
  info.state = x;
  info.residual = max_norm(model.ode_rhs(x, u));
  info.eigenvalues = jacobian_eigenvalues(model, x, u);
  info.stability = stability_from_eigenvalues(info.eigenvalues);
  return info;
}

} // namespace

const char* to_string(Regime r) {
  switch (r) {
    case Regime::CoexistenceGas: return "COEXISTENCE_GAS";
    case Regime::AlgalWashoutGas: return "ALGAL_WASHOUT_GAS";
    case Regime::TotalWashoutGas: return "TOTAL_WASHOUT_GAS";
    case Regime::Boundary: return "BOUNDARY";
  }
  return "?";
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "STABLE";
    case Stability::Unstable: return "UNSTABLE";
    case Stability::Marginal: return "MARGINAL";
  }
  return "?";
}

double psi_alpha_inv(const Model& model, double alpha, double d) {
  require_alpha(alpha);
  if (!(d >= 0.0)) throw DomainError("psi_alpha_inv: d must be nonnegative");
  const auto& p = model.params();
  const double substrate = model.phi_inv(d / (1.0 - alpha));
  const double vitamin = model.rho_inv(d * model.mu_inv(d));
  return substrate + vitamin / (alpha * p.beta * p.gamma);
}

std::optional<double> try_psi_alpha_inv(const Model& model, double alpha, double d) noexcept {
  if (!(alpha > 0.0 && alpha < 1.0) || !(d >= 0.0)) return std::nullopt;
  const auto& p = model.params();
  const double y_phi = d / (1.0 - alpha);
  if (!(p.phi_max - y_phi > 1e-12 * p.phi_max)) return std::nullopt;
  if (!(p.mu_max - d > 1e-12 * p.mu_max)) return std::nullopt;
  const double q = p.q_min * p.mu_max / (p.mu_max - d);
  const double y_rho = d * q;
  if (!(p.rho_max - y_rho > 1e-12 * p.rho_max)) return std::nullopt;
  const double substrate = p.k_s * y_phi / (p.phi_max - y_phi);
  const double vitamin = p.k_v * y_rho / (p.rho_max - y_rho);
  return substrate + vitamin / (alpha * p.beta * p.gamma);
}

double psi_dilution_sup(const Model& model, double alpha) {
  require_alpha(alpha);
  const auto& p = model.params();
  return std::min((1.0 - alpha) * p.phi_max, p.rho_dilution_bound());
}

double psi_alpha(const Model& model, double alpha, double s_in) {
  require_alpha(alpha);
  if (!(s_in > 0.0)) throw DomainError("psi_alpha: s_in must be positive");

  double lo = 0.0;
  double hi = psi_dilution_sup(model, alpha) * (1.0 - kSupGuard);
  double f_lo = -s_in;
  double f_hi = psi_alpha_inv(model, alpha, hi) - s_in;
  if (f_hi <= 0.0) return hi;

  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = psi_alpha_inv(model, alpha, mid) - s_in;
    if (f_mid == 0.0) return mid;
    if (f_mid < 0.0) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }
  // One secant step across the final bracket.
  const double d = lo - f_lo * (hi - lo) / (f_hi - f_lo);
  return std::clamp(d, lo, hi);
}

double washout_threshold(const Model& model, double alpha, double s_in) {
  require_alpha(alpha);
  return (1.0 - alpha) * model.phi(s_in);
}

State equilibrium_x0(const Model& model, const Control& u) {
  validate_control(u);
  return {u.s_in, 0.0, 0.0, model.params().q_min, 0.0};
}

State equilibrium_x10(const Model& model, const Control& u) {
  validate_control(u);
  const auto& p = model.params();
  const double d2 = washout_threshold(model, u.alpha, u.s_in);
  if (!(u.d < d2)) {
    std::ostringstream os;
    os.precision(17);
    os << "algal washout equilibrium requires d < d2 = " << d2 << " (got d = " << u.d << ")";
    throw ExistenceError(os.str());
  }
  const double s = model.phi_inv(u.d / (1.0 - u.alpha));
  const double spent = u.s_in - s;
  const double e = (1.0 - u.alpha) * p.gamma * spent;
  const double v_in = u.alpha * p.beta * p.gamma * spent;
  const double q0 = p.q_min + model.rho(v_in) / p.mu_max;
  return {s, e, v_in, q0, 0.0};
}

State equilibrium_x11(const Model& model, const Control& u) {
  validate_control(u);
  const auto& p = model.params();
  const auto threshold = try_psi_alpha_inv(model, u.alpha, u.d);
  if (!threshold || !(*threshold < u.s_in)) {
    std::ostringstream os;
    os.precision(17);
    os << "coexistence equilibrium requires psi_alpha_inv(alpha, d) < s_in";
    if (threshold) {
      os << " (psi_alpha_inv = " << *threshold << ", s_in = " << u.s_in << ")";
    } else {
      os << " (psi_alpha_inv undefined: saturation bound exceeded at d = " << u.d << ")";
    }
    throw ExistenceError(os.str());
  }
  const double s = model.phi_inv(u.d / (1.0 - u.alpha));
  const double spent = u.s_in - s;
  const double e = (1.0 - u.alpha) * p.gamma * spent;
  const double v_in = u.alpha * p.beta * p.gamma * spent;
  const double q = model.mu_inv(u.d);
  const double v = model.rho_inv(u.d * q);
  const double c = (v_in - v) / q;
  return {s, e, v, q, c};
}

std::array<std::complex<double>, 5> jacobian_eigenvalues(const Model& model, const State& x, const Control& u) {
  const Jacobian J = model.jacobian(x, u);
  Eigen::Matrix<double, 5, 5> m;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) m(i, j) = J[i][j];
  Eigen::EigenSolver<Eigen::Matrix<double, 5, 5>> solver(m, /*computeEigenvectors=*/false);
  std::array<std::complex<double>, 5> out{};
  for (int i = 0; i < 5; ++i) out[i] = solver.eigenvalues()(i);
  // Deterministic order: by real part, then imaginary part.
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

Stability stability_from_eigenvalues(const std::array<std::complex<double>, 5>& eig) {
  bool all_negative = true;
  for (const auto& l : eig) {
    if (l.real() > kStabilityThreshold) return Stability::Unstable;
    if (!(l.real() < -kStabilityThreshold)) all_negative = false;
  }
  return all_negative ? Stability::Stable : Stability::Marginal;
}

Stability local_stability(const Model& model, const State& x, const Control& u) {
  const double residual = max_norm(model.ode_rhs(x, u));
  if (!(residual < kEquilibriumResidualTol)) {
    std::ostringstream os;
    os.precision(6);
    os << "local_stability: state is not an equilibrium (residual " << residual << ")";
    throw PreconditionError(os.str());
  }
  return stability_from_eigenvalues(jacobian_eigenvalues(model, x, u));
}

EquilibriumReport classify(const Model& model, const Control& u) {
  validate_control(u);
  EquilibriumReport report;
  report.control = u;
  report.d1 = psi_alpha(model, u.alpha, u.s_in);
  report.d2 = washout_threshold(model, u.alpha, u.s_in);

  report.x0 = describe(model, equilibrium_x0(model, u), u);
  if (u.d < report.d2) report.x10 = describe(model, equilibrium_x10(model, u), u);
  if (u.d < report.d1) {
    // d1 is a numerical root; trust the exact membership test.
    const auto threshold = try_psi_alpha_inv(model, u.alpha, u.d);
    if (threshold && *threshold < u.s_in) report.x11 = describe(model, equilibrium_x11(model, u), u);
  }

  if (std::abs(u.d - report.d1) < kRegimeBoundaryBand || std::abs(u.d - report.d2) < kRegimeBoundaryBand) {
    report.regime = Regime::Boundary;
  } else if (u.d < report.d1) {
    report.regime = Regime::CoexistenceGas;
  } else if (u.d < report.d2) {
    report.regime = Regime::AlgalWashoutGas;
  } else {
    report.regime = Regime::TotalWashoutGas;
  }
  return report;
}

std::optional<ExpectedStability> expected_stability(Regime regime) {
  switch (regime) {
    case Regime::CoexistenceGas:
      return ExpectedStability{Stability::Unstable, Stability::Unstable, Stability::Stable};
    case Regime::AlgalWashoutGas:
      return ExpectedStability{Stability::Unstable, Stability::Stable, std::nullopt};
    case Regime::TotalWashoutGas:
      return ExpectedStability{Stability::Stable, std::nullopt, std::nullopt};
    case Regime::Boundary:
      return std::nullopt;
  }
  return std::nullopt;
}

} // namespace consortium
