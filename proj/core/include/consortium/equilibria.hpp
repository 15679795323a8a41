#pragma once

/**
 * @file
 * Closed-form steady states of the consortium and their existence/stability
 * regimes.
 *
 * Three candidate equilibria exist:
 *   x0   total washout      (s_in, 0, 0, q_min, 0), always
 *   x10  algal washout      if d < d2 = (1 - alpha) phi(s_in)
 *   x11  coexistence        if d < d1 = psi_alpha(s_in)
 *
 * psi_alpha is the increasing function whose inverse is
 *   psi_alpha_inv(d) = phi_inv(d / (1 - alpha)) + rho_inv(d mu_inv(d)) / (alpha beta gamma).
 */

#include "consortium/model.hpp"

#include <array>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

namespace consortium {

/// The requested equilibrium does not exist for the given control.
class ExistenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (e.g. a non-equilibrium state
/// passed to local_stability).
class PreconditionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

enum class Regime { CoexistenceGas, AlgalWashoutGas, TotalWashoutGas, Boundary };
enum class Stability { Stable, Unstable, Marginal };

const char* to_string(Regime r);
const char* to_string(Stability s);

/// Width of the band around d1 and d2 reported as Regime::Boundary.
inline constexpr double kRegimeBoundaryBand = 1e-9;
/// Real-part threshold separating stable/unstable eigenvalues.
inline constexpr double kStabilityThreshold = 1e-8;
/// Residual max-norm above which a state is not considered an equilibrium.
inline constexpr double kEquilibriumResidualTol = 1e-8;

/// Substrate level s_in at which the coexistence state appears for (alpha, d).
/// Defined for d >= 0 (0 at d = 0). Throws DomainError naming the saturation
/// bound when d / (1 - alpha) >= phi_max or d mu_inv(d) >= rho_max.
double psi_alpha_inv(const Model& model, double alpha, double d);

/// Same as psi_alpha_inv but empty instead of throwing on any domain violation.
std::optional<double> try_psi_alpha_inv(const Model& model, double alpha, double d) noexcept;

/// Supremum of admissible dilutions for fixed alpha: min((1 - alpha) phi_max, rho bound).
double psi_dilution_sup(const Model& model, double alpha);

/// Coexistence threshold d1 = psi_alpha(s_in), by bisection on psi_alpha_inv.
double psi_alpha(const Model& model, double alpha, double s_in);

/// Algal-washout threshold d2 = (1 - alpha) phi(s_in).
double washout_threshold(const Model& model, double alpha, double s_in);

State equilibrium_x0(const Model& model, const Control& u);
/// Throws ExistenceError when d >= d2.
State equilibrium_x10(const Model& model, const Control& u);
/// Throws ExistenceError unless psi_alpha_inv(alpha, d) < s_in.
State equilibrium_x11(const Model& model, const Control& u);

std::array<std::complex<double>, 5> jacobian_eigenvalues(const Model& model, const State& x, const Control& u);

/// Linearized stability of an equilibrium. Throws PreconditionError if the
/// residual of x exceeds kEquilibriumResidualTol.
Stability local_stability(const Model& model, const State& x, const Control& u);

/// Stability label from eigenvalues alone.
Stability stability_from_eigenvalues(const std::array<std::complex<double>, 5>& eig);

struct EquilibriumInfo {
  State state;
  double residual = 0.0; ///< max-norm of ode_rhs at state
  Stability stability = Stability::Marginal;
  std::array<std::complex<double>, 5> eigenvalues{};
};

struct EquilibriumReport {
  Control control;
  EquilibriumInfo x0;
  std::optional<EquilibriumInfo> x10;
  std::optional<EquilibriumInfo> x11;
  double d1 = 0.0;
  double d2 = 0.0;
  Regime regime = Regime::Boundary;
};

/// Regime selection: d < d1 coexistence, d1 < d < d2 algal washout,
/// d > d2 total washout, within kRegimeBoundaryBand of either threshold Boundary.
EquilibriumReport classify(const Model& model, const Control& u);

/// Regime predicted for each equilibrium: which one should be stable.
/// Returns the expected stability label for x0, x10, x11 under `regime`
/// (nullopt for an equilibrium that does not exist in that regime).
struct ExpectedStability {
  Stability x0;
  std::optional<Stability> x10;
  std::optional<Stability> x11;
};
std::optional<ExpectedStability> expected_stability(Regime regime);

} // namespace consortium
