#pragma once

/**
 * @file
 * Algal-bacterial consortium chemostat: biological constants, rate laws and
 * their inverses, the ODE right-hand side and its analytic Jacobian.
 *
 * State x = (s, e, v, q, c):
 *   s  glucose            [g/L]
 *   e  E. coli biomass    [g/L]
 *   v  secreted vitamin   [mg/L]
 *   q  algal vitamin quota [mg/g]
 *   c  algal biomass      [g/L]
 *
 * Dynamics (phi Monod on glucose, rho Monod on vitamin, mu Droop on quota):
 *   s' = -(1/gamma) phi(s) e + d (s_in - s)
 *   e' = (1 - alpha) phi(s) e - d e
 *   v' = alpha beta phi(s) e - rho(v) c - d v
 *   q' = rho(v) - mu(q) q
 *   c' = mu(q) c - d c
 */

#include <array>
#include <stdexcept>
#include <string>

namespace consortium {

/// Which saturating rate law an argument ran into.
enum class SaturationBound { Phi, Rho, Mu };

const char* to_string(SaturationBound b);

/// Argument outside the domain of a rate law, state outside Omega, or an
/// invalid control. `bound()` is set when a saturation limit was violated.
class DomainError : public std::domain_error {
public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
  DomainError(const std::string& what, SaturationBound bound, double limit)
      : std::domain_error(what), bound_(bound), limit_(limit), has_bound_(true) {}

  bool has_bound() const noexcept { return has_bound_; }
  SaturationBound bound() const noexcept { return bound_; }
  double limit() const noexcept { return limit_; }

private:
  SaturationBound bound_ = SaturationBound::Phi;
  double limit_ = 0.0;
  bool has_bound_ = false;
};

/// Biological constants. Defaults are the reference parameter set for
/// A. protothecoides co-cultured with a vitamin-secreting E. coli strain.
struct ModelParams {
  double k_v = 0.57;     ///< half-saturation for vitamin uptake [mg/L]
  double k_s = 0.09;     ///< half-saturation for glucose [g/L]
  double rho_max = 27.3; ///< max vitamin uptake rate [mg/g/day]
  double phi_max = 6.48; ///< max bacterial growth rate [1/day]
  double q_min = 2.76;   ///< minimal vitamin quota [mg/g]
  double gamma = 0.44;   ///< bacterial growth yield [g/g]
  double mu_max = 1.02;  ///< max algal growth rate [1/day]
  double beta = 23.0;    ///< vitamin synthesis yield [mg/g]

  /// Throws DomainError unless every constant is finite and strictly positive.
  void validate() const;

  /// Largest dilution with d * mu_inv(d) < rho_max, i.e. the vitamin-uptake
  /// ceiling on any coexistence steady state.
  double rho_dilution_bound() const noexcept {
    return mu_max * rho_max / (rho_max + q_min * mu_max);
  }

  bool operator==(const ModelParams&) const = default;
};

struct State {
  double s = 0.0;
  double e = 0.0;
  double v = 0.0;
  double q = 0.0;
  double c = 0.0;

  static constexpr std::size_t size = 5;

  std::array<double, 5> to_array() const { return {s, e, v, q, c}; }
  static State from_array(const std::array<double, 5>& a) { return {a[0], a[1], a[2], a[3], a[4]}; }

  bool operator==(const State&) const = default;
};

/// Max-norm of a state-shaped vector.
double max_norm(const State& x);

/// Operating point: allocation fraction alpha, dilution d [1/day], feed s_in [g/L].
struct Control {
  double alpha = 0.5;
  double d = 0.5;
  double s_in = 1.0;

  bool operator==(const Control&) const = default;
};

/// Throws DomainError unless 0 < alpha < 1, d > 0, s_in > 0.
void validate_control(const Control& u);

/// Looser check for the dynamics alone: alpha in [0, 1], d >= 0, s_in >= 0.
void validate_dynamics_control(const Control& u);

using Jacobian = std::array<std::array<double, 5>, 5>;

/// Rate laws and dynamics for one parameter set. Immutable after
/// construction; every member is a pure function and safe to share.
class Model {
public:
  Model() = default;
  explicit Model(const ModelParams& params);

  const ModelParams& params() const noexcept { return params_; }

  double phi(double s) const;
  double rho(double v) const;
  double mu(double q) const;

  double phi_inv(double y) const;
  double rho_inv(double y) const;
  double mu_inv(double y) const;

  /// d/ds phi, d/dv rho, d/dq mu.
  double phi_prime(double s) const;
  double rho_prime(double v) const;
  double mu_prime(double q) const;

  /// True when x lies in Omega = {s,e,v,c >= -slack, q >= q_min - slack}.
  bool in_state_space(const State& x, double slack = 0.0) const noexcept;

  /// Checked: x in Omega and validate_dynamics_control(u).
  State ode_rhs(const State& x, const Control& u) const;
  Jacobian jacobian(const State& x, const Control& u) const;

  /// Right-hand side without domain checks; arguments are clamped into the
  /// rate-law domains first. Used by integrators whose stage points may
  /// stray by roundoff outside Omega.
  State ode_rhs_unchecked(const State& x, const Control& u) const noexcept;

private:
  void require_state(const State& x) const;

  ModelParams params_{};
};

} // namespace consortium
