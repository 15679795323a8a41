#include "consortium/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace consortium {

namespace {

// Inverses refuse arguments this close (relative) to their pole.
constexpr double kPoleGuard = 1e-12;

std::string fmt(const char* what, double value) {
  std::ostringstream os;
  os.precision(17);
  os << what << " (got " << value << ")";
  return os.str();
}

void check_inverse_arg(double y, double limit, SaturationBound bound, const char* name) {
  if (!(y >= 0.0)) {
    throw DomainError(fmt((std::string(name) + ": argument must be nonnegative").c_str(), y));
  }
  if (!(limit - y > kPoleGuard * limit)) {
    std::ostringstream os;
    os.precision(17);
    os << name << ": argument " << y << " reaches the " << to_string(bound)
       << " saturation limit " << limit;
    throw DomainError(os.str(), bound, limit);
  }
}

} // namespace

const char* to_string(SaturationBound b) {
  switch (b) {
    case SaturationBound::Phi: return "phi_max";
    case SaturationBound::Rho: return "rho_max";
    case SaturationBound::Mu: return "mu_max";
  }
  return "?";
}

void ModelParams::validate() const {
  const std::pair<const char*, double> fields[] = {
      {"k_v", k_v}, {"k_s", k_s}, {"rho_max", rho_max}, {"phi_max", phi_max},
      {"q_min", q_min}, {"gamma", gamma}, {"mu_max", mu_max}, {"beta", beta}};
  for (const auto& [name, value] : fields) {
    if (!(std::isfinite(value) && value > 0.0)) {
      throw DomainError(fmt((std::string("parameter ") + name + " must be positive").c_str(), value));
    }
  }
}

double max_norm(const State& x) {
  double m = 0.0;
  for (double v : x.to_array()) m = std::max(m, std::abs(v));
  return m;
}

void validate_control(const Control& u) {
  if (!(u.alpha > 0.0 && u.alpha < 1.0)) throw DomainError(fmt("alpha must lie in (0,1)", u.alpha));
  if (!(u.d > 0.0 && std::isfinite(u.d))) throw DomainError(fmt("d must be positive", u.d));
  if (!(u.s_in > 0.0 && std::isfinite(u.s_in))) throw DomainError(fmt("s_in must be positive", u.s_in));
}

void validate_dynamics_control(const Control& u) {
  if (!(u.alpha >= 0.0 && u.alpha <= 1.0)) throw DomainError(fmt("alpha must lie in [0,1]", u.alpha));
  if (!(u.d >= 0.0 && std::isfinite(u.d))) throw DomainError(fmt("d must be nonnegative", u.d));
  if (!(u.s_in >= 0.0 && std::isfinite(u.s_in))) throw DomainError(fmt("s_in must be nonnegative", u.s_in));
}

Model::Model(const ModelParams& params) : params_(params) { params_.validate(); }

double Model::phi(double s) const {
  if (!(s >= 0.0)) throw DomainError(fmt("phi: s must be nonnegative", s));
  return params_.phi_max * s / (params_.k_s + s);
}

double Model::rho(double v) const {
  if (!(v >= 0.0)) throw DomainError(fmt("rho: v must be nonnegative", v));
  return params_.rho_max * v / (params_.k_v + v);
}

double Model::mu(double q) const {
  if (!(q >= params_.q_min)) throw DomainError(fmt("mu: q must be at least q_min", q));
  return params_.mu_max * (1.0 - params_.q_min / q);
}

double Model::phi_inv(double y) const {
  check_inverse_arg(y, params_.phi_max, SaturationBound::Phi, "phi_inv");
  return params_.k_s * y / (params_.phi_max - y);
}

double Model::rho_inv(double y) const {
  check_inverse_arg(y, params_.rho_max, SaturationBound::Rho, "rho_inv");
  return params_.k_v * y / (params_.rho_max - y);
}

double Model::mu_inv(double y) const {
  check_inverse_arg(y, params_.mu_max, SaturationBound::Mu, "mu_inv");
  return params_.q_min * params_.mu_max / (params_.mu_max - y);
}

double Model::phi_prime(double s) const {
  const double den = params_.k_s + s;
  return params_.phi_max * params_.k_s / (den * den);
}

double Model::rho_prime(double v) const {
  const double den = params_.k_v + v;
  return params_.rho_max * params_.k_v / (den * den);
}

double Model::mu_prime(double q) const { return params_.mu_max * params_.q_min / (q * q); }

bool Model::in_state_space(const State& x, double slack) const noexcept {
  return x.s >= -slack && x.e >= -slack && x.v >= -slack && x.c >= -slack &&
         x.q >= params_.q_min - slack;
}

void Model::require_state(const State& x) const {
  if (!in_state_space(x)) {
    std::ostringstream os;
    os.precision(17);
    os << "state outside Omega: (s,e,v,q,c) = (" << x.s << ", " << x.e << ", " << x.v << ", "
       << x.q << ", " << x.c << "), q_min = " << params_.q_min;
    throw DomainError(os.str());
  }
}

State Model::ode_rhs_unchecked(const State& x, const Control& u) const noexcept {
  const auto& p = params_;
  const double s = std::max(x.s, 0.0);
  const double v = std::max(x.v, 0.0);
  const double q = std::max(x.q, p.q_min);
  const double phi_s = p.phi_max * s / (p.k_s + s);
  const double rho_v = p.rho_max * v / (p.k_v + v);
  const double mu_q = p.mu_max * (1.0 - p.q_min / q);
  // mu(q) q written without the 1/q factor.
  const double mu_q_times_q = p.mu_max * (q - p.q_min);

  State dx;
  dx.s = -phi_s * x.e / p.gamma + u.d * (u.s_in - x.s);
  dx.e = (1.0 - u.alpha) * phi_s * x.e - u.d * x.e;
  dx.v = u.alpha * p.beta * phi_s * x.e - rho_v * x.c - u.d * x.v;
  dx.q = rho_v - mu_q_times_q;
  dx.c = mu_q * x.c - u.d * x.c;
  return dx;
}

State Model::ode_rhs(const State& x, const Control& u) const {
  require_state(x);
  validate_dynamics_control(u);
  return ode_rhs_unchecked(x, u);
}

Jacobian Model::jacobian(const State& x, const Control& u) const {
  require_state(x);
  validate_dynamics_control(u);
  const auto& p = params_;
  const double phi_s = phi(x.s);
  const double dphi = phi_prime(x.s);
  const double drho = rho_prime(x.v);
  const double mu_q = mu(x.q);

  Jacobian J{};
  // rows: s, e, v, q, c; columns likewise
  J[0][0] = -dphi * x.e / p.gamma - u.d;
  J[0][1] = -phi_s / p.gamma;

  J[1][0] = (1.0 - u.alpha) * dphi * x.e;
  J[1][1] = (1.0 - u.alpha) * phi_s - u.d;

  J[2][0] = u.alpha * p.beta * dphi * x.e;
  J[2][1] = u.alpha * p.beta * phi_s;
  J[2][2] = -drho * x.c - u.d;
  J[2][4] = -rho(x.v);

  J[3][2] = drho;
  J[3][3] = -p.mu_max;

  J[4][3] = mu_prime(x.q) * x.c;
  J[4][4] = mu_q - u.d;
  return J;
}

} // namespace consortium
