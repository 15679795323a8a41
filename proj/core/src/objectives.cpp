#include "consortium/objectives.hpp"

#include "consortium/equilibria.hpp"

#include <cmath>
#include <sstream>

namespace consortium {

namespace {

double require_admissible_threshold(const Model& model, const Control& u) {
  validate_control(u);
  const auto threshold = try_psi_alpha_inv(model, u.alpha, u.d);
  if (!threshold || !(*threshold < u.s_in)) {
    std::ostringstream os;
    os.precision(17);
    os << "control (alpha=" << u.alpha << ", d=" << u.d << ", s_in=" << u.s_in
       << ") is outside the coexistence set";
    throw NotAdmissibleError(os.str());
  }
  return *threshold;
}

} // namespace

bool in_admissible(const Model& model, const Control& u, const AdmissibleSet& set) noexcept {
  if (!(u.alpha > 0.0 && u.alpha < 1.0) || !(u.d > 0.0)) return false;
  const auto threshold = try_psi_alpha_inv(model, u.alpha, u.d);
  if (!threshold) return false;
  switch (set.mode) {
    case AdmissibleMode::U2D:
      return *threshold < set.bound;
    case AdmissibleMode::W3D:
      return u.s_in > 0.0 && *threshold < u.s_in;
    case AdmissibleMode::BBox:
      return *threshold < set.bound && u.s_in > 0.0 && u.s_in < set.bound;
  }
  return false;
}

double p_out(const Model& model, const Control& u) {
  const double threshold = require_admissible_threshold(model, u);
  const auto& p = model.params();
  return u.alpha * p.beta * p.gamma * u.d * (u.s_in - threshold) / model.mu_inv(u.d);
}

std::optional<double> p_out_extended(const Model& model, const Control& u) noexcept {
  const auto threshold = try_psi_alpha_inv(model, u.alpha, u.d);
  if (!threshold) return std::nullopt;
  const auto& p = model.params();
  const double quota = p.q_min * p.mu_max / (p.mu_max - u.d);
  return u.alpha * p.beta * p.gamma * u.d * (u.s_in - *threshold) / quota;
}

double p_in(const Control& u) {
  if (!(u.d > 0.0)) throw DomainError("p_in: d must be positive");
  if (!(u.s_in > 0.0)) throw DomainError("p_in: s_in must be positive");
  return u.d * u.s_in;
}

double p_yield(const Model& model, const Control& u) {
  const double threshold = require_admissible_threshold(model, u);
  const auto& p = model.params();
  return u.alpha * p.beta * p.gamma * (u.s_in - threshold) / (u.s_in * model.mu_inv(u.d));
}

void validate_theta(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "theta must lie in [0,1] (got " << theta << ")";
    throw DomainError(os.str());
  }
}

double p_theta(const Model& model, const Control& u, double theta) {
  validate_theta(theta);
  return theta * p_out(model, u) - (1.0 - theta) * p_in(u);
}

ObjectiveValues evaluate(const Model& model, const Control& u) {
  ObjectiveValues out;
  out.p_out = p_out(model, u);
  out.p_in = p_in(u);
  out.p_yield = p_yield(model, u);
  return out;
}

double batch_limit_yield(const Model& model, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("batch_limit_yield: alpha must lie in [0,1]");
  const auto& p = model.params();
  return alpha * p.beta * p.gamma / p.q_min;
}

double theta_from_prices(double w_in, double w_out) {
  if (!(w_in > 0.0) || !(w_out > 0.0)) throw DomainError("theta_from_prices: prices must be positive");
  return w_out / (w_in + w_out);
}

double theta0(const Model& model, double alpha, double d) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("theta0: alpha must lie in (0,1]");
  if (!(d >= 0.0)) throw DomainError("theta0: d must be nonnegative");
  const auto& p = model.params();
  return 1.0 / (1.0 + alpha * p.beta * p.gamma / model.mu_inv(d));
}

double p_theta_sin_slope(const Model& model, double alpha, double d, double theta) {
  validate_theta(theta);
  const auto& p = model.params();
  const double g2 = alpha * p.beta * p.gamma / model.mu_inv(d);
  return (theta - theta0(model, alpha, d)) * (1.0 + g2) * d;
}

} // namespace consortium
