#pragma once

/**
 * @file
 * Steady-state performance criteria evaluated at the coexistence equilibrium.
 *
 *   P_out   = d c*                         productivity
 *   P_in    = d s_in                       nutrient feed
 *   P_yield = P_out / P_in = c* / s_in     bioreactor yield
 *   P_theta = theta P_out - (1 - theta) P_in   weighted net profit
 */

#include "consortium/model.hpp"

#include <optional>
#include <stdexcept>

namespace consortium {

/// Control outside the admissible set of the requested criterion.
class NotAdmissibleError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

struct ObjectiveValues {
  double p_out = 0.0;
  double p_in = 0.0;
  double p_yield = 0.0;

  double p_theta(double theta) const { return theta * p_out - (1.0 - theta) * p_in; }
};

enum class AdmissibleMode {
  U2D,  ///< (alpha, d) at the fixed feed `bound`
  W3D,  ///< (alpha, d, s_in) with s_in taken from the control
  BBox, ///< (alpha, d) in U(bound) and s_in in (0, bound)
};

struct AdmissibleSet {
  AdmissibleMode mode = AdmissibleMode::W3D;
  double bound = 0.0; ///< s_in for U2D, z for BBox, unused for W3D

  static AdmissibleSet fixed_feed(double s_in) { return {AdmissibleMode::U2D, s_in}; }
  static AdmissibleSet free_feed() { return {AdmissibleMode::W3D, 0.0}; }
  static AdmissibleSet box(double z) { return {AdmissibleMode::BBox, z}; }
};

bool in_admissible(const Model& model, const Control& u, const AdmissibleSet& set) noexcept;

/// Membership in W: psi_alpha_inv(alpha, d) < s_in (with psi's own domain).
inline bool in_admissible(const Model& model, const Control& u) noexcept {
  return in_admissible(model, u, AdmissibleSet::free_feed());
}

/// Closed form alpha beta gamma d (s_in - psi_alpha_inv(d)) / mu_inv(d).
/// Throws NotAdmissibleError outside W.
double p_out(const Model& model, const Control& u);
double p_in(const Control& u);
double p_yield(const Model& model, const Control& u);
/// Throws DomainError for theta outside [0, 1].
double p_theta(const Model& model, const Control& u, double theta);

/// p_out without the admissibility requirement: the affine-in-s_in formula,
/// negative below the coexistence threshold. Empty where psi_alpha_inv is
/// undefined.
std::optional<double> p_out_extended(const Model& model, const Control& u) noexcept;

ObjectiveValues evaluate(const Model& model, const Control& u);

/// Yield in the batch limit d -> 0: alpha beta gamma / q_min, alpha in [0, 1].
double batch_limit_yield(const Model& model, double alpha);

/// theta = w_out / (w_in + w_out) for positive prices per gram of glucose
/// (w_in) and of algal biomass (w_out).
double theta_from_prices(double w_in, double w_out);

/// Critical weight at which dP_theta/ds_in changes sign:
/// 1 / (1 + alpha beta gamma / mu_inv(d)).
double theta0(const Model& model, double alpha, double d);

/// dP_theta/ds_in = (theta - theta0)(1 + alpha beta gamma / mu_inv(d)) d.
double p_theta_sin_slope(const Model& model, double alpha, double d, double theta);

void validate_theta(double theta);

} // namespace consortium
