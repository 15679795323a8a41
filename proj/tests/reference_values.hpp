#pragma once

// Reference values for the default parameter set, computed independently with
// 40-digit arithmetic (mpmath) and a separate SciPy Nelder-Mead run.

namespace consortium::ref {

inline constexpr double phi_at_1 = 5.944954128440367;
inline constexpr double mu_inv_half = 5.413846153846154;
inline constexpr double rho_bound = 0.9246493465094039;
inline constexpr double psi_inv_half_half = 0.02882237836765514;

// Algal washout at (alpha, d, s_in) = (0.5, 0.5, 1).
inline constexpr double x10_s = 0.01642335766423358;
inline constexpr double x10_e = 0.2163868613138686;
inline constexpr double x10_v = 4.976897810218978;
inline constexpr double x10_q = 26.77436093732160;

// Coexistence at (0.5, 0.5, 1).
inline constexpr double x11_v = 0.06273904475931313;
inline constexpr double x11_q = 5.413846153846154;
inline constexpr double x11_c = 0.9077019600877472;

inline constexpr double p_out_ref = 0.4538509800438736;
inline constexpr double p_yield_ref = 0.9077019600877472;
inline constexpr double p_theta_half = -0.02307450997806321;
inline constexpr double theta0_half_half = 0.5168918918918919;
inline constexpr double batch_yield = 3.666666666666667;

inline constexpr double d1_half_1 = 0.9146640094548365;

struct D1Row {
  double alpha, s_in, d1;
};
inline constexpr D1Row d1_table[] = {
    {0.3, 0.5, 0.89190}, {0.3, 1.0, 0.90834}, {0.3, 2.0, 0.91651}, {0.5, 0.5, 0.90418},
    {0.5, 2.0, 0.91972}, {0.8, 0.5, 0.90428}, {0.8, 1.0, 0.91694}, {0.8, 2.0, 0.92124},
};

// Maximizers of P_out over U(s_in): s_in, alpha*, d*, P_out*.
struct POutOptimum {
  double s_in, alpha, d, value;
};
inline constexpr POutOptimum p_out_optima[] = {
    {0.5, 0.82523871, 0.44046957, 0.3308513194466154},
    {1.0, 0.85258686, 0.45734351, 0.7187045998846732},
    {2.0, 0.87290212, 0.46782782, 1.5202269890899744},
};

// max over U(s_in) of P_theta: s_in, theta, value.
struct PThetaOptimum {
  double s_in, theta, value;
};
inline constexpr PThetaOptimum p_theta_optima[] = {
    {0.5, 0.9, 0.27624866924269387}, {0.5, 0.7, 0.17124306480495355}, {0.5, 0.5, 0.07664812585679383},
    {0.5, 0.3, 0.00874687828731159}, {1.0, 0.9, 0.6020649728591226},  {1.0, 0.7, 0.37685434753197},
    {1.0, 0.5, 0.17196811365605186}, {1.0, 0.3, 0.020996330046069295}, {2.0, 0.9, 1.2764933290799287},
    {2.0, 0.7, 0.8046029620865796}, {2.0, 0.5, 0.3723729504829544},  {2.0, 0.3, 0.04784112060457926},
};

} // namespace consortium::ref
