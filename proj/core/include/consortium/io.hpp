#pragma once

/**
 * @file
 * JSON and CSV forms of the library's result types. Numbers are written as
 * the shortest decimal that round-trips to the same double (at most 17
 * significant digits), so reading an output back reproduces it exactly.
 */

#include "consortium/equilibria.hpp"
#include "consortium/model.hpp"
#include "consortium/objectives.hpp"
#include "consortium/optimizer.hpp"
#include "consortium/pareto.hpp"
#include "consortium/sim.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace consortium {

/// Shortest round-trip decimal; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double x);
/// Inverse of format_double. Throws std::invalid_argument on bad input.
double parse_double(const std::string& text);

void to_json(nlohmann::json& j, const ModelParams& p);
void from_json(const nlohmann::json& j, ModelParams& p);
void to_json(nlohmann::json& j, const State& x);
void from_json(const nlohmann::json& j, State& x);
void to_json(nlohmann::json& j, const Control& u);
void from_json(const nlohmann::json& j, Control& u);
void to_json(nlohmann::json& j, const EquilibriumInfo& e);
void to_json(nlohmann::json& j, const EquilibriumReport& r);
void to_json(nlohmann::json& j, const ObjectiveValues& v);
void to_json(nlohmann::json& j, const OptimResult& r);
void to_json(nlohmann::json& j, const YieldAlphaResult& r);
void to_json(nlohmann::json& j, const YieldArgmax& r);
void to_json(nlohmann::json& j, const HessianMapCell& c);
void to_json(nlohmann::json& j, const ParetoPoint& p);
void from_json(const nlohmann::json& j, ParetoPoint& p);
void to_json(nlohmann::json& j, const ProfileRow& r);
void to_json(nlohmann::json& j, const DominanceViolation& v);
void to_json(nlohmann::json& j, const ConvergenceReport& r);

/// Parsed CSV: header names and rows of raw fields.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

CsvTable read_csv(std::istream& in);

/// Columns: theta, alpha, d, s_in, p_out, p_in, p_theta, solved, boundary.
void write_front_csv(std::ostream& out, const std::vector<ParetoPoint>& points);
std::vector<ParetoPoint> read_front_csv(std::istream& in);

/// Columns: theta, alpha, d, s_in, p_out, p_in, p_theta, theta0, s_in_choice.
void write_profile_csv(std::ostream& out, const std::vector<ProfileRow>& rows);
/// Columns: s_in, alpha, d, p_out, p_in.
void write_reachable_csv(std::ostream& out, const ReachableCloud& cloud);
/// Columns: alpha, d, in_domain, h_aa, h_ad, h_dd, eig_min, eig_max, classification.
void write_hessian_map_csv(std::ostream& out, const std::vector<HessianMapCell>& cells);
/// Columns: t, s, e, v, q, c.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
/// Columns: alpha, d, s_in, p_out, p_in, p_yield.
void write_objective_row_header(std::ostream& out);
void write_objective_row(std::ostream& out, const Control& u, const ObjectiveValues& v);

} // namespace consortium
