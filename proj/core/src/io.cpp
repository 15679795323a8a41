#include "consortium/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace consortium {

using nlohmann::json;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return {buf, ptr};
}

double parse_double(const std::string& text) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double x = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, x);
  if (ec != std::errc{} || ptr != end) throw std::invalid_argument("parse_double: bad number '" + text + "'");
  return x;
}

void to_json(json& j, const ModelParams& p) {
  j = json{{"k_v", p.k_v},     {"k_s", p.k_s},     {"rho_max", p.rho_max}, {"phi_max", p.phi_max},
           {"q_min", p.q_min}, {"gamma", p.gamma}, {"mu_max", p.mu_max},   {"beta", p.beta}};
}

void from_json(const json& j, ModelParams& p) {
  j.at("k_v").get_to(p.k_v);
  j.at("k_s").get_to(p.k_s);
  j.at("rho_max").get_to(p.rho_max);
  j.at("phi_max").get_to(p.phi_max);
  j.at("q_min").get_to(p.q_min);
  j.at("gamma").get_to(p.gamma);
  j.at("mu_max").get_to(p.mu_max);
  j.at("beta").get_to(p.beta);
}

void to_json(json& j, const State& x) { j = json{{"s", x.s}, {"e", x.e}, {"v", x.v}, {"q", x.q}, {"c", x.c}}; }

void from_json(const json& j, State& x) {
  j.at("s").get_to(x.s);
  j.at("e").get_to(x.e);
  j.at("v").get_to(x.v);
  j.at("q").get_to(x.q);
  j.at("c").get_to(x.c);
}

void to_json(json& j, const Control& u) { j = json{{"alpha", u.alpha}, {"d", u.d}, {"s_in", u.s_in}}; }

void from_json(const json& j, Control& u) {
  j.at("alpha").get_to(u.alpha);
  j.at("d").get_to(u.d);
  j.at("s_in").get_to(u.s_in);
}

void to_json(json& j, const EquilibriumInfo& e) {
  json eig = json::array();
  double max_real = -std::numeric_limits<double>::infinity();
  for (const auto& l : e.eigenvalues) {
    eig.push_back({{"re", l.real()}, {"im", l.imag()}});
    max_real = std::max(max_real, l.real());
  }
  j = json{{"state", e.state},
           {"residual_inf_norm", e.residual},
           {"stability", to_string(e.stability)},
           {"max_real_eigenvalue", max_real},
           {"eigenvalues", eig}};
}

void to_json(json& j, const EquilibriumReport& r) {
  j = json{{"control", r.control},
           {"d1", r.d1},
           {"d2", r.d2},
           {"regime", to_string(r.regime)},
           {"x0", r.x0},
           {"x10", r.x10 ? json(*r.x10) : json(nullptr)},
           {"x11", r.x11 ? json(*r.x11) : json(nullptr)}};
}

void to_json(json& j, const ObjectiveValues& v) {
  j = json{{"p_out", v.p_out}, {"p_in", v.p_in}, {"p_yield", v.p_yield}};
}

void to_json(json& j, const OptimResult& r) {
  j = json{{"u_star", r.u_star},
           {"value", r.value},
           {"iterations", r.iterations},
           {"oracle_gap", r.oracle_gap ? json(*r.oracle_gap) : json(nullptr)},
           {"converged", r.converged},
           {"boundary_supremum", r.boundary_supremum}};
}

void to_json(json& j, const YieldAlphaResult& r) {
  j = json{{"alpha_star", r.alpha_star}, {"yield", r.yield}, {"alpha_lo", r.alpha_lo}, {"alpha_hi", r.alpha_hi}};
}

void to_json(json& j, const YieldArgmax& r) {
  j = json{{"alpha", r.alpha}, {"d", r.d}, {"value", r.value}, {"batch_degenerate", r.batch_degenerate}};
}

void to_json(json& j, const HessianMapCell& c) {
  j = json{{"alpha", c.alpha},     {"d", c.d},           {"in_domain", c.in_domain},
           {"h_aa", c.h_aa},       {"h_ad", c.h_ad},     {"h_dd", c.h_dd},
           {"eig_min", c.eig_min}, {"eig_max", c.eig_max}, {"classification", c.in_domain ? to_string(c.classification) : "ABSENT"}};
}

void to_json(json& j, const ParetoPoint& p) {
  j = json{{"theta", p.theta},
           {"u_star", p.u_star},
           {"p_out", p.p_out},
           {"p_in", p.p_in},
           {"p_theta", p.p_theta},
           {"s_in_choice", to_string(p.s_in_choice)},
           {"solved", p.solved},
           {"boundary_supremum", p.boundary_supremum}};
  if (!p.error.empty()) j["error"] = p.error;
}

void from_json(const json& j, ParetoPoint& p) {
  j.at("theta").get_to(p.theta);
  j.at("u_star").get_to(p.u_star);
  j.at("p_out").get_to(p.p_out);
  j.at("p_in").get_to(p.p_in);
  j.at("p_theta").get_to(p.p_theta);
  j.at("solved").get_to(p.solved);
  j.at("boundary_supremum").get_to(p.boundary_supremum);
  const auto choice = j.at("s_in_choice").get<std::string>();
  for (auto c : {FeedChoice::Zero, FeedChoice::UpperBound, FeedChoice::Fixed, FeedChoice::Indifferent}) {
    if (choice == to_string(c)) p.s_in_choice = c;
  }
  p.error = j.value("error", std::string{});
}

void to_json(json& j, const ProfileRow& r) {
  j = json{{"theta", r.theta}, {"alpha", r.alpha},   {"d", r.d},           {"s_in", r.s_in},
           {"p_out", r.p_out}, {"p_in", r.p_in},     {"p_theta", r.p_theta}, {"theta0", r.theta0},
           {"s_in_choice", to_string(r.choice)}};
}

void to_json(json& j, const DominanceViolation& v) {
  j = json{{"point_index", v.point_index},
           {"grid_control", v.grid_control},
           {"grid_p_out", v.grid_p_out},
           {"grid_p_in", v.grid_p_in}};
}

void to_json(json& j, const ConvergenceReport& r) {
  j = json{{"terminal_state", r.terminal}, {"time", r.time},
           {"event", to_string(r.event)},  {"attractor", to_string(r.attractor)},
           {"distance", r.distance},       {"conclusive", r.conclusive},
           {"outside_stability_domain", r.outside_stability_domain}};
}

// --- CSV ---------------------------------------------------------------------

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(field);
      field.clear();
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  out.push_back(field);
  return out;
}

template <class... T>
void row(std::ostream& out, const T&... fields) {
  bool first = true;
  const auto put = [&](const auto& f) {
    if (!first) out << ',';
    first = false;
    if constexpr (std::is_floating_point_v<std::decay_t<decltype(f)>>) {
      out << format_double(f);
    } else {
      out << f;
    }
  };
  (put(fields), ...);
  out << '\n';
}

} // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::out_of_range("csv: no column '" + name + "'");
}

double CsvTable::number(std::size_t r, const std::string& name) const { return parse_double(rows.at(r).at(column(name))); }

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) return table;
  table.header = split_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    table.rows.push_back(split_line(line));
  }
  return table;
}

void write_front_csv(std::ostream& out, const std::vector<ParetoPoint>& points) {
  out << "theta,alpha,d,s_in,p_out,p_in,p_theta,solved,boundary\n";
  for (const auto& p : points) {
    row(out, p.theta, p.u_star.alpha, p.u_star.d, p.u_star.s_in, p.p_out, p.p_in, p.p_theta, p.solved ? 1 : 0,
        p.boundary_supremum ? 1 : 0);
  }
}

std::vector<ParetoPoint> read_front_csv(std::istream& in) {
  const CsvTable t = read_csv(in);
  std::vector<ParetoPoint> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    ParetoPoint p;
    p.theta = t.number(r, "theta");
    p.u_star = {t.number(r, "alpha"), t.number(r, "d"), t.number(r, "s_in")};
    p.p_out = t.number(r, "p_out");
    p.p_in = t.number(r, "p_in");
    p.p_theta = t.number(r, "p_theta");
    p.solved = t.number(r, "solved") != 0.0;
    p.boundary_supremum = t.number(r, "boundary") != 0.0;
    out.push_back(p);
  }
  return out;
}

void write_profile_csv(std::ostream& out, const std::vector<ProfileRow>& rows) {
  out << "theta,alpha,d,s_in,p_out,p_in,p_theta,theta0,s_in_choice\n";
  for (const auto& r : rows) {
    row(out, r.theta, r.alpha, r.d, r.s_in, r.p_out, r.p_in, r.p_theta, r.theta0, to_string(r.choice));
  }
}

void write_reachable_csv(std::ostream& out, const ReachableCloud& cloud) {
  out << "s_in,alpha,d,p_out,p_in\n";
  for (const auto& p : cloud.points) row(out, cloud.s_in, p.u.alpha, p.u.d, p.p_out, p.p_in);
}

void write_hessian_map_csv(std::ostream& out, const std::vector<HessianMapCell>& cells) {
  out << "alpha,d,in_domain,h_aa,h_ad,h_dd,eig_min,eig_max,classification\n";
  for (const auto& c : cells) {
    row(out, c.alpha, c.d, c.in_domain ? 1 : 0, c.h_aa, c.h_ad, c.h_dd, c.eig_min, c.eig_max,
        c.in_domain ? to_string(c.classification) : "ABSENT");
  }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,s,e,v,q,c\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const auto& x = traj.states[i];
    row(out, traj.times[i], x.s, x.e, x.v, x.q, x.c);
  }
}

void write_objective_row_header(std::ostream& out) { out << "alpha,d,s_in,p_out,p_in,p_yield\n"; }

void write_objective_row(std::ostream& out, const Control& u, const ObjectiveValues& v) {
  row(out, u.alpha, u.d, u.s_in, v.p_out, v.p_in, v.p_yield);
}

} // namespace consortium
