#include "consortium/params_io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace consortium {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\f\v");
  return s.substr(first, last - first + 1);
}

double* field_for(ModelParams& p, std::string_view key) {
  if (key == "k_v") return &p.k_v;
  if (key == "k_s") return &p.k_s;
  if (key == "rho_max") return &p.rho_max;
  if (key == "phi_max") return &p.phi_max;
  if (key == "q_min") return &p.q_min;
  if (key == "gamma") return &p.gamma;
  if (key == "mu_max") return &p.mu_max;
  if (key == "beta") return &p.beta;
  return nullptr;
}

} // namespace

ModelParams parse_params(std::string_view text) {
  ModelParams params;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParamsFormatError("line " + std::to_string(line_no) + ": expected 'key = value'", line_no);
    }
    const auto key = trim(line.substr(0, eq));
    const auto value_text = trim(line.substr(eq + 1));

    double* field = field_for(params, key);
    if (field == nullptr) {
      throw ParamsFormatError("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'",
                              line_no);
    }
    if (!seen.insert(std::string(key)).second) {
      throw ParamsFormatError("line " + std::to_string(line_no) + ": duplicate key '" + std::string(key) + "'",
                              line_no);
    }
    double value = 0.0;
    const auto* end = value_text.data() + value_text.size();
    const auto [ptr, ec] = std::from_chars(value_text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
      throw ParamsFormatError("line " + std::to_string(line_no) + ": bad number '" + std::string(value_text) +
                                  "' for " + std::string(key),
                              line_no);
    }
    *field = value;
  }
  params.validate();
  return params;
}

ModelParams load_params_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open parameter file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_params(buf.str());
}

std::string format_params(const ModelParams& p) {
  const auto put = [](std::string& out, const char* key, double x) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    out.append(key).append(" = ").append(buf, end).push_back('\n');
  };
  std::string out;
  put(out, "k_v", p.k_v);
  put(out, "k_s", p.k_s);
  put(out, "rho_max", p.rho_max);
  put(out, "phi_max", p.phi_max);
  put(out, "q_min", p.q_min);
  put(out, "gamma", p.gamma);
  put(out, "mu_max", p.mu_max);
  put(out, "beta", p.beta);
  return out;
}

} // namespace consortium
