#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <type_traits>

#include "affsphere/cli.hpp"

namespace affsphere::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x))
    throw UsageError("config key '" + key + "': not a finite number: '" + v + "'");
  return x;
}

template <class T>
T parse_value(const std::string& key, const std::string& v) {
  if constexpr (std::is_floating_point_v<T>) {
    return to_double(key, v);
  } else {
    T x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) throw UsageError("config key '" + key + "': not an integer: '" + v + "'");
    return x;
  }
}

template <class T>
std::string show(T v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct Key {
  std::function<void(CliConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const CliConfig&)> get;
};

template <class T, class Ref>
Key key(Ref ref) {
  return {[ref](CliConfig& c, const std::string& k, const std::string& v) { ref(c) = parse_value<T>(k, v); },
          [ref](const CliConfig& c) {
            CliConfig copy = c;
            return show(ref(copy));
          }};
}

const std::map<std::string, Key>& keys() {
  using C = CliConfig;
  static const std::map<std::string, Key> table = {
      {"alpha_rel_tol", key<double>([](C& c) -> double& { return c.alpha_rel_tol; })},
      {"cell_tol", key<double>([](C& c) -> double& { return c.cell_tol; })},
      {"rk_rtol", key<double>([](C& c) -> double& { return c.rk_rtol; })},
      {"rk_atol", key<double>([](C& c) -> double& { return c.rk_atol; })},
      {"tol_ma", key<double>([](C& c) -> double& { return c.verify.ma_closed; })},
      {"tol_ma_fd", key<double>([](C& c) -> double& { return c.verify.ma_fd; })},
      {"tol_homogeneity", key<double>([](C& c) -> double& { return c.verify.homogeneity; })},
      {"tol_automorphism", key<double>([](C& c) -> double& { return c.verify.automorphism; })},
      {"tol_level_set", key<double>([](C& c) -> double& { return c.verify.level_set; })},
      {"tol_oracle", key<double>([](C& c) -> double& { return c.verify.oracle; })},
      {"tol_first_integral", key<double>([](C& c) -> double& { return c.verify.first_integral; })},
      {"grid_param", key<int>([](C& c) -> int& { return c.grid_param; })},
      {"grid_mu", key<int>([](C& c) -> int& { return c.grid_mu; })},
      {"samples", key<int>([](C& c) -> int& { return c.samples; })},
      {"seed", key<std::uint64_t>([](C& c) -> std::uint64_t& { return c.seed; })},
      {"precision", key<int>([](C& c) -> int& { return c.precision; })},
      {"table_nodes", key<int>([](C& c) -> int& { return c.table_nodes; })},
  };
  return table;
}

}  // namespace

void set_config_key(CliConfig& cfg, const std::string& key, const std::string& value) {
  const auto it = keys().find(key);
  if (it == keys().end()) throw UsageError("unknown config key '" + key + "'");
  it->second.set(cfg, key, value);
}

void apply_assignment(CliConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw UsageError("expected key=value, got '" + assignment + "'");
  set_config_key(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void apply_config_text(CliConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      apply_assignment(cfg, line);
    } catch (const UsageError& e) {
      throw UsageError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void validate(const CliConfig& c) {
  const std::pair<const char*, double> tols[] = {
      {"alpha_rel_tol", c.alpha_rel_tol},       {"cell_tol", c.cell_tol},
      {"rk_rtol", c.rk_rtol},                   {"rk_atol", c.rk_atol},
      {"tol_ma", c.verify.ma_closed},           {"tol_ma_fd", c.verify.ma_fd},
      {"tol_homogeneity", c.verify.homogeneity}, {"tol_automorphism", c.verify.automorphism},
      {"tol_level_set", c.verify.level_set},    {"tol_oracle", c.verify.oracle},
      {"tol_first_integral", c.verify.first_integral},
  };
  for (const auto& [name, v] : tols)
    if (!(v > 0)) throw UsageError(std::string(name) + " must be positive");
  if (c.precision < 6 || c.precision > 17) throw UsageError("precision must lie in [6, 17]");
  if (c.grid_param < 2 || c.grid_mu < 2) throw UsageError("grid sizes must be at least 2");
  if (c.samples < 1) throw UsageError("samples must be at least 1");
  if (c.table_nodes < 16) throw UsageError("table_nodes must be at least 16");
}

std::string dump_config(const CliConfig& cfg) {
  std::string out;
  for (const auto& [name, key] : keys()) out += name + "=" + key.get(cfg) + "\n";
  return out;
}

}  // namespace affsphere::cli
