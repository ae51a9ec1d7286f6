#pragma once

// Flat key=value run configuration. Blank lines and '#' comments are ignored.
//
//   theta, omega, msq, lambda     GW couplings
//   dim, trunc                    algebra (D = 2 or 4, truncation N)
//   grid.extent, grid.points      FFT grid half-width L and points M per axis
//   cell.k, cell.l                solution cell; flat index, or "k1,k2" when D = 4
//   random_fields                 number of random fields per randomized check
//   lambda_grid.extent            half-width of the periodic λ grid
//   lambda_grid.points            λ nodes K (even, ≥ 64)
//   h                             mollifier width for the Hamiltonian suites
//   hs                            comma-separated widths for the mollifier scan
//   toy.mass, toy.coupling, toy.delay, periods
//   seed, out, suite

#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "moyal/error.hpp"
#include "moyal/gw_model.hpp"
#include "moyal/grid.hpp"

namespace moyal {

struct RunConfig {
  double theta = 2.0;
  double omega = 1.0;
  double msq = 0.0;
  double lambda = 1.0;
  int dim = 2;
  int trunc = 8;
  double grid_extent = 10.0;
  int grid_points = 128;
  std::vector<int> cell_k{0}, cell_l{0};
  int random_fields = 20;
  double lambda_extent = 2.0 * std::numbers::pi;
  int lambda_points = 256;
  double h = 0.2;
  std::vector<double> hs{0.2, 0.1, 0.05, 0.025};
  double toy_mass = 1.0;
  double toy_coupling = 0.0;
  double toy_delay = 0.5;
  int periods = 10;
  std::uint64_t seed = 1;
  std::string out = "out";
  std::string suite;

  GWParams gw() const {
    GWParams p;
    p.theta = theta;
    p.omega = omega;
    p.msq = msq;
    p.lambda = lambda;
    p.spec = AlgebraSpec{theta, dim, trunc};
    return p;
  }
  GridSpec grid() const { return GridSpec{dim, grid_extent, grid_points}; }

  int flat(const std::vector<int>& idx, const char* key) const {
    if (static_cast<int>(idx.size()) == 1) return idx[0];
    if (dim == 4 && idx.size() == 2) return idx[0] * trunc + idx[1];
    throw ConfigError(key, std::string(key) + ": expected one index, or two when dim = 4");
  }
  int cell_k_flat() const { return flat(cell_k, "cell.k"); }
  int cell_l_flat() const { return flat(cell_l, "cell.l"); }

  nlohmann::ordered_json echo() const {
    return {{"theta", theta},
            {"omega", omega},
            {"msq", msq},
            {"lambda", lambda},
            {"dim", dim},
            {"trunc", trunc},
            {"grid.extent", grid_extent},
            {"grid.points", grid_points},
            {"cell.k", cell_k},
            {"cell.l", cell_l},
            {"random_fields", random_fields},
            {"lambda_grid.extent", lambda_extent},
            {"lambda_grid.points", lambda_points},
            {"h", h},
            {"hs", hs},
            {"toy.mass", toy_mass},
            {"toy.coupling", toy_coupling},
            {"toy.delay", toy_delay},
            {"periods", periods},
            {"seed", seed},
            {"suite", suite}};
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || errno == ERANGE) throw ConfigError(key, key + ": not a number: '" + v + "'");
  return x;
}

inline long long parse_integer(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0' || errno == ERANGE) throw ConfigError(key, key + ": not an integer: '" + v + "'");
  return x;
}

inline int parse_int(const std::string& key, const std::string& v) {
  const long long x = parse_integer(key, v);
  if (x < -(1LL << 31) || x >= (1LL << 31)) throw ConfigError(key, key + ": out of range");
  return static_cast<int>(x);
}

inline std::vector<std::string> split(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

}  // namespace detail

inline void apply_setting(RunConfig& c, const std::string& key, const std::string& v) {
  using namespace detail;
  auto ints = [&] {
    std::vector<int> out;
    for (const auto& s : split(v)) out.push_back(parse_int(key, s));
    if (out.empty() || out.size() > 2) throw ConfigError(key, key + ": expected one or two indices");
    for (int i : out)
      if (i < 0) throw ConfigError(key, key + ": indices must be non-negative");
    return out;
  };
  if (key == "theta") c.theta = parse_double(key, v);
  else if (key == "omega") c.omega = parse_double(key, v);
  else if (key == "msq") c.msq = parse_double(key, v);
  else if (key == "lambda") c.lambda = parse_double(key, v);
  else if (key == "dim") c.dim = parse_int(key, v);
  else if (key == "trunc") c.trunc = parse_int(key, v);
  else if (key == "grid.extent") c.grid_extent = parse_double(key, v);
  else if (key == "grid.points") c.grid_points = parse_int(key, v);
  else if (key == "cell.k") c.cell_k = ints();
  else if (key == "cell.l") c.cell_l = ints();
  else if (key == "random_fields") c.random_fields = parse_int(key, v);
  else if (key == "lambda_grid.extent") c.lambda_extent = parse_double(key, v);
  else if (key == "lambda_grid.points") c.lambda_points = parse_int(key, v);
  else if (key == "h") c.h = parse_double(key, v);
  else if (key == "hs") {
    c.hs.clear();
    for (const auto& s : split(v)) c.hs.push_back(parse_double(key, s));
    if (c.hs.empty()) throw ConfigError(key, "hs: empty list");
  } else if (key == "toy.mass") c.toy_mass = parse_double(key, v);
  else if (key == "toy.coupling") c.toy_coupling = parse_double(key, v);
  else if (key == "toy.delay") c.toy_delay = parse_double(key, v);
  else if (key == "periods") c.periods = parse_int(key, v);
  else if (key == "seed") {
    const long long s = parse_integer(key, v);
    if (s < 0) throw ConfigError(key, "seed: must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  } else if (key == "out") c.out = v;
  else if (key == "suite") c.suite = v;
  else throw ConfigError(key, "unknown config key '" + key + "'");
}

inline RunConfig parse_config(std::istream& is, RunConfig c = {}) {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      const std::string key = line.substr(0, line.find_first_of(" \t"));
      throw ConfigError(key, "line " + std::to_string(lineno) + ": missing '=' after '" + key + "'");
    }
    apply_setting(c, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("--config", "cannot open config file '" + path + "'");
  return parse_config(is);
}

}  // namespace moyal
