#include "stefan2d/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace stefan2d {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  const char* first = value.data();
  const char* last = first + value.size();
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last)
    throw std::invalid_argument("config: " + key + ": expected a number, got '" + value + "'");
  return out;
}

int parse_int(const std::string& key, const std::string& value) {
  const char* first = value.data();
  const char* last = first + value.size();
  int out = 0;
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last)
    throw std::invalid_argument("config: " + key + ": expected an integer, got '" + value + "'");
  return out;
}

}  // namespace

void validate_config(const SimConfig& cfg) {
  auto fail = [](const std::string& key, const std::string& what) {
    throw std::invalid_argument("config: " + key + ": " + what);
  };
  if (cfg.nr < 8) fail("grid.nr", "need at least 8 radial nodes");
  if (cfg.nth < 8 || cfg.nth % 2 != 0) fail("grid.ntheta", "need an even count of at least 8");
  if (!(cfg.dt > 0.0)) fail("time.dt", "must be positive");
  if (!(cfg.t_end >= 0.0)) fail("time.t_end", "must be nonnegative");
  if (!(cfg.a > 0.0 && cfg.a < 1.0)) fail("initial.a", "must lie in (0, 1)");
  if (!(cfg.delta >= 0.0)) fail("initial.delta", "must be nonnegative");
  if (cfg.k < 1) fail("initial.k", "must be a positive mode number");
  if (!(cfg.eta_frac > 0.0 && cfg.eta_frac < 1.0)) fail("rates.eta_frac", "must lie in (0, 1)");
  if (!(cfg.cbar > 0.0)) fail("rates.cbar", "must be positive");
  if (!(cfg.cstar > 0.0)) fail("rates.cstar", "must be positive");
  if (!(cfg.rho > 0.0 && cfg.sigma > 0.0 && cfg.rho + cfg.sigma < 1.0))
    fail("cutoff.rho", "need positive cutoff.rho, cutoff.sigma with cutoff.rho + cutoff.sigma < 1");
  if (!(cfg.rtol > 0.0 && cfg.rtol <= 1e-2)) fail("solver.rtol", "must lie in (0, 1e-2]");
  if (cfg.snapshot_stride < 0) fail("output.snapshot_stride", "must be nonnegative");
}

SimConfig parse_config_text(const std::string& text) {
  SimConfig cfg;
  const std::map<std::string, std::function<void(const std::string&, const std::string&)>>
      setters = {
          {"grid.nr", [&](const std::string& k, const std::string& v) { cfg.nr = parse_int(k, v); }},
          {"grid.ntheta",
           [&](const std::string& k, const std::string& v) { cfg.nth = parse_int(k, v); }},
          {"time.dt",
           [&](const std::string& k, const std::string& v) { cfg.dt = parse_double(k, v); }},
          {"time.t_end",
           [&](const std::string& k, const std::string& v) { cfg.t_end = parse_double(k, v); }},
          {"initial.a",
           [&](const std::string& k, const std::string& v) { cfg.a = parse_double(k, v); }},
          {"initial.delta",
           [&](const std::string& k, const std::string& v) { cfg.delta = parse_double(k, v); }},
          {"initial.k",
           [&](const std::string& k, const std::string& v) { cfg.k = parse_int(k, v); }},
          {"rates.eta_frac",
           [&](const std::string& k, const std::string& v) { cfg.eta_frac = parse_double(k, v); }},
          {"rates.cbar",
           [&](const std::string& k, const std::string& v) { cfg.cbar = parse_double(k, v); }},
          {"rates.cstar",
           [&](const std::string& k, const std::string& v) { cfg.cstar = parse_double(k, v); }},
          {"cutoff.rho",
           [&](const std::string& k, const std::string& v) { cfg.rho = parse_double(k, v); }},
          {"cutoff.sigma",
           [&](const std::string& k, const std::string& v) { cfg.sigma = parse_double(k, v); }},
          {"solver.rtol",
           [&](const std::string& k, const std::string& v) { cfg.rtol = parse_double(k, v); }},
          {"output.snapshot_stride",
           [&](const std::string& k, const std::string& v) {
             cfg.snapshot_stride = parse_int(k, v);
           }},
      };

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    auto it = setters.find(key);
    if (it == setters.end()) throw std::invalid_argument("config: unknown key '" + key + "'");
    it->second(key, value);
  }
  validate_config(cfg);
  return cfg;
}

SimConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace stefan2d
