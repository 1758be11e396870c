/// Front-end plumbing: dotted-key config parsing with named rejections,
/// byte-identical reruns of the diagnostics CSV, snapshot roundtrips, and the
/// summary echo of derived quantities.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "stefan2d/config.hpp"
#include "stefan2d/io.hpp"
#include "stefan2d/stefan.hpp"

using namespace stefan2d;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  fs::path p = fs::temp_directory_path() / "stefan2d_io_tests";
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

SimConfig tiny_config() {
  SimConfig cfg;
  cfg.nr = 24;
  cfg.nth = 32;
  cfg.t_end = 0.01;
  return cfg;
}

}  // namespace

TEST_CASE("config text fills in what it names and defaults the rest") {
  SimConfig cfg = parse_config_text(
      "# comment\n"
      "grid.nr = 48\n"
      "time.dt = 5e-4\n"
      "\n"
      "initial.a = 0.2\n");
  CHECK(cfg.nr == 48);
  CHECK(cfg.dt == 5e-4);
  CHECK(cfg.a == 0.2);
  CHECK(cfg.nth == 64);
  CHECK(cfg.t_end == 2.0);
  CHECK(cfg.b() == doctest::Approx(0.5 * 0.2 * 0.8).epsilon(1e-15));

  SimConfig dflt = parse_config_text("");
  CHECK(dflt.nr == 64);
  CHECK(dflt.snapshot_stride == 200);
}

TEST_CASE("config rejections name the offending key") {
  auto message = [](const char* text) {
    try {
      (void)parse_config_text(text);
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string("no throw");
  };
  CHECK(message("time.dt = -1e-3\n").find("time.dt") != std::string::npos);
  CHECK(message("grid.ntheta = 31\n").find("grid.ntheta") != std::string::npos);
  CHECK(message("bogus.key = 1\n").find("bogus.key") != std::string::npos);
  CHECK(message("time.dt = fast\n").find("expected a number") != std::string::npos);
  CHECK(message("just some words\n").find("key = value") != std::string::npos);
  CHECK(message("initial.a = 1.5\n").find("initial.a") != std::string::npos);
  CHECK(message("cutoff.rho = 0.9\n").find("cutoff.rho") != std::string::npos);
  CHECK_THROWS_AS((void)parse_config("/nonexistent/stefan2d.cfg"), std::runtime_error);
}

TEST_CASE("rerunning a configuration reproduces the CSV byte for byte") {
  SimConfig cfg = tiny_config();
  fs::path dir = scratch();
  for (const char* name : {"first.csv", "second.csv"}) {
    CsvWriter csv((dir / name).string());
    StefanSim sim(cfg);
    sim.run({}, [&](const DiagnosticsRow& r) { csv.row(r); });
  }
  std::string a = slurp(dir / "first.csv");
  std::string b = slurp(dir / "second.csv");
  CHECK(a == b);
  CHECK(a.substr(0, a.find('\n')) == std::string(kDiagnosticsHeader));
  // one header plus the initial row plus ten steps
  CHECK(std::count(a.begin(), a.end(), '\n') == 12);
}

TEST_CASE("snapshots roundtrip bitwise") {
  SimConfig cfg = tiny_config();
  StefanSim sim(cfg);
  RunResult r = sim.run();
  fs::path p = scratch() / "state.dat";
  write_snapshot(p.string(), r.final_state);
  Snapshot s = read_snapshot(p.string());
  CHECK(s.nr == cfg.nr);
  CHECK(s.nth == cfg.nth);
  CHECK(s.t == r.final_state.t);
  REQUIRE(s.q.size() == r.final_state.q.v.size());
  for (size_t k = 0; k < s.q.size(); ++k) CHECK(s.q[k] == r.final_state.q.v[k]);
  for (int j = 0; j < cfg.nth; ++j) CHECK(s.h[j] == r.final_state.h[j]);
  for (size_t k = 0; k < s.jac.size(); ++k) CHECK(s.jac[k] == r.final_state.gauge.jac.v[k]);

  CHECK_THROWS_AS((void)read_snapshot((scratch() / "missing.dat").string()), std::runtime_error);
  fs::path bad = scratch() / "bad.dat";
  std::ofstream(bad) << "24 32 not_a_time\n";
  CHECK_THROWS_AS((void)read_snapshot(bad.string()), std::runtime_error);
}

TEST_CASE("summary echoes the configuration and the audits") {
  SimConfig cfg = tiny_config();
  StefanSim sim(cfg);
  RunResult r = sim.run();
  fs::path p = scratch() / "summary.json";
  write_summary(p.string(), r);
  nlohmann::json j = nlohmann::json::parse(slurp(p));
  CHECK(j["config"]["grid"]["nr"] == 24);
  CHECK(j["config"]["initial"]["b"].get<double>() == doctest::Approx(0.045).epsilon(1e-15));
  CHECK(j["termination"] == "t_end_reached");
  CHECK(j["spectral"]["lambda"].get<double>() == doctest::Approx(5.7832).epsilon(1e-3));
  CHECK(j["conservation"]["expected"].get<double>() ==
        doctest::Approx(r.row0.conserved).epsilon(1e-15));
  CHECK(j["audits"]["rayleigh_taylor"]["pass"].get<bool>());
  CHECK(j["audits"]["chi_lower_bound"].contains("pass"));
}

TEST_CASE("summary survives a truncated run and echoes the breakdown") {
  SimConfig cfg = tiny_config();
  StefanSim sim(cfg);
  RunResult r = sim.run();
  r.termination = "gauge_breakdown: gauge map degenerate: min J = -2.6";
  r.rows.resize(1);  // partial diagnostics, too short for any rate fit
  fs::path p = scratch() / "broken_summary.json";
  write_summary(p.string(), r);
  nlohmann::json j = nlohmann::json::parse(slurp(p));
  CHECK(j["termination"].get<std::string>().find("gauge_breakdown") == 0);
  CHECK(j["fits"]["q_rate"].is_null());
  CHECK(j["conservation"]["expected"].get<double>() > 0.0);
}

TEST_CASE("round-trip formatting preserves every bit") {
  for (double x : {0.1, -3.337129761e-17, 5.783185962949163, 1.0 / 3.0, 0.0}) {
    CHECK(std::stod(format_double(x)) == x);
  }
}
