/// Command-line front end: simulate, eig, pucci-eig, verify, fit.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stefan2d/config.hpp"
#include "stefan2d/diagnostics.hpp"
#include "stefan2d/eigenpair.hpp"
#include "stefan2d/io.hpp"
#include "stefan2d/pucci.hpp"
#include "stefan2d/stefan.hpp"
#include "stefan2d/verify.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace stefan2d;

namespace {

SimConfig load_config(const std::string& path) {
  if (path.empty()) return SimConfig{};
  return parse_config(path);
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, int stride) {
  SimConfig cfg = load_config(config_path);
  if (stride >= 0) cfg.snapshot_stride = stride;
  fs::create_directories(out_dir);

  StefanSim sim(cfg);
  CsvWriter csv(out_dir + "/diagnostics.csv");
  const long nsteps = std::lround(cfg.t_end / cfg.dt);
  auto snapshot = [&](const StefanState& st, int n) {
    if (cfg.snapshot_stride <= 0) return;
    if (n % cfg.snapshot_stride == 0 || n == nsteps)
      write_snapshot(out_dir + "/snap_" + std::to_string(n) + ".dat", st);
  };
  RunResult run = sim.run(snapshot, [&](const DiagnosticsRow& r) { csv.row(r); });
  write_summary(out_dir + "/summary.json", run);

  std::printf("%s at t=%.6f (%zu steps recorded), outputs in %s\n", run.termination.c_str(),
              run.final_state.t, run.rows.size(), out_dir.c_str());
  return run.termination == "t_end_reached" ? 0 : 3;
}

int cmd_eig(const std::string& config_path, int nr, int nth) {
  SimConfig cfg = load_config(config_path);
  if (nr > 0) cfg.nr = nr;
  if (nth > 0) cfg.nth = nth;
  GridPtr g = build_grid(StarDomain::disk(1.0, cfg.rho, cfg.sigma), cfg.nr, cfg.nth);
  EigenPair e = dirichlet_eigenpair(g);
  Field psi = barrier_psi(g);
  json j;
  j["grid"] = {{"nr", cfg.nr}, {"ntheta", cfg.nth}};
  j["lambda"] = e.lambda;
  j["iterations"] = e.iterations;
  j["residual"] = e.residual;
  j["hopf_margin"] = {{"phi1", chi(e.phi)}, {"psi", chi(psi)}};
  std::printf("%s\n", j.dump(2).c_str());
  return 0;
}

int cmd_pucci(double mu1, double mu2, double gamma, int nr, int nth) {
  PucciParams p{mu1, mu2, gamma};
  p.validate();
  SimConfig dflt;
  GridPtr g = build_grid(StarDomain::disk(1.0, dflt.rho, dflt.sigma), nr, nth);
  HalfEigenpair pos = half_eigenpair(p, g);
  NegativeHalfEigenpair neg = negative_half_eigenpair(p, g);
  json j;
  j["class"] = {{"mu1", p.mu1}, {"mu2", p.mu2}, {"gamma", p.gamma}};
  j["grid"] = {{"nr", nr}, {"ntheta", nth}};
  j["lambda1"] = {{"value", pos.lambda}, {"residual", pos.residual},
                  {"iterations", pos.iterations}};
  j["lambda2"] = {{"value", neg.lambda}, {"residual", neg.residual},
                  {"iterations", neg.iterations}};
  std::printf("%s\n", j.dump(2).c_str());
  return 0;
}

int cmd_verify(const std::string& config_path) {
  SimConfig cfg = load_config(config_path);
  std::vector<CriterionResult> results = run_acceptance(cfg);
  bool all = true;
  for (const CriterionResult& r : results) {
    all = all && r.pass;
    std::printf("%-24s %s  margin % .3e   %s\n", r.name.c_str(), r.pass ? "PASS" : "FAIL",
                r.margin, r.detail.c_str());
  }
  std::printf("%zu/%zu criteria passed\n",
              static_cast<std::size_t>(std::count_if(results.begin(), results.end(),
                                                     [](const auto& r) { return r.pass; })),
              results.size());
  return all ? 0 : 1;
}

int cmd_fit(const std::string& csv_path, const std::string& column, double t0, double t1) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("fit: cannot open '" + csv_path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("fit: empty file");
  std::vector<std::string> names;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) names.push_back(cell);
  }
  auto find = [&](const std::string& name) {
    for (std::size_t k = 0; k < names.size(); ++k)
      if (names[k] == name) return static_cast<int>(k);
    throw std::runtime_error("fit: no column '" + name + "' in " + csv_path);
  };
  int col_t = find("t"), col_y = find(column);
  std::vector<double> ts, ys;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    ts.push_back(vals.at(col_t));
    ys.push_back(vals.at(col_y));
  }
  double slope = decay_fit(ts, ys, t0, t1);
  std::size_t used = 0;
  for (double t : ts)
    if (t >= t0 && t <= t1) ++used;
  json j;
  j["column"] = column;
  j["window"] = {t0, t1};
  j["samples"] = used;
  j["slope"] = slope;
  std::printf("%s\n", j.dump(2).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D one-phase Stefan flow in a fixed-domain harmonic gauge"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", csv_path, column = "max_q";
  int stride = -1, nr = 64, nth = 64;
  double mu1 = 1.0, mu2 = 1.0, gamma = 0.0, t0 = 1.0, t1 = 2.0;

  auto* sim = app.add_subcommand("simulate", "run the coupled solver");
  sim->add_option("--config", config_path, "configuration file");
  sim->add_option("--out", out_dir, "output directory");
  sim->add_option("--snapshot-stride", stride, "steps between snapshots, 0 disables (overrides config)")
      ->check(CLI::NonNegativeNumber);

  auto* eig = app.add_subcommand("eig", "first Dirichlet eigenpair and barrier margins");
  eig->add_option("--config", config_path, "configuration file");
  eig->add_option("--nr", nr, "radial resolution");
  eig->add_option("--ntheta", nth, "angular resolution");

  auto* pucci = app.add_subcommand("pucci-eig", "extremal-class half-eigenvalues");
  pucci->add_option("--mu1", mu1, "lower ellipticity bound")->required();
  pucci->add_option("--mu2", mu2, "upper ellipticity bound")->required();
  pucci->add_option("--gamma", gamma, "drift bound");
  pucci->add_option("--nr", nr, "radial resolution");
  pucci->add_option("--ntheta", nth, "angular resolution");

  auto* verify = app.add_subcommand("verify", "acceptance battery; nonzero exit on failure");
  verify->add_option("--config", config_path, "configuration file");

  auto* fit = app.add_subcommand("fit", "decay rate of one diagnostics.csv column");
  fit->add_option("--csv", csv_path, "diagnostics.csv path")->required();
  fit->add_option("--column", column, "column name");
  fit->add_option("--t0", t0, "window start")->required();
  fit->add_option("--t1", t1, "window end")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(config_path, out_dir, stride);
    if (eig->parsed()) return cmd_eig(config_path, nr, nth);
    if (pucci->parsed()) return cmd_pucci(mu1, mu2, gamma, nr, nth);
    if (verify->parsed()) return cmd_verify(config_path);
    if (fit->parsed()) return cmd_fit(csv_path, column, t0, t1);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
