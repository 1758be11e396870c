#include "stefan2d/io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "stefan2d/pucci.hpp"

#include <json.hpp>

namespace stefan2d {

std::string format_double(double x) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::scientific, 16);
  return std::string(buf, res.ptr);
}

const char* const kDiagnosticsHeader =
    "t,chi,E_disc,D_disc,S_proxy,conserved,max_q,h_l2,h_h45,beta_hat,qt_sign";

std::string csv_line(const DiagnosticsRow& r) {
  const double cols[] = {r.t,     r.chi,   r.E_disc, r.D_disc,   r.S_proxy, r.conserved,
                         r.max_q, r.h_l2,  r.h_h45,  r.beta_hat, r.qt_sign};
  std::string line;
  for (double c : cols) {
    if (!line.empty()) line += ',';
    line += format_double(c);
  }
  return line;
}

CsvWriter::CsvWriter(const std::string& path) : out_(path) {
  if (!out_) throw std::runtime_error("csv: cannot open '" + path + "'");
  out_ << kDiagnosticsHeader << '\n';
  out_.flush();
}

void CsvWriter::row(const DiagnosticsRow& r) {
  out_ << csv_line(r) << '\n';
  out_.flush();
}

// =====================  snapshots  =====================

namespace {

void write_block(std::ofstream& out, const char* name, const double* v, int rows, int cols) {
  out << name << '\n';
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (j) out << ' ';
      out << format_double(v[i * cols + j]);
    }
    out << '\n';
  }
}

}  // namespace

void write_snapshot(const std::string& path, const StefanState& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("snapshot: cannot open '" + path + "'");
  const GridPtr& g = s.q.grid;
  out << g->nr() << ' ' << g->nth() << ' ' << format_double(s.t) << '\n';
  write_block(out, "q", s.q.v.data(), g->nr(), g->nth());
  write_block(out, "h", s.h.v.data(), 1, g->nth());
  write_block(out, "J", s.gauge.jac.v.data(), g->nr(), g->nth());
  out.flush();
  if (!out) throw std::runtime_error("snapshot: write failed for '" + path + "'");
}

namespace {

std::vector<double> read_block(std::istream& in, const std::string& path, const std::string& name,
                               std::size_t count) {
  std::string label;
  if (!(in >> label) || label != name)
    throw std::runtime_error("snapshot: '" + path + "': expected block '" + name + "', got '" +
                             label + "'");
  std::vector<double> v(count);
  for (std::size_t n = 0; n < count; ++n)
    if (!(in >> v[n]))
      throw std::runtime_error("snapshot: '" + path + "': short block '" + name + "'");
  return v;
}

}  // namespace

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("snapshot: cannot open '" + path + "'");
  Snapshot s;
  if (!(in >> s.nr >> s.nth >> s.t))
    throw std::runtime_error("snapshot: '" + path + "': bad header");
  if (s.nr <= 0 || s.nth <= 0)
    throw std::runtime_error("snapshot: '" + path + "': bad dimensions");
  std::size_t n = static_cast<std::size_t>(s.nr) * static_cast<std::size_t>(s.nth);
  s.q = read_block(in, path, "q", n);
  s.h = read_block(in, path, "h", static_cast<std::size_t>(s.nth));
  s.jac = read_block(in, path, "J", n);
  return s;
}

// =====================  run summary  =====================

void write_summary(const std::string& path, const RunResult& run) {
  using json = nlohmann::ordered_json;
  const SimConfig& cfg = run.config;

  json j;
  j["config"] = {
      {"grid", {{"nr", cfg.nr}, {"ntheta", cfg.nth}}},
      {"time", {{"dt", cfg.dt}, {"t_end", cfg.t_end}}},
      {"initial", {{"a", cfg.a}, {"b", cfg.b()}, {"delta", cfg.delta}, {"k", cfg.k}}},
      {"rates", {{"eta_frac", cfg.eta_frac}, {"cbar", cfg.cbar}, {"cstar", cfg.cstar}}},
      {"cutoff", {{"rho", cfg.rho}, {"sigma", cfg.sigma}}},
      {"solver", {{"rtol", cfg.rtol}}},
      {"output", {{"snapshot_stride", cfg.snapshot_stride}}},
  };
  j["termination"] = run.termination;
  j["final_t"] = run.final_state.t;
  j["spectral"] = {
      {"lambda", run.lambda}, {"eta", run.eta}, {"c1", run.c1}, {"K", run.K}, {"T_K", run.T_K}};

  // Decay rates fitted on the trailing half of the recorded window; null when
  // the data does not support a log fit (too short, breakdown, sign loss).
  std::vector<double> ts, chis, maxqs;
  ts.reserve(run.rows.size() + 1);
  ts.push_back(run.row0.t);
  chis.push_back(run.row0.chi);
  maxqs.push_back(run.row0.max_q);
  for (const DiagnosticsRow& r : run.rows) {
    ts.push_back(r.t);
    chis.push_back(r.chi);
    maxqs.push_back(r.max_q);
  }
  double t_last = ts.back();
  json fits;
  fits["window"] = {0.5 * t_last, t_last};
  auto fit_or_null = [&](const std::vector<double>& y) -> json {
    try {
      return decay_fit(ts, y, 0.5 * t_last, t_last);
    } catch (const std::exception&) {
      return nullptr;
    }
  };
  fits["chi_rate"] = fit_or_null(chis);
  fits["q_rate"] = fit_or_null(maxqs);
  j["fits"] = fits;

  double drift = 0.0;
  const DiagnosticsRow& last = run.rows.empty() ? run.row0 : run.rows.back();
  for (const DiagnosticsRow& r : run.rows)
    drift = std::max(drift, std::abs(r.conserved - run.row0.conserved));
  j["conservation"] = {{"expected", run.row0.conserved},
                       {"final_value", last.conserved},
                       {"final_area", last.area},
                       {"drift_rel_max", drift / std::abs(run.row0.conserved)}};

  double max_h = 0.0;
  for (const DiagnosticsRow& r : run.rows) max_h = std::max(max_h, r.h_l2);
  j["boundary"] = {{"max_h_change", max_h},
                   {"final_h_l2", last.h_l2},
                   {"max_filter_delta", run.max_filter_delta}};
  j["coefficients"] = {{"max_a_dev", run.max_a_dev}, {"max_b_norm", run.max_b_norm}};

  json audits;
  {
    RayleighTaylorCheck rt =
        rayleigh_taylor_check(make_initial_data(cfg, run.final_state.q.grid), run.c1, cfg.cstar);
    audits["rayleigh_taylor"] = {{"pass", rt.satisfied}, {"margin", rt.margin}};
  }
  try {
    // Class wide enough to hold every coefficient matrix the run produced.
    double w = run.max_a_dev;
    PucciParams cls{1.0 - w, 1.0 + w, run.max_b_norm};
    cls.validate();
    HalfEigenpair ep = half_eigenpair(cls, run.final_state.q.grid);
    ChiBoundAudit audit = chi_bound_audit(ts, chis, ep.lambda, run.c1, run.eta, 0.1);
    audits["chi_lower_bound"] = {{"pass", audit.pass},
                                 {"c", audit.c},
                                 {"floor", audit.floor},
                                 {"t_min", audit.t_min},
                                 {"lambda1", ep.lambda},
                                 {"class_width", w}};
  } catch (const std::exception& e) {
    audits["chi_lower_bound"] = {{"pass", false}, {"error", e.what()}};
  }
  j["audits"] = audits;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("summary: cannot open '" + path + "'");
  out << j.dump(2) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("summary: write failed for '" + path + "'");
}

}  // namespace stefan2d
