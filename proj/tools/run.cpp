#include "run.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "crossflow/envelope.hpp"
#include "crossflow/error.hpp"
#include "crossflow/jko.hpp"
#include "crossflow/presets.hpp"
#include "crossflow/slope_edi.hpp"

#ifndef CROSSFLOW_VERSION
#define CROSSFLOW_VERSION "0.0.0"
#endif

namespace crossflow::app {

namespace fs = std::filesystem;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

nlohmann::ordered_json error_json(const std::string& code, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = {{"code", code}, {"message", message}};
  return j;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io_error", "cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

int fail(const fs::path& dir, std::ostream& err, int code, const nlohmann::ordered_json& j) {
  err << j.dump() << "\n";
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!ec) write_json(dir / "error.json", j);
  return code;
}

void write_snapshot(const fs::path& path, const DensityPair& p) {
  std::string text = "x,rho,mu,S\n";
  const Grid1D& g = p.grid();
  for (int i = 0; i < g.n_cells; ++i) {
    const double a = p.rho.values[i], b = p.mu.values[i];
    text += format_double(g.center(i)) + "," + format_double(a) + "," + format_double(b) + "," +
            format_double(a + b) + "\n";
  }
  write_text(path, text);
}

std::string snapshot_name(int k) {
  std::string digits = std::to_string(k);
  return "step_" + std::string(digits.size() < 6 ? 6 - digits.size() : 0, '0') + digits + ".csv";
}

nlohmann::ordered_json config_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["domain_length"] = cfg.domain_length;
  j["n_cells"] = cfg.n_cells;
  j["tau"] = cfg.tau;
  j["n_steps"] = cfg.n_steps;
  j["eps_reg"] = cfg.eps_reg;
  j["preset"] = cfg.preset;
  j["dg_nodes"] = cfg.dg_nodes;
  j["output_dir"] = cfg.output_dir;
  j["seed"] = cfg.seed;
  return j;
}

nlohmann::ordered_json ledger_json(const EdiLedger& l) {
  nlohmann::ordered_json j;
  j["f_initial"] = l.f_initial;
  j["f_final"] = l.f_final;
  j["kinetic_rho"] = l.kinetic_rho;
  j["kinetic_mu"] = l.kinetic_mu;
  j["slope_integral"] = l.slope_integral;
  j["residual"] = l.residual;
  nlohmann::ordered_json steps = nlohmann::ordered_json::array();
  for (const EdiStep& s : l.per_step) {
    steps.push_back({{"k", s.k},
                     {"f_before", s.f_before},
                     {"f_after", s.f_after},
                     {"w2sq_rho", s.w2sq_rho},
                     {"w2sq_mu", s.w2sq_mu},
                     {"slope_quad", s.slope_quad},
                     {"flow_interchange_lhs", s.flow_interchange_lhs},
                     {"flow_interchange_rhs", s.flow_interchange_rhs}});
  }
  j["per_step"] = steps;
  return j;
}

}  // namespace

int run_simulation(const RunConfig& cfg, std::ostream& err) {
  const fs::path dir(cfg.output_dir);
  const EnvelopeOracle oracle;
  const JkoConfig jcfg = cfg.jko();

  DensityPair init;
  try {
    init = make_preset(cfg.preset, make_grid(cfg.n_cells, cfg.domain_length));
  } catch (const Error& e) {
    return fail(dir, err, 2, error_json(e.code(), e.what()));
  }

  const Trajectory traj = run_trajectory(init, jcfg, oracle, cfg.n_steps, cfg.dg_nodes);

  fs::create_directories(dir / "snapshots");
  const double floor = jcfg.mass_floor(init.grid());
  const int cadence = std::max(1, cfg.n_steps / 50);
  const int last = traj.n_steps();

  std::string series = "k,t,F,G,slope,w2sq_rho,w2sq_mu\n";
  for (int k = 0; k <= last; ++k) {
    const DensityPair& p = traj.iterate(k);
    if (k % cadence == 0 || k == last) write_snapshot(dir / "snapshots" / snapshot_name(k), p);
    const double w_rho = k == 0 ? 0.0 : traj.steps[k - 1].w2sq_rho;
    const double w_mu = k == 0 ? 0.0 : traj.steps[k - 1].w2sq_mu;
    series += std::to_string(k) + "," + format_double(k * cfg.tau) + "," + format_double(energy_f(p, oracle)) + "," +
              format_double(energy_g(p)) + "," + format_double(slope_f(p, oracle, floor).total()) + "," +
              format_double(w_rho) + "," + format_double(w_mu) + "\n";
  }
  write_text(dir / "timeseries.csv", series);

  if (last > 0) write_json(dir / "edi_ledger.json", ledger_json(edi_report(traj, oracle, floor)));

  nlohmann::ordered_json meta;
  meta["version"] = CROSSFLOW_VERSION;
  meta["config"] = config_json(cfg);
  meta["tolerances"] = {{"prox_newton_tol", cfg.prox_newton_tol},
                        {"scaling_tol", cfg.scaling_tol},
                        {"max_scaling_iter", cfg.max_scaling_iter},
                        {"mass_floor_scale", cfg.mass_floor_scale}};
  meta["quadrature"] = "right_endpoint";
  meta["r0"] = oracle.r0();
  meta["steps_completed"] = last;
  nlohmann::ordered_json iters = nlohmann::ordered_json::array();
  long long rebuilds = 0, fallbacks = 0;
  for (const StepResult& s : traj.steps) {
    iters.push_back(s.scaling_iterations);
    rebuilds += s.kernel_rebuilds;
    fallbacks += s.prox_fallbacks;
  }
  meta["scaling_iterations"] = iters;
  meta["kernel_rebuilds"] = rebuilds;
  meta["prox_fallbacks"] = fallbacks;
  write_json(dir / "metadata.json", meta);

  if (traj.failure) {
    auto j = error_json(traj.failure->code, traj.failure->message);
    j["error"]["step"] = traj.failure->step;
    return fail(dir, err, 3, j);
  }
  return 0;
}

}  // namespace crossflow::app
