#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "certify.hpp"
#include "config.hpp"
#include "crossflow/envelope.hpp"
#include "crossflow/error.hpp"
#include "run.hpp"

using namespace crossflow;
using namespace crossflow::app;

namespace {

constexpr int kOk = 0;
constexpr int kPropertyFailure = 1;
constexpr int kUsage = 2;
constexpr int kSolverFailure = 3;

int report_error(const Error& e, int code) {
  std::cerr << error_json(e.code(), e.what()).dump() << "\n";
  return code;
}

int cmd_run(const std::string& path) {
  RunConfig cfg;
  try {
    cfg = load_config(path);
  } catch (const ConfigError& e) {
    return report_error(e, kUsage);
  }
  try {
    return run_simulation(cfg, std::cerr);
  } catch (const Error& e) {
    return report_error(e, kSolverFailure);
  }
}

int cmd_certify(const std::string& suite, std::uint64_t seed, const std::string& out, int threads) {
  SuiteReport report;
  try {
    report = certify(suite, seed, threads);
  } catch (const ConfigError& e) {
    return report_error(e, kUsage);
  } catch (const Error& e) {
    return report_error(e, kSolverFailure);
  }
  const std::string text = to_json(report).dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    const std::filesystem::path p(out);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) return report_error(Error("io_error", "cannot write " + out), kUsage);
    f << text;
  }
  for (const Property& prop : report.properties) {
    std::cerr << (prop.passed() ? "PASS " : "FAIL ") << prop.name << " value=" << format_double(prop.value)
              << " limit=" << format_double(prop.limit) << "\n";
  }
  if (auto first = report.first_failure()) {
    std::cerr << "first failure: " << *first << "\n";
    return kPropertyFailure;
  }
  return kOk;
}

int cmd_envelope_table(double s_min, double s_max, int points) {
  if (!(s_min >= 2.0 && s_max >= s_min && points >= 2)) {
    return report_error(ConfigError("usage_error", "need 2 <= s-min <= s-max and points >= 2"), kUsage);
  }
  const EnvelopeOracle o;
  std::cout << "s,half_gap,alpha,beta,pi,pi_prime,tilde_f,tilde_f_prime,tilde_f_second,scaled_curvature\n";
  for (int k = 0; k < points; ++k) {
    const double s = s_min + (s_max - s_min) * k / (points - 1);
    const Minimizers m = o.alpha_beta(s);
    const double fs = o.tilde_f_second(s);
    std::cout << format_double(s) << "," << format_double(m.half_gap) << "," << format_double(m.alpha) << ","
              << format_double(m.beta) << "," << format_double(o.pi_value(s)) << ","
              << format_double(o.pi_prime(s)) << "," << format_double(o.tilde_f(s)) << ","
              << format_double(o.tilde_f_prime(s)) << "," << format_double(fs) << "," << format_double(s * fs)
              << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-diffusion gradient flow solver and certification tool"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run a JKO trajectory from a TOML config");
  run->add_option("--config", config_path, "TOML configuration file")->required();

  std::string suite = "all", out;
  std::uint64_t seed = 7;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  auto* cert = app.add_subcommand("certify", "Run a property battery and write a JSON report");
  cert->add_option("--suite", suite, "envelope, transport, jko, slope, kernel or all")
      ->check(CLI::IsMember(suite_names()));
  cert->add_option("--seed", seed, "Seed for randomized properties");
  cert->add_option("--out", out, "Report path (stdout when omitted)");
  cert->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  double s_min = 2.0, s_max = 20.0;
  int points = 100;
  auto* table = app.add_subcommand("envelope-table", "Print envelope diagonal quantities as CSV");
  table->add_option("--s-min", s_min, "Smallest s (>= 2)");
  table->add_option("--s-max", s_max, "Largest s");
  table->add_option("--points", points, "Number of rows");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kUsage;
  }

  if (*run) return cmd_run(config_path);
  if (*cert) return cmd_certify(suite, seed, out, threads);
  return cmd_envelope_table(s_min, s_max, points);
}
