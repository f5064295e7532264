#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "config.hpp"

namespace crossflow::app {

/// Shortest round-trip decimal form of `v`; "nan", "inf" and "-inf" otherwise.
std::string format_double(double v);

/// {"error": {"code": ..., "message": ...}}
nlohmann::ordered_json error_json(const std::string& code, const std::string& message);

/// Runs the configured trajectory and writes into cfg.output_dir:
///   snapshots/step_NNNNNN.csv  x,rho,mu,S
///   timeseries.csv             k,t,F,G,slope,w2sq_rho,w2sq_mu
///   edi_ledger.json
///   metadata.json
/// Returns 0 on success, 2 when the initial data cannot be built and 3 when
/// a solve fails; in the last two cases error.json is written and the error
/// JSON goes to `err`.
int run_simulation(const RunConfig& cfg, std::ostream& err);

}  // namespace crossflow::app
