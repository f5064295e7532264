#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "crossflow/kernels.hpp"

namespace crossflow::app {

enum class Bound { at_most, at_least };

/// One checked property: `value` compared against `limit`.
struct Property {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  Bound bound = Bound::at_most;

  bool passed() const;
  /// Signed distance to the limit; negative when the property fails.
  double margin() const;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<Property> properties;
  std::optional<KernelCertification> kernel;

  bool passed() const;
  /// Name of the first failing property, if any.
  std::optional<std::string> first_failure() const;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"envelope", "transport", "jko", "slope", "kernel", "all"};
  return names;
}

std::vector<Property> envelope_battery(std::uint64_t seed);
std::vector<Property> transport_battery(std::uint64_t seed);
std::vector<Property> jko_battery(std::uint64_t seed);
std::vector<Property> slope_battery(std::uint64_t seed);
std::vector<Property> kernel_battery(std::uint64_t seed, int threads, KernelCertification* cert);

/// Runs one suite or all of them.  Property names carry the suite as a
/// prefix.  Throws ConfigError (config_invalid) for an unknown suite.
SuiteReport certify(const std::string& suite, std::uint64_t seed, int threads);

/// Serialized report; identical inputs give identical bytes regardless of
/// the thread count.
nlohmann::ordered_json to_json(const SuiteReport& report);
nlohmann::ordered_json to_json(const KernelCertification& cert);

}  // namespace crossflow::app
