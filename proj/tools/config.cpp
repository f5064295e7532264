#include "config.hpp"

#include <toml.hpp>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "crossflow/error.hpp"
#include "crossflow/presets.hpp"

namespace crossflow::app {

namespace {

ConfigError invalid(const std::string& what) { return ConfigError("config_invalid", what); }

double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw invalid(key + ": not a number: '" + text + "'");
  }
  if (used != text.size()) throw invalid(key + ": not a number: '" + text + "'");
  return v;
}

long long parse_int(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    throw invalid(key + ": not an integer: '" + text + "'");
  }
  if (used != text.size()) throw invalid(key + ": not an integer: '" + text + "'");
  return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
  return out;
}

// Every key is described once: how to read it from TOML and from a string.
struct Field {
  const char* key;
  std::function<void(RunConfig&, const toml::node&)> from_toml;
  std::function<void(RunConfig&, const std::string&)> from_text;
};

double toml_double(const char* key, const toml::node& n) {
  if (auto v = n.value<double>()) return *v;
  throw invalid(std::string(key) + ": expected a number");
}

long long toml_int(const char* key, const toml::node& n) {
  if (auto v = n.value_exact<int64_t>()) return *v;
  throw invalid(std::string(key) + ": expected an integer");
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> t;
    auto add_double = [&](const char* key, double RunConfig::*member) {
      t.push_back({key, [=](RunConfig& c, const toml::node& n) { c.*member = toml_double(key, n); },
                   [=](RunConfig& c, const std::string& s) { c.*member = parse_double(key, s); }});
    };
    auto add_int = [&](const char* key, int RunConfig::*member) {
      t.push_back({key,
                   [=](RunConfig& c, const toml::node& n) { c.*member = static_cast<int>(toml_int(key, n)); },
                   [=](RunConfig& c, const std::string& s) { c.*member = static_cast<int>(parse_int(key, s)); }});
    };
    add_double("domain_length", &RunConfig::domain_length);
    add_int("n_cells", &RunConfig::n_cells);
    add_double("tau", &RunConfig::tau);
    add_int("n_steps", &RunConfig::n_steps);
    add_double("eps_reg", &RunConfig::eps_reg);
    add_double("prox_newton_tol", &RunConfig::prox_newton_tol);
    add_double("scaling_tol", &RunConfig::scaling_tol);
    add_int("max_scaling_iter", &RunConfig::max_scaling_iter);
    add_double("mass_floor_scale", &RunConfig::mass_floor_scale);
    t.push_back({"preset",
                 [](RunConfig& c, const toml::node& n) {
                   auto v = n.value<std::string>();
                   if (!v) throw invalid("preset: expected a string");
                   c.preset = *v;
                 },
                 [](RunConfig& c, const std::string& s) { c.preset = s; }});
    t.push_back({"output_dir",
                 [](RunConfig& c, const toml::node& n) {
                   auto v = n.value<std::string>();
                   if (!v) throw invalid("output_dir: expected a string");
                   c.output_dir = *v;
                 },
                 [](RunConfig& c, const std::string& s) { c.output_dir = s; }});
    t.push_back({"seed",
                 [](RunConfig& c, const toml::node& n) {
                   const long long v = toml_int("seed", n);
                   if (v < 0) throw invalid("seed must be nonnegative");
                   c.seed = static_cast<std::uint64_t>(v);
                 },
                 [](RunConfig& c, const std::string& s) {
                   const long long v = parse_int("seed", s);
                   if (v < 0) throw invalid("seed must be nonnegative");
                   c.seed = static_cast<std::uint64_t>(v);
                 }});
    t.push_back({"dg_nodes",
                 [](RunConfig& c, const toml::node& n) {
                   const toml::array* arr = n.as_array();
                   if (!arr) throw invalid("dg_nodes: expected an array of numbers");
                   c.dg_nodes.clear();
                   for (const toml::node& item : *arr) c.dg_nodes.push_back(toml_double("dg_nodes", item));
                 },
                 [](RunConfig& c, const std::string& s) { c.dg_nodes = parse_list("dg_nodes", s); }});
    return t;
  }();
  return table;
}

std::string env_name(const char* key) {
  std::string name = kEnvPrefix;
  for (const char* p = key; *p; ++p) name += static_cast<char>(std::toupper(static_cast<unsigned char>(*p)));
  return name;
}

RunConfig from_table(const toml::table& tbl, const EnvLookup& env) {
  RunConfig cfg;
  for (const auto& [key, node] : tbl) {
    const auto& table = fields();
    auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return key.str() == f.key; });
    if (it == table.end()) throw invalid("unknown key '" + std::string(key.str()) + "'");
    it->from_toml(cfg, node);
  }
  for (const Field& f : fields()) {
    if (auto value = env(env_name(f.key))) f.from_text(cfg, *value);
  }
  validate(cfg);
  return cfg;
}

}  // namespace

JkoConfig RunConfig::jko() const {
  JkoConfig c;
  c.tau = tau;
  c.eps_reg = eps_reg;
  c.prox_newton_tol = prox_newton_tol;
  c.scaling_tol = scaling_tol;
  c.max_scaling_iter = max_scaling_iter;
  c.mass_floor_scale = mass_floor_scale;
  return c;
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
}

void validate(const RunConfig& cfg) {
  if (!(cfg.domain_length > 0.0)) throw invalid("domain_length must be positive");
  if (cfg.n_cells < 2) throw invalid("n_cells must be at least 2");
  if (cfg.n_steps < 1) throw invalid("n_steps must be at least 1");
  const auto& names = preset_names();
  if (std::find(names.begin(), names.end(), cfg.preset) == names.end()) {
    throw invalid("unknown preset '" + cfg.preset + "'");
  }
  if (cfg.dg_nodes.empty()) throw invalid("dg_nodes must not be empty");
  for (double s : cfg.dg_nodes) {
    if (!(s > 0.0 && s <= 1.0)) throw invalid("dg_nodes must lie in (0, 1]");
  }
  if (cfg.output_dir.empty()) throw invalid("output_dir must not be empty");
  try {
    validate(cfg.jko());
  } catch (const DomainError& e) {
    throw invalid(e.what());
  }
}

RunConfig parse_config(const std::string& text, const EnvLookup& env) {
  toml::table tbl;
  try {
    tbl = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << e.description() << " at line " << e.source().begin.line;
    throw ConfigError("config_parse_error", msg.str());
  }
  return from_table(tbl, env);
}

RunConfig load_config(const std::string& path, const EnvLookup& env) {
  if (!std::filesystem::is_regular_file(path)) {
    throw ConfigError("config_not_found", "config file not found: " + path);
  }
  toml::table tbl;
  try {
    tbl = toml::parse_file(path);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << e.description() << " at line " << e.source().begin.line;
    throw ConfigError("config_parse_error", msg.str());
  }
  return from_table(tbl, env);
}

}  // namespace crossflow::app
