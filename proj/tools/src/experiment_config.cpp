#include "hoexp/experiment_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace hoexp {

namespace {

// Shortest text that reads back to the same double.
std::string format_double(double v) {
  char buf[64];
  const auto end = std::to_chars(buf, buf + sizeof buf, v).ptr;
  return {buf, end};
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects a number, got '" + text + "'");
  }
}

std::uint64_t parse_count(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    if (!text.empty() && text.front() == '-') throw std::invalid_argument(text);
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects a non-negative integer, got '" + text + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "yes" || text == "1" || text == "on") return true;
  if (text == "false" || text == "no" || text == "0" || text == "off") return false;
  throw ConfigError("'" + key + "' expects true or false, got '" + text + "'");
}

struct Field {
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<nlohmann::json(const ExperimentConfig&)> get;
};

using FieldTable = std::map<std::string, std::map<std::string, Field>>;

#define HOEXP_DOUBLE(section, key, member)                                                                 \
  table[section][key] = Field{[](ExperimentConfig& c, const std::string& v) { c.member = parse_double(key, v); }, \
                              [](const ExperimentConfig& c) { return nlohmann::json(c.member); }}
#define HOEXP_COUNT(section, key, member)                                                                  \
  table[section][key] = Field{                                                                             \
      [](ExperimentConfig& c, const std::string& v) { c.member = parse_count(key, v); },                   \
      [](const ExperimentConfig& c) { return nlohmann::json(c.member); }}

const FieldTable& fields() {
  static const FieldTable table = [] {
    FieldTable table;
    HOEXP_DOUBLE("model", "mass", mass);
    HOEXP_DOUBLE("model", "spring", spring);
    HOEXP_DOUBLE("model", "hbar", hbar);

    HOEXP_DOUBLE("schedule", "rate", rate);
    HOEXP_DOUBLE("schedule", "end", ramp_end);
    table["schedule"]["variant"] = Field{
        [](ExperimentConfig& c, const std::string& v) {
          try {
            c.variant = parse_ramp_variant(v);
          } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
          }
        },
        [](const ExperimentConfig& c) { return nlohmann::json(to_string(c.variant)); }};
    table["schedule"]["ramp_down_plateau"] =
        Field{[](ExperimentConfig& c, const std::string& v) { c.ramp_down_plateau = parse_bool("ramp_down_plateau", v); },
              [](const ExperimentConfig& c) { return nlohmann::json(c.ramp_down_plateau); }};

    table["solver"]["kind"] =
        Field{[](ExperimentConfig& c, const std::string& v) { c.solver = parse_solver_kind(v); },
              [](const ExperimentConfig& c) { return nlohmann::json(to_string(c.solver)); }};
    HOEXP_COUNT("solver", "basis_size", basis_size);
    table["solver"]["layout"] = Field{
        [](ExperimentConfig& c, const std::string& v) {
          if (v == "even") {
            c.layout = IndexLayout::EvenOnly;
          } else if (v == "full") {
            c.layout = IndexLayout::Full;
          } else {
            throw ConfigError("'layout' expects even or full, got '" + v + "'");
          }
        },
        [](const ExperimentConfig& c) { return nlohmann::json(to_string(c.layout)); }};
    HOEXP_DOUBLE("solver", "step", step);
    HOEXP_DOUBLE("solver", "end_time", end_time);
    HOEXP_DOUBLE("solver", "abort_norm", abort_norm);
    HOEXP_DOUBLE("solver", "grid_half_width", grid_half_width);
    HOEXP_COUNT("solver", "grid_points", grid_points);
    HOEXP_DOUBLE("solver", "grid_step", grid_step);
    HOEXP_DOUBLE("solver", "gaussian_step", gaussian_step);

    HOEXP_COUNT("output", "cadence", cadence);
    HOEXP_DOUBLE("output", "breakdown_threshold", breakdown_threshold);
    HOEXP_DOUBLE("output", "population_interval", population_interval);
    HOEXP_COUNT("output", "population_max_index", population_max_index);
    table["output"]["path"] =
        Field{[](ExperimentConfig& c, const std::string& v) { c.output_path = v; },
              [](const ExperimentConfig& c) { return nlohmann::json(c.output_path.string()); }};
    table["output"]["populations_path"] =
        Field{[](ExperimentConfig& c, const std::string& v) { c.populations_path = v; },
              [](const ExperimentConfig& c) { return nlohmann::json(c.populations_path.string()); }};
    return table;
  }();
  return table;
}

#undef HOEXP_DOUBLE
#undef HOEXP_COUNT

bool whole_multiple(double span, double step) {
  const double count = std::round(span / step);
  return std::abs(count * step - span) <= 1e-9 * std::max(1.0, std::abs(span));
}

}  // namespace

std::string_view to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::Growing:
      return "growing";
    case SolverKind::Fixed:
      return "fixed";
    case SolverKind::Grid:
      return "grid";
    case SolverKind::Gaussian:
      return "gaussian";
  }
  return "unknown";
}

SolverKind parse_solver_kind(std::string_view text) {
  if (text == "growing") return SolverKind::Growing;
  if (text == "fixed") return SolverKind::Fixed;
  if (text == "grid") return SolverKind::Grid;
  if (text == "gaussian") return SolverKind::Gaussian;
  throw ConfigError("unknown solver '" + std::string(text) + "' (growing, fixed, grid, gaussian)");
}

BasisPolicy ExperimentConfig::policy() const {
  return solver == SolverKind::Fixed ? BasisPolicy::fixed(basis_size) : BasisPolicy::growing();
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(std::isfinite(mass) && mass > 0.0, "model.mass must be positive");
  require(std::isfinite(spring) && spring > 0.0, "model.spring must be positive");
  require(std::isfinite(hbar) && hbar > 0.0, "model.hbar must be positive");
  require(std::isfinite(rate), "schedule.rate must be finite");
  require(std::isfinite(ramp_end) && ramp_end > 0.0, "schedule.end must be positive");
  require(basis_size > 0, "solver.basis_size must be positive");
  require(std::isfinite(step) && step > 0.0, "solver.step must be positive");
  require(std::isfinite(end_time) && end_time >= 0.0, "solver.end_time must be non-negative");
  require(whole_multiple(end_time, step), "solver.end_time must be a whole number of steps");
  require(abort_norm > 0.0, "solver.abort_norm must be positive");
  require(std::isfinite(grid_half_width) && grid_half_width > 0.0, "solver.grid_half_width must be positive");
  require(grid_points >= 16, "solver.grid_points must be at least 16");
  require(std::isfinite(grid_step) && grid_step > 0.0, "solver.grid_step must be positive");
  require(std::isfinite(gaussian_step) && gaussian_step > 0.0, "solver.gaussian_step must be positive");
  require(cadence > 0, "output.cadence must be positive");
  require(breakdown_threshold > 0.0, "output.breakdown_threshold must be positive");
  require(population_interval >= 0.0, "output.population_interval must be non-negative");
  require(!output_path.empty(), "output.path must not be empty");
  if (solver == SolverKind::Grid) {
    require(whole_multiple(record_interval(), grid_step), "cadence * step must be a multiple of grid_step");
    require(population_interval == 0.0 || whole_multiple(population_interval, grid_step),
            "population_interval must be a multiple of grid_step");
    require(whole_multiple(end_time, grid_step), "end_time must be a multiple of grid_step");
  } else if (solver != SolverKind::Gaussian) {
    require(population_interval == 0.0 || whole_multiple(population_interval, step),
            "population_interval must be a multiple of step");
  }
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  for (const auto& [section, keys] : fields()) {
    for (const auto& [key, field] : keys) j[section][key] = field.get(*this);
  }
  return j;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig1", "fig2", "ramp-down", "oracle-check", "series-growth"};
  return names;
}

void apply_preset(ExperimentConfig& config, std::string_view name) {
  ExperimentConfig c;
  if (name == "fig1") {
    c.output_path = "fig1.csv";
  } else if (name == "fig2") {
    c.output_path = "fig2.csv";
  } else if (name == "ramp-down") {
    c.variant = RampVariant::RampDown;
    c.solver = SolverKind::Grid;
    c.end_time = 1.0;
    c.output_path = "ramp_down.csv";
  } else if (name == "oracle-check") {
    c.solver = SolverKind::Fixed;
    c.end_time = 1.0;
    c.output_path = "oracle_check.csv";
  } else if (name == "series-growth") {
    c.output_path = "series_growth.csv";
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  config = c;
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
  boost::property_tree::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  const auto& table = fields();
  for (const auto& [section, node] : tree) {
    const auto sec = table.find(section);
    if (node.empty() || sec == table.end()) {
      throw ConfigError("unknown config section or key outside a section: '" + section + "'");
    }
    for (const auto& [key, value] : node) {
      const auto field = sec->second.find(key);
      if (field == sec->second.end()) throw ConfigError("unknown config key '" + section + "." + key + "'");
      field->second.set(base, value.get_value<std::string>());
    }
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), std::move(base));
}

std::string to_config_text(const ExperimentConfig& config) {
  std::ostringstream out;
  for (const auto& [section, keys] : fields()) {
    out << '[' << section << "]\n";
    for (const auto& [key, field] : keys) {
      const nlohmann::json v = field.get(config);
      out << key << " = ";
      if (v.is_string()) {
        out << v.get<std::string>();
      } else if (v.is_number_float()) {
        out << format_double(v.get<double>());
      } else {
        out << v.dump();
      }
      out << '\n';
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace hoexp
