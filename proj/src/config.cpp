#include "timeless/config.hpp"

#include "timeless/io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace timeless {

namespace {

enum class ParamType { Real, PositiveReal, PositiveInteger, PositiveList, DimensionList, Boundary };

struct Schema {
  std::string name;
  std::string summary;
  bool clock = false;
  bool finite_clock = false;
  bool schedule = false;
  bool disjoint_windows = false;
  bool grid = false;
  std::map<std::string, ParamType> parameters;
  std::map<std::string, double> tolerances;
};

const std::vector<Schema>& schemas() {
  using P = ParamType;
  static const std::vector<Schema> table = {
      {"kernel-fig1", "overlap and step kernels f, F on a grid for several E", false, false, false, false, true,
       {{"energies", P::PositiveList}},
       {{"F0", 1e-8}, {"symmetry", 1e-8}}},
      {"first-order-fig2", "first-order weight |int k(t1 - tau) F(t - t1)| against t", false, false, true, false,
       true,
       {{"energies", P::PositiveList}, {"spacing", P::PositiveReal}},
       {{"closed_form", 1e-4}}},
      {"heatmap-fig3", "F(t - t1) F(t1 - t2) over the (t1, t2) plane", true, false, false, false, true,
       {{"t", P::Real}},
       {{"acausal_weight", 1e-3}}},
      {"ideal-equivalence", "two projective events: purified vs twirled vs Born", true, true, false, false, false,
       {{"tau1", P::Real}, {"tau2", P::Real}, {"t_read", P::Real}},
       {{"equivalence", 1e-6}}},
      {"nonunitarity-scan", "Born-series trajectories and their norm loss for several E", false, false, true, false,
       false,
       {{"energies", P::PositiveList}, {"max_order", P::PositiveInteger}, {"spacing", P::PositiveReal}},
       {{"born", 1e-8}, {"nonunitarity", 1e-3}}},
      {"acausal-scan", "second-order causal and acausal weights for several E", false, false, true, true, false,
       {{"energies", P::PositiveList}, {"t", P::Real}, {"spacing", P::PositiveReal}},
       {}},
      {"discrete-unitarity", "random step unitaries and a lattice-sampled purified run", true, false, false, false,
       false,
       {{"steps", P::PositiveInteger}, {"dims", P::DimensionList}, {"boundary", P::Boundary}},
       {{"norm", 1e-12}, {"residual", 1e-12}, {"lattice", 1e-8}}},
      {"translation-check", "purified probability against the twirled quotient, ideal and finite clock", true, true,
       false, false, false,
       {{"t", P::Real}, {"coupling_strength", P::PositiveReal}, {"max_order", P::PositiveInteger}},
       {{"ideal", 1e-6}, {"finite", 1e-3}}},
      {"kuchar-demo", "double conditioning at orthogonal clock times against the Born rule", true, true, false,
       false, false,
       {{"tau", P::Real}, {"tau_prime", P::Real}},
       {{"naive", 1e-12}}},
      {"acceptance-suite", "every acceptance criterion, one CSV", false, false, false, false, false, {}, {}},
  };
  return table;
}

const Schema* find_schema(const std::string& name) {
  for (const auto& s : schemas()) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const std::set<std::string> kTopLevelKeys = {"experiment", "description", "clock",     "schedule", "grid",
                                             "tolerances", "output_dir",  "parameters", "seed"};

bool positive_finite(const Json& j) { return j.is_number() && std::isfinite(j.get<double>()) && j.get<double>() > 0.0; }
bool finite_number(const Json& j) { return j.is_number() && std::isfinite(j.get<double>()); }
bool positive_integer(const Json& j) { return j.is_number_integer() && j.get<long long>() > 0; }

class Collector {
 public:
  void add(std::string path, std::string reason) { out_.push_back({std::move(path), std::move(reason)}); }
  std::vector<Diagnostic> take() { return std::move(out_); }
  bool empty() const { return out_.empty(); }

 private:
  std::vector<Diagnostic> out_;
};

void check_clock(const Json& j, const Schema& schema, Collector& diag) {
  if (!j.is_object()) {
    diag.add("clock", "must be an object");
    return;
  }
  for (const auto& [key, value] : j.items()) {
    if (key != "kind" && key != "E" && key != "d") diag.add("clock." + key, "unknown key");
  }
  std::optional<ClockKind> kind;
  if (j.contains("kind")) {
    if (!j["kind"].is_string()) {
      diag.add("clock.kind", "must be a string");
    } else {
      try {
        kind = clock_kind_from_string(j["kind"].get<std::string>());
      } catch (const std::invalid_argument& e) {
        diag.add("clock.kind", e.what());
      }
    }
  }
  if (!j.contains("E")) {
    diag.add("clock.E", "required");
  } else if (!positive_finite(j["E"])) {
    diag.add("clock.E", "must be a positive finite number");
  }
  const bool finite = kind ? *kind != ClockKind::ContinuumBounded : true;
  if (schema.finite_clock && kind == ClockKind::ContinuumBounded) {
    diag.add("clock.kind", "experiment '" + schema.name + "' needs a finite clock (periodic or discrete)");
  }
  if (j.contains("d")) {
    if (!j["d"].is_number_integer() || j["d"].get<long long>() < 2) {
      diag.add("clock.d", "must be an integer >= 2");
    } else if (!finite) {
      diag.add("clock.d", "continuum clock has no dimension");
    }
  } else if (schema.finite_clock) {
    diag.add("clock.d", "required for a finite clock");
  }
}

void check_grid(const Json& j, Collector& diag) {
  if (!j.is_object()) {
    diag.add("grid", "must be an object");
    return;
  }
  for (const auto& [key, value] : j.items()) {
    if (key != "t_min" && key != "t_max" && key != "n") diag.add("grid." + key, "unknown key");
  }
  for (const char* key : {"t_min", "t_max"}) {
    if (!j.contains(key)) {
      diag.add(std::string("grid.") + key, "required");
    } else if (!finite_number(j[key])) {
      diag.add(std::string("grid.") + key, "must be a finite number");
    }
  }
  if (!j.contains("n")) {
    diag.add("grid.n", "required");
  } else if (!j["n"].is_number_integer() || j["n"].get<long long>() < 2) {
    diag.add("grid.n", "must be an integer >= 2");
  }
  if (finite_number(j.value("t_min", Json())) && finite_number(j.value("t_max", Json())) &&
      !(j["t_max"].get<double>() > j["t_min"].get<double>())) {
    diag.add("grid.t_max", "must exceed grid.t_min");
  }
}

void check_schedule(const Json& j, const Schema& schema, Collector& diag) {
  try {
    const InteractionSchedule schedule = io::schedule_from_json(j);
    if (schedule.terms().empty()) diag.add("schedule.terms", "needs at least one term");
    if (schema.name == "nonunitarity-scan" && schedule.has_free_hamiltonian()) {
      diag.add("schedule.free_hamiltonian", "the Born-series solver needs a vanishing free Hamiltonian");
    }
    if (schema.disjoint_windows) {
      if (schedule.terms().size() != 2) {
        diag.add("schedule.terms", "experiment '" + schema.name + "' needs exactly two terms");
      } else {
        const auto& w1 = schedule.terms()[0].window;
        const auto& w2 = schedule.terms()[1].window;
        if (w1.kind() == WindowKind::Delta || w2.kind() == WindowKind::Delta) {
          diag.add("schedule.terms", "delta windows have no finite second-order quadrature");
        } else if (w1.kind() != w2.kind() || w1.a() != w2.a() || w1.b() != w2.b() || w1.scale() != w2.scale()) {
          diag.add("schedule.terms", "both terms must share one window shape");
        }
        if (!schedule.windows_disjoint()) diag.add("schedule.terms", "windows overlap; this experiment needs disjoint windows");
        if (!(schedule.terms()[0].center < schedule.terms()[1].center)) {
          diag.add("schedule.terms", "terms must be listed in time order");
        }
      }
    }
  } catch (const std::exception& e) {
    diag.add("schedule", e.what());
  }
}

void check_parameters(const Json& j, const Schema& schema, Collector& diag) {
  if (!j.is_object()) {
    diag.add("parameters", "must be an object");
    return;
  }
  for (const auto& [key, value] : j.items()) {
    const std::string path = "parameters." + key;
    const auto it = schema.parameters.find(key);
    if (it == schema.parameters.end()) {
      diag.add(path, "unknown parameter for experiment '" + schema.name + "'");
      continue;
    }
    switch (it->second) {
      case ParamType::Real:
        if (!finite_number(value)) diag.add(path, "must be a finite number");
        break;
      case ParamType::PositiveReal:
        if (!positive_finite(value)) diag.add(path, "must be a positive finite number");
        break;
      case ParamType::PositiveInteger:
        if (!positive_integer(value)) diag.add(path, "must be a positive integer");
        break;
      case ParamType::PositiveList:
        if (!value.is_array() || value.empty()) {
          diag.add(path, "must be a non-empty array");
        } else {
          for (std::size_t i = 0; i < value.size(); ++i) {
            if (!positive_finite(value[i])) diag.add(path + "[" + std::to_string(i) + "]", "must be positive");
          }
        }
        break;
      case ParamType::DimensionList:
        if (!value.is_array() || value.empty()) {
          diag.add(path, "must be a non-empty array");
        } else {
          for (std::size_t i = 0; i < value.size(); ++i) {
            if (!positive_integer(value[i])) diag.add(path + "[" + std::to_string(i) + "]", "must be a positive integer");
          }
        }
        break;
      case ParamType::Boundary:
        if (!value.is_string() || (value != "open" && value != "periodic")) {
          diag.add(path, "must be \"open\" or \"periodic\"");
        }
        break;
    }
  }
}

void check_tolerances(const Json& j, const Schema& schema, Collector& diag) {
  if (!j.is_object()) {
    diag.add("tolerances", "must be an object");
    return;
  }
  for (const auto& [key, value] : j.items()) {
    const std::string path = "tolerances." + key;
    if (!schema.tolerances.contains(key)) {
      diag.add(path, "unknown tolerance for experiment '" + schema.name + "'");
    } else if (!positive_finite(value)) {
      diag.add(path, "must be a positive finite number");
    }
  }
}

std::string valid_names() {
  std::string out;
  for (const auto& s : schemas()) out += (out.empty() ? "" : ", ") + s.name;
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<Diagnostic> diagnostics)
    : std::invalid_argument([&] {
        std::ostringstream msg;
        msg << "invalid configuration";
        for (const auto& d : diagnostics) msg << "\n  " << d.path << ": " << d.reason;
        return msg.str();
      }()),
      diagnostics_(std::move(diagnostics)) {}

double ExperimentConfig::tolerance(const std::string& name) const {
  const auto it = tolerances.find(name);
  if (it == tolerances.end()) throw std::out_of_range("no tolerance '" + name + "'");
  return it->second;
}

double ExperimentConfig::parameter(const std::string& name, double fallback) const {
  return parameters.contains(name) ? parameters[name].get<double>() : fallback;
}

std::vector<double> ExperimentConfig::parameter_list(const std::string& name, std::vector<double> fallback) const {
  return parameters.contains(name) ? parameters[name].get<std::vector<double>>() : fallback;
}

const std::vector<ExperimentInfo>& experiment_catalog() {
  static const std::vector<ExperimentInfo> catalog = [] {
    std::vector<ExperimentInfo> out;
    for (const auto& s : schemas()) out.push_back({s.name, s.summary});
    return out;
  }();
  return catalog;
}

std::vector<std::string> experiment_names() {
  std::vector<std::string> out;
  for (const auto& s : schemas()) out.push_back(s.name);
  return out;
}

std::vector<Diagnostic> validate_config_json(const Json& document) {
  Collector diag;
  if (!document.is_object()) {
    diag.add("", "configuration must be a JSON object");
    return diag.take();
  }
  for (const auto& [key, value] : document.items()) {
    if (!kTopLevelKeys.contains(key)) diag.add(key, "unknown key");
  }

  const Schema* schema = nullptr;
  if (!document.contains("experiment")) {
    diag.add("experiment", "required; one of " + valid_names());
  } else if (!document["experiment"].is_string()) {
    diag.add("experiment", "must be a string");
  } else {
    schema = find_schema(document["experiment"].get<std::string>());
    if (!schema) {
      diag.add("experiment", "unknown experiment '" + document["experiment"].get<std::string>() + "'; valid names: " +
                                 valid_names());
    }
  }

  if (document.contains("description") && !document["description"].is_string()) {
    diag.add("description", "must be a string");
  }
  if (document.contains("output_dir") && (!document["output_dir"].is_string() || document["output_dir"] == "")) {
    diag.add("output_dir", "must be a non-empty string");
  }
  if (document.contains("seed") && !(document["seed"].is_number_integer() && document["seed"].get<long long>() >= 0)) {
    diag.add("seed", "must be a non-negative integer");
  }
  if (!schema) return diag.take();

  const auto section = [&](const char* key, bool accepted, auto&& check) {
    if (!document.contains(key)) return;
    if (!accepted) {
      diag.add(key, std::string("not used by experiment '") + schema->name + "'");
      return;
    }
    check(document[key]);
  };
  section("clock", schema->clock, [&](const Json& j) { check_clock(j, *schema, diag); });
  section("grid", schema->grid, [&](const Json& j) { check_grid(j, diag); });
  section("schedule", schema->schedule, [&](const Json& j) { check_schedule(j, *schema, diag); });
  if (document.contains("parameters")) check_parameters(document["parameters"], *schema, diag);
  if (document.contains("tolerances")) check_tolerances(document["tolerances"], *schema, diag);
  return diag.take();
}

std::vector<Diagnostic> validate_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return {{"", "cannot read '" + path.string() + "'"}};
  Json document;
  try {
    document = Json::parse(in);
  } catch (const Json::parse_error& e) {
    return {{"", std::string("malformed JSON: ") + e.what()}};
  }
  return validate_config_json(document);
}

ExperimentConfig parse_config(const Json& document) {
  if (auto diagnostics = validate_config_json(document); !diagnostics.empty()) throw ConfigError(std::move(diagnostics));
  const Schema& schema = *find_schema(document["experiment"].get<std::string>());

  ExperimentConfig config;
  config.experiment = schema.name;
  config.source = document;
  config.seed = document.value("seed", std::uint64_t{20240611});
  config.output_dir = document.value("output_dir", "out/" + schema.name);
  config.parameters = document.value("parameters", Json::object());
  config.tolerances = schema.tolerances;
  const Json overrides = document.value("tolerances", Json::object());
  for (const auto& [key, value] : overrides.items()) {
    config.tolerances[key] = value.get<double>();
  }
  if (document.contains("clock")) {
    const Json& c = document["clock"];
    ClockSpec spec;
    spec.kind = clock_kind_from_string(c.value("kind", "periodic"));
    spec.energy = c["E"].get<double>();
    spec.dimension = c.value("d", 0);
    config.clock = spec;
  }
  if (document.contains("grid")) {
    const Json& g = document["grid"];
    config.grid = GridSpec{g["t_min"].get<double>(), g["t_max"].get<double>(), g["n"].get<std::size_t>()};
  }
  if (document.contains("schedule")) config.schedule = document["schedule"];
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({{"", "cannot read '" + path.string() + "'"}});
  Json document;
  try {
    document = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError({{"", std::string("malformed JSON: ") + e.what()}});
  }
  return parse_config(document);
}

std::filesystem::path resolve_output_dir(const ExperimentConfig& config) {
  if (config.output_dir.is_absolute()) return config.output_dir;
  const char* root = std::getenv(kOutputRootVariable);
  const std::filesystem::path base = (root && *root) ? std::filesystem::path(root) : std::filesystem::current_path();
  return base / config.output_dir;
}

}  // namespace timeless
