#include "mlqg/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string_view>

namespace mlqg {

namespace {

struct KeyError {
  std::string key;
  std::string message;
};

[[noreturn]] void fail(const std::string& key, const std::string& message) { throw KeyError{key, message}; }

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw std::invalid_argument("expected a finite number, got '" + std::string(v) + "'");
  }
  return out;
}

template <class Int>
Int parse_integer(std::string_view v) {
  Int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw std::invalid_argument("expected an integer, got '" + std::string(v) + "'");
  }
  return out;
}

std::vector<double> parse_list(std::string_view v) {
  std::vector<double> out;
  while (true) {
    const auto comma = v.find(',');
    out.push_back(parse_double(trim(v.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out;
}

template <class Enum, std::size_t N>
Enum parse_enum(std::string_view v, const std::array<Enum, N>& values) {
  for (Enum e : values) {
    if (v == to_string(e)) return e;
  }
  std::string names;
  for (Enum e : values) names += std::string(names.empty() ? "" : ", ") + to_string(e);
  throw std::invalid_argument("unknown value '" + std::string(v) + "' (expected one of: " + names + ")");
}

constexpr std::array kInitialPresets{InitialPreset::zero, InitialPreset::gaussian_blob, InitialPreset::radial,
                                     InitialPreset::manufactured};
constexpr std::array kInitialFields{InitialField::pv, InitialField::streamfunction};
constexpr std::array kForcingPresets{ForcingPreset::none, ForcingPreset::constant, ForcingPreset::rotating_dipole};
constexpr std::array kModes{InterpolationMode::cubic, InterpolationMode::monotone};

struct KeySpec {
  const char* section;
  const char* name;
  std::function<bool(const SimConfig&)> applies;
  std::function<void(SimConfig&, std::string_view)> set;
  std::function<std::string(const SimConfig&)> get;
};

bool always(const SimConfig&) { return true; }
bool ic_is(const SimConfig& c, std::initializer_list<InitialPreset> p) {
  for (InitialPreset x : p) {
    if (c.ic.preset == x) return true;
  }
  return false;
}

// Table order is the canonical dump order; presets precede their parameters.
const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = {
      {"model", "n_layers", always, [](SimConfig& c, std::string_view v) { c.n_layers = parse_integer<std::size_t>(v); },
       [](const SimConfig& c) { return std::to_string(c.n_layers); }},
      {"model", "froude", always, [](SimConfig& c, std::string_view v) { c.froude = parse_double(v); },
       [](const SimConfig& c) { return format_double(c.froude); }},
      {"grid", "n_r", always, [](SimConfig& c, std::string_view v) { c.n_r = parse_integer<int>(v); },
       [](const SimConfig& c) { return std::to_string(c.n_r); }},
      {"grid", "n_theta", always, [](SimConfig& c, std::string_view v) { c.n_theta = parse_integer<int>(v); },
       [](const SimConfig& c) { return std::to_string(c.n_theta); }},
      {"time", "dt", always, [](SimConfig& c, std::string_view v) { c.dt = parse_double(v); },
       [](const SimConfig& c) { return format_double(c.dt); }},
      {"time", "t_end", always, [](SimConfig& c, std::string_view v) { c.t_end = parse_double(v); },
       [](const SimConfig& c) { return format_double(c.t_end); }},
      {"solver", "picard_tol", always, [](SimConfig& c, std::string_view v) { c.picard_tol = parse_double(v); },
       [](const SimConfig& c) { return format_double(c.picard_tol); }},
      {"solver", "picard_max_iter", always,
       [](SimConfig& c, std::string_view v) { c.picard_max_iter = parse_integer<int>(v); },
       [](const SimConfig& c) { return std::to_string(c.picard_max_iter); }},
      {"solver", "interpolation", always,
       [](SimConfig& c, std::string_view v) { c.interpolation = parse_enum(v, kModes); },
       [](const SimConfig& c) { return std::string(to_string(c.interpolation)); }},
      {"ic", "preset", always, [](SimConfig& c, std::string_view v) { c.ic.preset = parse_enum(v, kInitialPresets); },
       [](const SimConfig& c) { return std::string(to_string(c.ic.preset)); }},
      {"ic", "field", [](const SimConfig& c) { return c.ic.preset != InitialPreset::zero; },
       [](SimConfig& c, std::string_view v) { c.ic.field = parse_enum(v, kInitialFields); },
       [](const SimConfig& c) { return std::string(to_string(c.ic.field)); }},
      {"ic", "center_x", [](const SimConfig& c) { return ic_is(c, {InitialPreset::gaussian_blob}); },
       [](SimConfig& c, std::string_view v) { c.ic.center_x = parse_double(v); },
       [](const SimConfig& c) { return format_double(c.ic.center_x); }},
      {"ic", "center_y", [](const SimConfig& c) { return ic_is(c, {InitialPreset::gaussian_blob}); },
       [](SimConfig& c, std::string_view v) { c.ic.center_y = parse_double(v); },
       [](const SimConfig& c) { return format_double(c.ic.center_y); }},
      {"ic", "width", [](const SimConfig& c) { return ic_is(c, {InitialPreset::gaussian_blob}); },
       [](SimConfig& c, std::string_view v) { c.ic.width = parse_double(v); },
       [](const SimConfig& c) { return format_double(c.ic.width); }},
      {"ic", "amplitude",
       [](const SimConfig& c) { return ic_is(c, {InitialPreset::gaussian_blob, InitialPreset::radial}); },
       [](SimConfig& c, std::string_view v) { c.ic.amplitude = parse_double(v); },
       [](const SimConfig& c) { return format_double(c.ic.amplitude); }},
      {"ic", "power", [](const SimConfig& c) { return ic_is(c, {InitialPreset::radial}); },
       [](SimConfig& c, std::string_view v) { c.ic.power = parse_integer<int>(v); },
       [](const SimConfig& c) { return std::to_string(c.ic.power); }},
      {"ic", "weights",
       [](const SimConfig& c) {
         return ic_is(c, {InitialPreset::gaussian_blob, InitialPreset::radial, InitialPreset::manufactured});
       },
       [](SimConfig& c, std::string_view v) { c.ic.weights = parse_list(v); },
       [](const SimConfig& c) {
         return format_list(c.ic.weights.empty() ? std::vector<double>(c.n_layers, 1.0) : c.ic.weights);
       }},
      {"ic", "case", [](const SimConfig& c) { return ic_is(c, {InitialPreset::manufactured}); },
       [](SimConfig& c, std::string_view v) { c.ic.case_id = parse_integer<int>(v); },
       [](const SimConfig& c) { return std::to_string(c.ic.case_id); }},
      {"ic", "perturbation", always, [](SimConfig& c, std::string_view v) { c.ic.perturbation = parse_double(v); },
       [](const SimConfig& c) { return format_double(c.ic.perturbation); }},
      {"ic", "seed", always, [](SimConfig& c, std::string_view v) { c.ic.seed = parse_integer<std::uint64_t>(v); },
       [](const SimConfig& c) { return std::to_string(c.ic.seed); }},
      {"forcing", "preset", always,
       [](SimConfig& c, std::string_view v) { c.forcing.preset = parse_enum(v, kForcingPresets); },
       [](const SimConfig& c) { return std::string(to_string(c.forcing.preset)); }},
      {"forcing", "value", [](const SimConfig& c) { return c.forcing.preset == ForcingPreset::constant; },
       [](SimConfig& c, std::string_view v) { c.forcing.value = parse_double(v); },
       [](const SimConfig& c) { return format_double(c.forcing.value); }},
      {"forcing", "amplitude", [](const SimConfig& c) { return c.forcing.preset == ForcingPreset::rotating_dipole; },
       [](SimConfig& c, std::string_view v) { c.forcing.amplitude = parse_double(v); },
       [](const SimConfig& c) { return format_double(c.forcing.amplitude); }},
      {"forcing", "frequency", [](const SimConfig& c) { return c.forcing.preset == ForcingPreset::rotating_dipole; },
       [](SimConfig& c, std::string_view v) { c.forcing.frequency = parse_double(v); },
       [](const SimConfig& c) { return format_double(c.forcing.frequency); }},
      {"output", "directory", always, [](SimConfig& c, std::string_view v) { c.output_directory = std::string(v); },
       [](const SimConfig& c) { return c.output_directory; }},
      {"output", "snapshot_every", always,
       [](SimConfig& c, std::string_view v) { c.snapshot_every = parse_integer<int>(v); },
       [](const SimConfig& c) { return std::to_string(c.snapshot_every); }},
      {"output", "diagnostics_every", always,
       [](SimConfig& c, std::string_view v) { c.diagnostics_every = parse_integer<int>(v); },
       [](const SimConfig& c) { return std::to_string(c.diagnostics_every); }},
  };
  return table;
}

bool known_section(std::string_view s) {
  for (const auto& k : key_table()) {
    if (s == k.section) return true;
  }
  return false;
}

void check(bool ok, const std::string& key, const std::string& message) {
  if (!ok) fail(key, message);
}

void validate_keys(const SimConfig& c) {
  check(c.n_layers >= 1 && c.n_layers <= 64, "model.n_layers", "must be in [1, 64]");
  check(c.froude > 0.0, "model.froude", "must be positive");
  check(c.n_r >= 8 && c.n_r <= 4096, "grid.n_r", "must be in [8, 4096]");
  check(c.n_theta >= 16 && c.n_theta <= 8192, "grid.n_theta", "must be in [16, 8192]");
  check(c.n_theta % 2 == 0, "grid.n_theta", "must be even");
  check(c.dt > 0.0, "time.dt", "must be positive");
  check(c.t_end >= c.dt, "time.t_end", "must be at least dt");
  const double steps = std::round(c.t_end / c.dt);
  check(std::abs(steps * c.dt - c.t_end) <= 1e-9 * std::max(1.0, c.t_end), "time.t_end",
        "must be an integer multiple of dt");
  check(steps <= 1e8, "time.t_end", "too many steps");
  check(c.picard_tol > 0.0, "solver.picard_tol", "must be positive");
  check(c.picard_max_iter >= 1, "solver.picard_max_iter", "must be >= 1");
  if (c.ic.preset == InitialPreset::gaussian_blob) {
    check(c.ic.center_x * c.ic.center_x + c.ic.center_y * c.ic.center_y < 1.0, "ic.center_x",
          "blob center must lie inside the unit disk");
    check(c.ic.width > 0.0, "ic.width", "must be positive");
  }
  if (c.ic.preset == InitialPreset::radial) check(c.ic.power >= 1 && c.ic.power <= 16, "ic.power", "must be in [1, 16]");
  if (c.ic.preset == InitialPreset::manufactured) check(c.ic.case_id == 1 || c.ic.case_id == 2, "ic.case", "must be 1 or 2");
  check(c.ic.weights.empty() || c.ic.weights.size() == c.n_layers, "ic.weights", "needs one entry per layer");
  check(!c.output_directory.empty(), "output.directory", "must not be empty");
  check(c.output_directory.find_first_of("#\n") == std::string::npos &&
            trim(c.output_directory) == std::string_view(c.output_directory),
        "output.directory", "must not contain '#', newlines or surrounding blanks");
  check(c.snapshot_every >= 0, "output.snapshot_every", "must be >= 0");
  check(c.diagnostics_every >= 1, "output.diagnostics_every", "must be >= 1");
}

}  // namespace

int SimConfig::n_steps() const { return static_cast<int>(std::llround(t_end / dt)); }

const char* to_string(InitialPreset p) {
  switch (p) {
    case InitialPreset::zero: return "zero";
    case InitialPreset::gaussian_blob: return "gaussian_blob";
    case InitialPreset::radial: return "radial";
    case InitialPreset::manufactured: return "manufactured";
  }
  return "?";
}

const char* to_string(InitialField f) { return f == InitialField::pv ? "pv" : "streamfunction"; }

const char* to_string(ForcingPreset p) {
  switch (p) {
    case ForcingPreset::none: return "none";
    case ForcingPreset::constant: return "constant";
    case ForcingPreset::rotating_dipole: return "rotating_dipole";
  }
  return "?";
}

const char* to_string(InterpolationMode m) { return m == InterpolationMode::cubic ? "cubic" : "monotone"; }

void validate(const SimConfig& config) {
  try {
    validate_keys(config);
  } catch (const KeyError& e) {
    throw ConfigError(e.key + ": " + e.message);
  }
}

SimConfig parse_config(const std::string& text) {
  struct Entry {
    std::string value;
    int line;
  };
  std::map<std::string, Entry> entries;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header", line_no);
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!known_section(section)) throw ConfigError("unknown section [" + section + "]", line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (section.empty()) throw ConfigError("key '" + key + "' outside of any section", line_no);
    if (key.empty()) throw ConfigError("missing key name", line_no);
    bool known = false;
    for (const auto& k : key_table()) known = known || (section == k.section && key == k.name);
    if (!known) throw ConfigError("unknown key '" + key + "' in section [" + section + "]", line_no);
    const std::string full = section + "." + key;
    if (entries.contains(full)) throw ConfigError("duplicate key '" + full + "'", line_no);
    if (value.empty()) throw ConfigError("missing value for '" + full + "'", line_no);
    entries.emplace(full, Entry{value, line_no});
  }

  SimConfig config;
  for (const auto& k : key_table()) {
    const std::string full = std::string(k.section) + "." + k.name;
    const auto it = entries.find(full);
    if (it == entries.end()) continue;
    if (!k.applies(config)) {
      throw ConfigError("key '" + full + "' does not apply to the selected preset", it->second.line);
    }
    try {
      k.set(config, it->second.value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(full + ": " + e.what(), it->second.line);
    }
  }
  if (config.ic.weights.empty()) config.ic.weights.assign(config.n_layers, 1.0);
  try {
    validate_keys(config);
  } catch (const KeyError& e) {
    const auto it = entries.find(e.key);
    throw ConfigError(e.key + ": " + e.message, it == entries.end() ? 0 : it->second.line);
  }
  return config;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string dump_config(const SimConfig& config) {
  std::string out;
  std::string section;
  for (const auto& k : key_table()) {
    if (!k.applies(config)) continue;
    if (section != k.section) {
      if (!section.empty()) out += "\n";
      section = k.section;
      out += "[" + section + "]\n";
    }
    out += std::string(k.name) + " = " + k.get(config) + "\n";
  }
  return out;
}

}  // namespace mlqg
