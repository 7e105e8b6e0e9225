#pragma once

#include "mlqg/interpolation.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlqg {

/// Parse or validation failure; `line` is 0 when not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

enum class InitialPreset { zero, gaussian_blob, radial, manufactured };
enum class InitialField { pv, streamfunction };
enum class ForcingPreset { none, constant, rotating_dipole };

struct InitialConfig {
  InitialPreset preset = InitialPreset::gaussian_blob;
  InitialField field = InitialField::pv;
  // gaussian_blob
  double center_x = 0.3;
  double center_y = 0.1;
  double width = 0.15;
  // gaussian_blob, radial
  double amplitude = 1.0;
  std::vector<double> weights;  ///< per layer; filled with ones by the parser when omitted
  // radial: amplitude * (1 - r^2)^power
  int power = 2;
  // manufactured
  int case_id = 1;
  // smooth seeded perturbation added to the preset
  double perturbation = 0.0;
  std::uint64_t seed = 0;

  bool operator==(const InitialConfig&) const = default;
};

struct ForcingConfig {
  ForcingPreset preset = ForcingPreset::none;
  double value = 0.0;      // constant
  double amplitude = 1.0;  // rotating_dipole
  double frequency = 1.0;  // rotating_dipole

  bool operator==(const ForcingConfig&) const = default;
};

struct SimConfig {
  std::size_t n_layers = 3;
  double froude = 1.0;
  int n_r = 64;
  int n_theta = 128;
  double dt = 0.01;
  double t_end = 1.0;
  double picard_tol = 1e-10;
  int picard_max_iter = 50;
  InterpolationMode interpolation = InterpolationMode::cubic;
  InitialConfig ic;
  ForcingConfig forcing;
  std::string output_directory = "out";
  int snapshot_every = 0;     ///< steps between snapshots; 0 disables
  int diagnostics_every = 1;  ///< steps between diagnostics rows

  /// Number of steps: t_end / dt rounded to the nearest integer.
  int n_steps() const;

  bool operator==(const SimConfig&) const = default;
};

/// Parses the sectioned `key = value` format. '#' starts a comment.
/// Throws ConfigError with the offending line number.
SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::string& path);

/// Checks the invariants of a config; throws ConfigError naming the key.
void validate(const SimConfig& config);

/// Canonical text form: every applicable key, fixed order, shortest
/// round-trip number formatting. For any parsed config c,
/// parse_config(dump_config(c)) == c.
std::string dump_config(const SimConfig& config);

const char* to_string(InitialPreset p);
const char* to_string(InitialField f);
const char* to_string(ForcingPreset p);
const char* to_string(InterpolationMode m);

}  // namespace mlqg
