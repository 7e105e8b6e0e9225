#pragma once

#include "mlqg/config.hpp"
#include "mlqg/sim.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace mlqg {

inline constexpr const char* kVersion = "1.0.0";

/// Called after initialization (step 0) and after every accepted step.
using Observer = std::function<void(int step, const State& state)>;

struct RunResult {
  int steps = 0;
  State final_state;
  std::vector<DiagnosticsRecord> diagnostics;  ///< at the configured cadence
};

/// Runs a validated config. When `out_dir` is non-empty, writes
/// diagnostics.csv, snapshot_<step>.csv and manifest.txt there.
/// Throws NumericalFailure when a step cannot be completed.
RunResult run(const SimConfig& config, const std::filesystem::path& out_dir = {}, const Observer& observer = {});

/// 17 significant digits.
std::string format_value(double v);

void write_diagnostics_header(std::ostream& out, std::size_t n_layers);
void write_diagnostics_row(std::ostream& out, const DiagnosticsRecord& rec);
void write_snapshot(std::ostream& out, const State& state);
void write_manifest(std::ostream& out, const SimConfig& config, int steps);

}  // namespace mlqg
