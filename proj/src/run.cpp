#include "mlqg/run.hpp"

#include "mlqg/presets.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

namespace mlqg {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

void save_snapshot(const std::filesystem::path& dir, int step, const State& state) {
  auto out = open_output(dir / ("snapshot_" + std::to_string(step) + ".csv"));
  write_snapshot(out, state);
}

}  // namespace

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_diagnostics_header(std::ostream& out, std::size_t n_layers) {
  static const char* per_layer[] = {"energy",      "enstrophy", "pv_min", "pv_max",
                                    "pv_inf",      "circulation", "mass", "boundary_l"};
  out << "time";
  for (std::size_t i = 0; i < n_layers; ++i) {
    for (const char* name : per_layer) out << ',' << name << '_' << i;
  }
  out << ",total_energy,coupling_energy";
  for (std::size_t k = 0; k < n_layers; ++k) out << ",modal_energy_" << k;
  out << '\n';
}

void write_diagnostics_row(std::ostream& out, const DiagnosticsRecord& rec) {
  out << format_value(rec.time);
  for (const auto& d : rec.layers) {
    for (double v : {d.energy, d.enstrophy, d.pv_min, d.pv_max, d.pv_inf, d.circulation, d.mass, d.boundary_l}) {
      out << ',' << format_value(v);
    }
  }
  out << ',' << format_value(rec.total_energy) << ',' << format_value(rec.coupling_energy);
  for (double e : rec.modal_energy) out << ',' << format_value(e);
  out << '\n';
}

void write_snapshot(std::ostream& out, const State& state) {
  const Grid& g = state.psi.grid();
  out << "layer,ir,itheta,r,theta,psi,q\n";
  for (std::size_t i = 0; i < state.psi.n_layers(); ++i) {
    for (int j = 0; j < g.n_r(); ++j) {
      for (int k = 0; k < g.n_theta(); ++k) {
        out << i << ',' << j << ',' << k << ',' << format_value(g.r(j)) << ',' << format_value(g.theta(k)) << ','
            << format_value(state.psi.at(i, j, k)) << ',' << format_value(state.q.at(i, j, k)) << '\n';
      }
    }
  }
}

void write_manifest(std::ostream& out, const SimConfig& config, int steps) {
  out << "mlqg " << kVersion << '\n'
      << "grid = " << config.n_r << " x " << config.n_theta << " (offset polar, "
      << (Grid(config.n_r, config.n_theta).spectral_theta() ? "spectral" : "finite-difference")
      << " theta derivatives)\n"
      << "steps = " << steps << '\n'
      << "\n# configuration\n"
      << dump_config(config);
}

RunResult run(const SimConfig& config, const std::filesystem::path& out_dir, const Observer& observer) {
  const QgModel model = build_model(config);
  const int steps = config.n_steps();
  const bool write = !out_dir.empty();

  std::ofstream diag;
  if (write) {
    std::filesystem::create_directories(out_dir);
    auto manifest = open_output(out_dir / "manifest.txt");
    write_manifest(manifest, config, steps);
    diag = open_output(out_dir / "diagnostics.csv");
    write_diagnostics_header(diag, config.n_layers);
  }

  RunResult result;
  State state = initial_state(model, config.ic);
  auto record = [&](int step) {
    const bool diag_due = step % config.diagnostics_every == 0 || step == steps;
    if (diag_due) {
      result.diagnostics.push_back(diagnostics(state, model.stack()));
      if (write) write_diagnostics_row(diag, result.diagnostics.back());
    }
    const bool snap_due = config.snapshot_every > 0 && (step % config.snapshot_every == 0 || step == steps);
    if (write && snap_due) save_snapshot(out_dir, step, state);
    if (observer) observer(step, state);
  };

  record(0);
  for (int step = 1; step <= steps; ++step) {
    State next = model.advance(state, config.dt);
    next.time = step * config.dt;
    state = std::move(next);
    record(step);
  }
  if (write) {
    diag.flush();
    if (!diag) throw std::runtime_error("failed writing diagnostics.csv");
  }
  result.steps = steps;
  result.final_state = std::move(state);
  return result;
}

}  // namespace mlqg
