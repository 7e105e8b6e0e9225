#pragma once

#include "mlqg/elliptic.hpp"
#include "mlqg/field.hpp"
#include "mlqg/interpolation.hpp"
#include "mlqg/model.hpp"
#include "mlqg/transport.hpp"

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlqg {

/// Raised when time stepping cannot proceed (Picard failure beyond the
/// retry limit, non-finite values).
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct State {
  double time = 0.0;
  Field psi;
  Field q;
  BoundaryConstants l;
};

struct StepperOptions {
  double picard_tol = 1e-10;
  int picard_max_iter = 50;
  InterpolationMode interpolation = InterpolationMode::cubic;
  int max_halvings = 5;
};

struct PicardResult {
  State state;
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;             ///< last relative PV update
  std::vector<double> history;       ///< relative PV update per iteration
};

/// Per-layer scalar function of position, used for initial data.
using LayerFunction = std::function<double(std::size_t, double, double)>;

/// Owns the layer stack, grid, elliptic solver and forcing of one simulation.
class QgModel {
 public:
  QgModel(LayerStack stack, GridPtr grid, Forcing forcing = {}, StepperOptions options = {});

  const LayerStack& stack() const { return solver_.stack(); }
  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const Forcing& forcing() const { return forcing_; }
  const StepperOptions& options() const { return options_; }
  const CoupledSolver& solver() const { return solver_; }

  /// State from initial PV; psi and l come from one coupled solve.
  State initialize_from_pv(const Field& q0, double time = 0.0) const;
  /// State from an initial streamfunction. Its PV is formed with the
  /// boundary closure `boundary_values` (the circle average of psi0 on r = 1)
  /// and inverted again, which projects psi0 onto constant-boundary,
  /// zero-mean fields.
  State initialize_from_streamfunction(const Field& psi0, std::span<const double> boundary_values,
                                       double time = 0.0) const;
  /// Samples fn on the nodes (and on r = 1 for the boundary average).
  State initialize_from_streamfunction(const LayerFunction& psi0, double time = 0.0) const;

  /// One Picard-iterated step of size dt. Does not throw on non-convergence.
  PicardResult picard_step(const State& state, double dt) const;
  /// Step of size dt, splitting it into halves recursively (at most
  /// options().max_halvings levels) when Picard fails.
  State advance(const State& state, double dt) const;

  /// Forcing sampled on the nodes at time t.
  Field forcing_field(double t) const;

 private:
  State advance_level(const State& state, double dt, int level) const;

  GridPtr grid_;
  CoupledSolver solver_;
  Forcing forcing_;
  StepperOptions options_;
};

/// Velocity u = perp grad psi using the boundary constants as closure.
VectorField velocity(const State& state);

struct LayerDiagnostics {
  double energy = 0.0;       ///< 1/2 int |grad psi|^2
  double enstrophy = 0.0;    ///< int q^2
  double pv_min = 0.0;
  double pv_max = 0.0;
  double pv_inf = 0.0;
  double circulation = 0.0;  ///< int q
  double mass = 0.0;         ///< int psi
  double boundary_l = 0.0;
};

struct DiagnosticsRecord {
  double time = 0.0;
  std::vector<LayerDiagnostics> layers;
  double coupling_energy = 0.0;     ///< -1/2 int psi . L psi
  double total_energy = 0.0;
  std::vector<double> modal_energy; ///< 1/2 int |grad psi_k|^2 - lambda_k/2 int psi_k^2
};

DiagnosticsRecord diagnostics(const State& state, const LayerStack& stack);

/// Max over layers of the spread (max - min) of the boundary value implied
/// by psi and q on the outermost ring.
double boundary_spread(const State& state, const LayerStack& stack);

/// Space-time test function phi(layer, x, y, t) and its time derivative.
/// phi must vanish on r = 1 and at the final time of the trajectory.
struct TestFunction {
  std::function<double(std::size_t, double, double, double)> value;
  std::function<double(std::size_t, double, double, double)> time_derivative;
};

/// |int q0 phi(0) + int int (q phi_t + q u.grad phi + f phi)| summed over
/// layers, with q = Lap psi + L psi recomputed from psi, trapezoidal rule
/// over the trajectory times and midpoint quadrature in space.
double weak_residual(const std::vector<State>& trajectory, const QgModel& model, const TestFunction& phi);

/// Smooth, zero-mean perturbation of unit max-norm built from seeded low
/// azimuthal modes.
Field smooth_perturbation(const GridPtr& grid, std::size_t n_layers, std::uint64_t seed);

struct TwinResult {
  std::vector<double> times;
  std::vector<std::vector<double>> norms;  ///< [time][layer] H1 norm of h#
  std::vector<std::vector<double>> shift;  ///< [time][layer] boundary shift recovered from the mean
};

/// Runs q0 and q0 + delta * perturbation side by side for `steps` steps
/// and records per-layer H1 norms of h# = (psi_A - psi_B) - (l_A - l_B).
TwinResult twin_divergence(const QgModel& model, const Field& q0, const Field& perturbation, double delta, double dt,
                           int steps);

/// H1 norm sqrt(int |grad h|^2 + int h^2) of each layer of a field that
/// vanishes on r = 1.
std::vector<double> h1_norm(const Field& h);

}  // namespace mlqg
