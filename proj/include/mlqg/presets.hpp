#pragma once

#include "mlqg/config.hpp"
#include "mlqg/model.hpp"
#include "mlqg/sim.hpp"
#include "mlqg/transport.hpp"

#include <vector>

namespace mlqg {

/// Closed-form streamfunction with constant boundary value and zero mean,
/// used for manufactured initial data. Layer i carries weights[i] times
///   case 1:  B = (1 - r^2)^2 - 1/3
///   case 2:  B + (x^2 - y^2)(1 - r^2)/2 + x(1 - r^2)/2
struct ManufacturedCase {
  int case_id = 1;
  std::vector<double> weights;

  double shape(double x, double y) const;
  double shape_laplacian(double x, double y) const;
  double boundary_value() const { return -1.0 / 3.0; }

  double psi(std::size_t layer, double x, double y) const;
  /// Lap psi + L psi for the given stack.
  double pv(const LayerStack& stack, std::size_t layer, double x, double y) const;
};

/// The preset as a function of position (PV or streamfunction, depending
/// on ic.field).
LayerFunction initial_function(const InitialConfig& ic, const LayerStack& stack);

/// Initial state for a config, including the seeded perturbation.
State initial_state(const QgModel& model, const InitialConfig& ic);

Forcing make_forcing(const ForcingConfig& forcing);

/// Model for a validated config.
QgModel build_model(const SimConfig& config);

}  // namespace mlqg
