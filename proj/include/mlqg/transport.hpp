#pragma once

#include "mlqg/field.hpp"
#include "mlqg/interpolation.hpp"

#include <cstddef>
#include <functional>

namespace mlqg {

/// Right-hand side f(layer, x, y, t) of the PV transport equation.
struct Forcing {
  using Fn = std::function<double(std::size_t, double, double, double)>;

  Fn fn;                ///< empty: no forcing
  bool uniform = false; ///< independent of position (skips the midpoint trace)

  explicit operator bool() const { return static_cast<bool>(fn); }
  double operator()(std::size_t layer, double x, double y, double t) const { return fn ? fn(layer, x, y, t) : 0.0; }
};

/// Backward characteristics of a frozen, per-layer velocity field.
///
/// Departure points are found by integrating dX/ds = -u(X) with classical
/// RK4. Any stage that leaves the disk is projected radially back onto
/// r = 1, so results always stay in the closed disk; the velocity is
/// tangential there, so such excursions are only O(h^2) numerical drift.
class CharacteristicTracer {
 public:
  /// Throws std::invalid_argument when the normal velocity on the outermost
  /// ring exceeds `boundary_tolerance * max|u|`. A negative tolerance picks
  /// the default dr * n_theta / 4 (half a cell times the largest resolvable
  /// azimuthal wavenumber).
  CharacteristicTracer(const VectorField& velocity, int substeps, double boundary_tolerance = -1.0);

  const Grid& grid() const { return *grid_; }
  std::size_t n_layers() const { return n_layers_; }
  int substeps() const { return substeps_; }
  /// max |u.n| on the outermost ring over max |u|.
  double boundary_normal_ratio() const { return normal_ratio_; }

  /// Departure point of the trajectory that reaches x after time dt. Points
  /// on the unit circle trace back onto it.
  Point trace_back(std::size_t layer, Point x, double dt) const;
  /// Velocity of one layer at a point of the closed disk.
  Point velocity(std::size_t layer, Point x) const;

 private:
  GridPtr grid_;
  std::size_t n_layers_;
  Interpolator components_;  // layers [0, n) hold u_x, [n, 2n) hold u_y
  int substeps_;
  double normal_ratio_ = 0.0;
};

/// max(1, ceil(dt * max|u| / dr))
int default_substeps(const VectorField& velocity, double dt);

/// One semi-Lagrangian step of dq/dt + u.grad q = f from t to t + dt:
///   q'(x) = q(X(x)) + dt * f(X_mid(x), t + dt/2)
/// where X is the departure point after dt and X_mid after dt/2.
/// Layer i is carried by the velocity of layer i.
Field advect_pv(const CharacteristicTracer& tracer, const Field& q, const Forcing& forcing, double t, double dt,
                InterpolationMode mode = InterpolationMode::cubic);

}  // namespace mlqg
