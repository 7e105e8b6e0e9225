#include "mlqg/transport.hpp"

#include "mlqg/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mlqg {

namespace {

Field stack_components(const VectorField& u) {
  const std::size_t n = u.n_layers();
  Field out(u.x.grid_ptr(), 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    std::ranges::copy(u.x.layer(i), out.layer(i).begin());
    std::ranges::copy(u.y.layer(i), out.layer(n + i).begin());
  }
  return out;
}

Point project_into_disk(Point p) {
  const double r2 = p.x * p.x + p.y * p.y;
  if (r2 <= 1.0) return p;
  const double s = 1.0 / std::sqrt(r2);
  return {p.x * s, p.y * s};
}

}  // namespace

CharacteristicTracer::CharacteristicTracer(const VectorField& velocity, int substeps, double boundary_tolerance)
    : grid_(velocity.x.grid_ptr()),
      n_layers_(velocity.n_layers()),
      components_(stack_components(velocity)),
      substeps_(substeps) {
  if (substeps < 1) throw std::invalid_argument("tracer: substeps must be >= 1");
  const Grid& g = *grid_;
  const double u_max = velocity.max_norm();
  if (u_max > 0.0) {
    const int j = g.n_r() - 1;
    double un_max = 0.0;
    for (std::size_t i = 0; i < n_layers_; ++i) {
      for (int k = 0; k < g.n_theta(); ++k) {
        const double un = velocity.x.at(i, j, k) * g.cos_theta(k) + velocity.y.at(i, j, k) * g.sin_theta(k);
        un_max = std::max(un_max, std::abs(un));
      }
    }
    normal_ratio_ = un_max / u_max;
  }
  const double tol = boundary_tolerance < 0.0 ? g.dr() * g.n_theta() / 4.0 : boundary_tolerance;
  if (normal_ratio_ > tol) {
    throw std::invalid_argument("tracer: velocity crosses the boundary (|u.n|/|u| = " + std::to_string(normal_ratio_) +
                                " > " + std::to_string(tol) + ")");
  }
}

Point CharacteristicTracer::velocity(std::size_t layer, Point p) const {
  double r = 0.0;
  double theta = 0.0;
  to_polar(p, r, theta);
  const auto st = components_.stencil(r, theta);
  return {components_.apply(layer, st), components_.apply(n_layers_ + layer, st)};
}

Point CharacteristicTracer::trace_back(std::size_t layer, Point x, double dt) const {
  if (layer >= n_layers_) throw std::out_of_range("tracer: layer index out of range");
  const double h = dt / substeps_;
  Point p = project_into_disk(x);
  const bool on_boundary = std::hypot(p.x, p.y) >= 1.0 - 1e-14;
  auto rhs = [&](Point q) {
    Point u = velocity(layer, q);
    return Point{-u.x, -u.y};
  };
  auto offset = [](Point a, Point k, double s) { return project_into_disk({a.x + s * k.x, a.y + s * k.y}); };
  for (int n = 0; n < substeps_; ++n) {
    const Point k1 = rhs(p);
    const Point k2 = rhs(offset(p, k1, 0.5 * h));
    const Point k3 = rhs(offset(p, k2, 0.5 * h));
    const Point k4 = rhs(offset(p, k3, h));
    p = project_into_disk({p.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
                           p.y + h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y)});
  }
  if (on_boundary) {
    const double r = std::hypot(p.x, p.y);
    if (r > 0.0) p = {p.x / r, p.y / r};
  }
  return p;
}

int default_substeps(const VectorField& velocity, double dt) {
  const double courant = dt * velocity.max_norm() / velocity.grid().dr();
  return std::max(1, static_cast<int>(std::ceil(courant)));
}

Field advect_pv(const CharacteristicTracer& tracer, const Field& q, const Forcing& forcing, double t, double dt,
                InterpolationMode mode) {
  if (&q.grid() != &tracer.grid() || q.n_layers() != tracer.n_layers()) {
    throw std::invalid_argument("advect_pv: q and tracer disagree on grid or layer count");
  }
  const Grid& g = q.grid();
  const Interpolator interp(q, {}, mode);
  Field out(q.grid_ptr(), q.n_layers());
  const std::size_t per_layer = g.size();
  const double t_mid = t + 0.5 * dt;

  parallel_for(q.n_layers() * per_layer, [&](std::size_t begin, std::size_t end) {
    for (std::size_t n = begin; n < end; ++n) {
      const std::size_t layer = n / per_layer;
      const std::size_t node = n % per_layer;
      const int j = static_cast<int>(node) / g.n_theta();
      const int k = static_cast<int>(node) % g.n_theta();
      const Point x{g.r(j) * g.cos_theta(k), g.r(j) * g.sin_theta(k)};

      const Point dep = tracer.trace_back(layer, x, dt);
      double value;
      if (dep.x == x.x && dep.y == x.y) {
        value = q.values()[n];
      } else {
        double r = 0.0;
        double theta = 0.0;
        to_polar(dep, r, theta);
        value = interp.evaluate(layer, r, theta);
      }
      if (forcing) {
        const Point mid = forcing.uniform ? x : tracer.trace_back(layer, x, 0.5 * dt);
        value += dt * forcing(layer, mid.x, mid.y, t_mid);
      }
      out.values()[n] = value;
    }
  });
  return out;
}

}  // namespace mlqg
