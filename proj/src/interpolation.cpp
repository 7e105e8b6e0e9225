#include "mlqg/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mlqg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Cubic Lagrange weights on the uniform nodes -1, 0, 1, 2 at offset t in [0, 1).
std::array<double, 4> uniform_cubic_weights(double t) {
  return {-t * (t - 1.0) * (t - 2.0) / 6.0, (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
          -(t + 1.0) * t * (t - 2.0) / 2.0, (t + 1.0) * t * (t - 1.0) / 6.0};
}

}  // namespace

void to_polar(Point p, double& r, double& theta) {
  const double r2 = p.x * p.x + p.y * p.y;
  if (!(r2 <= 1.0 + kDiskTolerance)) throw std::domain_error("interpolate: point outside the closed unit disk");
  r = std::min(1.0, std::sqrt(r2));
  theta = std::atan2(p.y, p.x);
  if (theta < 0.0) theta += kTwoPi;
  if (theta >= kTwoPi) theta -= kTwoPi;
}

Interpolator::Interpolator(const Field& field, std::span<const double> boundary_values, InterpolationMode mode)
    : grid_(field.grid_ptr()),
      n_layers_(field.n_layers()),
      mode_(mode),
      fine_n_(kThetaRefinement * field.grid().n_theta()),
      coarse_(field.values().begin(), field.values().end()),
      boundary_(boundary_values.begin(), boundary_values.end()) {
  if (!boundary_.empty() && boundary_.size() != n_layers_) {
    throw std::invalid_argument("interpolate: expected one boundary value per layer");
  }
  const Grid& g = *grid_;
  const std::size_t nt = g.n_theta();
  fine_.resize(n_layers_ * g.n_r() * static_cast<std::size_t>(fine_n_));
  for (std::size_t i = 0; i < n_layers_; ++i) {
    auto layer = field.layer(i);
    for (int j = 0; j < g.n_r(); ++j) {
      auto ring = layer.subspan(j * nt, nt);
      auto fine = std::span(fine_).subspan((i * g.n_r() + j) * static_cast<std::size_t>(fine_n_), fine_n_);
      g.refine(ring, kThetaRefinement, fine);
    }
  }
}

Interpolator::Stencil Interpolator::stencil(double r, double theta) const {
  const Grid& g = *grid_;
  const int nr = g.n_r();
  const int last = boundary_.empty() ? nr - 1 : nr;  // highest radial station

  // stations: s < 0 mirror ring -s-1 through the pole, s == nr is r = 1
  const int lo = r < g.r(0) ? -1 : std::min(static_cast<int>(std::floor(r / g.dr() - 0.5)), nr - 1);
  const int start = std::min(lo - 1, last - 3);

  Stencil st{};
  st.lower = lo;
  st.upper = std::min(lo + 1, last);

  theta = std::fmod(theta, kTwoPi);
  if (theta < 0.0) theta += kTwoPi;
  const double u = theta * (fine_n_ / kTwoPi);
  const double base = std::floor(u);
  st.theta_w = uniform_cubic_weights(u - base);
  const int k = static_cast<int>(base) % fine_n_;
  st.theta_cell = k;

  std::array<double, 4> pos{};
  for (int n = 0; n < 4; ++n) {
    const int s = start + n;
    int shift = 0;
    if (s < 0) {
      st.ring[n] = -s - 1;
      pos[n] = -g.r(st.ring[n]);
      shift = fine_n_ / 2;
    } else if (s < nr) {
      st.ring[n] = s;
      pos[n] = g.r(s);
    } else {
      st.ring[n] = -1;
      pos[n] = 1.0;
    }
    int idx = (k - 1 + shift) % fine_n_;
    if (idx < 0) idx += fine_n_;
    st.fine_start[n] = idx;
  }
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (b != a) w *= (r - pos[b]) / (pos[a] - pos[b]);
    }
    st.radial_w[a] = w;
  }
  return st;
}

double Interpolator::apply(std::size_t layer, const Stencil& st) const {
  const Grid& g = *grid_;
  double value = 0.0;
  for (int a = 0; a < 4; ++a) {
    double v;
    if (st.ring[a] < 0) {
      v = boundary_[layer];
    } else {
      const double* ring = fine_.data() + (layer * g.n_r() + st.ring[a]) * static_cast<std::size_t>(fine_n_);
      const int i0 = st.fine_start[a];
      v = 0.0;
      if (i0 + 3 < fine_n_) {
        for (int n = 0; n < 4; ++n) v += st.theta_w[n] * ring[i0 + n];
      } else {
        for (int n = 0; n < 4; ++n) v += st.theta_w[n] * ring[(i0 + n) % fine_n_];
      }
    }
    value += st.radial_w[a] * v;
  }
  if (mode_ == InterpolationMode::cubic) return value;

  // clamp to the original nodes of the enclosing cell
  const int nt = g.n_theta();
  const int k_cell = st.theta_cell / kThetaRefinement;
  double lo_v = std::numeric_limits<double>::infinity();
  double hi_v = -lo_v;
  auto consider = [&](int station) {
    if (station >= g.n_r()) {
      lo_v = std::min(lo_v, boundary_[layer]);
      hi_v = std::max(hi_v, boundary_[layer]);
      return;
    }
    const int ring = station < 0 ? -station - 1 : station;
    const int k = (k_cell + (station < 0 ? nt / 2 : 0)) % nt;
    const double* row = coarse_.data() + layer * g.size() + g.index(ring, 0);
    for (int kk : {k, (k + 1) % nt}) {
      lo_v = std::min(lo_v, row[kk]);
      hi_v = std::max(hi_v, row[kk]);
    }
  };
  consider(st.lower);
  consider(st.upper);
  return std::clamp(value, lo_v, hi_v);
}

double Interpolator::evaluate(std::size_t layer, double r, double theta) const { return apply(layer, stencil(r, theta)); }

double Interpolator::operator()(std::size_t layer, Point p) const {
  if (layer >= n_layers_) throw std::out_of_range("interpolate: layer index out of range");
  double r = 0.0;
  double theta = 0.0;
  to_polar(p, r, theta);
  return evaluate(layer, r, theta);
}

std::vector<std::vector<double>> interpolate(const Field& field, std::span<const Point> points,
                                             std::span<const double> boundary_values, InterpolationMode mode) {
  Interpolator interp(field, boundary_values, mode);
  std::vector<std::vector<double>> out(field.n_layers(), std::vector<double>(points.size()));
  for (std::size_t n = 0; n < points.size(); ++n) {
    double r = 0.0;
    double theta = 0.0;
    to_polar(points[n], r, theta);
    const auto st = interp.stencil(r, theta);
    for (std::size_t i = 0; i < field.n_layers(); ++i) out[i][n] = interp.apply(i, st);
  }
  return out;
}

}  // namespace mlqg
