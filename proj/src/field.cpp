#include "mlqg/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mlqg {

Field::Field(GridPtr grid, std::size_t n_layers, double fill)
    : grid_(std::move(grid)), n_layers_(n_layers), data_(n_layers * grid_->size(), fill) {
  if (n_layers == 0) throw std::invalid_argument("field: at least one layer required");
}

Field Field::from_function(GridPtr grid, std::size_t n_layers,
                           const std::function<double(std::size_t, double, double)>& fn) {
  Field f(std::move(grid), n_layers);
  const Grid& g = f.grid();
  for (std::size_t i = 0; i < n_layers; ++i) {
    for (int j = 0; j < g.n_r(); ++j) {
      for (int k = 0; k < g.n_theta(); ++k) {
        f.at(i, j, k) = fn(i, g.r(j) * g.cos_theta(k), g.r(j) * g.sin_theta(k));
      }
    }
  }
  return f;
}

std::span<double> Field::layer(std::size_t i) {
  if (i >= n_layers_) throw std::out_of_range("field: layer index out of range");
  return std::span(data_).subspan(i * stride(), stride());
}

std::span<const double> Field::layer(std::size_t i) const {
  if (i >= n_layers_) throw std::out_of_range("field: layer index out of range");
  return std::span(data_).subspan(i * stride(), stride());
}

bool Field::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Field::max_abs(std::size_t i) const {
  double m = 0.0;
  for (double v : layer(i)) m = std::max(m, std::abs(v));
  return m;
}

double Field::min(std::size_t i) const {
  auto l = layer(i);
  return *std::min_element(l.begin(), l.end());
}

double Field::max(std::size_t i) const {
  auto l = layer(i);
  return *std::max_element(l.begin(), l.end());
}

static void check_compatible(const Field& a, const Field& b) {
  if (&a.grid() != &b.grid() || a.n_layers() != b.n_layers()) {
    throw std::invalid_argument("field: grid or layer count mismatch");
  }
}

Field& Field::operator+=(const Field& other) {
  check_compatible(*this, other);
  for (std::size_t n = 0; n < data_.size(); ++n) data_[n] += other.data_[n];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  check_compatible(*this, other);
  for (std::size_t n = 0; n < data_.size(); ++n) data_[n] -= other.data_[n];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

double max_abs_diff(const Field& a, const Field& b) {
  check_compatible(a, b);
  auto va = a.values();
  auto vb = b.values();
  double m = 0.0;
  for (std::size_t n = 0; n < va.size(); ++n) m = std::max(m, std::abs(va[n] - vb[n]));
  return m;
}

double VectorField::max_norm() const {
  double m = 0.0;
  for (std::size_t i = 0; i < n_layers(); ++i) m = std::max(m, max_norm(i));
  return m;
}

double VectorField::max_norm(std::size_t i) const {
  auto ux = x.layer(i);
  auto uy = y.layer(i);
  double m = 0.0;
  for (std::size_t n = 0; n < ux.size(); ++n) m = std::max(m, std::hypot(ux[n], uy[n]));
  return m;
}

}  // namespace mlqg
