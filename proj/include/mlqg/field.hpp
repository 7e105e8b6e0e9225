#pragma once

#include "mlqg/grid.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace mlqg {

/// One scalar per grid node per layer. Layers are stored contiguously,
/// ring-major within a layer (index = j * n_theta + k).
class Field {
 public:
  Field() = default;
  Field(GridPtr grid, std::size_t n_layers, double fill = 0.0);

  /// Samples fn(layer, x, y) at every node.
  static Field from_function(GridPtr grid, std::size_t n_layers,
                             const std::function<double(std::size_t, double, double)>& fn);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t n_layers() const { return n_layers_; }

  std::span<double> layer(std::size_t i);
  std::span<const double> layer(std::size_t i) const;

  double& at(std::size_t layer, int j, int k) { return data_[layer * stride() + grid_->index(j, k)]; }
  double at(std::size_t layer, int j, int k) const { return data_[layer * stride() + grid_->index(j, k)]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool all_finite() const;
  double max_abs() const;
  double max_abs(std::size_t layer) const;
  double min(std::size_t layer) const;
  double max(std::size_t layer) const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);

 private:
  std::size_t stride() const { return grid_->size(); }

  GridPtr grid_;
  std::size_t n_layers_ = 0;
  std::vector<double> data_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

/// Max pointwise |a - b| over all layers.
double max_abs_diff(const Field& a, const Field& b);

/// Cartesian velocity-like field, one (x, y) pair per node per layer.
struct VectorField {
  Field x;
  Field y;

  std::size_t n_layers() const { return x.n_layers(); }
  const Grid& grid() const { return x.grid(); }
  double max_norm() const;
  double max_norm(std::size_t layer) const;
};

}  // namespace mlqg
