#pragma once

#include "mlqg/field.hpp"

#include <array>
#include <span>
#include <vector>

namespace mlqg {

enum class InterpolationMode { cubic, monotone };

struct Point {
  double x;
  double y;
};

/// Points with r^2 <= 1 + kDiskTolerance are accepted and snapped onto r = 1.
inline constexpr double kDiskTolerance = 1e-12;

/// Azimuthal refinement factor used before local interpolation in theta.
inline constexpr int kThetaRefinement = 16;

/// Tensor-product cubic interpolation of a Field at arbitrary points of the
/// closed disk.
///
/// Each ring is first refined in theta by trigonometric interpolation
/// (kThetaRefinement points per original cell); cubic Lagrange interpolation
/// is then done on the refined ring and across four radial stations. Radial
/// stations below the innermost ring come from the opposite side of the pole;
/// above the outermost ring the boundary value (when supplied) is a station
/// at r = 1, otherwise the stencil is shifted inward.
///
/// In monotone mode the result is clamped to the range of the original nodes
/// of the enclosing cell.
class Interpolator {
 public:
  Interpolator(const Field& field, std::span<const double> boundary_values = {},
               InterpolationMode mode = InterpolationMode::cubic);

  std::size_t n_layers() const { return n_layers_; }
  const Grid& grid() const { return *grid_; }

  /// Throws std::domain_error for points outside the tolerance ring.
  double operator()(std::size_t layer, Point p) const;
  /// Same, without the domain check; (r, theta) must lie in the closed disk.
  double evaluate(std::size_t layer, double r, double theta) const;

  /// Weights for one query location, reusable across layers.
  struct Stencil {
    std::array<int, 4> ring;        // -1 marks the boundary station
    std::array<int, 4> fine_start;  // first refined-theta index of each station
    std::array<double, 4> radial_w;
    std::array<double, 4> theta_w;
    int lower;                      // stations of the enclosing cell
    int upper;
    int theta_cell;                 // refined theta index of the cell start
  };
  Stencil stencil(double r, double theta) const;
  double apply(std::size_t layer, const Stencil& s) const;

 private:
  GridPtr grid_;
  std::size_t n_layers_;
  InterpolationMode mode_;
  int fine_n_;
  std::vector<double> fine_;            // [layer][ring][fine theta]
  std::vector<double> coarse_;          // copy of node values for limiting
  std::vector<double> boundary_;        // empty when no closure
};

/// Interpolates every layer at every point: result[layer][point].
std::vector<std::vector<double>> interpolate(const Field& field, std::span<const Point> points,
                                             std::span<const double> boundary_values = {},
                                             InterpolationMode mode = InterpolationMode::cubic);

/// Maps (x, y) to polar (r, theta in [0, 2pi)); rejects points outside the
/// tolerance ring and clamps r to 1.
void to_polar(Point p, double& r, double& theta);

}  // namespace mlqg
