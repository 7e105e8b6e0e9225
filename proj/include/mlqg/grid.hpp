#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace mlqg {

/// Offset polar grid on the unit disk.
///
/// Radial nodes sit at r_j = (j + 1/2) dr, so there is no node at the pole
/// and none on the boundary r = 1. Azimuthal nodes are uniform,
/// theta_k = 2 pi k / n_theta, with n_theta even so that the node opposite
/// each node (theta + pi) is itself a node. That is what lets radial
/// stencils continue through the pole.
class Grid {
 public:
  Grid(int n_r, int n_theta);
  ~Grid();
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  int n_r() const { return n_r_; }
  int n_theta() const { return n_theta_; }
  std::size_t size() const { return static_cast<std::size_t>(n_r_) * n_theta_; }

  double dr() const { return dr_; }
  double dtheta() const { return dtheta_; }
  double r(int j) const { return (j + 0.5) * dr_; }
  double theta(int k) const { return k * dtheta_; }
  double cos_theta(int k) const { return cos_[k]; }
  double sin_theta(int k) const { return sin_[k]; }
  /// Midpoint-rule area weight of a node on ring j.
  double weight(int j) const { return r(j) * dr_ * dtheta_; }

  std::size_t index(int j, int k) const { return static_cast<std::size_t>(j) * n_theta_ + k; }
  /// Node index of (j, k + n_theta/2), the pole continuation of ring j.
  int opposite(int k) const { return (k + n_theta_ / 2) % n_theta_; }

  /// Fourier collocation in theta when n_theta is a power of two,
  /// centered differences otherwise.
  bool spectral_theta() const { return spectral_; }
  /// Number of retained complex Fourier coefficients per ring.
  int n_modes() const { return n_theta_ / 2 + 1; }
  /// Symbol of the discrete d2/dtheta2 on wavenumber m (non-positive).
  double second_derivative_symbol(int m) const;
  /// Symbol of the discrete d/dtheta on wavenumber m, as the factor multiplying i.
  double first_derivative_symbol(int m) const;

  /// Unnormalized real-to-complex transform of one ring (n_modes outputs).
  void forward(std::span<const double> ring, std::span<std::complex<double>> modes) const;
  /// Inverse of forward(), including the 1/n_theta normalization.
  void inverse(std::span<const std::complex<double>> modes, std::span<double> ring) const;
  /// Trigonometric interpolation of a ring onto refinement * n_theta points.
  void refine(std::span<const double> ring, int refinement, std::span<double> fine) const;

 private:
  struct FftPlans;

  int n_r_;
  int n_theta_;
  double dr_;
  double dtheta_;
  bool spectral_;
  std::vector<double> cos_;
  std::vector<double> sin_;
  std::unique_ptr<FftPlans> plans_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Validates the resolution and builds a shared grid.
GridPtr build_grid(int n_r, int n_theta);

}  // namespace mlqg
