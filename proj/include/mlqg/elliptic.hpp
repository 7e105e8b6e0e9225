#pragma once

#include "mlqg/field.hpp"
#include "mlqg/model.hpp"

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <vector>

namespace mlqg {

/// Per-layer spatially constant boundary values l(t) of the streamfunction.
struct BoundaryConstants {
  std::vector<double> l;

  std::span<const double> values() const { return l; }
  std::size_t size() const { return l.size(); }
};

/// Fast solver for  Lap(psi) + lambda psi = rhs  on the disk with Dirichlet
/// data, lambda <= 0.
///
/// Each azimuthal wavenumber gives an independent tridiagonal radial system
/// (the same conservative stencil as `laplacian`), factored once here. The
/// homogeneous profile phi (rhs = 0, boundary value 1) is solved at
/// construction; it is strictly positive for lambda <= 0.
class HelmholtzSolver {
 public:
  HelmholtzSolver(GridPtr grid, double lambda);

  double lambda() const { return lambda_; }
  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }

  /// Dirichlet problem with constant boundary value.
  std::vector<double> solve_dirichlet(std::span<const double> rhs, double boundary_value) const;

  struct ConstantBoundarySolution {
    std::vector<double> psi;
    double boundary_constant = 0.0;
  };

  /// Constant (unknown) boundary value fixed by a zero-mean constraint:
  /// psi = w + c phi with w the homogeneous-Dirichlet solution and
  /// c = -int(w) / int(phi).
  ConstantBoundarySolution solve_constant_boundary_zero_mean(std::span<const double> rhs) const;

  std::span<const double> homogeneous_profile() const { return profile_; }
  double profile_mass() const { return profile_mass_; }

 private:
  struct RadialFactor {
    std::vector<double> sub;        // a_j
    std::vector<double> inv_pivot;  // 1 / (b_j - a_j c'_{j-1})
    std::vector<double> super_mod;  // c'_j
  };

  GridPtr grid_;
  double lambda_;
  std::vector<RadialFactor> factors_;  // one per wavenumber
  std::vector<double> profile_;
  double profile_mass_ = 0.0;
};

/// Single-field convenience wrappers around HelmholtzSolver.
Field solve_dirichlet(double lambda, const Field& rhs, double boundary_value);
struct ScalarSolution {
  Field psi;
  double boundary_constant = 0.0;
};
ScalarSolution solve_constant_boundary_zero_mean(double lambda, const Field& rhs);

struct CoupledSolution {
  Field psi;
  BoundaryConstants l;
};

/// Solves  Lap(psi) + L psi = q,  psi = l_i (constant) on the boundary of
/// each layer, int(psi_i) = 0, by decoupling into modal Helmholtz problems.
/// One Helmholtz solver per distinct eigenvalue is built up front.
class CoupledSolver {
 public:
  CoupledSolver(const LayerStack& stack, GridPtr grid);

  const LayerStack& stack() const { return stack_; }
  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const HelmholtzSolver& mode_solver(std::size_t mode) const { return *mode_solvers_[mode]; }

  CoupledSolution solve(const Field& q) const;

 private:
  LayerStack stack_;
  GridPtr grid_;
  std::map<std::uint64_t, std::shared_ptr<const HelmholtzSolver>> by_lambda_;
  std::vector<std::shared_ptr<const HelmholtzSolver>> mode_solvers_;
};

CoupledSolution solve_coupled(const LayerStack& stack, const Field& q);

/// max |Lap(psi) + L psi - q| over all nodes, using l as the boundary closure.
double coupled_residual(const LayerStack& stack, const Field& psi, const BoundaryConstants& l, const Field& q);

}  // namespace mlqg
