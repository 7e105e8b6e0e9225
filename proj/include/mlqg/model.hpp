#pragma once

#include "mlqg/field.hpp"

#include <Eigen/Dense>

#include <cstddef>

namespace mlqg {

/// Inter-layer coupling of an n-layer QG stack with a common Froude number,
/// together with its barotropic/baroclinic eigenbasis.
///
/// Invariants: `coupling` is symmetric tridiagonal with zero row sums;
/// eigenvalues are sorted descending with eigenvalues[0] == 0 exactly and the
/// rest strictly negative; `modal_basis` is orthogonal and its first column is
/// the constant vector 1/sqrt(n).
struct LayerStack {
  std::size_t n_layers = 0;
  double froude = 1.0;
  Eigen::MatrixXd coupling;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd modal_basis;

  static LayerStack build(std::size_t n_layers, double froude);
};

/// F^2 times the Neumann second-difference matrix: interior rows (1, -2, 1),
/// end rows (-1, 1) and (1, -1). Throws std::invalid_argument for n_layers == 0
/// or non-positive froude.
Eigen::MatrixXd build_coupling_matrix(std::size_t n_layers, double froude);

struct ModalDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd modal_basis;
};

/// Eigen-decomposition of a symmetric, zero-row-sum coupling matrix.
/// The zero eigenvalue is pinned to the constant vector; every column is
/// signed so that its first nonzero entry is positive.
ModalDecomposition modal_decomposition(const Eigen::MatrixXd& coupling);

/// Layer fields -> modal amplitudes (P^T applied pointwise).
Field to_modal(const Field& layers, const Eigen::MatrixXd& basis);
/// Modal amplitudes -> layer fields (P applied pointwise).
Field from_modal(const Field& modes, const Eigen::MatrixXd& basis);

/// Applies an n x n matrix across layers at every node.
Field apply_layer_matrix(const Eigen::MatrixXd& m, const Field& f);

}  // namespace mlqg
