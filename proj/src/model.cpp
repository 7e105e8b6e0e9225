#include "mlqg/model.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <stdexcept>
#include <vector>

namespace mlqg {

Eigen::MatrixXd build_coupling_matrix(std::size_t n_layers, double froude) {
  if (n_layers == 0) throw std::invalid_argument("coupling matrix: n_layers must be positive");
  if (!(froude > 0.0) || !std::isfinite(froude)) throw std::invalid_argument("coupling matrix: froude must be positive");
  const auto n = static_cast<Eigen::Index>(n_layers);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    // one interface between layers i and i + 1
    t(i, i) -= 1.0;
    t(i + 1, i + 1) -= 1.0;
    t(i, i + 1) += 1.0;
    t(i + 1, i) += 1.0;
  }
  return froude * froude * t;
}

ModalDecomposition modal_decomposition(const Eigen::MatrixXd& coupling) {
  const Eigen::Index n = coupling.rows();
  if (n == 0 || coupling.cols() != n) throw std::invalid_argument("modal decomposition: matrix must be square");
  const double scale = std::max(1.0, coupling.cwiseAbs().maxCoeff());
  if ((coupling - coupling.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("modal decomposition: coupling matrix is not symmetric");
  }
  if (coupling.rowwise().sum().cwiseAbs().maxCoeff() > 1e-12 * scale * n) {
    throw std::invalid_argument("modal decomposition: coupling matrix rows must sum to zero");
  }

  ModalDecomposition out;
  out.eigenvalues = Eigen::VectorXd::Zero(n);
  out.modal_basis = Eigen::MatrixXd::Zero(n, n);
  out.modal_basis.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
  if (n == 1) return out;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(coupling);
  if (solver.info() != Eigen::Success) throw std::runtime_error("modal decomposition: eigensolver failed");

  // Eigen sorts ascending; the largest (zero) eigenpair is replaced by the
  // exact barotropic mode, the rest are re-orthogonalized against it.
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return solver.eigenvalues()(a) > solver.eigenvalues()(b); });

  for (Eigen::Index c = 1; c < n; ++c) {
    Eigen::VectorXd v = solver.eigenvectors().col(order[c]);
    for (Eigen::Index p = 0; p < c; ++p) v -= out.modal_basis.col(p).dot(v) * out.modal_basis.col(p);
    v.normalize();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(v(i)) > 1e-10) {
        if (v(i) < 0.0) v = -v;
        break;
      }
    }
    out.modal_basis.col(c) = v;
    out.eigenvalues(c) = v.dot(coupling * v);
  }
  return out;
}

LayerStack LayerStack::build(std::size_t n_layers, double froude) {
  LayerStack s;
  s.n_layers = n_layers;
  s.froude = froude;
  s.coupling = build_coupling_matrix(n_layers, froude);
  auto d = modal_decomposition(s.coupling);
  s.eigenvalues = std::move(d.eigenvalues);
  s.modal_basis = std::move(d.modal_basis);
  return s;
}

Field apply_layer_matrix(const Eigen::MatrixXd& m, const Field& f) {
  const auto n = static_cast<std::size_t>(m.rows());
  if (m.cols() != m.rows() || f.n_layers() != n) {
    throw std::invalid_argument("layer transform: field has " + std::to_string(f.n_layers()) +
                                " layers, matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  Field out(f.grid_ptr(), n);
  for (std::size_t a = 0; a < n; ++a) {
    auto dst = out.layer(a);
    for (std::size_t b = 0; b < n; ++b) {
      const double c = m(a, b);
      if (c == 0.0) continue;
      auto src = f.layer(b);
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += c * src[k];
    }
  }
  return out;
}

Field to_modal(const Field& layers, const Eigen::MatrixXd& basis) {
  return apply_layer_matrix(basis.transpose(), layers);
}

Field from_modal(const Field& modes, const Eigen::MatrixXd& basis) { return apply_layer_matrix(basis, modes); }

}  // namespace mlqg
