#include "mlqg/elliptic.hpp"

#include "mlqg/operators.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mlqg {

HelmholtzSolver::HelmholtzSolver(GridPtr grid, double lambda) : grid_(std::move(grid)), lambda_(lambda) {
  if (!(lambda <= 0.0)) {
    throw std::invalid_argument("helmholtz: lambda must be <= 0 (got " + std::to_string(lambda) + ")");
  }
  const Grid& g = *grid_;
  const int nr = g.n_r();
  const double h = g.dr();
  const double h2 = h * h;

  factors_.resize(g.n_modes());
  for (int m = 0; m < g.n_modes(); ++m) {
    const double sigma = g.second_derivative_symbol(m);
    RadialFactor& f = factors_[m];
    f.sub.assign(nr, 0.0);
    f.inv_pivot.assign(nr, 0.0);
    f.super_mod.assign(nr, 0.0);
    double prev_super = 0.0;
    for (int j = 0; j < nr; ++j) {
      const double r = g.r(j);
      const double r_in = j * h;
      double a = r_in / (r * h2);
      double c = 0.0;
      double diag = sigma / (r * r) + lambda;
      if (j < nr - 1) {
        const double r_out = (j + 1) * h;
        c = r_out / (r * h2);
        diag -= (r_in + r_out) / (r * h2);
      } else {
        // outer face flux (8 b - 9 f_{N-1} + f_{N-2}) / 3 from the quadratic ghost value
        a += 1.0 / (3.0 * r * h2);
        diag -= (3.0 + r_in) / (r * h2);
      }
      const double pivot = diag - a * prev_super;
      f.sub[j] = a;
      f.inv_pivot[j] = 1.0 / pivot;
      f.super_mod[j] = c / pivot;
      prev_super = f.super_mod[j];
    }
  }

  std::vector<double> zero(g.size(), 0.0);
  profile_ = solve_dirichlet(zero, 1.0);
  profile_mass_ = integrate_layer(g, profile_);
  if (!(std::abs(profile_mass_) > 1e-12)) {
    throw std::runtime_error("helmholtz: degenerate homogeneous profile (mass " + std::to_string(profile_mass_) + ")");
  }
}

std::vector<double> HelmholtzSolver::solve_dirichlet(std::span<const double> rhs, double boundary_value) const {
  const Grid& g = *grid_;
  if (rhs.size() != g.size()) throw std::invalid_argument("helmholtz: rhs size does not match grid");
  const int nr = g.n_r();
  const int nt = g.n_theta();
  const int nm = g.n_modes();
  const double h = g.dr();

  std::vector<std::complex<double>> spec(static_cast<std::size_t>(nr) * nm);
  for (int j = 0; j < nr; ++j) {
    g.forward(rhs.subspan(static_cast<std::size_t>(j) * nt, nt),
              std::span(spec).subspan(static_cast<std::size_t>(j) * nm, nm));
  }
  // move the Dirichlet closure of the outer ring to the right-hand side
  // (only the mean mode sees a constant boundary value)
  spec[static_cast<std::size_t>(nr - 1) * nm] -= 8.0 * boundary_value * nt / (3.0 * g.r(nr - 1) * h * h);

  for (int m = 0; m < nm; ++m) {
    const RadialFactor& f = factors_[m];
    auto x = [&](int j) -> std::complex<double>& { return spec[static_cast<std::size_t>(j) * nm + m]; };
    x(0) *= f.inv_pivot[0];
    for (int j = 1; j < nr; ++j) x(j) = (x(j) - f.sub[j] * x(j - 1)) * f.inv_pivot[j];
    for (int j = nr - 2; j >= 0; --j) x(j) -= f.super_mod[j] * x(j + 1);
  }

  std::vector<double> out(g.size());
  for (int j = 0; j < nr; ++j) {
    g.inverse(std::span(spec).subspan(static_cast<std::size_t>(j) * nm, nm),
              std::span(out).subspan(static_cast<std::size_t>(j) * nt, nt));
  }
  return out;
}

HelmholtzSolver::ConstantBoundarySolution HelmholtzSolver::solve_constant_boundary_zero_mean(
    std::span<const double> rhs) const {
  ConstantBoundarySolution out;
  out.psi = solve_dirichlet(rhs, 0.0);
  const double c = -integrate_layer(*grid_, out.psi) / profile_mass_;
  for (std::size_t n = 0; n < out.psi.size(); ++n) out.psi[n] += c * profile_[n];
  out.boundary_constant = c;
  return out;
}

static void check_scalar(const Field& f) {
  if (f.n_layers() != 1) throw std::invalid_argument("helmholtz: expected a single-layer field");
}

Field solve_dirichlet(double lambda, const Field& rhs, double boundary_value) {
  check_scalar(rhs);
  HelmholtzSolver solver(rhs.grid_ptr(), lambda);
  Field out(rhs.grid_ptr(), 1);
  auto psi = solver.solve_dirichlet(rhs.layer(0), boundary_value);
  std::copy(psi.begin(), psi.end(), out.layer(0).begin());
  return out;
}

ScalarSolution solve_constant_boundary_zero_mean(double lambda, const Field& rhs) {
  check_scalar(rhs);
  HelmholtzSolver solver(rhs.grid_ptr(), lambda);
  auto sol = solver.solve_constant_boundary_zero_mean(rhs.layer(0));
  ScalarSolution out{Field(rhs.grid_ptr(), 1), sol.boundary_constant};
  std::copy(sol.psi.begin(), sol.psi.end(), out.psi.layer(0).begin());
  return out;
}

CoupledSolver::CoupledSolver(const LayerStack& stack, GridPtr grid) : stack_(stack), grid_(std::move(grid)) {
  for (std::size_t i = 0; i < stack_.n_layers; ++i) {
    // modal eigenvalues can come out as -0.0 or tiny positive roundoff
    double lambda = std::min(0.0, stack_.eigenvalues(static_cast<Eigen::Index>(i)));
    if (lambda == 0.0) lambda = 0.0;
    const auto key = std::bit_cast<std::uint64_t>(lambda);
    auto it = by_lambda_.find(key);
    if (it == by_lambda_.end()) {
      it = by_lambda_.emplace(key, std::make_shared<const HelmholtzSolver>(grid_, lambda)).first;
    }
    mode_solvers_.push_back(it->second);
  }
}

CoupledSolution CoupledSolver::solve(const Field& q) const {
  if (q.n_layers() != stack_.n_layers) {
    throw std::invalid_argument("solve_coupled: q has " + std::to_string(q.n_layers()) + " layers, stack has " +
                                std::to_string(stack_.n_layers));
  }
  if (&q.grid() != grid_.get()) throw std::invalid_argument("solve_coupled: q lives on a different grid");

  const Field q_modal = to_modal(q, stack_.modal_basis);
  Field psi_modal(grid_, stack_.n_layers);
  Eigen::VectorXd l_modal(static_cast<Eigen::Index>(stack_.n_layers));
  for (std::size_t i = 0; i < stack_.n_layers; ++i) {
    auto sol = mode_solvers_[i]->solve_constant_boundary_zero_mean(q_modal.layer(i));
    std::copy(sol.psi.begin(), sol.psi.end(), psi_modal.layer(i).begin());
    l_modal(static_cast<Eigen::Index>(i)) = sol.boundary_constant;
  }

  CoupledSolution out{from_modal(psi_modal, stack_.modal_basis), {}};
  const Eigen::VectorXd l = stack_.modal_basis * l_modal;
  out.l.l.assign(l.data(), l.data() + l.size());
  return out;
}

CoupledSolution solve_coupled(const LayerStack& stack, const Field& q) {
  return CoupledSolver(stack, q.grid_ptr()).solve(q);
}

double coupled_residual(const LayerStack& stack, const Field& psi, const BoundaryConstants& l, const Field& q) {
  Field r = laplacian(psi, l.values());
  r += apply_layer_matrix(stack.coupling, psi);
  r -= q;
  return r.max_abs();
}

}  // namespace mlqg
