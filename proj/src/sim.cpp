#include "mlqg/sim.hpp"

#include "mlqg/operators.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>

namespace mlqg {

namespace {

Field layer_pv(const LayerStack& stack, const Field& psi, std::span<const double> l) {
  Field q = laplacian(psi, l);
  q += apply_layer_matrix(stack.coupling, psi);
  return q;
}

void require_finite(const State& s, const char* what) {
  if (!s.psi.all_finite() || !s.q.all_finite()) throw NumericalFailure(std::string(what) + ": non-finite values");
}

}  // namespace

QgModel::QgModel(LayerStack stack, GridPtr grid, Forcing forcing, StepperOptions options)
    : grid_(grid), solver_(std::move(stack), std::move(grid)), forcing_(std::move(forcing)), options_(options) {
  if (options_.picard_tol <= 0.0) throw std::invalid_argument("picard tolerance must be positive");
  if (options_.picard_max_iter < 1) throw std::invalid_argument("picard max_iter must be >= 1");
  if (options_.max_halvings < 0) throw std::invalid_argument("max_halvings must be >= 0");
}

State QgModel::initialize_from_pv(const Field& q0, double time) const {
  if (!q0.all_finite()) throw std::invalid_argument("initial PV has non-finite values");
  CoupledSolution sol = solver_.solve(q0);
  return State{time, std::move(sol.psi), q0, std::move(sol.l)};
}

State QgModel::initialize_from_streamfunction(const Field& psi0, std::span<const double> boundary_values,
                                              double time) const {
  if (!psi0.all_finite()) throw std::invalid_argument("initial streamfunction has non-finite values");
  return initialize_from_pv(layer_pv(stack(), psi0, boundary_values), time);
}

State QgModel::initialize_from_streamfunction(const LayerFunction& psi0, double time) const {
  const std::size_t n = stack().n_layers;
  Field f = Field::from_function(grid_, n, psi0);
  std::vector<double> b(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < grid_->n_theta(); ++k) b[i] += psi0(i, grid_->cos_theta(k), grid_->sin_theta(k));
    b[i] /= grid_->n_theta();
  }
  return initialize_from_streamfunction(f, b, time);
}

Field QgModel::forcing_field(double t) const {
  return Field::from_function(grid_, stack().n_layers,
                              [&](std::size_t i, double x, double y) { return forcing_(i, x, y, t); });
}

PicardResult QgModel::picard_step(const State& state, double dt) const {
  if (!(dt > 0.0)) throw std::invalid_argument("picard_step: dt must be positive");
  const std::size_t n = stack().n_layers;
  const int substeps = default_substeps(velocity(state), dt);

  PicardResult result;
  State iterate = state;
  std::vector<double> l_avg(n);
  for (int it = 1; it <= options_.picard_max_iter; ++it) {
    Field psi_avg = 0.5 * (state.psi + iterate.psi);
    for (std::size_t i = 0; i < n; ++i) l_avg[i] = 0.5 * (state.l.l[i] + iterate.l.l[i]);
    const CharacteristicTracer tracer(perp_gradient(psi_avg, l_avg), substeps);
    Field q_next = advect_pv(tracer, state.q, forcing_, state.time, dt, options_.interpolation);
    CoupledSolution sol = solver_.solve(q_next);

    const double change = max_abs_diff(q_next, iterate.q) / (1.0 + iterate.q.max_abs());
    result.history.push_back(change);
    iterate = State{state.time + dt, std::move(sol.psi), std::move(q_next), std::move(sol.l)};
    result.iterations = it;
    result.residual = change;
    if (!std::isfinite(change)) break;
    if (change <= options_.picard_tol) {
      result.converged = true;
      break;
    }
  }
  result.state = std::move(iterate);
  return result;
}

State QgModel::advance(const State& state, double dt) const { return advance_level(state, dt, 0); }

State QgModel::advance_level(const State& state, double dt, int level) const {
  PicardResult step = picard_step(state, dt);
  if (step.converged && step.state.psi.all_finite() && step.state.q.all_finite()) return std::move(step.state);
  if (level >= options_.max_halvings) {
    throw NumericalFailure("Picard iteration did not converge at t = " + std::to_string(state.time) +
                           " (dt = " + std::to_string(dt) + ", last relative update " +
                           std::to_string(step.residual) + ")");
  }
  State half = advance_level(state, 0.5 * dt, level + 1);
  State full = advance_level(half, 0.5 * dt, level + 1);
  full.time = state.time + dt;
  require_finite(full, "advance");
  return full;
}

VectorField velocity(const State& state) { return perp_gradient(state.psi, state.l.values()); }

DiagnosticsRecord diagnostics(const State& state, const LayerStack& stack) {
  const std::size_t n = state.psi.n_layers();
  if (n != stack.n_layers) throw std::invalid_argument("diagnostics: layer count mismatch");
  DiagnosticsRecord rec;
  rec.time = state.time;
  rec.layers.resize(n);

  const VectorField grad = gradient(state.psi, state.l.values());
  const auto grad_x2 = inner_product(grad.x, grad.x);
  const auto grad_y2 = inner_product(grad.y, grad.y);
  const auto enstrophy = inner_product(state.q, state.q);
  const auto circulation = integrate(state.q);
  const auto mass = integrate(state.psi);
  for (std::size_t i = 0; i < n; ++i) {
    LayerDiagnostics& d = rec.layers[i];
    d.energy = 0.5 * (grad_x2[i] + grad_y2[i]);
    d.enstrophy = enstrophy[i];
    d.pv_min = state.q.min(i);
    d.pv_max = state.q.max(i);
    d.pv_inf = state.q.max_abs(i);
    d.circulation = circulation[i];
    d.mass = mass[i];
    d.boundary_l = state.l.l[i];
  }
  const auto stretching = inner_product(state.psi, apply_layer_matrix(stack.coupling, state.psi));
  for (double s : stretching) rec.coupling_energy -= 0.5 * s;
  rec.total_energy = rec.coupling_energy;
  for (const auto& d : rec.layers) rec.total_energy += d.energy;

  const Field modes = to_modal(state.psi, stack.modal_basis);
  std::vector<double> l_modal(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) l_modal[k] += stack.modal_basis(i, k) * state.l.l[i];
  }
  const VectorField mgrad = gradient(modes, l_modal);
  const auto mx = inner_product(mgrad.x, mgrad.x);
  const auto my = inner_product(mgrad.y, mgrad.y);
  const auto m2 = inner_product(modes, modes);
  rec.modal_energy.resize(n);
  for (std::size_t k = 0; k < n; ++k) rec.modal_energy[k] = 0.5 * (mx[k] + my[k]) - 0.5 * stack.eigenvalues[k] * m2[k];
  return rec;
}

double boundary_spread(const State& state, const LayerStack& stack) {
  const Grid& g = state.psi.grid();
  Field target = state.q;
  target -= apply_layer_matrix(stack.coupling, state.psi);
  double spread = 0.0;
  for (std::size_t i = 0; i < state.psi.n_layers(); ++i) {
    const auto b = implied_boundary_values(g, state.psi.layer(i), target.layer(i));
    const auto [lo, hi] = std::ranges::minmax(b);
    spread = std::max(spread, hi - lo);
  }
  return spread;
}

double weak_residual(const std::vector<State>& trajectory, const QgModel& model, const TestFunction& phi) {
  if (trajectory.empty()) throw std::invalid_argument("weak_residual: empty trajectory");
  const GridPtr& grid = model.grid_ptr();
  const std::size_t n = model.stack().n_layers;
  const std::vector<double> zero_boundary(n, 0.0);

  auto sample = [&](const std::function<double(std::size_t, double, double, double)>& fn, double t) {
    return Field::from_function(grid, n, [&](std::size_t i, double x, double y) { return fn(i, x, y, t); });
  };

  // space integrals of the time-integrand, per layer, at one trajectory time
  auto integrand = [&](const State& s) {
    const Field q = layer_pv(model.stack(), s.psi, s.l.values());
    const Field phi_now = sample(phi.value, s.time);
    const Field phi_t = sample(phi.time_derivative, s.time);
    const VectorField grad_phi = gradient(phi_now, zero_boundary);
    const VectorField u = velocity(s);
    Field advective(grid, n);
    for (std::size_t m = 0; m < advective.values().size(); ++m) {
      advective.values()[m] = u.x.values()[m] * grad_phi.x.values()[m] + u.y.values()[m] * grad_phi.y.values()[m];
    }
    const auto a = inner_product(q, phi_t);
    const auto b = inner_product(q, advective);
    const auto c = inner_product(model.forcing_field(s.time), phi_now);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i] + c[i];
    return out;
  };

  std::vector<double> total(n, 0.0);
  {
    const State& s0 = trajectory.front();
    const Field q0 = layer_pv(model.stack(), s0.psi, s0.l.values());
    const auto initial = inner_product(q0, sample(phi.value, s0.time));
    for (std::size_t i = 0; i < n; ++i) total[i] += initial[i];
  }
  std::vector<double> prev = integrand(trajectory.front());
  for (std::size_t s = 1; s < trajectory.size(); ++s) {
    const std::vector<double> cur = integrand(trajectory[s]);
    const double h = trajectory[s].time - trajectory[s - 1].time;
    for (std::size_t i = 0; i < n; ++i) total[i] += 0.5 * h * (prev[i] + cur[i]);
    prev = cur;
  }
  double residual = 0.0;
  for (double v : total) residual += std::abs(v);
  return residual;
}

Field smooth_perturbation(const GridPtr& grid, std::size_t n_layers, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  // explicit 53-bit conversion keeps the sequence identical across standard libraries
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
  constexpr int kModes = 4;
  std::vector<double> a(n_layers * kModes);
  std::vector<double> b(n_layers * kModes);
  for (std::size_t n = 0; n < a.size(); ++n) {
    a[n] = uniform();
    b[n] = uniform();
  }
  Field f = Field::from_function(grid, n_layers, [&](std::size_t i, double x, double y) {
    const double r = std::hypot(x, y);
    const double th = std::atan2(y, x);
    double v = 0.0;
    for (int m = 0; m < kModes; ++m) {
      const double radial = std::pow(r, m) * (1.0 - r * r);
      v += radial * (a[i * kModes + m] * std::cos(m * th) + b[i * kModes + m] * std::sin(m * th));
    }
    return v;
  });
  const Grid& g = *grid;
  double area = 0.0;
  for (int j = 0; j < g.n_r(); ++j) area += g.weight(j) * g.n_theta();
  const auto mean = integrate(f);
  for (std::size_t i = 0; i < n_layers; ++i) {
    for (double& v : f.layer(i)) v -= mean[i] / area;
  }
  const double scale = f.max_abs();
  if (scale > 0.0) f *= 1.0 / scale;
  return f;
}

std::vector<double> h1_norm(const Field& h) {
  const std::vector<double> zero(h.n_layers(), 0.0);
  const VectorField g = gradient(h, zero);
  const auto gx = inner_product(g.x, g.x);
  const auto gy = inner_product(g.y, g.y);
  const auto hh = inner_product(h, h);
  std::vector<double> out(h.n_layers());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::sqrt(gx[i] + gy[i] + hh[i]);
  return out;
}

TwinResult twin_divergence(const QgModel& model, const Field& q0, const Field& perturbation, double delta, double dt,
                           int steps) {
  Field q_b = q0;
  if (delta != 0.0) q_b += delta * perturbation;
  auto run = [&model, dt, steps](const Field& q_init) {
    std::vector<State> states;
    states.reserve(steps + 1);
    states.push_back(model.initialize_from_pv(q_init));
    for (int s = 0; s < steps; ++s) states.push_back(model.advance(states.back(), dt));
    return states;
  };
  auto future_b = std::async(std::launch::async, run, std::cref(q_b));
  const std::vector<State> a = run(q0);
  const std::vector<State> b = future_b.get();

  const Grid& g = model.grid();
  double area = 0.0;
  for (int j = 0; j < g.n_r(); ++j) area += g.weight(j) * g.n_theta();

  TwinResult out;
  const std::size_t n = q0.n_layers();
  for (std::size_t s = 0; s < a.size(); ++s) {
    Field h = a[s].psi - b[s].psi;
    for (std::size_t i = 0; i < n; ++i) {
      const double lh = a[s].l.l[i] - b[s].l.l[i];
      for (double& v : h.layer(i)) v -= lh;
    }
    const auto mean = integrate(h);
    std::vector<double> shift(n);
    for (std::size_t i = 0; i < n; ++i) shift[i] = -mean[i] / area;
    out.times.push_back(a[s].time);
    out.norms.push_back(h1_norm(h));
    out.shift.push_back(std::move(shift));
  }
  return out;
}

}  // namespace mlqg
