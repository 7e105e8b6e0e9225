#include "mlqg/verify.hpp"

#include "mlqg/elliptic.hpp"
#include "mlqg/interpolation.hpp"
#include "mlqg/operators.hpp"
#include "mlqg/presets.hpp"
#include "mlqg/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace mlqg {

namespace {

constexpr double kPi = std::numbers::pi;

double bessel_i0(double x) {
  double term = 1.0;
  double sum = 1.0;
  const double q = 0.25 * x * x;
  for (int k = 1; k < 60; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

std::vector<double> orders(const std::vector<double>& e) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < e.size(); ++i) out.push_back(std::log2(e[i] / e[i + 1]));
  return out;
}

double min_order(const ConvergenceTable& t) {
  return t.order.empty() ? 0.0 : *std::ranges::min_element(t.order);
}

double l2_norm(const Field& f, std::size_t layer) {
  const Grid& g = f.grid();
  auto v = f.layer(layer);
  double sum = 0.0;
  for (int j = 0; j < g.n_r(); ++j) {
    double ring = 0.0;
    for (int k = 0; k < g.n_theta(); ++k) ring += v[g.index(j, k)] * v[g.index(j, k)];
    sum += ring * g.weight(j);
  }
  return std::sqrt(sum);
}

double total(const DiagnosticsRecord& d, double LayerDiagnostics::*member) {
  double s = 0.0;
  for (const auto& l : d.layers) s += l.*member;
  return s;
}

InitialConfig blob_ic(std::vector<double> weights) {
  InitialConfig ic;
  ic.preset = InitialPreset::gaussian_blob;
  ic.center_x = 0.3;
  ic.center_y = 0.1;
  ic.width = 0.15;
  ic.amplitude = 1.0;
  ic.weights = std::move(weights);
  return ic;
}

const std::vector<double> kBlobWeights{1.0, 0.6, -0.4};

QgModel make_model(std::size_t n_layers, int n_r, Forcing forcing = {},
                   InterpolationMode mode = InterpolationMode::cubic) {
  StepperOptions opts;
  opts.interpolation = mode;
  return QgModel(LayerStack::build(n_layers, 1.0), build_grid(n_r, 2 * n_r), std::move(forcing), opts);
}

struct ConservationRun {
  double spread = 0.0;
  double mass = 0.0;
  double q0_inf = 0.0;
  double q_inf_excess = -1e300;      // max over steps of |q|_inf - allowed bound
  double max_enstrophy_increase = -1e300;
  double energy_drift = 0.0;
  double enstrophy_change = 0.0;
};

ConservationRun conservation_run(int n_r, double dt, int steps, InterpolationMode mode, double forcing_value) {
  Forcing forcing;
  if (forcing_value != 0.0) forcing = make_forcing({ForcingPreset::constant, forcing_value, 0.0, 0.0});
  const QgModel model = make_model(3, n_r, forcing, mode);
  State s = initial_state(model, blob_ic(kBlobWeights));
  const DiagnosticsRecord d0 = diagnostics(s, model.stack());
  ConservationRun out;
  out.q0_inf = s.q.max_abs();
  double z_prev = total(d0, &LayerDiagnostics::enstrophy);
  const double z0 = z_prev;
  DiagnosticsRecord last = d0;
  for (int n = 1; n <= steps; ++n) {
    s = model.advance(s, dt);
    out.spread = std::max(out.spread, boundary_spread(s, model.stack()));
    for (double m : integrate(s.psi)) out.mass = std::max(out.mass, std::abs(m));
    const double allowed = out.q0_inf + std::abs(forcing_value) * s.time;
    out.q_inf_excess = std::max(out.q_inf_excess, s.q.max_abs() - allowed);
    last = diagnostics(s, model.stack());
    const double z = total(last, &LayerDiagnostics::enstrophy);
    out.max_enstrophy_increase = std::max(out.max_enstrophy_increase, (z - z_prev) / z0);
    z_prev = z;
  }
  out.energy_drift = std::abs(last.total_energy - d0.total_energy) / d0.total_energy;
  out.enstrophy_change = std::abs(z_prev - z0) / z0;
  return out;
}

const char* relation_text(Relation r) {
  switch (r) {
    case Relation::at_most: return "<=";
    case Relation::at_least: return ">=";
    case Relation::equal: return "==";
  }
  return "?";
}

}  // namespace

Check make_check(std::string name, double measured, Relation relation, double bound) {
  bool pass = false;
  switch (relation) {
    case Relation::at_most: pass = measured <= bound; break;
    case Relation::at_least: pass = measured >= bound; break;
    case Relation::equal: pass = measured == bound; break;
  }
  return Check{std::move(name), measured, relation, bound, pass && std::isfinite(measured)};
}

bool SuiteResult::passed() const {
  return std::ranges::all_of(checks, [](const Check& c) { return c.pass; });
}

const Check& SuiteResult::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("no check named " + suite + "." + name);
}

bool ConvergenceTable::passed() const { return !order.empty() && min_order(*this) >= required_order; }

void print_suite(std::ostream& out, const SuiteResult& suite) {
  for (const auto& c : suite.checks) {
    char line[256];
    std::snprintf(line, sizeof line, "%s  %-40s measured %.6e  %s %.3e\n", c.pass ? "PASS" : "FAIL",
                  (suite.suite + "." + c.name).c_str(), c.measured, relation_text(c.relation), c.bound);
    out << line;
  }
}

void print_convergence(std::ostream& out, const ConvergenceTable& t) {
  char line[256];
  out << t.name << '\n';
  out << "  n_r    n_theta  error          order\n";
  for (std::size_t i = 0; i < t.n_r.size(); ++i) {
    if (i == 0) {
      std::snprintf(line, sizeof line, "  %-6d %-8d %.6e   -\n", t.n_r[i], 2 * t.n_r[i], t.error[i]);
    } else {
      std::snprintf(line, sizeof line, "  %-6d %-8d %.6e   %.3f\n", t.n_r[i], 2 * t.n_r[i], t.error[i], t.order[i - 1]);
    }
    out << line;
  }
  std::snprintf(line, sizeof line, "  %s (min order %.3f, required %.2f)\n", t.passed() ? "PASS" : "FAIL",
                min_order(t), t.required_order);
  out << line;
}

ConvergenceTable convergence_bessel(const std::vector<int>& n_r) {
  ConvergenceTable t{"bessel profile (lambda = -1, boundary value 1)", n_r, {}, {}, 1.8};
  const double i0_1 = bessel_i0(1.0);
  for (int n : n_r) {
    const GridPtr g = build_grid(n, 2 * n);
    const HelmholtzSolver solver(g, -1.0);
    const std::vector<double> rhs(g->size(), 0.0);
    const auto psi = solver.solve_dirichlet(rhs, 1.0);
    double err = 0.0;
    for (int j = 0; j < g->n_r(); ++j) {
      const double exact = bessel_i0(g->r(j)) / i0_1;
      for (int k = 0; k < g->n_theta(); ++k) err = std::max(err, std::abs(psi[g->index(j, k)] - exact));
    }
    t.error.push_back(err);
  }
  t.order = orders(t.error);
  return t;
}

ConvergenceTable convergence_manufactured(const std::vector<int>& n_r) {
  ConvergenceTable t{"manufactured coupled problem (3 layers, F = 1)", n_r, {}, {}, 1.8};
  const LayerStack stack = LayerStack::build(3, 1.0);
  const ManufacturedCase mc{2, {1.0, -0.5, 0.25}};
  for (int n : n_r) {
    const GridPtr g = build_grid(n, 2 * n);
    const Field q = Field::from_function(g, 3, [&](std::size_t i, double x, double y) { return mc.pv(stack, i, x, y); });
    const Field exact = Field::from_function(g, 3, [&](std::size_t i, double x, double y) { return mc.psi(i, x, y); });
    const CoupledSolution sol = solve_coupled(stack, q);
    t.error.push_back(max_abs_diff(sol.psi, exact));
  }
  t.order = orders(t.error);
  return t;
}

ConvergenceTable convergence_rotation(const std::vector<int>& n_r) {
  ConvergenceTable t{"solid-body rotation of a Gaussian blob, one revolution", n_r, {}, {}, 1.8};
  auto blob = [](double x, double y) {
    const double dx = x - 0.4;
    return std::exp(-(dx * dx + y * y) / (2.0 * 0.1 * 0.1));
  };
  for (int n : n_r) {
    const GridPtr g = build_grid(n, 2 * n);
    const Field psi = Field::from_function(g, 1, [](std::size_t, double x, double y) { return 0.5 * (x * x + y * y); });
    const std::vector<double> boundary{0.5};
    const VectorField u = perp_gradient(psi, boundary);
    const int steps = 200 * n / 64;
    const double dt = 2.0 * kPi / steps;
    const CharacteristicTracer tracer(u, default_substeps(u, dt));
    Field q = Field::from_function(g, 1, [&](std::size_t, double x, double y) { return blob(x, y); });
    const Field exact = q;
    for (int s = 0; s < steps; ++s) q = advect_pv(tracer, q, {}, s * dt, dt);
    t.error.push_back(l2_norm(q - exact, 0));
  }
  t.order = orders(t.error);
  return t;
}

ConvergenceTable convergence_full(const std::vector<int>& n_r) {
  ConvergenceTable t{"nonlinear 3-layer run to t = 0.2 (self-convergence)", {}, {}, {}, 1.8};
  const double t_end = 0.2;
  std::vector<State> finals;
  std::vector<GridPtr> grids;
  for (int n : n_r) {
    const QgModel model = make_model(3, n);
    const int steps = 10 * n / n_r.front();
    const double dt = t_end / steps;
    State s = initial_state(model, blob_ic(kBlobWeights));
    for (int k = 0; k < steps; ++k) s = model.advance(s, dt);
    finals.push_back(std::move(s));
    grids.push_back(model.grid_ptr());
  }
  const Grid& coarse = *grids.front();
  auto sample = [&](const State& s) {
    std::vector<Point> pts;
    for (int j = 0; j < coarse.n_r(); ++j) {
      for (int k = 0; k < coarse.n_theta(); ++k) pts.push_back({coarse.r(j) * coarse.cos_theta(k), coarse.r(j) * coarse.sin_theta(k)});
    }
    return interpolate(s.psi, pts, s.l.values());
  };
  for (std::size_t i = 0; i + 1 < finals.size(); ++i) {
    const auto a = sample(finals[i]);
    const auto b = sample(finals[i + 1]);
    double err = 0.0;
    for (std::size_t l = 0; l < a.size(); ++l) {
      for (std::size_t p = 0; p < a[l].size(); ++p) err = std::max(err, std::abs(a[l][p] - b[l][p]));
    }
    t.n_r.push_back(n_r[i]);
    t.error.push_back(err);
  }
  t.order = orders(t.error);
  return t;
}

std::vector<ConvergenceTable> run_convergence(const std::string& name) {
  if (name == "elliptic") return {convergence_bessel({32, 64, 128}), convergence_manufactured({32, 64, 128})};
  if (name == "advection") return {convergence_rotation({32, 64, 128})};
  if (name == "full") return {convergence_full({16, 32, 64, 128})};
  throw std::invalid_argument("unknown convergence case '" + name + "' (expected elliptic, advection or full)");
}

SuiteResult verify_modal() {
  SuiteResult r{"modal", {}};
  const LayerStack s = LayerStack::build(3, 1.0);
  const Eigen::Vector3d expected_values(0.0, -1.0, -3.0);
  r.checks.push_back(make_check("eigenvalues", (s.eigenvalues - expected_values).cwiseAbs().maxCoeff(),
                                Relation::at_most, 1e-12));
  Eigen::Matrix3d v;
  v.col(0) = Eigen::Vector3d(1, 1, 1) / std::sqrt(3.0);
  v.col(1) = Eigen::Vector3d(1, 0, -1) / std::sqrt(2.0);
  v.col(2) = Eigen::Vector3d(-1, 2, -1) / std::sqrt(6.0);
  double vec_err = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double plus = (s.modal_basis.col(k) - v.col(k)).cwiseAbs().maxCoeff();
    const double minus = (s.modal_basis.col(k) + v.col(k)).cwiseAbs().maxCoeff();
    vec_err = std::max(vec_err, std::min(plus, minus));
  }
  r.checks.push_back(make_check("eigenvectors", vec_err, Relation::at_most, 1e-12));

  double ortho = 0.0;
  double eig_res = 0.0;
  double worst_negative = -1e300;
  for (std::size_t n = 1; n <= 8; ++n) {
    for (double f : {0.5, 1.0, 2.0}) {
      const LayerStack st = LayerStack::build(n, f);
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
      ortho = std::max(ortho, (st.modal_basis.transpose() * st.modal_basis - eye).cwiseAbs().maxCoeff());
      eig_res = std::max(eig_res, (st.coupling * st.modal_basis - st.modal_basis * st.eigenvalues.asDiagonal())
                                      .cwiseAbs()
                                      .maxCoeff());
      for (std::size_t i = 1; i < n; ++i) worst_negative = std::max(worst_negative, st.eigenvalues[i]);
    }
  }
  r.checks.push_back(make_check("orthonormality", ortho, Relation::at_most, 1e-12));
  r.checks.push_back(make_check("eigen_residual", eig_res, Relation::at_most, 1e-12));
  r.checks.push_back(make_check("max_baroclinic_eigenvalue", worst_negative, Relation::at_most, -1e-10));

  const GridPtr g = build_grid(16, 32);
  const Field f = smooth_perturbation(g, 3, 11);
  const Field back = from_modal(to_modal(f, s.modal_basis), s.modal_basis);
  r.checks.push_back(make_check("modal_round_trip", max_abs_diff(f, back), Relation::at_most, 1e-12));
  return r;
}

SuiteResult verify_elliptic() {
  SuiteResult r{"elliptic", {}};
  const std::vector<int> levels{32, 64, 128};
  const ConvergenceTable bessel = convergence_bessel(levels);
  const ConvergenceTable manufactured = convergence_manufactured(levels);
  r.checks.push_back(make_check("bessel_error_128x256", bessel.error.back(), Relation::at_most, 1e-4));
  r.checks.push_back(make_check("bessel_min_order", min_order(bessel), Relation::at_least, 1.8));
  r.checks.push_back(make_check("manufactured_error_128x256", manufactured.error.back(), Relation::at_most, 1e-4));
  r.checks.push_back(make_check("manufactured_min_order", min_order(manufactured), Relation::at_least, 1.8));

  const LayerStack stack = LayerStack::build(3, 1.0);
  const GridPtr g = build_grid(64, 128);
  const Field q = 10.0 * smooth_perturbation(g, 3, 5);
  const CoupledSolution sol = solve_coupled(stack, q);
  const double res = coupled_residual(stack, sol.psi, sol.l, q);
  r.checks.push_back(make_check("coupled_relative_residual", res / (1.0 + q.max_abs()), Relation::at_most, 1e-8));
  double mass = 0.0;
  for (double m : integrate(sol.psi)) mass = std::max(mass, std::abs(m));
  r.checks.push_back(make_check("coupled_mass", mass, Relation::at_most, 1e-9));
  return r;
}

SuiteResult verify_advection() {
  SuiteResult r{"advection", {}};
  const ConvergenceTable rot = convergence_rotation({32, 64, 128});
  r.checks.push_back(make_check("rotation_l2_64x128", rot.error[1], Relation::at_most, 5e-3));
  r.checks.push_back(make_check("rotation_min_order", min_order(rot), Relation::at_least, 1.8));
  return r;
}

SuiteResult verify_conservation() {
  SuiteResult r{"conservation", {}};
  const ConservationRun cubic = conservation_run(64, 0.01, 100, InterpolationMode::cubic, 0.0);
  r.checks.push_back(make_check("boundary_spread", cubic.spread, Relation::at_most, 1e-8));
  r.checks.push_back(make_check("mass", cubic.mass, Relation::at_most, 1e-8));
  r.checks.push_back(make_check("energy_drift", cubic.energy_drift, Relation::at_most, 1e-3));
  r.checks.push_back(make_check("enstrophy_change", cubic.enstrophy_change, Relation::at_most, 1e-2));

  const ConservationRun mono = conservation_run(64, 0.01, 100, InterpolationMode::monotone, 0.0);
  r.checks.push_back(make_check("monotone_pv_excess", mono.q_inf_excess, Relation::at_most, 1e-12));
  r.checks.push_back(make_check("monotone_boundary_spread", mono.spread, Relation::at_most, 1e-8));
  r.checks.push_back(make_check("monotone_mass", mono.mass, Relation::at_most, 1e-8));
  r.checks.push_back(make_check("monotone_enstrophy_step_increase", mono.max_enstrophy_increase, Relation::at_most, 0.0));
  const ConservationRun forced = conservation_run(64, 0.01, 100, InterpolationMode::monotone, 0.5);
  r.checks.push_back(make_check("forced_pv_excess", forced.q_inf_excess, Relation::at_most, 1e-10));

  const ConservationRun fine = conservation_run(128, 0.005, 200, InterpolationMode::cubic, 0.0);
  r.checks.push_back(make_check("energy_drift_refinement_ratio", cubic.energy_drift / fine.energy_drift,
                                Relation::at_least, 2.0));
  r.checks.push_back(make_check("enstrophy_change_refinement_ratio", cubic.enstrophy_change / fine.enstrophy_change,
                                Relation::at_least, 2.0));

  // layer-independent data and forcing against a single-layer run
  const Forcing dipole = make_forcing({ForcingPreset::rotating_dipole, 0.0, 0.5, 2.0});
  const QgModel three = make_model(3, 64, dipole);
  const QgModel one = make_model(1, 64, dipole);
  State s3 = initial_state(three, blob_ic({1.0, 1.0, 1.0}));
  State s1 = initial_state(one, blob_ic({1.0}));
  double baroclinic = 0.0;
  double mismatch = 0.0;
  for (int n = 1; n <= 100; ++n) {
    s3 = three.advance(s3, 0.01);
    s1 = one.advance(s1, 0.01);
    const DiagnosticsRecord d = diagnostics(s3, three.stack());
    for (std::size_t k = 1; k < d.modal_energy.size(); ++k) baroclinic = std::max(baroclinic, std::abs(d.modal_energy[k]));
    const Field modes = to_modal(s3.psi, three.stack().modal_basis);
    const auto barotropic = modes.layer(0);
    const auto single = s1.psi.layer(0);
    for (std::size_t m = 0; m < single.size(); ++m) {
      mismatch = std::max(mismatch, std::abs(barotropic[m] / std::sqrt(3.0) - single[m]));
    }
  }
  r.checks.push_back(make_check("baroclinic_modal_energy", baroclinic, Relation::at_most, 1e-10));
  r.checks.push_back(make_check("barotropic_vs_single_layer", mismatch, Relation::at_most, 1e-8));
  return r;
}

SuiteResult verify_weak() {
  SuiteResult r{"weak", {}};
  const double t_end = 0.5;
  const std::vector<double> selector{1.0, -1.0, 0.5};
  const TestFunction phi{
      [&](std::size_t i, double x, double y, double t) {
        return selector[i] * (1.0 - x * x - y * y) * std::cos(kPi * t / (2.0 * t_end));
      },
      [&](std::size_t i, double x, double y, double t) {
        return -selector[i] * (1.0 - x * x - y * y) * kPi / (2.0 * t_end) * std::sin(kPi * t / (2.0 * t_end));
      }};
  InitialConfig ic;
  ic.preset = InitialPreset::radial;
  ic.amplitude = 1.0;
  ic.power = 2;
  ic.weights = {1.0, 0.5, -0.5};
  std::vector<double> residuals;
  for (int n : {16, 32, 64}) {
    const QgModel model = make_model(3, n);
    const int steps = 10 * n / 16;
    const double dt = t_end / steps;
    std::vector<State> traj{initial_state(model, ic)};
    for (int k = 0; k < steps; ++k) traj.push_back(model.advance(traj.back(), dt));
    residuals.push_back(weak_residual(traj, model, phi));
  }
  const auto ord = orders(residuals);
  r.checks.push_back(make_check("residual_16x32", residuals[0], Relation::at_most, 1e-2));
  r.checks.push_back(make_check("residual_64x128", residuals[2], Relation::at_most, residuals[0]));
  r.checks.push_back(make_check("residual_min_order", *std::ranges::min_element(ord), Relation::at_least, 1.0));
  return r;
}

SuiteResult verify_twin() {
  SuiteResult r{"twin", {}};
  const QgModel model = make_model(3, 64);
  const State base = initial_state(model, blob_ic(kBlobWeights));
  const Field pert = smooth_perturbation(model.grid_ptr(), 3, 7);
  const double delta = 1e-6;
  const double dt = 0.01;

  const TwinResult same = twin_divergence(model, base.q, pert, 0.0, dt, 50);
  double zero_norm = 0.0;
  for (const auto& row : same.norms) {
    for (double v : row) zero_norm = std::max(zero_norm, v);
  }
  r.checks.push_back(make_check("identical_runs_difference", zero_norm, Relation::equal, 0.0));

  const TwinResult one = twin_divergence(model, base.q, pert, delta, dt, 100);
  const TwinResult two = twin_divergence(model, base.q, pert, 2.0 * delta, dt, 50);
  double ratio_min = 1e300;
  double ratio_max = -1e300;
  for (std::size_t i = 0; i < 3; ++i) {
    const double ratio = two.norms[50][i] / one.norms[50][i];
    ratio_min = std::min(ratio_min, ratio);
    ratio_max = std::max(ratio_max, ratio);
  }
  r.checks.push_back(make_check("ratio_2delta_over_delta_min", ratio_min, Relation::at_least, 1.8));
  r.checks.push_back(make_check("ratio_2delta_over_delta_max", ratio_max, Relation::at_most, 2.2));
  double final_norm = 0.0;
  for (double v : one.norms.back()) final_norm = std::max(final_norm, v);
  r.checks.push_back(make_check("difference_at_t1_over_delta", final_norm / delta, Relation::at_most, 100.0));
  return r;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"modal", "elliptic", "advection", "conservation", "weak", "twin"};
  return names;
}

SuiteResult run_suite(const std::string& name) {
  if (name == "modal") return verify_modal();
  if (name == "elliptic") return verify_elliptic();
  if (name == "advection") return verify_advection();
  if (name == "conservation") return verify_conservation();
  if (name == "weak") return verify_weak();
  if (name == "twin") return verify_twin();
  throw std::invalid_argument("unknown suite '" + name + "'");
}

}  // namespace mlqg
