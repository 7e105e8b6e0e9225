#include "mlqg/operators.hpp"
#include "mlqg/presets.hpp"
#include "mlqg/run.hpp"
#include "mlqg/sim.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mlqg;

namespace {

Field gaussian(const GridPtr& g, std::vector<double> w) {
  return Field::from_function(g, w.size(), [w](std::size_t i, double x, double y) {
    return w[i] * std::exp(-((x - 0.3) * (x - 0.3) + (y - 0.1) * (y - 0.1)) / (2 * 0.15 * 0.15));
  });
}

double consistency(const State& s, const LayerStack& stack) {
  Field q = laplacian(s.psi, s.l.values());
  q += apply_layer_matrix(stack.coupling, s.psi);
  return max_abs_diff(q, s.q) / (1.0 + s.q.max_abs());
}

double ring_variation(const Field& f) {
  const Grid& g = f.grid();
  double v = 0.0;
  for (std::size_t i = 0; i < f.n_layers(); ++i) {
    for (int j = 0; j < g.n_r(); ++j) {
      for (int k = 1; k < g.n_theta(); ++k) v = std::max(v, std::abs(f.at(i, j, k) - f.at(i, j, 0)));
    }
  }
  return v;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

class Sim : public ::testing::Test {
 protected:
  GridPtr grid = build_grid(32, 64);
  QgModel model{LayerStack::build(3, 1.0), grid};
};

TEST_F(Sim, ZeroInitialPv) {
  const State s = model.initialize_from_pv(Field(grid, 3));
  EXPECT_EQ(s.psi.max_abs(), 0.0);
  for (double l : s.l.l) EXPECT_EQ(l, 0.0);
}

TEST_F(Sim, RadialInitialPvGivesRadialStreamfunction) {
  const Field q0 = Field::from_function(grid, 3, [](std::size_t i, double x, double y) {
    return (1.0 + i) * std::cos(2.0 * (x * x + y * y));
  });
  const State s = model.initialize_from_pv(q0);
  EXPECT_LE(ring_variation(s.psi), 1e-13);
}

TEST_F(Sim, ManufacturedInitialPv) {
  const ManufacturedCase mc{2, {1.0, 0.5, -0.25}};
  const GridPtr g = build_grid(64, 128);
  const QgModel m(LayerStack::build(3, 1.0), g);
  const Field q0 = Field::from_function(g, 3, [&](std::size_t i, double x, double y) { return mc.pv(m.stack(), i, x, y); });
  const State s = m.initialize_from_pv(q0);
  const Field exact = Field::from_function(g, 3, [&](std::size_t i, double x, double y) {
    const double w[3] = {1.0, 0.5, -0.25};
    return w[i] * (oracle::bump(x, y) + 0.5 * oracle::quad_mode(x, y) + 0.5 * oracle::dipole_mode(x, y));
  });
  EXPECT_LE(max_abs_diff(s.psi, exact), 5e-4);
}

TEST_F(Sim, StreamfunctionEntryProjectsOntoConstraints) {
  const State s = model.initialize_from_streamfunction([](std::size_t i, double x, double y) {
    return (1.0 + i) * oracle::bump(x, y) + 2.0;
  });
  for (double m : integrate(s.psi)) EXPECT_LE(std::abs(m), 1e-12);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(s.l.l[i], -(1.0 + i) / 3.0, 1e-2);
  EXPECT_LE(consistency(s, model.stack()), 1e-6);
}

TEST_F(Sim, RejectsNonFiniteInitialData) {
  Field q(grid, 3);
  q.values()[3] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(model.initialize_from_pv(q), std::invalid_argument);
}

TEST_F(Sim, ZeroStateIsFixedPoint) {
  const State s0 = model.initialize_from_pv(Field(grid, 3));
  const PicardResult r = model.picard_step(s0, 0.01);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_EQ(r.state.q.max_abs(), 0.0);
  EXPECT_EQ(r.state.psi.max_abs(), 0.0);
  EXPECT_DOUBLE_EQ(r.state.time, 0.01);
}

TEST(SimStep, RadialPvIsSteady) {
  const GridPtr g = build_grid(64, 128);
  const QgModel m(LayerStack::build(3, 1.0), g);
  const Field q0 = Field::from_function(g, 3, [](std::size_t i, double x, double y) {
    const double s = 1.0 - x * x - y * y;
    return (1.0 - 0.6 * i) * s * s;
  });
  const State s0 = m.initialize_from_pv(q0);
  const PicardResult r = m.picard_step(s0, 0.01);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(max_abs_diff(r.state.q, q0), 1e-6);
}

TEST(SimStep, PicardContractsGeometrically) {
  const GridPtr g = build_grid(32, 64);
  const QgModel m(LayerStack::build(3, 1.0), g);
  const State s0 = m.initialize_from_pv(gaussian(g, {1.0, 0.6, -0.4}));
  const PicardResult r = m.picard_step(s0, 0.02);
  ASSERT_TRUE(r.converged);
  ASSERT_GE(r.history.size(), 3u);
  for (std::size_t k = 1; k < r.history.size(); ++k) EXPECT_LT(r.history[k], r.history[k - 1]);
}

TEST(SimStep, StateInvariantsHoldAfterSteps) {
  const GridPtr g = build_grid(32, 64);
  const Forcing f = make_forcing({ForcingPreset::rotating_dipole, 0.0, 0.5, 2.0});
  const QgModel m(LayerStack::build(3, 1.0), g, f);
  State s = m.initialize_from_pv(gaussian(g, {1.0, 0.6, -0.4}));
  for (int n = 0; n < 5; ++n) {
    s = m.advance(s, 0.02);
    EXPECT_LE(consistency(s, m.stack()), 1e-6);
    for (double mass : integrate(s.psi)) EXPECT_LE(std::abs(mass), 1e-8);
    EXPECT_LE(boundary_spread(s, m.stack()), 1e-8);
  }
  EXPECT_NEAR(s.time, 0.1, 1e-15);
}

TEST(SimStep, BarotropicDataMatchesSingleLayer) {
  const GridPtr g = build_grid(32, 64);
  const Forcing f = make_forcing({ForcingPreset::rotating_dipole, 0.0, 0.5, 2.0});
  const QgModel three(LayerStack::build(3, 1.0), g, f);
  const QgModel one(LayerStack::build(1, 1.0), g, f);
  State a = three.initialize_from_pv(gaussian(g, {1.0, 1.0, 1.0}));
  State b = one.initialize_from_pv(gaussian(g, {1.0}));
  for (int n = 0; n < 10; ++n) {
    a = three.advance(a, 0.01);
    b = one.advance(b, 0.01);
  }
  const DiagnosticsRecord d = diagnostics(a, three.stack());
  EXPECT_LE(std::abs(d.modal_energy[1]), 1e-12);
  EXPECT_LE(std::abs(d.modal_energy[2]), 1e-12);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t n = 0; n < g->size(); ++n) EXPECT_NEAR(a.psi.layer(i)[n], b.psi.layer(0)[n], 1e-12);
  }
}

TEST(SimStep, NonConvergenceIsReported) {
  const GridPtr g = build_grid(16, 32);
  StepperOptions opts;
  opts.picard_max_iter = 1;
  opts.max_halvings = 2;
  const QgModel m(LayerStack::build(2, 1.0), g, {}, opts);
  const State s0 = m.initialize_from_pv(gaussian(g, {1.0, -1.0}));
  const PicardResult r = m.picard_step(s0, 0.05);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_GT(r.residual, opts.picard_tol);
  EXPECT_THROW(m.advance(s0, 0.05), NumericalFailure);
}

TEST(SimStep, HalvingRecoversFromLargeStep) {
  const GridPtr g = build_grid(16, 32);
  StepperOptions opts;
  opts.picard_max_iter = 4;
  opts.picard_tol = 1e-8;
  const QgModel m(LayerStack::build(2, 1.0), g, {}, opts);
  const State s0 = m.initialize_from_pv(gaussian(g, {4.0, -4.0}));
  const double dt = 0.4;
  ASSERT_FALSE(m.picard_step(s0, dt).converged);
  const State s = m.advance(s0, dt);
  EXPECT_NEAR(s.time, dt, 1e-15);
  EXPECT_LE(consistency(s, m.stack()), 1e-6);
}

TEST(SimStep, InvalidOptionsRejected) {
  const GridPtr g = build_grid(16, 32);
  StepperOptions opts;
  opts.picard_tol = 0.0;
  EXPECT_THROW(QgModel(LayerStack::build(1, 1.0), g, {}, opts), std::invalid_argument);
  opts = {};
  opts.picard_max_iter = 0;
  EXPECT_THROW(QgModel(LayerStack::build(1, 1.0), g, {}, opts), std::invalid_argument);
}

TEST(Diagnostics, ZeroState) {
  const GridPtr g = build_grid(16, 32);
  const QgModel m(LayerStack::build(3, 1.0), g);
  const DiagnosticsRecord d = diagnostics(m.initialize_from_pv(Field(g, 3)), m.stack());
  EXPECT_EQ(d.total_energy, 0.0);
  EXPECT_EQ(d.coupling_energy, 0.0);
  for (const auto& l : d.layers) EXPECT_EQ(l.energy, 0.0);
}

TEST(Diagnostics, ParaboloidEnergy) {
  // psi = 1/2 - r^2: 1/2 int |grad psi|^2 = 1/2 int 4 r^2 dA = pi
  const GridPtr g = build_grid(64, 128);
  const QgModel m(LayerStack::build(1, 1.0), g);
  const State s = m.initialize_from_pv(Field(g, 1, -4.0));
  const DiagnosticsRecord d = diagnostics(s, m.stack());
  EXPECT_NEAR(d.layers[0].energy, oracle::pi, 2e-3);
  EXPECT_NEAR(d.layers[0].circulation, -4.0 * oracle::pi, 1e-3);
  EXPECT_NEAR(d.layers[0].boundary_l, -0.5, 1e-3);
}

TEST(Diagnostics, BarotropicStateHasNoCouplingEnergy) {
  const GridPtr g = build_grid(32, 64);
  const QgModel m(LayerStack::build(3, 1.0), g);
  const DiagnosticsRecord d = diagnostics(m.initialize_from_pv(gaussian(g, {1.0, 1.0, 1.0})), m.stack());
  EXPECT_LE(d.coupling_energy, 1e-28 * d.total_energy);
}

TEST(Diagnostics, ModalEnergiesSumToTotal) {
  const GridPtr g = build_grid(32, 64);
  const QgModel m(LayerStack::build(3, 1.0), g);
  const DiagnosticsRecord d = diagnostics(m.initialize_from_pv(gaussian(g, {1.0, 0.6, -0.4})), m.stack());
  EXPECT_GT(d.total_energy, 0.0);
  EXPECT_GT(d.coupling_energy, 0.0);
  double sum = 0.0;
  for (double e : d.modal_energy) {
    EXPECT_GE(e, 0.0);
    sum += e;
  }
  EXPECT_NEAR(sum, d.total_energy, 1e-12 * d.total_energy);
}

TEST(WeakResidual, ZeroTrajectory) {
  const GridPtr g = build_grid(16, 32);
  const QgModel m(LayerStack::build(2, 1.0), g);
  std::vector<State> traj{m.initialize_from_pv(Field(g, 2))};
  for (int k = 0; k < 3; ++k) traj.push_back(m.advance(traj.back(), 0.1));
  const TestFunction phi{[](std::size_t, double x, double y, double t) { return (1 - x * x - y * y) * (0.3 - t); },
                         [](std::size_t, double x, double y, double) { return -(1 - x * x - y * y); }};
  EXPECT_LE(weak_residual(traj, m, phi), 1e-15);
}

TEST(WeakResidual, ZeroTestFunction) {
  const GridPtr g = build_grid(16, 32);
  const QgModel m(LayerStack::build(2, 1.0), g);
  std::vector<State> traj{m.initialize_from_pv(gaussian(g, {1.0, -0.5}))};
  for (int k = 0; k < 3; ++k) traj.push_back(m.advance(traj.back(), 0.05));
  const TestFunction zero{[](std::size_t, double, double, double) { return 0.0; },
                          [](std::size_t, double, double, double) { return 0.0; }};
  EXPECT_EQ(weak_residual(traj, m, zero), 0.0);
}

TEST(WeakResidual, SteadyRadialSolutionConverges) {
  const double t_end = 0.5;
  const TestFunction phi{
      [&](std::size_t i, double x, double y, double t) {
        return (i == 0 ? 1.0 : 0.0) * (1 - x * x - y * y) * std::cos(oracle::pi * t / (2 * t_end));
      },
      [&](std::size_t i, double x, double y, double t) {
        return -(i == 0 ? 1.0 : 0.0) * (1 - x * x - y * y) * oracle::pi / (2 * t_end) *
               std::sin(oracle::pi * t / (2 * t_end));
      }};
  std::vector<double> res;
  for (int n : {16, 32}) {
    const GridPtr g = build_grid(n, 2 * n);
    const QgModel m(LayerStack::build(2, 1.0), g);
    const Field q0 = Field::from_function(g, 2, [](std::size_t i, double x, double y) {
      return (i == 0 ? 1.0 : -0.5) * (1 - x * x - y * y);
    });
    const int steps = 5 * n / 16;
    std::vector<State> traj{m.initialize_from_pv(q0)};
    for (int k = 0; k < steps; ++k) traj.push_back(m.advance(traj.back(), t_end / steps));
    res.push_back(weak_residual(traj, m, phi));
  }
  EXPECT_GE(oracle::observed_order(res[0], res[1]), 1.0);
}

TEST(Twin, IdenticalRunsAndRecoveredShift) {
  const GridPtr g = build_grid(16, 32);
  const QgModel m(LayerStack::build(3, 1.0), g);
  const Field q0 = gaussian(g, {1.0, 0.6, -0.4});
  const Field p = smooth_perturbation(g, 3, 4);
  const TwinResult same = twin_divergence(m, q0, p, 0.0, 0.02, 5);
  for (const auto& row : same.norms) {
    for (double v : row) EXPECT_EQ(v, 0.0);
  }
  const TwinResult diff = twin_divergence(m, q0, p, 1e-5, 0.02, 5);
  ASSERT_EQ(diff.times.size(), 6u);
  EXPECT_GT(diff.norms.back()[0], 0.0);
  // h# = h - l_h has mean -l_h, so the recovered shift is the boundary difference
  const State a = m.initialize_from_pv(q0);
  Field qb = q0;
  qb += 1e-5 * p;
  const State b = m.initialize_from_pv(qb);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(diff.shift[0][i], a.l.l[i] - b.l.l[i], 1e-3 * std::abs(a.l.l[i] - b.l.l[i]));
}

TEST(Perturbation, SeededZeroMeanUnitScale) {
  const GridPtr g = build_grid(16, 32);
  const Field a = smooth_perturbation(g, 2, 42);
  const Field b = smooth_perturbation(g, 2, 42);
  const Field c = smooth_perturbation(g, 2, 43);
  EXPECT_EQ(max_abs_diff(a, b), 0.0);
  EXPECT_GT(max_abs_diff(a, c), 0.0);
  EXPECT_DOUBLE_EQ(a.max_abs(), 1.0);
  for (double m : integrate(a)) EXPECT_LE(std::abs(m), 1e-14);
}

TEST(Presets, ForcingPresets) {
  const Forcing none = make_forcing({});
  EXPECT_FALSE(static_cast<bool>(none));
  const Forcing c = make_forcing({ForcingPreset::constant, 0.25, 0.0, 0.0});
  EXPECT_TRUE(c.uniform);
  EXPECT_EQ(c(1, 0.3, 0.2, 5.0), 0.25);
  const Forcing d = make_forcing({ForcingPreset::rotating_dipole, 0.0, 2.0, oracle::pi});
  EXPECT_FALSE(d.uniform);
  // A r (1 - r^2) cos(theta - omega t) at r = 0.5, theta = 0, t = 1 -> 2 * 0.5 * 0.75 * cos(-pi)
  EXPECT_NEAR(d(0, 0.5, 0.0, 1.0), -0.75, 1e-14);
}

TEST(Run, WritesDeterministicOutputs) {
  SimConfig c;
  c.n_layers = 2;
  c.n_r = 16;
  c.n_theta = 32;
  c.dt = 0.05;
  c.t_end = 0.2;
  c.snapshot_every = 2;
  c.ic.weights = {1.0, -0.5};
  c.forcing = {ForcingPreset::rotating_dipole, 0.0, 0.5, 1.0};
  const auto base = std::filesystem::temp_directory_path() / "mlqg_run_test";
  std::filesystem::remove_all(base);
  int calls = 0;
  const RunResult r = run(c, base / "a", [&](int, const State&) { ++calls; });
  run(c, base / "b");
  EXPECT_EQ(r.steps, 4);
  EXPECT_EQ(calls, 5);
  EXPECT_EQ(r.diagnostics.size(), 5u);
  for (const char* name : {"diagnostics.csv", "snapshot_0.csv", "snapshot_2.csv", "snapshot_4.csv", "manifest.txt"}) {
    ASSERT_TRUE(std::filesystem::exists(base / "a" / name)) << name;
    EXPECT_EQ(slurp(base / "a" / name), slurp(base / "b" / name)) << name;
  }
  const std::string diag = slurp(base / "a" / "diagnostics.csv");
  EXPECT_EQ(diag.substr(0, diag.find('\n')),
            "time,energy_0,enstrophy_0,pv_min_0,pv_max_0,pv_inf_0,circulation_0,mass_0,boundary_l_0,"
            "energy_1,enstrophy_1,pv_min_1,pv_max_1,pv_inf_1,circulation_1,mass_1,boundary_l_1,"
            "total_energy,coupling_energy,modal_energy_0,modal_energy_1");
  const std::string snap = slurp(base / "a" / "snapshot_2.csv");
  EXPECT_EQ(snap.substr(0, snap.find('\n')), "layer,ir,itheta,r,theta,psi,q");
  EXPECT_EQ(std::count(snap.begin(), snap.end(), '\n'), 1 + 2 * 16 * 32);
  std::filesystem::remove_all(base);
}

TEST(Run, FormatsSeventeenDigits) {
  EXPECT_EQ(format_value(0.1), "0.10000000000000001");
  EXPECT_EQ(format_value(-2.0), "-2");
}
