#include "mlqg/grid.hpp"
#include "mlqg/interpolation.hpp"
#include "mlqg/operators.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace mlqg;

namespace {

std::vector<Point> random_points(int count, double r_min, double r_max, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> pts;
  while (static_cast<int>(pts.size()) < count) {
    const double x = 2.0 * u(rng) - 1.0;
    const double y = 2.0 * u(rng) - 1.0;
    const double r = std::hypot(x, y);
    if (r >= r_min && r <= r_max) pts.push_back({x, y});
  }
  return pts;
}

Field sample(const GridPtr& g, double (*fn)(double, double)) {
  return Field::from_function(g, 1, [fn](std::size_t, double x, double y) { return fn(x, y); });
}

}  // namespace

TEST(Grid, SmallGrid) {
  const GridPtr g = build_grid(8, 16);
  EXPECT_EQ(g->size(), 128u);
  for (int j = 0; j < g->n_r(); ++j) {
    EXPECT_GT(g->r(j), 0.0);
    EXPECT_LT(g->r(j), 1.0);
  }
  EXPECT_DOUBLE_EQ(g->r(0), 0.5 / 8);
  EXPECT_DOUBLE_EQ(g->theta(4), oracle::pi / 2);
}

TEST(Grid, WeightsSumToArea) {
  const GridPtr g = build_grid(64, 128);
  double total = 0.0;
  for (int j = 0; j < g->n_r(); ++j) total += g->weight(j) * g->n_theta();
  EXPECT_NEAR(total, oracle::pi, 1e-4);
}

TEST(Grid, RejectsInvalidSizes) {
  EXPECT_THROW(build_grid(8, 15), std::invalid_argument);
  EXPECT_THROW(build_grid(7, 16), std::invalid_argument);
  EXPECT_THROW(build_grid(8, 14), std::invalid_argument);
}

TEST(Grid, OppositeNode) {
  const GridPtr g = build_grid(8, 16);
  EXPECT_EQ(g->opposite(0), 8);
  EXPECT_EQ(g->opposite(12), 4);
}

TEST(Integrate, Constant) {
  const GridPtr g = build_grid(64, 128);
  EXPECT_NEAR(integrate(Field(g, 1, 1.0))[0], oracle::pi, 1e-3);
}

TEST(Integrate, OddFunctionVanishes) {
  const GridPtr g = build_grid(64, 128);
  EXPECT_NEAR(integrate(sample(g, [](double x, double) { return x; }))[0], 0.0, 1e-12);
}

TEST(Integrate, Paraboloid) {
  const GridPtr g = build_grid(64, 128);
  EXPECT_NEAR(integrate(sample(g, [](double x, double y) { return 1.0 - x * x - y * y; }))[0], oracle::pi / 2, 1e-3);
}

TEST(Gradient, PerpOfLinear) {
  const GridPtr g = build_grid(32, 64);
  const VectorField u = perp_gradient(sample(g, [](double x, double) { return x; }));
  for (std::size_t n = 0; n < g->size(); ++n) {
    EXPECT_NEAR(u.x.values()[n], 0.0, 1e-12);
    EXPECT_NEAR(u.y.values()[n], 1.0, 1e-12);
  }
}

TEST(Gradient, SolidBodyRotation) {
  const GridPtr g = build_grid(32, 64);
  const Field psi = sample(g, [](double x, double y) { return 0.5 * (x * x + y * y); });
  const std::vector<double> boundary{0.5};
  const VectorField u = perp_gradient(psi, boundary);
  for (int j = 0; j < g->n_r(); ++j) {
    for (int k = 0; k < g->n_theta(); ++k) {
      const double x = g->r(j) * g->cos_theta(k);
      const double y = g->r(j) * g->sin_theta(k);
      EXPECT_NEAR(u.x.at(0, j, k), -y, 1e-12);
      EXPECT_NEAR(u.y.at(0, j, k), x, 1e-12);
    }
  }
}

TEST(Gradient, CubicAgainstHandDerivative) {
  // f = r^3 cos(theta) = x^3 + x y^2: grad f = (3x^2 + y^2, 2xy)
  double prev = 0.0;
  for (int n : {16, 32, 64}) {
    const GridPtr g = build_grid(n, 2 * n);
    const VectorField d = gradient(sample(g, [](double x, double y) { return x * x * x + x * y * y; }));
    double err = 0.0;
    for (int j = 0; j < g->n_r(); ++j) {
      for (int k = 0; k < g->n_theta(); ++k) {
        const double x = g->r(j) * g->cos_theta(k);
        const double y = g->r(j) * g->sin_theta(k);
        err = std::max(err, std::abs(d.x.at(0, j, k) - (3 * x * x + y * y)));
        err = std::max(err, std::abs(d.y.at(0, j, k) - 2 * x * y));
      }
    }
    EXPECT_LE(err, 10.0 / (n * n));
    if (prev > 0.0) {
      EXPECT_GE(oracle::observed_order(prev, err), 1.8);
    }
    prev = err;
  }
}

TEST(Gradient, OrthogonalToPerpGradient) {
  const GridPtr g = build_grid(16, 32);
  const Field f = sample(g, [](double x, double y) { return std::exp(x) * std::sin(2 * y) + x * y; });
  const VectorField a = gradient(f);
  const VectorField b = perp_gradient(f);
  for (std::size_t n = 0; n < g->size(); ++n) {
    EXPECT_LE(std::abs(a.x.values()[n] * b.x.values()[n] + a.y.values()[n] * b.y.values()[n]), 1e-12);
  }
}

TEST(Gradient, ConvergesAtSecondOrder) {
  auto fn = [](double x, double y) { return std::exp(x) * std::sin(2 * y); };
  double prev = 0.0;
  for (int n : {16, 32, 64, 128}) {
    const GridPtr g = build_grid(n, 2 * n);
    const VectorField d = gradient(sample(g, fn));
    double err = 0.0;
    for (int j = 0; j < g->n_r(); ++j) {
      for (int k = 0; k < g->n_theta(); ++k) {
        const double x = g->r(j) * g->cos_theta(k);
        const double y = g->r(j) * g->sin_theta(k);
        err = std::max(err, std::abs(d.x.at(0, j, k) - std::exp(x) * std::sin(2 * y)));
        err = std::max(err, std::abs(d.y.at(0, j, k) - 2 * std::exp(x) * std::cos(2 * y)));
      }
    }
    if (prev > 0.0) {
      EXPECT_GE(oracle::observed_order(prev, err), 1.8) << n;
    }
    prev = err;
  }
}

TEST(Laplacian, ParaboloidInterior) {
  const GridPtr g = build_grid(32, 64);
  const std::vector<double> boundary{0.0};
  const Field lap = laplacian(sample(g, [](double x, double y) { return 1.0 - x * x - y * y; }), boundary);
  for (double v : lap.values()) EXPECT_NEAR(v, -4.0, 1e-10);
}

TEST(Laplacian, ConstantIsHarmonic) {
  const GridPtr g = build_grid(32, 64);
  const std::vector<double> boundary{2.5};
  const Field lap = laplacian(Field(g, 1, 2.5), boundary);
  for (double v : lap.values()) EXPECT_NEAR(v, 0.0, 1e-12);
  const Field lap_open = laplacian(Field(g, 1, 2.5));
  for (double v : lap_open.values()) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Laplacian, QuadraticHarmonic) {
  // r^2 cos(2 theta) = x^2 - y^2
  for (int n : {16, 32}) {
    const GridPtr g = build_grid(n, 2 * n);
    const Field lap = laplacian(sample(g, [](double x, double y) { return x * x - y * y; }));
    EXPECT_LE(lap.max_abs(), 1e-9) << n;
  }
}

TEST(Laplacian, InteriorConvergesAtSecondOrder) {
  // r >= 1/4 and away from the last ring: the centre rings carry an h^2/r
  // truncation error and the last ring the one-sided boundary closure
  double prev = 0.0;
  for (int n : {16, 32, 64, 128}) {
    const GridPtr g = build_grid(n, 2 * n);
    const Field f = Field::from_function(g, 1, [](std::size_t, double x, double y) {
      return oracle::bump(x, y) + oracle::quad_mode(x, y) + oracle::dipole_mode(x, y);
    });
    const std::vector<double> boundary{-1.0 / 3.0};
    const Field lap = laplacian(f, boundary);
    double err = 0.0;
    for (int j = 0; j + 1 < g->n_r(); ++j) {
      if (g->r(j) < 0.25) continue;
      for (int k = 0; k < g->n_theta(); ++k) {
        const double x = g->r(j) * g->cos_theta(k);
        const double y = g->r(j) * g->sin_theta(k);
        const double exact =
            oracle::bump_laplacian(x, y) + oracle::quad_mode_laplacian(x, y) + oracle::dipole_mode_laplacian(x, y);
        err = std::max(err, std::abs(lap.at(0, j, k) - exact));
      }
    }
    if (prev > 0.0) {
      EXPECT_GE(oracle::observed_order(prev, err), 1.8) << n;
    }
    prev = err;
  }
}

TEST(Laplacian, IntegrationByPartsDefectConverges) {
  auto f = [](double x, double y) { return (1.0 - x * x - y * y) * (1.0 + x + 0.5 * y * y); };
  auto h = [](double x, double y) { return (1.0 - x * x - y * y) * std::cos(x - y); };
  double prev = 0.0;
  for (int n : {16, 32, 64, 128}) {
    const GridPtr g = build_grid(n, 2 * n);
    const Field ff = Field::from_function(g, 1, [&](std::size_t, double x, double y) { return f(x, y); });
    const Field hh = Field::from_function(g, 1, [&](std::size_t, double x, double y) { return h(x, y); });
    const std::vector<double> zero{0.0};
    const double defect =
        std::abs(inner_product(laplacian(ff, zero), hh)[0] - inner_product(laplacian(hh, zero), ff)[0]);
    if (prev > 0.0) {
      EXPECT_GE(oracle::observed_order(prev, defect), 1.8) << n;
    }
    prev = defect;
  }
}

TEST(Interpolate, NodeValues) {
  const GridPtr g = build_grid(16, 32);
  const Field f = sample(g, [](double x, double y) { return std::sin(3 * x) * std::exp(y); });
  const Interpolator interp(f);
  for (int j = 0; j < g->n_r(); ++j) {
    for (int k = 0; k < g->n_theta(); ++k) {
      EXPECT_NEAR(interp.evaluate(0, g->r(j), g->theta(k)), f.at(0, j, k), 1e-13);
    }
  }
}

TEST(Interpolate, ReproducesLinear) {
  const GridPtr g = build_grid(64, 128);
  const Field f = sample(g, [](double x, double y) { return x + 2 * y; });
  const auto pts = random_points(500, 0.0, 0.999, 1);
  const auto v = interpolate(f, pts);
  for (std::size_t n = 0; n < pts.size(); ++n) EXPECT_NEAR(v[0][n], pts[n].x + 2 * pts[n].y, 1e-10);
}

TEST(Interpolate, ReproducesCubicAwayFromPoleAndBoundary) {
  const GridPtr g = build_grid(64, 128);
  auto cubic = [](double x, double y) { return x * x * x - 2 * x * y * y + 0.5 * y * y + x - 3 * y * y * y; };
  const Field f = Field::from_function(g, 1, [&](std::size_t, double x, double y) { return cubic(x, y); });
  const auto pts = random_points(500, 0.1, 0.9, 2);
  const auto v = interpolate(f, pts);
  for (std::size_t n = 0; n < pts.size(); ++n) EXPECT_NEAR(v[0][n], cubic(pts[n].x, pts[n].y), 1e-8);
}

TEST(Interpolate, BoundaryClosureUsesBoundaryValue) {
  const GridPtr g = build_grid(32, 64);
  const Field f = sample(g, [](double x, double y) { return 1.0 - x * x - y * y; });
  const std::vector<double> boundary{0.0};
  const Interpolator interp(f, boundary);
  EXPECT_NEAR(interp(0, {1.0, 0.0}), 0.0, 1e-12);
  EXPECT_NEAR(interp(0, {0.0, -0.995}), 1.0 - 0.995 * 0.995, 1e-12);
}

TEST(Interpolate, PeriodicInTheta) {
  const GridPtr g = build_grid(16, 32);
  const Field f = sample(g, [](double x, double y) { return std::sin(3 * x) * std::exp(y); });
  for (auto mode : {InterpolationMode::cubic, InterpolationMode::monotone}) {
    const Interpolator interp(f, {}, mode);
    for (double th : {0.0, 0.3, 2.0, 6.2}) {
      for (double r : {0.01, 0.4, 0.97}) {
        const double a = interp.evaluate(0, r, th);
        EXPECT_NEAR(interp.evaluate(0, r, th + 2 * oracle::pi), a, 1e-13);
        EXPECT_NEAR(interp.evaluate(0, r, th - 2 * oracle::pi), a, 1e-13);
      }
    }
  }
}

TEST(Interpolate, AcceptsToleranceRingRejectsOutside) {
  const GridPtr g = build_grid(16, 32);
  const Field f(g, 1, 1.0);
  const Interpolator interp(f);
  EXPECT_NO_THROW(interp(0, {1.0 + 4e-13, 0.0}));
  EXPECT_THROW(interp(0, {1.0 + 1e-9, 0.0}), std::domain_error);
  EXPECT_THROW(interp(0, {0.8, 0.8}), std::domain_error);
}

TEST(Interpolate, MonotoneStaysWithinLocalData) {
  const GridPtr g = build_grid(32, 64);
  const Field f = sample(g, [](double x, double y) { return (x > 0.1 && std::abs(y) < 0.3) ? 1.0 : 0.0; });
  const Interpolator cubic(f, {}, InterpolationMode::cubic);
  const Interpolator mono(f, {}, InterpolationMode::monotone);
  bool cubic_overshoots = false;
  for (const auto& p : random_points(2000, 0.0, 0.999, 3)) {
    const double v = mono(0, p);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    const double c = cubic(0, p);
    cubic_overshoots = cubic_overshoots || c > 1.0 + 1e-6 || c < -1e-6;
  }
  EXPECT_TRUE(cubic_overshoots);
}

TEST(Field, RejectsLayerMismatchInArithmetic) {
  const GridPtr g = build_grid(8, 16);
  Field a(g, 2);
  const Field b(g, 3);
  EXPECT_THROW(a += b, std::invalid_argument);
}

TEST(Field, FiniteCheck) {
  const GridPtr g = build_grid(8, 16);
  Field a(g, 1);
  EXPECT_TRUE(a.all_finite());
  a.values()[5] = std::nan("");
  EXPECT_FALSE(a.all_finite());
}
