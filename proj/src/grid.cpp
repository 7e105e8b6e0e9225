#include "mlqg/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mlqg {

namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

struct Grid::FftPlans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  std::map<int, fftw_plan> refined;  // keyed by refinement factor
  std::mutex refined_mutex;

  ~FftPlans() {
    std::lock_guard lock(planner_mutex());
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
    for (auto& [k, p] : refined) fftw_destroy_plan(p);
  }
};

Grid::Grid(int n_r, int n_theta)
    : n_r_(n_r),
      n_theta_(n_theta),
      dr_(1.0 / n_r),
      dtheta_(2.0 * std::numbers::pi / n_theta),
      spectral_(is_power_of_two(n_theta)),
      plans_(std::make_unique<FftPlans>()) {
  if (n_r < 8) throw std::invalid_argument("grid: n_r must be >= 8, got " + std::to_string(n_r));
  if (n_theta < 16) throw std::invalid_argument("grid: n_theta must be >= 16, got " + std::to_string(n_theta));
  if (n_theta % 2 != 0) throw std::invalid_argument("grid: n_theta must be even, got " + std::to_string(n_theta));

  cos_.resize(n_theta);
  sin_.resize(n_theta);
  for (int k = 0; k < n_theta; ++k) {
    cos_[k] = std::cos(theta(k));
    sin_[k] = std::sin(theta(k));
  }

  std::vector<double> real(n_theta);
  std::vector<std::complex<double>> modes(n_modes());
  std::lock_guard lock(planner_mutex());
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans_->r2c = fftw_plan_dft_r2c_1d(n_theta, real.data(), as_fftw(modes.data()), flags);
  plans_->c2r = fftw_plan_dft_c2r_1d(n_theta, as_fftw(modes.data()), real.data(), flags);
  if (!plans_->r2c || !plans_->c2r) throw std::runtime_error("grid: FFTW planning failed");
}

Grid::~Grid() = default;

double Grid::second_derivative_symbol(int m) const {
  if (spectral_) return -static_cast<double>(m) * m;
  double s = std::sin(0.5 * m * dtheta_);
  return -4.0 * s * s / (dtheta_ * dtheta_);
}

double Grid::first_derivative_symbol(int m) const {
  if (spectral_) return 2 * m == n_theta_ ? 0.0 : static_cast<double>(m);
  return std::sin(m * dtheta_) / dtheta_;
}

void Grid::forward(std::span<const double> ring, std::span<std::complex<double>> modes) const {
  fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(ring.data()), as_fftw(modes.data()));
}

void Grid::inverse(std::span<const std::complex<double>> modes, std::span<double> ring) const {
  // c2r overwrites its input
  std::vector<std::complex<double>> scratch(modes.begin(), modes.end());
  fftw_execute_dft_c2r(plans_->c2r, as_fftw(scratch.data()), ring.data());
  const double scale = 1.0 / n_theta_;
  for (double& v : ring) v *= scale;
}

void Grid::refine(std::span<const double> ring, int refinement, std::span<double> fine) const {
  const int n_fine = refinement * n_theta_;
  fftw_plan plan = nullptr;
  {
    std::lock_guard lock(plans_->refined_mutex);
    auto it = plans_->refined.find(refinement);
    if (it == plans_->refined.end()) {
      std::vector<std::complex<double>> in(n_fine / 2 + 1);
      std::vector<double> out(n_fine);
      std::lock_guard plan_lock(planner_mutex());
      plan = fftw_plan_dft_c2r_1d(n_fine, as_fftw(in.data()), out.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
      if (!plan) throw std::runtime_error("grid: FFTW planning failed");
      plans_->refined.emplace(refinement, plan);
    } else {
      plan = it->second;
    }
  }

  std::vector<std::complex<double>> modes(n_fine / 2 + 1, {0.0, 0.0});
  forward(ring, std::span(modes.data(), n_modes()));
  // the Nyquist mode is shared between +n/2 and -n/2 on the finer ring
  modes[n_theta_ / 2] *= 0.5;
  fftw_execute_dft_c2r(plan, as_fftw(modes.data()), fine.data());
  const double scale = 1.0 / n_theta_;
  for (double& v : fine) v *= scale;
}

GridPtr build_grid(int n_r, int n_theta) { return std::make_shared<const Grid>(n_r, n_theta); }

}  // namespace mlqg
