#include "mlqg/presets.hpp"

#include <cmath>

namespace mlqg {

double ManufacturedCase::shape(double x, double y) const {
  const double r2 = x * x + y * y;
  const double s = 1.0 - r2;
  double v = s * s - 1.0 / 3.0;
  if (case_id == 2) v += 0.5 * (x * x - y * y) * s + 0.5 * x * s;
  return v;
}

double ManufacturedCase::shape_laplacian(double x, double y) const {
  const double r2 = x * x + y * y;
  double v = -8.0 + 16.0 * r2;
  if (case_id == 2) v += -6.0 * (x * x - y * y) - 4.0 * x;
  return v;
}

double ManufacturedCase::psi(std::size_t layer, double x, double y) const { return weights.at(layer) * shape(x, y); }

double ManufacturedCase::pv(const LayerStack& stack, std::size_t layer, double x, double y) const {
  double lw = 0.0;
  for (std::size_t j = 0; j < stack.n_layers; ++j) lw += stack.coupling(layer, j) * weights.at(j);
  return weights.at(layer) * shape_laplacian(x, y) + lw * shape(x, y);
}

LayerFunction initial_function(const InitialConfig& ic, const LayerStack& stack) {
  std::vector<double> w = ic.weights;
  if (w.empty()) w.assign(stack.n_layers, 1.0);
  if (w.size() != stack.n_layers) throw std::invalid_argument("initial condition: one weight per layer required");
  switch (ic.preset) {
    case InitialPreset::zero:
      return [](std::size_t, double, double) { return 0.0; };
    case InitialPreset::gaussian_blob:
      return [w, ic](std::size_t i, double x, double y) {
        const double dx = x - ic.center_x;
        const double dy = y - ic.center_y;
        return w[i] * ic.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * ic.width * ic.width));
      };
    case InitialPreset::radial:
      return [w, ic](std::size_t i, double x, double y) {
        return w[i] * ic.amplitude * std::pow(1.0 - (x * x + y * y), ic.power);
      };
    case InitialPreset::manufactured: {
      const ManufacturedCase mc{ic.case_id, w};
      if (ic.field == InitialField::streamfunction) {
        return [mc](std::size_t i, double x, double y) { return mc.psi(i, x, y); };
      }
      return [mc, stack](std::size_t i, double x, double y) { return mc.pv(stack, i, x, y); };
    }
  }
  throw std::invalid_argument("unknown initial preset");
}

State initial_state(const QgModel& model, const InitialConfig& ic) {
  const LayerFunction fn = initial_function(ic, model.stack());
  const std::size_t n = model.stack().n_layers;
  State s = ic.field == InitialField::streamfunction && ic.preset != InitialPreset::zero
                ? model.initialize_from_streamfunction(fn)
                : model.initialize_from_pv(Field::from_function(model.grid_ptr(), n, fn));
  if (ic.perturbation != 0.0) {
    Field q = s.q;
    q += ic.perturbation * smooth_perturbation(model.grid_ptr(), n, ic.seed);
    s = model.initialize_from_pv(q);
  }
  return s;
}

Forcing make_forcing(const ForcingConfig& f) {
  switch (f.preset) {
    case ForcingPreset::none:
      return {};
    case ForcingPreset::constant: {
      const double c = f.value;
      return Forcing{[c](std::size_t, double, double, double) { return c; }, true};
    }
    case ForcingPreset::rotating_dipole: {
      const double a = f.amplitude;
      const double w = f.frequency;
      return Forcing{[a, w](std::size_t, double x, double y, double t) {
                       return a * (1.0 - (x * x + y * y)) * (x * std::cos(w * t) + y * std::sin(w * t));
                     },
                     false};
    }
  }
  throw std::invalid_argument("unknown forcing preset");
}

QgModel build_model(const SimConfig& config) {
  validate(config);
  StepperOptions opts;
  opts.picard_tol = config.picard_tol;
  opts.picard_max_iter = config.picard_max_iter;
  opts.interpolation = config.interpolation;
  return QgModel(LayerStack::build(config.n_layers, config.froude), build_grid(config.n_r, config.n_theta),
                 make_forcing(config.forcing), opts);
}

}  // namespace mlqg
