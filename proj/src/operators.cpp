#include "mlqg/operators.hpp"

#include <complex>
#include <stdexcept>

namespace mlqg {

namespace {

void check_boundary(const Field& f, std::span<const double> boundary_values) {
  if (!boundary_values.empty() && boundary_values.size() != f.n_layers()) {
    throw std::invalid_argument("boundary values: expected one per layer");
  }
}

template <class Symbol>
void apply_theta_symbol(const Grid& g, std::span<const double> values, std::span<double> out, Symbol symbol) {
  const int nt = g.n_theta();
  std::vector<std::complex<double>> modes(g.n_modes());
  for (int j = 0; j < g.n_r(); ++j) {
    auto ring = values.subspan(static_cast<std::size_t>(j) * nt, nt);
    g.forward(ring, modes);
    for (int m = 0; m < g.n_modes(); ++m) modes[m] *= symbol(m);
    g.inverse(modes, out.subspan(static_cast<std::size_t>(j) * nt, nt));
  }
}

// d/dr of one layer at every node.
void d_radial(const Grid& g, std::span<const double> f, const double* boundary, std::span<double> out) {
  const int nr = g.n_r();
  const int nt = g.n_theta();
  const double h = g.dr();
  auto v = [&](int j, int k) { return f[g.index(j, k)]; };
  for (int k = 0; k < nt; ++k) {
    out[g.index(0, k)] = (v(1, k) - v(0, g.opposite(k))) / (2.0 * h);
    for (int j = 1; j < nr - 1; ++j) out[g.index(j, k)] = (v(j + 1, k) - v(j - 1, k)) / (2.0 * h);
    const int j = nr - 1;
    if (boundary) {
      // quadratic through r_{N-2}, r_{N-1} and the boundary value at r = 1
      out[g.index(j, k)] = (-v(j - 1, k) / 3.0 - v(j, k) + 4.0 * (*boundary) / 3.0) / h;
    } else {
      out[g.index(j, k)] = (3.0 * v(j, k) - 4.0 * v(j - 1, k) + v(j - 2, k)) / (2.0 * h);
    }
  }
}

}  // namespace

std::vector<double> integrate(const Field& field) {
  std::vector<double> out(field.n_layers());
  for (std::size_t i = 0; i < field.n_layers(); ++i) out[i] = integrate_layer(field.grid(), field.layer(i));
  return out;
}

double integrate_layer(const Grid& g, std::span<const double> values) {
  double total = 0.0;
  for (int j = 0; j < g.n_r(); ++j) {
    double ring = 0.0;
    for (int k = 0; k < g.n_theta(); ++k) ring += values[g.index(j, k)];
    total += ring * g.weight(j);
  }
  return total;
}

std::vector<double> inner_product(const Field& a, const Field& b) {
  if (&a.grid() != &b.grid() || a.n_layers() != b.n_layers()) {
    throw std::invalid_argument("inner_product: grid or layer count mismatch");
  }
  std::vector<double> out(a.n_layers());
  std::vector<double> prod(a.grid().size());
  for (std::size_t i = 0; i < a.n_layers(); ++i) {
    auto va = a.layer(i);
    auto vb = b.layer(i);
    for (std::size_t n = 0; n < prod.size(); ++n) prod[n] = va[n] * vb[n];
    out[i] = integrate_layer(a.grid(), prod);
  }
  return out;
}

void d_theta(const Grid& g, std::span<const double> values, std::span<double> out) {
  apply_theta_symbol(g, values, out, [&](int m) { return std::complex<double>(0.0, g.first_derivative_symbol(m)); });
}

void d2_theta(const Grid& g, std::span<const double> values, std::span<double> out) {
  apply_theta_symbol(g, values, out, [&](int m) { return std::complex<double>(g.second_derivative_symbol(m), 0.0); });
}

VectorField gradient(const Field& field, std::span<const double> boundary_values) {
  check_boundary(field, boundary_values);
  const Grid& g = field.grid();
  VectorField out{Field(field.grid_ptr(), field.n_layers()), Field(field.grid_ptr(), field.n_layers())};
  std::vector<double> fr(g.size());
  std::vector<double> ft(g.size());
  for (std::size_t i = 0; i < field.n_layers(); ++i) {
    d_radial(g, field.layer(i), boundary_values.empty() ? nullptr : &boundary_values[i], fr);
    d_theta(g, field.layer(i), ft);
    auto gx = out.x.layer(i);
    auto gy = out.y.layer(i);
    for (int j = 0; j < g.n_r(); ++j) {
      const double inv_r = 1.0 / g.r(j);
      for (int k = 0; k < g.n_theta(); ++k) {
        const std::size_t n = g.index(j, k);
        const double c = g.cos_theta(k);
        const double s = g.sin_theta(k);
        gx[n] = c * fr[n] - s * ft[n] * inv_r;
        gy[n] = s * fr[n] + c * ft[n] * inv_r;
      }
    }
  }
  return out;
}

VectorField perp_gradient(const Field& field, std::span<const double> boundary_values) {
  VectorField grad = gradient(field, boundary_values);
  VectorField out{std::move(grad.y), std::move(grad.x)};
  out.x *= -1.0;
  return out;
}

Field laplacian(const Field& field, std::span<const double> boundary_values) {
  check_boundary(field, boundary_values);
  const Grid& g = field.grid();
  const int nr = g.n_r();
  const int nt = g.n_theta();
  const double h = g.dr();
  const double h2 = h * h;
  Field out(field.grid_ptr(), field.n_layers());
  std::vector<double> ftt(g.size());
  for (std::size_t i = 0; i < field.n_layers(); ++i) {
    auto f = field.layer(i);
    auto lap = out.layer(i);
    d2_theta(g, f, ftt);
    auto v = [&](int j, int k) { return f[g.index(j, k)]; };
    for (int j = 0; j < nr; ++j) {
      const double r = g.r(j);
      const double r_in = j * h;          // face r_{j-1/2}; zero at the pole
      const double r_out = (j + 1) * h;   // face r_{j+1/2}
      for (int k = 0; k < nt; ++k) {
        const double fc = v(j, k);
        const double flux_in = j > 0 ? r_in * (fc - v(j - 1, k)) : 0.0;
        double flux_out;
        if (j < nr - 1) {
          flux_out = r_out * (v(j + 1, k) - fc);
        } else if (!boundary_values.empty()) {
          // ghost value at 1 + h/2 from a quadratic through the boundary value
          flux_out = (8.0 * boundary_values[i] - 9.0 * fc + v(j - 1, k)) / 3.0;
        } else {
          const double ghost = 3.0 * fc - 3.0 * v(j - 1, k) + v(j - 2, k);
          flux_out = r_out * (ghost - fc);
        }
        const std::size_t n = g.index(j, k);
        lap[n] = (flux_out - flux_in) / (r * h2) + ftt[n] / (r * r);
      }
    }
  }
  return out;
}

std::vector<double> implied_boundary_values(const Grid& g, std::span<const double> values,
                                            std::span<const double> laplacian_target) {
  const int j = g.n_r() - 1;
  const double h = g.dr();
  const double r = g.r(j);
  const double r_in = j * h;
  std::vector<double> ftt(g.size());
  d2_theta(g, values, ftt);
  std::vector<double> b(g.n_theta());
  for (int k = 0; k < g.n_theta(); ++k) {
    const std::size_t n = g.index(j, k);
    const double f = values[n];
    const double f_in = values[g.index(j - 1, k)];
    const double radial_part = laplacian_target[n] - ftt[n] / (r * r);
    b[k] = (3.0 * (r * h * h * radial_part + r_in * (f - f_in)) + 9.0 * f - f_in) / 8.0;
  }
  return b;
}

}  // namespace mlqg
