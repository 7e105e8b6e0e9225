#pragma once

#include "mlqg/field.hpp"

#include <span>
#include <vector>

namespace mlqg {

// Discrete calculus on the polar grid.
//
// Radial derivatives are second-order centered differences. The stencil at
// the innermost ring reaches through the pole using f(-r, t) = f(r, t + pi).
// At the outermost ring the boundary r = 1 sits half a cell away; when the
// caller knows the (per-layer constant) boundary value it is used as the
// closure, otherwise the stencil falls back to one-sided extrapolation from
// the interior. Azimuthal derivatives use Grid's theta symbols.
//
// `boundary_values` is either empty (no closure data) or holds one value per
// layer of the input field.

/// Midpoint quadrature, one integral per layer.
std::vector<double> integrate(const Field& field);
double integrate_layer(const Grid& grid, std::span<const double> values);
/// Quadrature of a pointwise product, per layer.
std::vector<double> inner_product(const Field& a, const Field& b);

VectorField gradient(const Field& field, std::span<const double> boundary_values = {});
/// (-df/dy, df/dx)
VectorField perp_gradient(const Field& field, std::span<const double> boundary_values = {});

/// Conservative 5-point polar Laplacian.
Field laplacian(const Field& field, std::span<const double> boundary_values = {});

/// Azimuthal derivative of every ring of one layer.
void d_theta(const Grid& grid, std::span<const double> values, std::span<double> out);
void d2_theta(const Grid& grid, std::span<const double> values, std::span<double> out);

/// Recovers, for each azimuthal node, the boundary value b_k that makes the
/// outer-ring Laplacian stencil of `values` equal `laplacian_target`.
/// For a field produced by the Dirichlet solver every b_k equals the imposed
/// constant, so the spread of the result measures how constant the discrete
/// boundary trace really is.
std::vector<double> implied_boundary_values(const Grid& grid, std::span<const double> values,
                                            std::span<const double> laplacian_target);

}  // namespace mlqg
