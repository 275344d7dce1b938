#pragma once

#include "nlclaw/core.hpp"

namespace nlclaw {

/// h^d * sum of cell values. Throws invalid_field_error on non-finite input.
double mass(const Field& f);
double norm_l1(const Field& f);
double norm_linf(const Field& f);
double distance_l1(const Field& f, const Field& g);
double distance_linf(const Field& f, const Field& g);

/// Anisotropic discrete total variation:
/// sum over axes of h^(d-1) * sum over cells of |forward periodic difference|.
double total_variation(const Field& f);

bool all_finite(const Field& f);

/// Second-order central periodic differences, one component per axis.
VectorField gradient(const Field& f);
/// Central-difference divergence of a vector field.
Field divergence(const VectorField& v);

/// Shift by whole cells: out(x) = in(x - offset*h) on the torus.
Field cyclic_shift(const Field& f, int offset_x, int offset_y = 0);

/// Max Euclidean cell magnitude of a vector field.
double vector_norm_linf(const VectorField& v);

}  // namespace nlclaw
