#pragma once

#include "nlclaw/core.hpp"
#include "nlclaw/interaction.hpp"

namespace nlclaw {

/// Force field V = K*u together with its spectral divergence div(K*u).
struct ForceEval {
    VectorField force;
    Field div_force;
};

/// Spectral circular convolution: per-mode multiplication on the Hermitian
/// half-spectrum; the divergence comes from contraction with i xi.
ForceEval convolve(const InteractionKernel& k, const Field& u);

/// Discrete Lipschitz constant estimate of a vector field:
/// max over cells, components, and difference axes of |forward difference| / h.
double lipschitz_estimate(const VectorField& v);

}  // namespace nlclaw
