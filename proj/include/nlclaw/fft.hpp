#pragma once

#include <complex>
#include <span>

#include "nlclaw/core.hpp"

// Real-input spectral transforms on the torus grid. Packed Hermitian
// half-spectrum layout: d=1 -> n/2+1 bins, d=2 -> n x (n/2+1) row-major with
// the x frequency fastest. Plans are cached per grid signature; the cache is
// internally synchronized and execution is safe to call concurrently.
namespace nlclaw {

std::size_t spectrum_size(const Grid& g);

void fft_forward(const Grid& g, std::span<const double> in,
                 std::span<std::complex<double>> out);

/// Inverse transform, normalized so fft_inverse(fft_forward(u)) == u.
void fft_inverse(const Grid& g, std::span<const std::complex<double>> in,
                 std::span<double> out);

/// Signed angular frequency 2*pi*k_axis/L of half-spectrum bin s.
double spectral_xi(const Grid& g, std::size_t s, int axis);

/// True when bin s sits on the unpaired Nyquist mode of `axis` (n even).
bool spectral_is_nyquist(const Grid& g, std::size_t s, int axis);

}  // namespace nlclaw
