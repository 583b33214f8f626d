#pragma once

#include "dirtk/directivity.hpp"
#include "dirtk/geometry.hpp"
#include "dirtk/types.hpp"

namespace dirtk {

inline constexpr Index kFirLength = 8192;

// One FIR filter per grid direction, rows aligned with the grid.
struct FirBank {
  Matrix taps;  // R x kFirLength
  Real sample_rate = 44100;
  SphericalGrid grid;
};

// Single-sided piecewise-constant magnitude at the given resolution: each
// band value spans its edge-to-edge range, zero outside all bands. The bin
// count floor(fs/2/df) + 1 is odd for the default 44.1 kHz / 1 Hz pair.
Vector band_to_dense_spectrum(const Vector& bands, Real sample_rate = 44100,
                              Real resolution_hz = 1);

// Power-domain moving average with a one-third octave wide window centered
// per bin (constant relative bandwidth).
Vector smooth_third_octave(const Vector& spec);

// Minimum-phase filter for a single-sided magnitude via the folded cepstrum,
// truncated to `length` taps with a raised-cosine tail taper. Zero-magnitude
// regions are floored at -100 dB re the spectrum maximum and bridged with
// slope-limited skirts before the log. An all-zero spectrum gives an all-zero
// filter.
Vector minimum_phase_fir(const Vector& spec, Index length = kFirLength);

// Linear-phase construction of the same magnitude (zero-phase IFFT centered
// in the window, both ends tapered); the reference the minimum-phase filter
// is compared against.
Vector linear_phase_fir(const Vector& spec, Index length = kFirLength);

// Full bank from an interpolated balloon: per direction, dense spectrum ->
// third-octave smoothing -> minimum phase. jobs <= 0 uses all cores.
FirBank make_fir_bank(const InterpolatedDirectivity& hi, Real sample_rate = 44100,
                      int jobs = 0, Index length = kFirLength);

}  // namespace dirtk
