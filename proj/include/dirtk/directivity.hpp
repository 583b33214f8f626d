#pragma once

#include <vector>

#include "dirtk/geometry.hpp"
#include "dirtk/partials.hpp"
#include "dirtk/types.hpp"

namespace dirtk {

// ---- One-third octave bands (IEC 61260-1, base-10) ----------------------

inline constexpr int kBandCount = 30;

// Nominal centre frequencies 25 Hz .. 20 kHz.
Vector nominal_band_centers();

// Exact base-10 centre of band m: 1000 * 10^((m - 16) / 10).
Real exact_band_center(int m);

// Exact band edges, centre * 10^(-+1/20); bands meet without overlap.
std::pair<Real, Real> band_edges(int m);

// Band containing f under the half-open convention [lower, upper), or -1
// when f lies outside all 30 bands.
int band_index(Real f);

// ---- Balloon types -------------------------------------------------------

enum class BalloonState { raw, diffuse, point, area, calibrated };

// Per-partial pressures of one note on the measurement grid.
struct SingleToneDirectivity {
  Vector partial_frequencies;  // Hz
  Matrix pressures;            // Q x (I+1), Pa, >= 0
  SphericalGrid grid;          // Q points
};

// Third-octave balloon on the measurement grid. Bands without any partial
// are exactly zero.
struct BandDirectivity {
  Vector band_centers;  // nominal, kBandCount entries
  Matrix pressures;     // Q x kBandCount, Pa
  BalloonState state = BalloonState::raw;
  SphericalGrid grid;
};

// Balloon upsampled to a dense grid; bands keep their order.
struct InterpolatedDirectivity {
  Matrix pressures;  // R x kBandCount, Pa
  BalloonState source_state = BalloonState::raw;
  SphericalGrid grid;    // R points
  Index clamped = 0;     // negative spline evaluations zeroed by upsample
};

struct SoundLevelSummary {
  Vector per_channel_db;         // Q, re reference_pressure
  Real spatial_average_db = 0;   // energetic mean over channels
  Real reference_pressure = kRefPressure;
};

// ---- Operations ----------------------------------------------------------

// Per-channel, per-partial pressures from scaled PSDs (rows = channels):
// sqrt of the largest per-component power within +-3 bins of each partial.
SingleToneDirectivity extract_single_tone(const Matrix& scaled_powers, const Vector& frequencies,
                                          const PartialSet& partials, const SphericalGrid& grid);

// Energetic (RMS) average of all partials of all notes per channel and band.
BandDirectivity band_average(const std::vector<SingleToneDirectivity>& tones);

// Normalizes each band so unit energy is radiated over the sphere:
// divide by sqrt(sum_q p^2 w'_q). All-zero bands stay zero.
BandDirectivity diffuse_equalize(const BandDirectivity& d);

// Average level per channel over the effective bands (those with radiation
// in any channel), and its energetic mean over channels.
SoundLevelSummary balloon_levels(const BandDirectivity& d);

// Level of the calibrated recordings: per channel, mean square over the
// steady part of each note (one Q x N matrix per note), averaged over notes.
SoundLevelSummary recording_levels(const std::vector<Matrix>& steady_notes);

// Restores the absolute sound power reference a diffuse-equalized balloon
// lost: one global gain matching the balloon's spatial average level to the
// recordings' level.
BandDirectivity calibrate(const BandDirectivity& diffuse, const std::vector<Matrix>& steady_notes);

// Normalizes each band to the balloon value in the given reference
// direction, which must be a grid point (upsample first if it is not).
InterpolatedDirectivity point_equalize(const InterpolatedDirectivity& hi,
                                       const SphericalPoint& mic_direction);

// Normalizes each band to the weighted RMS over a spherical region:
// divide by sqrt(sum p^2 w' g') with sum w' g' = 1. The region's points must
// be grid points of the balloon; its weights are the w', the orientation
// weights the g'.
InterpolatedDirectivity area_equalize(const InterpolatedDirectivity& hi,
                                      const SphericalGrid& region,
                                      const Vector& orientation_weights);

}  // namespace dirtk
