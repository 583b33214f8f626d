#pragma once

#include "dirtk/types.hpp"

namespace dirtk {

template <class S = Real>
struct TimeSignalT {
  VectorT<S> samples;  // Pa
  S sample_rate = 0;   // Hz
};
using TimeSignal = TimeSignalT<>;

enum class Sidedness { single, both };

template <class S = Real>
struct SpectrumT {
  VectorT<std::complex<S>> bins;
  VectorT<S> frequencies;  // Hz, strictly increasing
  Sidedness sidedness = Sidedness::both;
  Index origin_length = 0;  // N of the originating time signal
  bool padded = false;      // odd-length input was zero-padded by one sample
};
using Spectrum = SpectrumT<>;

template <class S = Real>
struct PsdEstimateT {
  VectorT<S> values;       // Pa^2/Hz, single-sided
  VectorT<S> frequencies;  // Hz
  S enbw = 0;              // equivalent noise bandwidth of the window, Hz
};
using PsdEstimate = PsdEstimateT<>;

// Unnormalized DFT sum X(k) = sum_n x[n] e^(-i 2 pi k n / N). Odd-length
// inputs are zero-padded by one sample (flagged on the result) so the
// single-sided conversions below always see an even N.
Spectrum forward_spectrum(const TimeSignal& x);

// Inverse of forward_spectrum (both-sided input); the sample rate is
// recovered from the bin spacing.
TimeSignal inverse_spectrum(const Spectrum& X);

// Single-sided spectrum of a real signal: interior bins doubled, bins 0 and
// N/2 kept. Rejects inputs whose conjugate symmetry is broken (non-real
// origin).
Spectrum to_single_sided(const Spectrum& X);

// Reconstructs the both-sided spectrum (exact inverse of to_single_sided).
Spectrum to_double_sided(const Spectrum& Xs);

// Welch PSD: equal-length segments with the given overlap, periodic Hann
// window, periodograms normalized by 1/(fs * sum w^2) and averaged.
// Single-sided with interior-bin doubling, so the estimate integrates to the
// signal power and a tone's scaled peak reads A^2/2.
PsdEstimate welch_psd(const TimeSignal& x, int segments = 8, Real overlap = Real(0.5));

// Density -> per-component power (multiply by ENBW in Hz).
Vector scale_to_power(const PsdEstimate& psd);

}  // namespace dirtk
