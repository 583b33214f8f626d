#pragma once

#include <cmath>

#include "dirtk/types.hpp"

namespace dirtk {

enum class Dynamic { pp, ff };

// Everything known about one recorded note before analysis.
struct NoteContext {
  int midi_note = 69;
  Real tuning_frequency = 442;  // Hz, A4 reference
  Dynamic dynamic = Dynamic::ff;
  Index steady_begin = 0;  // sample interval [begin, end) of the steady part
  Index steady_end = 0;
};

enum class Termination { nyquist, cent_deviation, noise_floor };

// Fundamental plus accepted overtones of one note. Pressures are filled by
// the directivity stage; detection leaves the matrix empty.
struct PartialSet {
  Real f0 = 0;
  Vector partial_frequencies;  // ascending, element 0 is f0
  Matrix pressures;            // Q x (I+1), Pa
  Termination termination_reason = Termination::nyquist;
};

// Distance from `f` to `reference` in cents (1/100 equal-tempered semitone).
template <class S>
S cents(S f, S reference) {
  return S(1200) * std::log2(f / reference);
}

// Equal-tempered frequency of the context's MIDI note. Validates the context.
Real nominal_note_frequency(const NoteContext& ctx);

// Fundamental of one note from Q channel magnitude spectra (rows) sharing one
// frequency axis: per channel the peak inside a +-100 cent window around the
// nominal note frequency, then the most frequent bin over all channels.
Real estimate_f0(const Matrix& magnitudes, const Vector& frequencies, const NoteContext& ctx);

// Walks the harmonic series above f0 with +-10 cent search windows, voting
// like estimate_f0, accepting winners within 5 cents of the harmonic. The
// scan records why it stopped: the window left [0, nyquist], the winner
// drifted beyond 5 cents, or it fell below the noise floor.
PartialSet find_partials(const Matrix& magnitudes, const Vector& frequencies, Real f0,
                         Real nyquist);

}  // namespace dirtk
