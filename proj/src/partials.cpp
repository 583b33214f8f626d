#include "dirtk/partials.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

namespace dirtk {

namespace {

constexpr Real kF0WindowCents = 100;
constexpr Real kPartialWindowCents = 10;
constexpr Real kAcceptCents = 5;
// A vote only counts as a partial if its summed magnitude clears the global
// median by this factor; below that the window holds noise, not a harmonic.
constexpr Real kNoiseFloorFactor = 10;

Real cent_factor(Real c) { return std::exp2(c / 1200); }

// Inclusive bin range covered by [f_lo, f_hi]; lo > hi when empty.
std::pair<Index, Index> bin_range(const Vector& frequencies, Real f_lo, Real f_hi) {
  const Real* begin = frequencies.data();
  const Real* end = begin + frequencies.size();
  const Index lo = std::lower_bound(begin, end, f_lo) - begin;
  const Index hi = (std::upper_bound(begin, end, f_hi) - begin) - 1;
  return {lo, hi};
}

// Per-channel argmax inside [lo, hi], then the most frequent bin over all
// channels; ties go to the bin with the larger magnitude summed over
// channels.
Index vote_peak_bin(const Matrix& mags, Index lo, Index hi) {
  std::map<Index, int> counts;
  for (Index q = 0; q < mags.rows(); ++q) {
    Index rel;
    mags.row(q).segment(lo, hi - lo + 1).maxCoeff(&rel);
    ++counts[lo + rel];
  }
  Index best = lo;
  int best_count = 0;
  Real best_sum = -1;
  for (const auto& [bin, count] : counts) {
    const Real sum = mags.col(bin).sum();
    if (count > best_count || (count == best_count && sum > best_sum)) {
      best = bin;
      best_count = count;
      best_sum = sum;
    }
  }
  return best;
}

void check_axes(const Matrix& mags, const Vector& frequencies) {
  if (mags.rows() < 1 || mags.cols() != frequencies.size())
    throw std::invalid_argument("magnitude rows are channels, columns must match the frequency axis");
}

}  // namespace

Real nominal_note_frequency(const NoteContext& ctx) {
  if (ctx.midi_note < 0 || ctx.midi_note > 127)
    throw std::invalid_argument("MIDI note " + std::to_string(ctx.midi_note) +
                                " outside [0, 127]");
  if (!(ctx.tuning_frequency >= 400 && ctx.tuning_frequency <= 466))
    throw std::invalid_argument("tuning frequency " + std::to_string(ctx.tuning_frequency) +
                                " Hz outside [400, 466]");
  return ctx.tuning_frequency * std::exp2((ctx.midi_note - 69) / Real(12));
}

Real estimate_f0(const Matrix& magnitudes, const Vector& frequencies, const NoteContext& ctx) {
  check_axes(magnitudes, frequencies);
  const Real nominal = nominal_note_frequency(ctx);
  const auto [lo, hi] = bin_range(frequencies, nominal / cent_factor(kF0WindowCents),
                                  nominal * cent_factor(kF0WindowCents));
  if (lo > hi)
    throw std::invalid_argument("fundamental search window around " + std::to_string(nominal) +
                                " Hz contains no spectrum bins");
  return frequencies(vote_peak_bin(magnitudes, lo, hi));
}

PartialSet find_partials(const Matrix& magnitudes, const Vector& frequencies, Real f0,
                         Real nyquist) {
  check_axes(magnitudes, frequencies);
  if (!(f0 > 0)) throw std::invalid_argument("find_partials requires f0 > 0");

  // Noise gate: median of the summed magnitude spectrum.
  const Vector sums = magnitudes.colwise().sum();
  std::vector<Real> sorted(sums.data(), sums.data() + sums.size());
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const Real noise_gate = kNoiseFloorFactor * sorted[sorted.size() / 2];

  std::vector<Real> found{f0};
  PartialSet set;
  set.f0 = f0;
  set.termination_reason = Termination::nyquist;
  for (Index i = 1;; ++i) {
    const Real harmonic = static_cast<Real>(i + 1) * f0;
    const Real f_lo = harmonic / cent_factor(kPartialWindowCents);
    const Real f_hi = harmonic * cent_factor(kPartialWindowCents);
    if (f_hi > nyquist) break;  // window no longer fits below Nyquist
    const auto [lo, hi] = bin_range(frequencies, f_lo, f_hi);
    if (lo > hi) break;  // past the frequency axis
    const Index bin = vote_peak_bin(magnitudes, lo, hi);
    if (sums(bin) <= noise_gate) {
      set.termination_reason = Termination::noise_floor;
      break;
    }
    if (std::abs(cents(frequencies(bin), harmonic)) > kAcceptCents) {
      set.termination_reason = Termination::cent_deviation;
      break;
    }
    found.push_back(frequencies(bin));
  }
  set.partial_frequencies = Eigen::Map<const Vector>(found.data(), found.size());
  return set;
}

}  // namespace dirtk
