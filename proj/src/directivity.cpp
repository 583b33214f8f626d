#include "dirtk/directivity.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dirtk {

namespace {

const Real kP0Sq = kRefPressure * kRefPressure;

void check_balloon(const BandDirectivity& d) {
  if (d.pressures.cols() != kBandCount || d.band_centers.size() != kBandCount)
    throw std::invalid_argument("balloon must carry all " + std::to_string(kBandCount) +
                                " one-third octave bands");
  if (d.pressures.rows() != d.grid.size())
    throw std::invalid_argument("balloon rows must match the grid size");
}

// Index of `p` in the grid, or -1.
Index grid_lookup(const SphericalGrid& grid, const SphericalPoint& p) {
  for (size_t i = 0; i < grid.points.size(); ++i)
    if (same_direction(grid.points[i], p, 1e-6)) return static_cast<Index>(i);
  return -1;
}

}  // namespace

Vector nominal_band_centers() {
  Vector c(kBandCount);
  c << 25, 31.5, 40, 50, 63, 80, 100, 125, 160, 200, 250, 315, 400, 500, 630, 800, 1000, 1250,
      1600, 2000, 2500, 3150, 4000, 5000, 6300, 8000, 10000, 12500, 16000, 20000;
  return c;
}

Real exact_band_center(int m) {
  if (m < 0 || m >= kBandCount) throw std::out_of_range("band index " + std::to_string(m));
  return 1000 * std::pow(Real(10), (m - 16) / Real(10));
}

std::pair<Real, Real> band_edges(int m) {
  const Real c = exact_band_center(m);
  const Real half = std::pow(Real(10), Real(1) / 20);
  return {c / half, c * half};
}

int band_index(Real f) {
  if (!(f > 0)) return -1;
  const int guess = static_cast<int>(std::lround(10 * std::log10(f / 1000))) + 16;
  for (int m = guess - 1; m <= guess + 1; ++m) {
    if (m < 0 || m >= kBandCount) continue;
    const auto [lo, hi] = band_edges(m);
    if (f >= lo && f < hi) return m;
  }
  return -1;
}

SingleToneDirectivity extract_single_tone(const Matrix& scaled_powers, const Vector& frequencies,
                                          const PartialSet& partials, const SphericalGrid& grid) {
  if (scaled_powers.cols() != frequencies.size() || frequencies.size() < 2)
    throw std::invalid_argument("power columns must match the frequency axis");
  if (scaled_powers.rows() != grid.size())
    throw std::invalid_argument("power rows must match the grid size");
  const Index n = frequencies.size();
  const Real df = frequencies(1) - frequencies(0);

  SingleToneDirectivity tone;
  tone.partial_frequencies = partials.partial_frequencies;
  tone.grid = grid;
  const Index count = partials.partial_frequencies.size();
  tone.pressures.resize(scaled_powers.rows(), count);
  for (Index i = 0; i < count; ++i) {
    const Real f = partials.partial_frequencies(i);
    const Index center = static_cast<Index>(std::llround((f - frequencies(0)) / df));
    if (center < 0 || center >= n)
      throw std::invalid_argument("partial at " + std::to_string(f) +
                                  " Hz lies outside the PSD range");
    const Index lo = std::max<Index>(0, center - 3);
    const Index hi = std::min<Index>(n - 1, center + 3);
    tone.pressures.col(i) =
        scaled_powers.middleCols(lo, hi - lo + 1).rowwise().maxCoeff().cwiseSqrt();
  }
  return tone;
}

BandDirectivity band_average(const std::vector<SingleToneDirectivity>& tones) {
  if (tones.empty()) throw std::invalid_argument("band_average needs at least one note");
  const Index q = tones.front().pressures.rows();
  for (const auto& t : tones) {
    if (t.pressures.rows() != q)
      throw std::invalid_argument("all notes must share the measurement grid");
    if (t.pressures.cols() != t.partial_frequencies.size())
      throw std::invalid_argument("pressure columns must match the partial count");
  }

  BandDirectivity d;
  d.band_centers = nominal_band_centers();
  d.grid = tones.front().grid;
  d.state = BalloonState::raw;
  d.pressures = Matrix::Zero(q, kBandCount);
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(kBandCount);
  for (const auto& t : tones)
    for (Index i = 0; i < t.partial_frequencies.size(); ++i) {
      const int m = band_index(t.partial_frequencies(i));
      if (m < 0) continue;
      d.pressures.col(m) += t.pressures.col(i).cwiseAbs2();
      ++counts(m);
    }
  for (int m = 0; m < kBandCount; ++m)
    if (counts(m) > 0) d.pressures.col(m) = (d.pressures.col(m) / counts(m)).cwiseSqrt();
  return d;
}

BandDirectivity diffuse_equalize(const BandDirectivity& d) {
  check_balloon(d);
  if (d.state != BalloonState::raw)
    throw std::invalid_argument("diffuse equalization expects a raw balloon");
  const Vector& w = d.grid.weights;

  BandDirectivity out = d;
  out.state = BalloonState::diffuse;
  for (int m = 0; m < kBandCount; ++m) {
    const Real energy = d.pressures.col(m).cwiseAbs2().dot(w);
    if (energy > 0) out.pressures.col(m) /= std::sqrt(energy);
  }
  return out;
}

SoundLevelSummary balloon_levels(const BandDirectivity& d) {
  check_balloon(d);
  // Effective bands: radiation in any channel; the rest were set to zero.
  int effective = 0;
  for (int m = 0; m < kBandCount; ++m)
    if ((d.pressures.col(m).array() != 0).any()) ++effective;
  if (effective == 0) throw std::invalid_argument("balloon has no radiating band");

  SoundLevelSummary s;
  const Vector mean_sq = d.pressures.cwiseAbs2().rowwise().sum() / effective;
  s.per_channel_db = 10 * (mean_sq / kP0Sq).array().log10();
  s.spatial_average_db = 10 * std::log10(mean_sq.mean() / kP0Sq);
  return s;
}

SoundLevelSummary recording_levels(const std::vector<Matrix>& steady_notes) {
  if (steady_notes.empty()) throw std::invalid_argument("no recordings to calibrate against");
  const Index q = steady_notes.front().rows();
  Vector mean_sq = Vector::Zero(q);
  for (const auto& note : steady_notes) {
    if (note.rows() != q) throw std::invalid_argument("all notes must share the channel count");
    if (note.cols() == 0) throw std::invalid_argument("empty steady part");
    mean_sq += note.cwiseAbs2().rowwise().mean();
  }
  mean_sq /= static_cast<Real>(steady_notes.size());

  SoundLevelSummary s;
  s.per_channel_db = 10 * (mean_sq / kP0Sq).array().log10();
  s.spatial_average_db = 10 * std::log10(mean_sq.mean() / kP0Sq);
  return s;
}

BandDirectivity calibrate(const BandDirectivity& diffuse,
                          const std::vector<Matrix>& steady_notes) {
  check_balloon(diffuse);
  if (diffuse.state != BalloonState::diffuse)
    throw std::invalid_argument("calibration expects a diffuse-equalized balloon");
  const auto balloon = balloon_levels(diffuse);
  const auto reference = recording_levels(steady_notes);
  const Real gain =
      std::pow(Real(10), (reference.spatial_average_db - balloon.spatial_average_db) / 20);

  BandDirectivity out = diffuse;
  out.state = BalloonState::calibrated;
  out.pressures *= gain;
  return out;
}

InterpolatedDirectivity point_equalize(const InterpolatedDirectivity& hi,
                                       const SphericalPoint& mic_direction) {
  const Index at = grid_lookup(hi.grid, mic_direction);
  if (at < 0)
    throw std::invalid_argument(
        "reference direction is not a grid point; interpolate to it first");

  InterpolatedDirectivity out = hi;
  out.source_state = BalloonState::point;
  for (Index m = 0; m < hi.pressures.cols(); ++m) {
    const Real ref = hi.pressures(at, m);
    if (ref > 0)
      out.pressures.col(m) /= ref;
    else if ((hi.pressures.col(m).array() != 0).any())
      throw std::invalid_argument("reference direction is silent in a radiating band");
  }
  return out;
}

InterpolatedDirectivity area_equalize(const InterpolatedDirectivity& hi,
                                      const SphericalGrid& region,
                                      const Vector& orientation_weights) {
  const Index r_a = region.size();
  if (orientation_weights.size() != r_a || region.weights.size() != r_a || r_a == 0)
    throw std::invalid_argument("region needs one area and one orientation weight per point");
  const Vector combined = region.weights.cwiseProduct(orientation_weights);
  if (std::abs(combined.sum() - 1) > 1e-9)
    throw std::invalid_argument("combined region weights must sum to 1");

  std::vector<Index> rows(static_cast<size_t>(r_a));
  for (Index r = 0; r < r_a; ++r) {
    const Index at = grid_lookup(hi.grid, region.points[static_cast<size_t>(r)]);
    if (at < 0) throw std::invalid_argument("region point is not a grid point of the balloon");
    rows[static_cast<size_t>(r)] = at;
  }

  InterpolatedDirectivity out = hi;
  out.source_state = BalloonState::area;
  for (Index m = 0; m < hi.pressures.cols(); ++m) {
    Real energy = 0;
    for (Index r = 0; r < r_a; ++r)
      energy += hi.pressures(rows[static_cast<size_t>(r)], m) *
                hi.pressures(rows[static_cast<size_t>(r)], m) * combined(r);
    if (energy > 0)
      out.pressures.col(m) /= std::sqrt(energy);
    else if ((hi.pressures.col(m).array() != 0).any())
      throw std::invalid_argument("region is silent in a radiating band");
  }
  return out;
}

}  // namespace dirtk
