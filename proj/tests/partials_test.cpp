#include "dirtk/partials.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "testutil.hpp"

using namespace dirtk;

namespace {

struct Spectra {
  Matrix mags;  // Q x n
  Vector freqs;
};

Spectra noise_spectra(Index q, Real df, Real fmax, Real noise) {
  Spectra s;
  const Index n = static_cast<Index>(std::floor(fmax / df)) + 1;
  s.freqs = Vector::LinSpaced(n, 0, static_cast<Real>(n - 1) * df);
  s.mags.resize(q, n);
  for (Index r = 0; r < q; ++r)
    for (Index c = 0; c < n; ++c) s.mags(r, c) = noise * testutil::uniform(0.5, 1);
  return s;
}

void add_tone(Spectra& s, Real f, Real amp, Index channel = -1) {
  const Real df = s.freqs(1) - s.freqs(0);
  const Index bin = static_cast<Index>(std::llround(f / df));
  REQUIRE(bin < s.freqs.size());
  if (channel < 0)
    s.mags.col(bin).array() += amp;
  else
    s.mags(channel, bin) += amp;
}

}  // namespace

TEST_CASE("nominal_note_frequency: equal temperament and validation") {
  CHECK(nominal_note_frequency({69, 442, Dynamic::ff, 0, 0}) == doctest::Approx(442.0));
  CHECK(nominal_note_frequency({57, 442, Dynamic::ff, 0, 0}) == doctest::Approx(221.0));
  CHECK(nominal_note_frequency({60, 442, Dynamic::ff, 0, 0}) == doctest::Approx(262.8).epsilon(1e-3));
  CHECK(nominal_note_frequency({69, 440, Dynamic::pp, 0, 0}) == doctest::Approx(440.0));
  CHECK_THROWS_AS(nominal_note_frequency({128, 442, Dynamic::ff, 0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(nominal_note_frequency({-1, 442, Dynamic::ff, 0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(nominal_note_frequency({69, 399, Dynamic::ff, 0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(nominal_note_frequency({69, 467, Dynamic::ff, 0, 0}), std::invalid_argument);
}

TEST_CASE("cents helper") {
  CHECK(cents(442.0, 442.0) == doctest::Approx(0.0));
  CHECK(cents(Real(880), Real(440)) == doctest::Approx(1200.0));
  CHECK(cents(440.0 * std::exp2(5.0 / 1200), 440.0) == doctest::Approx(5.0));
}

TEST_CASE("estimate_f0 finds the fundamental inside the search window") {
  testutil::rng(711);
  NoteContext ctx{69, 442, Dynamic::ff, 0, 0};

  auto s = noise_spectra(32, 0.5, 1000, 1e-4);
  add_tone(s, 442, 1.0);
  CHECK(estimate_f0(s.mags, s.freqs, ctx) == doctest::Approx(442.0));

  // tone 50 cents flat of nominal still lies inside the +-100 cent window
  auto flat = noise_spectra(32, 0.5, 1000, 1e-4);
  const Real f_true = 442 * std::exp2(-50.0 / 1200);
  add_tone(flat, f_true, 1.0);
  CHECK(std::abs(estimate_f0(flat.mags, flat.freqs, ctx) - f_true) <= 0.25 + 1e-12);
}

TEST_CASE("estimate_f0 votes by mode, ties broken by summed magnitude") {
  testutil::rng(712);
  auto s = noise_spectra(32, 0.5, 600, 1e-4);
  for (Index q = 0; q < 30; ++q) add_tone(s, 440, 1.0, q);
  for (Index q = 30; q < 32; ++q) add_tone(s, 441, 1.0, q);
  NoteContext ctx{69, 440, Dynamic::ff, 0, 0};
  CHECK(estimate_f0(s.mags, s.freqs, ctx) == doctest::Approx(440.0));

  auto tie = noise_spectra(32, 0.5, 600, 1e-4);
  for (Index q = 0; q < 16; ++q) add_tone(tie, 438, 1.0, q);
  for (Index q = 16; q < 32; ++q) add_tone(tie, 445, 1.2, q);
  CHECK(estimate_f0(tie.mags, tie.freqs, ctx) == doctest::Approx(445.0));
}

TEST_CASE("estimate_f0 rejects a window past the frequency axis") {
  auto s = noise_spectra(4, 0.5, 1000, 1e-4);
  NoteContext ctx{100, 442, Dynamic::ff, 0, 0};  // nominal ~2637 Hz
  CHECK_THROWS_AS(estimate_f0(s.mags, s.freqs, ctx), std::invalid_argument);
  CHECK_THROWS_AS(estimate_f0(Matrix::Ones(4, 7), s.freqs, ctx), std::invalid_argument);
}

TEST_CASE("find_partials walks an exact harmonic series to Nyquist") {
  testutil::rng(713);
  auto s = noise_spectra(32, 0.25, 2050, 1e-4);
  for (int k = 1; k <= 10; ++k) add_tone(s, 200.0 * k, 1.0);
  const auto set = find_partials(s.mags, s.freqs, 200.0, 2050.0);
  REQUIRE(set.partial_frequencies.size() == 10);
  for (int k = 1; k <= 10; ++k)
    CHECK(set.partial_frequencies(k - 1) == doctest::Approx(200.0 * k));
  CHECK(set.termination_reason == Termination::nyquist);
  CHECK(set.f0 == doctest::Approx(200.0));
  // strictly increasing
  for (Index i = 1; i < set.partial_frequencies.size(); ++i)
    CHECK(set.partial_frequencies(i) > set.partial_frequencies(i - 1));
}

TEST_CASE("find_partials stops at the first partial off by more than 5 cents") {
  testutil::rng(714);
  auto s = noise_spectra(32, 0.25, 2050, 1e-4);
  for (int k : {1, 2, 3, 4, 6, 7}) add_tone(s, 200.0 * k, 1.0);
  add_tone(s, 1000.0 * std::exp2(7.0 / 1200), 1.0);  // 5th partial, +7 cents
  const auto set = find_partials(s.mags, s.freqs, 200.0, 2050.0);
  REQUIRE(set.partial_frequencies.size() == 4);
  CHECK(set.partial_frequencies(3) == doctest::Approx(800.0));
  CHECK(set.termination_reason == Termination::cent_deviation);
}

TEST_CASE("find_partials accepts uniform +4 cent stretch, then hits the noise floor") {
  testutil::rng(715);
  auto s = noise_spectra(32, 0.25, 2050, 1e-4);
  add_tone(s, 200, 1.0);
  for (int k = 2; k <= 6; ++k) add_tone(s, 200.0 * k * std::exp2(4.0 / 1200), 1.0);
  const auto set = find_partials(s.mags, s.freqs, 200.0, 2050.0);
  REQUIRE(set.partial_frequencies.size() == 6);
  for (Index i = 1; i < 6; ++i) {
    const Real dev = cents(set.partial_frequencies(i), 200.0 * static_cast<Real>(i + 1));
    CHECK(std::abs(dev - 4.0) < 1.0);  // bin quantization jitter
    CHECK(std::abs(dev) <= 5.0);
  }
  CHECK(set.termination_reason == Termination::noise_floor);
}

TEST_CASE("find_partials flags noise-only continuation as noise floor") {
  testutil::rng(716);
  auto s = noise_spectra(32, 0.25, 2050, 1e-3);
  for (int k = 1; k <= 3; ++k) add_tone(s, 200.0 * k, 1.0);
  const auto set = find_partials(s.mags, s.freqs, 200.0, 2050.0);
  CHECK(set.partial_frequencies.size() == 3);
  CHECK(set.termination_reason == Termination::noise_floor);
  CHECK_THROWS_AS(find_partials(s.mags, s.freqs, 0.0, 2050.0), std::invalid_argument);
}

TEST_CASE("detection is invariant to uniform gain and channel permutation") {
  testutil::rng(717);
  auto s = noise_spectra(32, 0.25, 2050, 1e-4);
  for (int k = 1; k <= 8; ++k) add_tone(s, 200.0 * k * std::exp2(3.0 / 1200), 0.5 + 0.1 * k);
  NoteContext ctx{55, 440, Dynamic::ff, 0, 0};  // nominal 196 Hz, tone is +35 cents
  const Real f0 = estimate_f0(s.mags, s.freqs, ctx);
  const auto base = find_partials(s.mags, s.freqs, f0, 2050.0);

  const Matrix gained = Real(25) * s.mags;
  CHECK(estimate_f0(gained, s.freqs, ctx) == doctest::Approx(f0));
  const auto g = find_partials(gained, s.freqs, f0, 2050.0);
  REQUIRE(g.partial_frequencies.size() == base.partial_frequencies.size());
  CHECK((g.partial_frequencies - base.partial_frequencies).cwiseAbs().maxCoeff() == 0);

  std::vector<Index> perm(32);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), testutil::rng());
  Matrix shuffled(32, s.mags.cols());
  for (Index q = 0; q < 32; ++q) shuffled.row(q) = s.mags.row(perm[q]);
  CHECK(estimate_f0(shuffled, s.freqs, ctx) == doctest::Approx(f0));
  const auto p = find_partials(shuffled, s.freqs, f0, 2050.0);
  REQUIRE(p.partial_frequencies.size() == base.partial_frequencies.size());
  CHECK((p.partial_frequencies - base.partial_frequencies).cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("randomized offsets: accepted <= 5 cents, first violation stops the scan") {
  testutil::rng(718);
  const Real df = 0.25;
  for (int trial = 0; trial < 25; ++trial) {
    const Real f0 = testutil::uniform(150, 320);
    // offsets drawn away from the 5-cent boundary so bin quantization cannot
    // flip the expected decision (worst half-bin error ~0.75 cents here)
    const int n_partials = 6 + trial % 5;
    std::vector<Real> offsets(static_cast<size_t>(n_partials));
    int first_bad = n_partials;  // index into overtones (0 = first overtone)
    for (int i = 0; i < n_partials; ++i) {
      Real c = testutil::uniform(-4, 4);
      if (trial % 3 == 0 && i == 2 + trial % 3) {
        c = testutil::uniform(6, 10) * (trial % 2 ? 1 : -1);
        if (first_bad == n_partials) first_bad = i;
      }
      offsets[static_cast<size_t>(i)] = c;
    }
    auto s = noise_spectra(32, df, 4200, 1e-5);
    add_tone(s, f0, 1.0);
    for (int i = 0; i < n_partials; ++i)
      add_tone(s, f0 * static_cast<Real>(i + 2) * std::exp2(offsets[static_cast<size_t>(i)] / 1200),
               1.0);
    const auto set = find_partials(s.mags, s.freqs, f0, 4200.0);
    const Index expected = 1 + first_bad;
    REQUIRE(set.partial_frequencies.size() == expected);
    for (Index i = 1; i < expected; ++i)
      CHECK(std::abs(cents(set.partial_frequencies(i), f0 * static_cast<Real>(i + 1))) <= 5.0);
    if (first_bad < n_partials) CHECK(set.termination_reason == Termination::cent_deviation);
  }
}
