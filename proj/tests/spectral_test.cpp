#include "dirtk/spectral.hpp"

#include <doctest.h>

#include <cmath>

#include "testutil.hpp"

using namespace dirtk;

namespace {

TimeSignal random_signal(Index n, Real fs = 44100) {
  TimeSignal x;
  x.samples.resize(n);
  for (Index i = 0; i < n; ++i) x.samples(i) = testutil::uniform(-1, 1);
  x.sample_rate = fs;
  return x;
}

}  // namespace

TEST_CASE("forward_spectrum: DC and single tone") {
  TimeSignal dc{Vector::Constant(8, 1.0), 48000};
  const auto X = forward_spectrum(dc);
  CHECK(std::abs(X.bins(0) - Complex(8, 0)) < 1e-12);
  for (Index k = 1; k < 8; ++k) CHECK(std::abs(X.bins(k)) < 1e-12);

  TimeSignal tone;
  tone.sample_rate = 16000;
  tone.samples.resize(16);
  for (Index n = 0; n < 16; ++n)
    tone.samples(n) = std::cos(2 * kPi * 2 * static_cast<Real>(n) / 16);
  const auto T = forward_spectrum(tone);
  CHECK(std::abs(T.bins(2) - Complex(8, 0)) < 1e-9);
  CHECK(std::abs(T.bins(14) - Complex(8, 0)) < 1e-9);
  for (Index k : {0, 1, 3, 4, 5, 6, 7, 8}) CHECK(std::abs(T.bins(k)) < 1e-9);
}

TEST_CASE("forward_spectrum matches the direct-sum oracle") {
  testutil::rng(101);
  const auto x = random_signal(64);
  const auto X = forward_spectrum(x);
  const auto ref = testutil::naive_dft(x.samples);
  const Real scale = ref.cwiseAbs().maxCoeff();
  for (Index k = 0; k < 64; ++k) CHECK(std::abs(X.bins(k) - ref(k)) < 1e-10 * scale);
  CHECK(X.frequencies(1) == doctest::Approx(44100.0 / 64));
}

TEST_CASE("forward_spectrum pads odd input") {
  const auto X = forward_spectrum(random_signal(7));
  CHECK(X.padded);
  CHECK(X.bins.size() == 8);
  CHECK(X.origin_length == 8);
  CHECK_FALSE(forward_spectrum(random_signal(8)).padded);
  CHECK_THROWS(forward_spectrum(TimeSignal{Vector(), 44100}));
}

TEST_CASE("single/double sided conversions") {
  testutil::rng(202);
  const auto x = random_signal(128);
  const auto X = forward_spectrum(x);
  const auto Xs = to_single_sided(X);
  REQUIRE(Xs.bins.size() == 65);
  CHECK(std::abs(Xs.bins(0) - X.bins(0)) == 0);
  CHECK(std::abs(Xs.bins(64) - X.bins(64)) == 0);
  for (Index k = 1; k < 64; ++k) CHECK(std::abs(Xs.bins(k) - Real(2) * X.bins(k)) == 0);

  const auto Xd = to_double_sided(Xs);
  REQUIRE(Xd.bins.size() == 128);
  for (Index k = 0; k < 128; ++k) CHECK(std::abs(Xd.bins(k) - X.bins(k)) < 1e-12);

  // DC-only spectrum keeps its bin 0 untouched
  Spectrum dc;
  dc.bins = ComplexVector::Zero(8);
  dc.bins(0) = Complex(8, 0);
  dc.frequencies = Vector::LinSpaced(8, 0, 7);
  dc.sidedness = Sidedness::both;
  dc.origin_length = 8;
  CHECK(std::abs(to_single_sided(dc).bins(0) - Complex(8, 0)) == 0);

  // broken symmetry must be rejected
  Spectrum bad = X;
  bad.bins(3) += Complex(0.1, 0.1);
  CHECK_THROWS(to_single_sided(bad));
}

TEST_CASE("full round trip time -> spectrum -> single -> double -> time") {
  testutil::rng(303);
  for (Index n : {16, 250, 1024}) {
    const auto x = random_signal(n);
    const auto back = inverse_spectrum(to_double_sided(to_single_sided(forward_spectrum(x))));
    REQUIRE(back.samples.size() == n);
    const Real scale = x.samples.cwiseAbs().maxCoeff();
    CHECK((back.samples - x.samples).cwiseAbs().maxCoeff() < 1e-12 * scale);
    CHECK(back.sample_rate == doctest::Approx(x.sample_rate).epsilon(1e-12));
  }
}

TEST_CASE("Parseval holds on random inputs") {
  testutil::rng(404);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_signal(256);
    const auto X = forward_spectrum(x);
    const Real time_energy = x.samples.squaredNorm();
    const Real freq_energy = X.bins.squaredNorm() / 256;
    CHECK(freq_energy == doctest::Approx(time_energy).epsilon(1e-9));
  }
}

TEST_CASE("welch_psd: white noise level") {
  testutil::rng(505);
  const Real sigma = 0.7, fs = 1000;
  TimeSignal x;
  x.sample_rate = fs;
  x.samples.resize(1 << 17);
  std::normal_distribution<Real> noise(0, sigma);
  for (Index i = 0; i < x.samples.size(); ++i) x.samples(i) = noise(testutil::rng());

  const auto psd = welch_psd(x);
  const Index half = psd.values.size() - 1;
  // Single-sided with interior doubling: interior bins read 2 sigma^2 / fs,
  // the DC and Nyquist bins sigma^2 / fs.
  const Real interior = psd.values.segment(1, half - 1).mean();
  CHECK(interior == doctest::Approx(2 * sigma * sigma / fs).epsilon(0.05));
  // integral of the one-sided density recovers the variance
  const Real df = psd.frequencies(1);
  CHECK(psd.values.sum() * df == doctest::Approx(sigma * sigma).epsilon(0.05));
}

TEST_CASE("welch_psd: unit sinusoid at a bin center reads A^2/2 after scaling") {
  const Real fs = 44100;
  const Index n = 19845;  // segment length 4410 -> exact bin spacing of 10 Hz
  for (Real amp : {1.0, 2.0}) {
    TimeSignal x;
    x.sample_rate = fs;
    x.samples.resize(n);
    for (Index i = 0; i < n; ++i)
      x.samples(i) = amp * std::sin(2 * kPi * 100 * static_cast<Real>(i) / fs);
    const auto psd = welch_psd(x);
    const auto power = scale_to_power(psd);
    Index peak;
    power.maxCoeff(&peak);
    CHECK(psd.frequencies(peak) == doctest::Approx(100.0));
    const Real expected = amp * amp / 2;
    const Real err_db = std::abs(10 * std::log10(power(peak) / expected));
    CHECK(err_db < 0.05);
    if (amp == 1.0) CHECK(std::sqrt(power(peak)) == doctest::Approx(0.7071).epsilon(1e-3));
  }
}

TEST_CASE("welch_psd: ENBW is 1.5 bins, invariances hold") {
  testutil::rng(606);
  auto x = random_signal(9000, 8000);
  const auto psd = welch_psd(x);
  const Real bin_width = psd.frequencies(1) - psd.frequencies(0);
  CHECK(psd.enbw == doctest::Approx(1.5 * bin_width).epsilon(1e-12));

  TimeSignal flipped{-x.samples, x.sample_rate};
  CHECK((welch_psd(flipped).values - psd.values).cwiseAbs().maxCoeff() < 1e-15);

  TimeSignal scaled{3.0 * x.samples, x.sample_rate};
  CHECK((welch_psd(scaled).values - 9.0 * psd.values).cwiseAbs().maxCoeff() <
        1e-9 * psd.values.maxCoeff());

  TimeSignal zero{Vector::Zero(4096), 8000};
  CHECK(welch_psd(zero).values.maxCoeff() == 0);
}

TEST_CASE("welch_psd rejects too-short signals with the minimum length") {
  TimeSignal x{Vector::Zero(30), 8000};
  CHECK_THROWS_WITH_AS(welch_psd(x), doctest::Contains("at least"), std::invalid_argument);
}

TEST_CASE("scale_to_power is values times enbw") {
  PsdEstimate psd;
  psd.values = Vector::Constant(5, 0.25);
  psd.frequencies = Vector::LinSpaced(5, 0, 4);
  psd.enbw = 3.0;
  const auto p = scale_to_power(psd);
  for (Index i = 0; i < 5; ++i) CHECK(p(i) == doctest::Approx(0.75));
}
