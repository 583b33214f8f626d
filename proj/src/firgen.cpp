#include "dirtk/firgen.hpp"

#include <unsupported/Eigen/FFT>

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace dirtk {

namespace {

constexpr Real kFloorDb = 100;   // floor below the spectrum maximum
constexpr Real kSkirtDbPerBin = 6;
constexpr Index kTaperLength = 256;
const Real kDbPerNeper = 20 / std::log(Real(10));

// Log magnitude with the -100 dB floor and slope-limited skirts bridging
// zero-target bins, so the minimum-phase construction never sees a cliff
// steeper than the filter length can realize.
Vector prepared_log_magnitude(const Vector& sm) {
  const Index n = sm.size();
  const Real mx = sm.maxCoeff();
  const Real lfloor = std::log(mx) - kFloorDb / kDbPerNeper;
  const Real step = kSkirtDbPerBin / kDbPerNeper;

  Vector lm(n);
  for (Index k = 0; k < n; ++k)
    lm(k) = sm(k) > 0 ? std::max(std::log(sm(k)), lfloor) : lfloor;
  Real carry = lfloor;
  for (Index k = 0; k < n; ++k) {
    if (sm(k) > 0) {
      carry = lm(k);
    } else {
      carry = std::max(lfloor, carry - step);
      lm(k) = carry;
    }
  }
  carry = lfloor;
  for (Index k = n - 1; k >= 0; --k) {
    if (sm(k) > 0) {
      carry = lm(k);
    } else {
      carry = std::max(lfloor, carry - step);
      lm(k) = std::max(lm(k), carry);
    }
  }
  return lm;
}

void taper_tail(Vector& taps) {
  const Index l = taps.size();
  const Index t = std::min(kTaperLength, l);
  for (Index i = 0; i < t; ++i)
    taps(l - t + i) *= Real(0.5) * (1 + std::cos(kPi * static_cast<Real>(i + 1) / static_cast<Real>(t)));
}

void check_spectrum(const Vector& spec, Index length) {
  if (spec.size() < 3) throw std::invalid_argument("magnitude spectrum too short");
  if (length < 2 || length > 2 * (spec.size() - 1))
    throw std::invalid_argument("filter length must fit the spectrum's DFT size");
  if (spec.minCoeff() < 0) throw std::invalid_argument("magnitudes must be >= 0");
}

}  // namespace

Vector band_to_dense_spectrum(const Vector& bands, Real sample_rate, Real resolution_hz) {
  if (bands.size() != kBandCount)
    throw std::invalid_argument("expected one magnitude per one-third octave band");
  if (bands.minCoeff() < 0) throw std::invalid_argument("band magnitudes must be >= 0");
  if (!(sample_rate > 0) || !(resolution_hz > 0))
    throw std::invalid_argument("sample rate and resolution must be positive");

  const Index n = static_cast<Index>(std::floor(sample_rate / 2 / resolution_hz)) + 1;
  Vector mag = Vector::Zero(n);
  for (int m = 0; m < kBandCount; ++m) {
    if (bands(m) <= 0) continue;
    const auto [flo, fhi] = band_edges(m);
    const Index a = std::max<Index>(0, static_cast<Index>(std::ceil(flo / resolution_hz)));
    const Index b = std::min<Index>(n - 1, static_cast<Index>(std::floor(fhi / resolution_hz)));
    for (Index k = a; k <= b; ++k) {
      const Real f = static_cast<Real>(k) * resolution_hz;
      if (f >= flo && f < fhi) mag(k) = bands(m);
    }
  }
  return mag;
}

Vector smooth_third_octave(const Vector& spec) {
  const Index n = spec.size();
  if (n == 0) return spec;
  if (spec.minCoeff() < 0) throw std::invalid_argument("magnitudes must be >= 0");
  Vector pre(n + 1);
  pre(0) = 0;
  for (Index k = 0; k < n; ++k) pre(k + 1) = pre(k) + spec(k) * spec(k);

  const Real gl = std::pow(Real(10), Real(-0.05));
  const Real gh = std::pow(Real(10), Real(0.05));
  Vector sm(n);
  sm(0) = spec(0);
  for (Index k = 1; k < n; ++k) {
    const Index a = std::max<Index>(0, static_cast<Index>(std::ceil(static_cast<Real>(k) * gl)));
    const Index b =
        std::min<Index>(n - 1, static_cast<Index>(std::floor(static_cast<Real>(k) * gh)));
    sm(k) = std::sqrt((pre(b + 1) - pre(a)) / static_cast<Real>(b - a + 1));
  }
  return sm;
}

Vector minimum_phase_fir(const Vector& spec, Index length) {
  check_spectrum(spec, length);
  if (spec.maxCoeff() == 0) return Vector::Zero(length);
  const Index nss = spec.size();
  const Index n = 2 * (nss - 1);
  const Vector lm = prepared_log_magnitude(spec);

  std::vector<Complex> log_spec(static_cast<size_t>(n), Complex(0, 0));
  for (Index k = 0; k < nss; ++k) {
    log_spec[static_cast<size_t>(k)] = Complex(lm(k), 0);
    if (k > 0 && k < nss - 1) log_spec[static_cast<size_t>(n - k)] = Complex(lm(k), 0);
  }

  Eigen::FFT<Real> fft;
  std::vector<Complex> cepstrum(static_cast<size_t>(n));
  fft.inv(cepstrum, log_spec);
  // fold the anticausal half onto the causal one
  std::vector<Complex> folded(static_cast<size_t>(n), Complex(0, 0));
  folded[0] = cepstrum[0];
  for (Index i = 1; i < n / 2; ++i) folded[static_cast<size_t>(i)] = Real(2) * cepstrum[static_cast<size_t>(i)];
  folded[static_cast<size_t>(n / 2)] = cepstrum[static_cast<size_t>(n / 2)];

  std::vector<Complex> min_spec(static_cast<size_t>(n));
  fft.fwd(min_spec, folded);
  for (auto& v : min_spec) v = std::exp(v);
  std::vector<Complex> impulse(static_cast<size_t>(n));
  fft.inv(impulse, min_spec);

  Vector taps(length);
  for (Index i = 0; i < length; ++i) taps(i) = impulse[static_cast<size_t>(i)].real();
  taper_tail(taps);
  return taps;
}

Vector linear_phase_fir(const Vector& spec, Index length) {
  check_spectrum(spec, length);
  if (spec.maxCoeff() == 0) return Vector::Zero(length);
  const Index nss = spec.size();
  const Index n = 2 * (nss - 1);
  const Vector lm = prepared_log_magnitude(spec);

  std::vector<Complex> zero_phase(static_cast<size_t>(n));
  for (Index k = 0; k < n; ++k) {
    const Index kk = k <= n / 2 ? k : n - k;
    zero_phase[static_cast<size_t>(k)] = Complex(std::exp(lm(kk)), 0);
  }
  Eigen::FFT<Real> fft;
  std::vector<Complex> impulse(static_cast<size_t>(n));
  fft.inv(impulse, zero_phase);

  Vector taps(length);
  const Index center = length / 2;
  for (Index i = 0; i < length; ++i) {
    const Index src = ((i - center) % n + n) % n;
    taps(i) = impulse[static_cast<size_t>(src)].real();
  }
  const Index t = std::min(kTaperLength, length);
  for (Index i = 0; i < t; ++i) {
    const Real w = Real(0.5) * (1 + std::cos(kPi * static_cast<Real>(i + 1) / static_cast<Real>(t)));
    taps(length - t + i) *= w;
    taps(t - 1 - i) *= w;
  }
  return taps;
}

FirBank make_fir_bank(const InterpolatedDirectivity& hi, Real sample_rate, int jobs,
                      Index length) {
  if (hi.pressures.cols() != kBandCount)
    throw std::invalid_argument("balloon must carry all one-third octave bands");
  const Index r = hi.pressures.rows();
  FirBank bank;
  bank.sample_rate = sample_rate;
  bank.grid = hi.grid;
  bank.taps.resize(r, length);

  const int workers =
      jobs > 0 ? jobs : std::max(1u, std::thread::hardware_concurrency());
  std::atomic<Index> next(0);
  auto work = [&]() {
    for (Index row = next.fetch_add(1); row < r; row = next.fetch_add(1)) {
      const Vector dense =
          band_to_dense_spectrum(hi.pressures.row(row).transpose(), sample_rate);
      bank.taps.row(row) = minimum_phase_fir(smooth_third_octave(dense), length);
    }
  };
  if (workers == 1 || r == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return bank;
}

}  // namespace dirtk
