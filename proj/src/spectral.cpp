#include "dirtk/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <stdexcept>
#include <string>

namespace dirtk {

namespace {

Vector bin_frequencies(Index count, Real df) {
  Vector f(count);
  for (Index k = 0; k < count; ++k) f(k) = static_cast<Real>(k) * df;
  return f;
}

}  // namespace

Spectrum forward_spectrum(const TimeSignal& x) {
  if (x.samples.size() == 0) throw std::invalid_argument("cannot transform an empty signal");
  if (!(x.sample_rate > 0)) throw std::invalid_argument("sample rate must be > 0");

  Spectrum out;
  out.padded = (x.samples.size() % 2) != 0;
  Vector samples = x.samples;
  if (out.padded) {
    samples.conservativeResize(samples.size() + 1);
    samples(samples.size() - 1) = 0;
  }
  const Index n = samples.size();

  Eigen::FFT<Real> fft;
  fft.fwd(out.bins, samples);
  out.frequencies = bin_frequencies(n, x.sample_rate / static_cast<Real>(n));
  out.sidedness = Sidedness::both;
  out.origin_length = n;
  return out;
}

TimeSignal inverse_spectrum(const Spectrum& X) {
  if (X.sidedness != Sidedness::both)
    throw std::invalid_argument("inverse transform expects a both-sided spectrum");
  const Index n = X.bins.size();
  if (n == 0) throw std::invalid_argument("empty spectrum");
  if (X.frequencies.size() != n) throw std::invalid_argument("frequency axis size mismatch");

  Eigen::FFT<Real> fft;
  ComplexVector t;
  fft.inv(t, X.bins);
  TimeSignal out;
  out.samples = t.real();
  const Real df = n > 1 ? X.frequencies(1) - X.frequencies(0) : Real(0);
  out.sample_rate = df * static_cast<Real>(n);
  return out;
}

Spectrum to_single_sided(const Spectrum& X) {
  if (X.sidedness != Sidedness::both)
    throw std::invalid_argument("to_single_sided expects a both-sided spectrum");
  const Index n = X.bins.size();
  if (n % 2 != 0) throw std::invalid_argument("both-sided length must be even");

  const Real scale = X.bins.cwiseAbs().maxCoeff();
  const Real tol = 1e-9 * (scale > 0 ? scale : Real(1));
  for (Index k = 1; k < n / 2; ++k) {
    if (std::abs(X.bins(k) - std::conj(X.bins(n - k))) > tol)
      throw std::invalid_argument(
          "spectrum is not conjugate symmetric (origin signal not real)");
  }
  if (std::abs(X.bins(0).imag()) > tol || std::abs(X.bins(n / 2).imag()) > tol)
    throw std::invalid_argument("spectrum is not conjugate symmetric (origin signal not real)");

  Spectrum out;
  out.bins.resize(n / 2 + 1);
  out.bins(0) = X.bins(0);
  for (Index k = 1; k < n / 2; ++k) out.bins(k) = Real(2) * X.bins(k);
  out.bins(n / 2) = X.bins(n / 2);
  out.frequencies = X.frequencies.head(n / 2 + 1);
  out.sidedness = Sidedness::single;
  out.origin_length = X.origin_length;
  out.padded = X.padded;
  return out;
}

Spectrum to_double_sided(const Spectrum& Xs) {
  if (Xs.sidedness != Sidedness::single)
    throw std::invalid_argument("to_double_sided expects a single-sided spectrum");
  const Index ns = Xs.bins.size();
  if (ns < 2) throw std::invalid_argument("single-sided spectrum too short");
  const Index n = 2 * (ns - 1);

  Spectrum out;
  out.bins.resize(n);
  out.bins(0) = Xs.bins(0);
  for (Index k = 1; k < n / 2; ++k) out.bins(k) = Xs.bins(k) / Real(2);
  out.bins(n / 2) = Xs.bins(ns - 1);
  for (Index k = n / 2 + 1; k < n; ++k) out.bins(k) = std::conj(Xs.bins(n - k)) / Real(2);

  const Real df = Xs.frequencies(1) - Xs.frequencies(0);
  out.frequencies = bin_frequencies(n, df);
  out.sidedness = Sidedness::both;
  out.origin_length = Xs.origin_length;
  out.padded = Xs.padded;
  return out;
}

PsdEstimate welch_psd(const TimeSignal& x, int segments, Real overlap) {
  if (segments < 1) throw std::invalid_argument("segment count must be >= 1");
  if (!(overlap >= 0 && overlap < 1)) throw std::invalid_argument("overlap must be in [0, 1)");
  if (!(x.sample_rate > 0)) throw std::invalid_argument("sample rate must be > 0");

  const Real denom = 1 + (segments - 1) * (1 - overlap);
  Index seg_len = static_cast<Index>(std::floor(static_cast<Real>(x.samples.size()) / denom));
  seg_len -= seg_len % 2;
  if (seg_len < 16) {
    const Index min_len = static_cast<Index>(std::ceil(16 * denom));
    throw std::invalid_argument("signal too short for Welch estimate: need at least " +
                                std::to_string(min_len) + " samples");
  }
  const Index hop = std::max<Index>(
      1, static_cast<Index>(std::floor(static_cast<Real>(seg_len) * (1 - overlap))));

  // Periodic (DFT-even) Hann: sum w = L/2, sum w^2 = 3L/8, ENBW = 1.5 bins.
  Vector window(seg_len);
  for (Index i = 0; i < seg_len; ++i)
    window(i) = Real(0.5) * (1 - std::cos(2 * kPi * static_cast<Real>(i) /
                                          static_cast<Real>(seg_len)));
  const Real win_power = window.squaredNorm();

  Eigen::FFT<Real> fft;
  const Index half = seg_len / 2;
  Vector acc = Vector::Zero(half + 1);
  Vector seg(seg_len);
  ComplexVector bins;
  for (int s = 0; s < segments; ++s) {
    const Index start = s * hop;
    seg = window.cwiseProduct(x.samples.segment(start, seg_len));
    fft.fwd(bins, seg);
    for (Index k = 0; k <= half; ++k) {
      const Real doubling = (k == 0 || k == half) ? 1 : 2;
      acc(k) += doubling * std::norm(bins(k));
    }
  }

  PsdEstimate psd;
  psd.values = acc / (static_cast<Real>(segments) * x.sample_rate * win_power);
  psd.frequencies = bin_frequencies(half + 1, x.sample_rate / static_cast<Real>(seg_len));
  psd.enbw = x.sample_rate * win_power / (window.sum() * window.sum());
  return psd;
}

Vector scale_to_power(const PsdEstimate& psd) { return psd.values * psd.enbw; }

}  // namespace dirtk
