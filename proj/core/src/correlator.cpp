#include "pulsepair/correlator.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

#include "pulsepair/errors.hpp"

namespace pulsepair {

namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct Correlator::Impl {
  fftw_complex* in = nullptr;
  fftw_complex* out = nullptr;
  fftw_plan plan = nullptr;

  ~Impl() {
    if (plan) fftw_destroy_plan(plan);
    if (in) fftw_free(in);
    if (out) fftw_free(out);
  }
};

Correlator::Correlator(std::size_t fft_len)
    : fft_len_(fft_len), impl_(std::make_unique<Impl>()) {
  if (fft_len_ < 2 || (fft_len_ & (fft_len_ - 1)) != 0) {
    throw DataError("Correlator: fft_len must be a power of two");
  }
  impl_->in = fftw_alloc_complex(fft_len_);
  impl_->out = fftw_alloc_complex(fft_len_);
  std::lock_guard<std::mutex> lock(plan_mutex());
  impl_->plan = fftw_plan_dft_1d(static_cast<int>(fft_len_), impl_->in,
                                 impl_->out, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Correlator::~Correlator() = default;

LagSpectrum Correlator::cross_correlate(const SpectralFrame& east,
                                        const SpectralFrame& west,
                                        CorrelationNorm norm) {
  const std::size_t n = fft_len_;
  if (east.fft_len() != n || west.fft_len() != n) {
    throw DataError("cross_correlate: frame length does not match plan");
  }
  if (east.start_mjd != west.start_mjd ||
      east.bin_width_hz != west.bin_width_hz ||
      east.lo_freq_hz != west.lo_freq_hz) {
    throw DataError("cross_correlate: element frames are misaligned");
  }

  // Conjugate product per bin, laid out in DFT order for the inverse
  // transform (bins are stored RF-ascending; the half-length rotation is
  // self-inverse).
  const std::size_t half = n / 2;
  double power_e = 0.0, power_w = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = k < half ? k + half : k - half;
    const std::complex<double> prod = east.bins[j] * std::conj(west.bins[j]);
    impl_->in[k][0] = prod.real();
    impl_->in[k][1] = prod.imag();
    power_e += std::norm(east.bins[j]);
    power_w += std::norm(west.bins[j]);
  }
  fftw_execute(impl_->plan);

  double scale;
  if (norm == CorrelationNorm::Coherence) {
    const double denom = std::sqrt(power_e * power_w);
    if (!(denom > 0.0)) throw DataError("cross_correlate: zero-power frame");
    scale = 1.0 / denom;
  } else {
    scale = 1.0 / static_cast<double>(n);
  }

  // Raw lag l holds (1/N) sum_n e[n] conj(w[n - l]); a West delay of k
  // peaks at raw lag N - k. Remap so that delay d lands at center + d.
  LagSpectrum lag;
  lag.taps.resize(n);
  lag.tap_interval_s = 1.0 / east.sample_rate_hz;
  lag.zero_lag_index = half;
  for (std::size_t t = 0; t < n; ++t) {
    const auto d = static_cast<std::ptrdiff_t>(t) -
                   static_cast<std::ptrdiff_t>(half);
    const std::size_t raw =
        d <= 0 ? static_cast<std::size_t>(-d)
               : n - static_cast<std::size_t>(d);
    lag.taps[t] = std::complex<double>{impl_->out[raw][0], impl_->out[raw][1]} *
                  scale;
  }
  return lag;
}

}  // namespace pulsepair
