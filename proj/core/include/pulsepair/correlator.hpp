#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include "pulsepair/frame.hpp"

namespace pulsepair {

// Lag-domain cross-correlation of one frame pair. Taps are centered:
// zero lag sits at index fft_len/2, and a West stream delayed by k samples
// peaks at zero_lag_index + k (delay k / sample_rate, 16 ns per tap at full
// scale).
struct LagSpectrum {
  std::vector<std::complex<double>> taps;
  double tap_interval_s = 0.0;
  std::size_t zero_lag_index = 0;

  double delay_of(std::size_t tap) const {
    return (static_cast<double>(tap) - static_cast<double>(zero_lag_index)) *
           tap_interval_s;
  }
};

enum class CorrelationNorm {
  Coherence,  // divide by the geometric mean of frame powers
  Raw,        // bare conjugate-product transform (bilinear)
};

// FX correlator back end: per-bin conjugate multiply and one inverse FFT.
// One instance owns one plan for a fixed length; not safe for concurrent
// calls on the same instance.
class Correlator {
 public:
  explicit Correlator(std::size_t fft_len);
  ~Correlator();

  Correlator(const Correlator&) = delete;
  Correlator& operator=(const Correlator&) = delete;

  std::size_t fft_len() const { return fft_len_; }

  // Throws DataError if the frames are misaligned or (for coherence
  // normalization) degenerate.
  LagSpectrum cross_correlate(const SpectralFrame& east,
                              const SpectralFrame& west,
                              CorrelationNorm norm = CorrelationNorm::Coherence);

 private:
  struct Impl;
  std::size_t fft_len_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pulsepair
