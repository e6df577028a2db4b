#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "pulsepair/frame.hpp"

namespace pulsepair {

// FFT stage: IQFrame -> SpectralFrame with unitary normalization, so that
// the sum of bin powers equals the sum of sample powers (Parseval) and the
// mean noise bin power equals the complex noise variance. Rectangular
// window; the paper-scale bin-width x interval product of ~1 implies no
// taper.
//
// One instance owns one FFTW plan for a fixed length. Instances are
// independent; a single instance is not safe for concurrent channelize()
// calls.
class Channelizer {
 public:
  explicit Channelizer(std::size_t fft_len);
  ~Channelizer();

  Channelizer(const Channelizer&) = delete;
  Channelizer& operator=(const Channelizer&) = delete;

  std::size_t fft_len() const { return fft_len_; }

  // Throws DataError if the frame length does not match the plan.
  SpectralFrame channelize(const IQFrame& frame);

 private:
  struct Impl;
  std::size_t fft_len_;
  std::unique_ptr<Impl> impl_;
};

// Power in one 256-bin segment (sum of bin powers over the frame interval).
// Throws DataError for an out-of-range index.
double segment_power(const SpectralFrame& frame, std::size_t segment_index);

// Per-bin SNR in dB against the bin's own 954 Hz-class segment, with the
// candidate bin excluded from the noise estimate:
//   snr = |bin|^2 / (segment_power_excluding_bin / (segment_size - 1)).
// Throws DataError for an out-of-range bin or a degenerate noise estimate.
double bin_snr_db(const SpectralFrame& frame, std::size_t bin);

// Debug dump of per-frame bin powers: same 64-byte header convention as the
// raw frame dump but magic "PPSP", then fft_len float32 powers per frame in
// RF-ascending order.
class SpectraDumpWriter {
 public:
  SpectraDumpWriter(const std::string& path, double sample_rate_hz,
                    std::size_t fft_len, double start_mjd,
                    double tick_interval_s, int frames_per_tick, int element,
                    double lo_freq_hz);
  ~SpectraDumpWriter();
  void append(const SpectralFrame& frame);
  void close();

 private:
  struct DumpImpl;
  std::unique_ptr<DumpImpl> dump_;
};

}  // namespace pulsepair
