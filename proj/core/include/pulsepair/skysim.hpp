#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pulsepair/frame.hpp"
#include "pulsepair/timebase.hpp"

namespace pulsepair {

// Simulation scale. sigma is the per-quadrature-component noise standard
// deviation (the Rayleigh parameter of the per-bin amplitude), so the
// complex noise variance per sample, and the mean noise bin power after the
// unitary FFT, are both 2*sigma^2.
struct SimConfig {
  double sample_rate_hz = 62.5e6;  // 1 / 16 ns delay tap
  std::size_t fft_len = std::size_t{1} << 24;
  double lo_freq_hz = 1425e6;
  double sigma = 1.0;
  double correlated_fraction = 0.0;  // share of noise POWER common to both elements
  int quantize_bits = 8;             // 0 disables quantization
  std::uint64_t seed = 1;
  bool tones_on_bin_centers = true;
  int frames_per_tick = 2;  // adjacent-time FFTs per element per tick

  double bin_width_hz() const {
    return sample_rate_hz / static_cast<double>(fft_len);
  }
  double frame_duration_s() const {
    return static_cast<double>(fft_len) / sample_rate_hz;
  }
};

// Desk preset: same 256 bins/segment ratio and thresholds as full scale,
// small enough to run statistical suites in minutes. The LO sits at
// 1415 MHz so the narrow sampled span stays clear of the fixed 1424-1426 MHz
// exclusion while remaining inside both filter bands.
SimConfig desk_sim_config();
SimConfig full_sim_config();

// A dt=0 pulse pair: two tones delta_f apart, injected into both elements
// with the West-East phase offset implied by the source direction.
struct InjectedPair {
  double f_low_hz = 0.0;
  double delta_f_hz = 0.0;
  double snr_db = 20.0;       // target per-bin SNR
  double source_ra_hr = 0.0;
  double duration_s = 0.0;    // <= 0 means one FFT interval
  double start_mjd = 0.0;
};

// A terrestrial narrowband tone: present in both elements but with
// independent random phase per element (no stable sky direction).
struct InjectedRfi {
  double freq_hz = 0.0;
  double power = 0.0;       // per-bin SNR, linear
  double duty_cycle = 1.0;  // probability a given frame contains the tone
  bool persistent = true;   // false: active only in the first tenth of the run
};

struct BaselineGeometry {
  double baseline_wavelengths = 32.0;
  double reference_freq_hz = 1425e6;
};

// West-East RF phase difference for a source at the given RA when observed
// at mjd. Zero at meridian transit; odd in the hour angle.
double element_phase_offset(double source_ra_hr, double mjd,
                            const BaselineGeometry& geometry, double rf_hz,
                            double dec_deg = -8.0,
                            double site_longitude_deg = 0.0);

struct FramePair {
  IQFrame east;
  IQFrame west;
  std::size_t clipped_east = 0;  // quantizer clip counts
  std::size_t clipped_west = 0;
};

// Deterministic two-element frame source for one capture window. Frames are
// seeded individually from (seed, stream, global frame index), so a frame's
// samples depend only on its index, never on generation order.
class FrameGenerator {
 public:
  FrameGenerator(SimConfig cfg, BaselineGeometry geometry,
                 std::vector<InjectedPair> pairs, std::vector<InjectedRfi> rfi,
                 ObservatoryClock clock, Pointing pointing,
                 double window_start_mjd, std::size_t n_ticks,
                 std::uint64_t frame_index_offset = 0);

  std::size_t n_frames() const { return n_frames_; }
  double frame_mjd(std::size_t frame_index) const;

  // Both elements of one adjacent-time frame slot.
  FramePair generate(std::size_t frame_index) const;

  const SimConfig& config() const { return cfg_; }

 private:
  SimConfig cfg_;
  BaselineGeometry geometry_;
  std::vector<InjectedPair> pairs_;
  std::vector<InjectedRfi> rfi_;
  ObservatoryClock clock_;
  Pointing pointing_;
  double window_start_mjd_;
  std::size_t n_ticks_;
  std::size_t n_frames_;
  std::uint64_t frame_index_offset_;
};

// Raw frame dump: 64-byte little-endian header, then per frame fft_len
// complex samples as interleaved float32 I, Q.
struct IqDumpHeader {
  char magic[4];  // "PPIQ"
  std::uint32_t version;
  double sample_rate_hz;
  std::uint64_t fft_len;
  double start_mjd;
  double tick_interval_s;
  std::uint32_t frames_per_tick;
  std::uint32_t element;
  double lo_freq_hz;
  std::uint64_t n_frames;
};
static_assert(sizeof(IqDumpHeader) == 64);

class IqDumpWriter {
 public:
  IqDumpWriter(const std::string& path, const IqDumpHeader& header);
  ~IqDumpWriter();
  void append(const IQFrame& frame);
  void close();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

class IqDumpReader {
 public:
  explicit IqDumpReader(const std::string& path);
  ~IqDumpReader();
  const IqDumpHeader& header() const;
  double frame_mjd(std::size_t frame_index) const;
  IQFrame read_frame(std::size_t frame_index) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pulsepair
