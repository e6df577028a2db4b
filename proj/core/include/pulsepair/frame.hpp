#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace pulsepair {

enum class Element { East = 0, West = 1 };

inline const char* element_name(Element e) {
  return e == Element::East ? "east" : "west";
}

// One FFT interval of complex zero-IF baseband samples from one element.
struct IQFrame {
  Element element = Element::East;
  double start_mjd = 0.0;
  double sample_rate_hz = 0.0;
  double lo_freq_hz = 0.0;
  std::vector<std::complex<double>> samples;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

inline constexpr std::size_t kBinsPerSegment = 256;

// Complex spectrum of one frame. Bins are stored in RF-ascending order
// (index 0 = lowest RF), so bin index, segment index and RF all increase
// together; segment 0 sits at the bottom of the sampled band.
struct SpectralFrame {
  Element element = Element::East;
  double start_mjd = 0.0;
  double bin_width_hz = 0.0;
  double lo_freq_hz = 0.0;
  double sample_rate_hz = 0.0;
  std::vector<std::complex<double>> bins;
  std::vector<double> segment_power;
  double wideband_power = 0.0;

  std::size_t fft_len() const { return bins.size(); }
  std::size_t n_segments() const { return segment_power.size(); }

  double rf_of_bin(std::size_t bin) const {
    const auto half = static_cast<std::ptrdiff_t>(bins.size() / 2);
    return lo_freq_hz +
           (static_cast<std::ptrdiff_t>(bin) - half) * bin_width_hz;
  }

  // Nearest bin to an RF frequency; may fall outside [0, fft_len).
  std::ptrdiff_t bin_of_rf(double rf_hz) const {
    const auto half = static_cast<std::ptrdiff_t>(bins.size() / 2);
    const double rel = (rf_hz - lo_freq_hz) / bin_width_hz;
    return half + static_cast<std::ptrdiff_t>(rel >= 0.0 ? rel + 0.5 : rel - 0.5);
  }

  std::size_t segment_of_bin(std::size_t bin) const {
    return bin / kBinsPerSegment;
  }

  double bin_power(std::size_t bin) const { return std::norm(bins[bin]); }
};

}  // namespace pulsepair
