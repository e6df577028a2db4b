#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "pulsepair/channelizer.hpp"
#include "pulsepair/errors.hpp"
#include "pulsepair/rng.hpp"

using namespace pulsepair;

namespace {

IQFrame noise_frame(std::size_t n, double sigma, std::uint64_t seed,
                    double fs = 1.024e6, double lo = 1415e6) {
  IQFrame f;
  f.element = Element::East;
  f.start_mjd = 60284.0;
  f.sample_rate_hz = fs;
  f.lo_freq_hz = lo;
  f.samples.resize(n);
  Rng rng(seed);
  for (auto& s : f.samples) s = rng.normal_complex(sigma);
  return f;
}

}  // namespace

TEST_CASE("pure bin-center tone concentrates into one bin") {
  const std::size_t n = 4096;
  IQFrame f;
  f.sample_rate_hz = 1.024e6;
  f.lo_freq_hz = 1415e6;
  f.samples.resize(n);
  const double bin_w = f.sample_rate_hz / static_cast<double>(n);
  const long k = 37;  // baseband bin offset from the LO
  const double amp = 0.5;
  for (std::size_t i = 0; i < n; ++i) {
    const double ph = 2.0 * std::numbers::pi * k * static_cast<double>(i) /
                      static_cast<double>(n);
    f.samples[i] = amp * std::complex<double>{std::cos(ph), std::sin(ph)};
  }
  Channelizer chan(n);
  const SpectralFrame sf = chan.channelize(f);

  const auto bin = static_cast<std::size_t>(sf.bin_of_rf(f.lo_freq_hz + k * bin_w));
  CHECK(sf.bin_power(bin) ==
        doctest::Approx(amp * amp * static_cast<double>(n)).epsilon(1e-9));
  double rest = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j != bin) rest += sf.bin_power(j);
  }
  CHECK(rest < 1e-12 * sf.bin_power(bin));
  CHECK(sf.rf_of_bin(bin) == doctest::Approx(f.lo_freq_hz + k * bin_w));
}

TEST_CASE("all-zero frame gives a zero spectrum") {
  const std::size_t n = 1024;
  IQFrame f;
  f.sample_rate_hz = 1.024e6;
  f.lo_freq_hz = 1415e6;
  f.samples.assign(n, {0.0, 0.0});
  Channelizer chan(n);
  const SpectralFrame sf = chan.channelize(f);
  for (std::size_t j = 0; j < n; ++j) CHECK(sf.bin_power(j) == 0.0);
  for (std::size_t s = 0; s < sf.n_segments(); ++s) CHECK(sf.segment_power[s] == 0.0);
  CHECK(sf.wideband_power == 0.0);
}

TEST_CASE("Parseval holds to 1e-6 relative on noise frames") {
  const std::size_t n = 1 << 14;
  Channelizer chan(n);
  const IQFrame f = noise_frame(n, 1.3, 77);
  double time_power = 0.0;
  for (const auto& s : f.samples) time_power += std::norm(s);
  const SpectralFrame sf = chan.channelize(f);
  double freq_power = 0.0;
  for (std::size_t j = 0; j < n; ++j) freq_power += sf.bin_power(j);
  CHECK(std::abs(freq_power - time_power) / time_power < 1e-6);

  double seg_total = 0.0;
  for (std::size_t s = 0; s < sf.n_segments(); ++s) seg_total += sf.segment_power[s];
  CHECK(std::abs(seg_total - freq_power) / freq_power < 1e-12);
}

TEST_CASE("mean noise bin power equals the complex sample variance") {
  // 100 frames; relative MC sigma ~ 1/sqrt(frames * n).
  const std::size_t n = 1 << 12;
  const double sigma = 0.9;
  Channelizer chan(n);
  double acc = 0.0;
  const int frames = 100;
  for (int r = 0; r < frames; ++r) {
    const SpectralFrame sf = chan.channelize(noise_frame(n, sigma, 1000 + r));
    for (std::size_t j = 0; j < n; ++j) acc += sf.bin_power(j);
  }
  const double mean = acc / (frames * static_cast<double>(n));
  const double expect = 2.0 * sigma * sigma;
  const double rel_sigma = 1.0 / std::sqrt(static_cast<double>(frames) * n);
  CHECK(std::abs(mean - expect) / expect < 3.0 * rel_sigma);
}

TEST_CASE("segment power is 256 bins' worth of noise plus injected tone") {
  const std::size_t n = 1 << 12;
  const double sigma = 1.0;
  Channelizer chan(n);
  double seg_acc = 0.0;
  const int frames = 200;
  for (int r = 0; r < frames; ++r) {
    const SpectralFrame sf = chan.channelize(noise_frame(n, sigma, 5000 + r));
    seg_acc += sf.segment_power[3];
  }
  const double mean_seg = seg_acc / frames;
  const double expect = 256.0 * 2.0 * sigma * sigma;
  // a segment sums 256 unit-mean exponentials: rel sigma = 1/sqrt(256*frames)
  const double rel_sigma = 1.0 / std::sqrt(256.0 * frames);
  CHECK(std::abs(mean_seg - expect) / expect < 3.0 * rel_sigma);

  // one 20 dB tone adds ~100 mean-bin-powers to its segment
  IQFrame f = noise_frame(n, sigma, 99);
  const double bin_w = f.sample_rate_hz / static_cast<double>(n);
  const long k = -700;
  const double snr_lin = 100.0;
  const double amp = sigma * std::sqrt(2.0 * snr_lin / static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double ph = 2.0 * std::numbers::pi * k * static_cast<double>(i) /
                      static_cast<double>(n);
    f.samples[i] += amp * std::complex<double>{std::cos(ph), std::sin(ph)};
  }
  const SpectralFrame sf = chan.channelize(f);
  const auto bin = static_cast<std::size_t>(sf.bin_of_rf(f.lo_freq_hz + k * bin_w));
  const std::size_t seg = sf.segment_of_bin(bin);
  const double noise_unit = 2.0 * sigma * sigma;
  CHECK(sf.segment_power[seg] / noise_unit ==
        doctest::Approx(256.0 + snr_lin).epsilon(0.2));

  CHECK_THROWS_AS(segment_power(sf, sf.n_segments()), DataError);
}

TEST_CASE("bin_snr_db is exact on a constructed spectrum") {
  SpectralFrame sf;
  sf.bin_width_hz = 3.90625;
  sf.lo_freq_hz = 1415e6;
  sf.sample_rate_hz = 1.024e6;
  sf.bins.assign(512, {1.0, 0.0});  // unit power everywhere
  sf.segment_power.assign(2, 256.0);
  // bin power equal to the mean of the other 255 bins -> 0 dB
  CHECK(bin_snr_db(sf, 17) == doctest::Approx(0.0).epsilon(1e-12));
  // make one bin 100x the others: SNR = 20 dB against the clean estimate
  sf.bins[100] = {10.0, 0.0};
  sf.segment_power[0] = 255.0 + 100.0;
  CHECK(bin_snr_db(sf, 100) == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("rf mapping is invertible within one bin") {
  const std::size_t n = 1 << 12;
  Channelizer chan(n);
  const SpectralFrame sf = chan.channelize(noise_frame(n, 1.0, 4242));
  for (std::size_t bin : {std::size_t{0}, std::size_t{1}, n / 2, n - 2, n - 1}) {
    const double rf = sf.rf_of_bin(bin);
    CHECK(sf.bin_of_rf(rf) == static_cast<std::ptrdiff_t>(bin));
    CHECK(std::abs(sf.rf_of_bin(static_cast<std::size_t>(sf.bin_of_rf(rf))) - rf) <
          sf.bin_width_hz);
  }
}

TEST_CASE("estimator and model SNR exceedances follow their own tail laws") {
  // Model SNR exceedance is exp(-t); the 255-bin leave-one-out estimator
  // follows the heavier (1 + t/255)^-255 tail. Both are checked at 3 MC
  // sigma, and the laws differ by ~10% at 8.5 dB, far beyond the MC error.
  const std::size_t n = 1 << 14;
  const double sigma = 1.0;
  const double t_lin = std::pow(10.0, 0.85);
  const int frames = 300;
  Channelizer chan(n);
  long exceed_model = 0, exceed_est = 0;
  for (int r = 0; r < frames; ++r) {
    const SpectralFrame sf = chan.channelize(noise_frame(n, sigma, 20000 + r));
    const double noise_unit = 2.0 * sigma * sigma;
    for (std::size_t j = 0; j < n; ++j) {
      if (sf.bin_power(j) / noise_unit > t_lin) ++exceed_model;
      if (sf.bin_power(j) > t_lin *
                                (sf.segment_power[j / kBinsPerSegment] -
                                 sf.bin_power(j)) /
                                255.0) {
        ++exceed_est;
      }
    }
  }
  const double trials = static_cast<double>(frames) * static_cast<double>(n);
  const double p_model = std::exp(-t_lin);
  const double p_est = std::pow(1.0 + t_lin / 255.0, -255.0);
  CHECK(std::abs(exceed_model - trials * p_model) <
        3.0 * std::sqrt(trials * p_model));
  CHECK(std::abs(exceed_est - trials * p_est) < 3.0 * std::sqrt(trials * p_est));
  // sanity: the two laws are distinguishable at this sample size
  CHECK(trials * (p_est - p_model) > 5.0 * std::sqrt(trials * p_est));
}

TEST_CASE("channelize validates the frame length") {
  Channelizer chan(1024);
  IQFrame f = noise_frame(512, 1.0, 1);
  CHECK_THROWS_AS(chan.channelize(f), DataError);
}
