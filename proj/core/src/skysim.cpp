#include "pulsepair/skysim.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include "pulsepair/errors.hpp"
#include "pulsepair/rng.hpp"

namespace pulsepair {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::uint64_t kStreamShared = 0;
constexpr std::uint64_t kStreamEast = 1;
constexpr std::uint64_t kStreamWest = 2;
constexpr std::uint64_t kStreamTones = 3;

constexpr double kSecondsPerDay = 86400.0;

void add_tone(std::vector<std::complex<double>>& samples, double amplitude,
              double baseband_hz, double sample_rate_hz, double phase0,
              std::size_t n0, std::size_t n1) {
  const double omega = kTwoPi * baseband_hz / sample_rate_hz;
  std::complex<double> rot{std::cos(omega), std::sin(omega)};
  std::complex<double> ph =
      amplitude * std::complex<double>{std::cos(phase0 + omega * static_cast<double>(n0)),
                                       std::sin(phase0 + omega * static_cast<double>(n0))};
  for (std::size_t n = n0; n < n1; ++n) {
    samples[n] += ph;
    ph *= rot;
  }
}

std::size_t quantize(std::vector<std::complex<double>>& samples, double sigma,
                     int bits) {
  const int half = 1 << (bits - 1);
  const double step = 4.0 * sigma / static_cast<double>(half);
  std::size_t clipped = 0;
  auto q = [&](double x) {
    double idx = std::floor(x / step);
    if (idx < -half) {
      idx = -half;
      ++clipped;
    } else if (idx > half - 1) {
      idx = half - 1;
      ++clipped;
    }
    return (idx + 0.5) * step;
  };
  for (auto& s : samples) s = {q(s.real()), q(s.imag())};
  return clipped;
}

}  // namespace

SimConfig desk_sim_config() {
  SimConfig cfg;
  cfg.sample_rate_hz = 1.024e6;
  cfg.fft_len = std::size_t{1} << 18;
  cfg.lo_freq_hz = 1415e6;
  return cfg;
}

SimConfig full_sim_config() { return SimConfig{}; }

double element_phase_offset(double source_ra_hr, double mjd,
                            const BaselineGeometry& geometry, double rf_hz,
                            double dec_deg, double site_longitude_deg) {
  const double lst = lst_hours(mjd, site_longitude_deg);
  double ha_hr = lst - source_ra_hr;
  // nearest wrap, hour angle in (-12, 12]
  ha_hr -= 24.0 * std::floor((ha_hr + 12.0) / 24.0);
  const double ha_rad = ha_hr * std::numbers::pi / 12.0;
  const double dec_rad = dec_deg * std::numbers::pi / 180.0;
  // East-West projected offset angle from the meridian.
  const double sin_offset = std::cos(dec_rad) * std::sin(ha_rad);
  return kTwoPi * geometry.baseline_wavelengths *
         (rf_hz / geometry.reference_freq_hz) * sin_offset;
}

FrameGenerator::FrameGenerator(SimConfig cfg, BaselineGeometry geometry,
                               std::vector<InjectedPair> pairs,
                               std::vector<InjectedRfi> rfi,
                               ObservatoryClock clock, Pointing pointing,
                               double window_start_mjd, std::size_t n_ticks,
                               std::uint64_t frame_index_offset)
    : cfg_(cfg),
      geometry_(geometry),
      pairs_(std::move(pairs)),
      rfi_(std::move(rfi)),
      clock_(clock),
      pointing_(pointing),
      window_start_mjd_(window_start_mjd),
      n_ticks_(n_ticks),
      n_frames_(n_ticks * static_cast<std::size_t>(cfg.frames_per_tick)),
      frame_index_offset_(frame_index_offset) {
  if (!(cfg_.sigma > 0.0)) throw DataError("SimConfig: sigma must be positive");
  if (cfg_.correlated_fraction < 0.0 || cfg_.correlated_fraction > 1.0) {
    throw DataError("SimConfig: correlated_fraction outside [0, 1]");
  }
  const double half_band = cfg_.sample_rate_hz / 2.0 - cfg_.bin_width_hz();
  auto check_band = [&](double rf) {
    if (std::abs(rf - cfg_.lo_freq_hz) > half_band) {
      throw DataError("injection outside the sampled band");
    }
  };
  for (const auto& p : pairs_) {
    if (!(p.delta_f_hz > 0.0)) throw DataError("InjectedPair: delta_f must be > 0");
    check_band(p.f_low_hz);
    check_band(p.f_low_hz + p.delta_f_hz);
  }
  for (const auto& r : rfi_) {
    if (!(r.duty_cycle > 0.0 && r.duty_cycle <= 1.0)) {
      throw DataError("InjectedRfi: duty_cycle outside (0, 1]");
    }
    check_band(r.freq_hz);
  }
}

double FrameGenerator::frame_mjd(std::size_t frame_index) const {
  const auto fpt = static_cast<std::size_t>(cfg_.frames_per_tick);
  const std::size_t tick = frame_index / fpt;
  const std::size_t slot = frame_index % fpt;
  const double t_s = static_cast<double>(tick) * clock_.tick_interval_s +
                     static_cast<double>(slot) * cfg_.frame_duration_s();
  return window_start_mjd_ + t_s / kSecondsPerDay;
}

FramePair FrameGenerator::generate(std::size_t frame_index) const {
  if (frame_index >= n_frames_) throw DataError("FrameGenerator: frame index out of range");
  const std::size_t n = cfg_.fft_len;
  const double mjd = frame_mjd(frame_index);
  const std::uint64_t global = frame_index_offset_ + frame_index;

  FramePair out;
  for (IQFrame* f : {&out.east, &out.west}) {
    f->start_mjd = mjd;
    f->sample_rate_hz = cfg_.sample_rate_hz;
    f->lo_freq_hz = cfg_.lo_freq_hz;
    f->samples.resize(n);
  }
  out.east.element = Element::East;
  out.west.element = Element::West;

  // Noise: the correlated fraction of the power is one shared realization.
  const double f_corr = cfg_.correlated_fraction;
  const double sigma_unique = cfg_.sigma * std::sqrt(1.0 - f_corr);
  const double sigma_shared = cfg_.sigma * std::sqrt(f_corr);
  Rng rng_e(derive_seed(cfg_.seed, kStreamEast, global));
  Rng rng_w(derive_seed(cfg_.seed, kStreamWest, global));
  if (f_corr > 0.0) {
    Rng rng_s(derive_seed(cfg_.seed, kStreamShared, global));
    for (std::size_t i = 0; i < n; ++i) {
      const auto shared = rng_s.normal_complex(sigma_shared);
      out.east.samples[i] = shared + rng_e.normal_complex(sigma_unique);
      out.west.samples[i] = shared + rng_w.normal_complex(sigma_unique);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      out.east.samples[i] = rng_e.normal_complex(cfg_.sigma);
      out.west.samples[i] = rng_w.normal_complex(cfg_.sigma);
    }
  }

  // Injections. The tone RNG is consumed at a fixed rate per frame so the
  // noise and phase streams never depend on which injections are active.
  Rng rng_t(derive_seed(cfg_.seed, kStreamTones, global));
  const double frame_s = cfg_.frame_duration_s();
  const double frame_end_mjd = mjd + frame_s / kSecondsPerDay;
  const double bin_w = cfg_.bin_width_hz();

  auto snap = [&](double rf) {
    if (!cfg_.tones_on_bin_centers) return rf;
    return cfg_.lo_freq_hz + std::round((rf - cfg_.lo_freq_hz) / bin_w) * bin_w;
  };

  for (const auto& p : pairs_) {
    const double theta1 = rng_t.uniform_angle();
    const double theta2 = rng_t.uniform_angle();
    const double dur_s = p.duration_s > 0.0 ? p.duration_s : frame_s;
    const double t0 = p.start_mjd;
    const double t1 = p.start_mjd + dur_s / kSecondsPerDay;
    if (t1 <= mjd || t0 >= frame_end_mjd) continue;
    const double ov0 = std::max(t0, mjd);
    const double ov1 = std::min(t1, frame_end_mjd);
    const auto n0 = static_cast<std::size_t>(
        std::round((ov0 - mjd) * kSecondsPerDay * cfg_.sample_rate_hz));
    const auto n1 = std::min<std::size_t>(
        n, static_cast<std::size_t>(
               std::round((ov1 - mjd) * kSecondsPerDay * cfg_.sample_rate_hz)));
    const double snr_lin = std::pow(10.0, p.snr_db / 10.0);
    const double amp =
        cfg_.sigma * std::sqrt(2.0 * snr_lin / static_cast<double>(n));
    const double tones[2] = {snap(p.f_low_hz), snap(p.f_low_hz + p.delta_f_hz)};
    const double thetas[2] = {theta1, theta2};
    for (int t = 0; t < 2; ++t) {
      const double rf = tones[t];
      const double bb = rf - cfg_.lo_freq_hz;
      const double dphi = element_phase_offset(p.source_ra_hr, mjd, geometry_,
                                               rf, pointing_.dec_deg,
                                               clock_.site_longitude_deg);
      add_tone(out.east.samples, amp, bb, cfg_.sample_rate_hz, thetas[t], n0, n1);
      add_tone(out.west.samples, amp, bb, cfg_.sample_rate_hz, thetas[t] + dphi,
               n0, n1);
    }
  }

  for (const auto& r : rfi_) {
    const bool duty_on = rng_t.bernoulli(r.duty_cycle);
    const double theta_e = rng_t.uniform_angle();
    const double theta_w = rng_t.uniform_angle();
    bool active = duty_on;
    if (!r.persistent && frame_index >= std::max<std::size_t>(1, n_frames_ / 10)) {
      active = false;
    }
    if (!active) continue;
    const double rf = snap(r.freq_hz);
    const double bb = rf - cfg_.lo_freq_hz;
    const double amp = cfg_.sigma * std::sqrt(2.0 * r.power / static_cast<double>(n));
    add_tone(out.east.samples, amp, bb, cfg_.sample_rate_hz, theta_e, 0, n);
    add_tone(out.west.samples, amp, bb, cfg_.sample_rate_hz, theta_w, 0, n);
  }

  if (cfg_.quantize_bits > 0) {
    out.clipped_east = quantize(out.east.samples, cfg_.sigma, cfg_.quantize_bits);
    out.clipped_west = quantize(out.west.samples, cfg_.sigma, cfg_.quantize_bits);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Raw frame dumps

struct IqDumpWriter::Impl {
  std::ofstream out;
  IqDumpHeader header;
  std::uint64_t frames_written = 0;
  std::string path;
};

IqDumpWriter::IqDumpWriter(const std::string& path, const IqDumpHeader& header)
    : impl_(std::make_unique<Impl>()) {
  impl_->out.open(path, std::ios::binary | std::ios::trunc);
  if (!impl_->out) throw IoError("cannot open frame dump for writing: " + path);
  impl_->header = header;
  std::memcpy(impl_->header.magic, "PPIQ", 4);
  impl_->header.version = 1;
  impl_->path = path;
  impl_->out.write(reinterpret_cast<const char*>(&impl_->header), sizeof(IqDumpHeader));
}

IqDumpWriter::~IqDumpWriter() {
  try {
    close();
  } catch (...) {
  }
}

void IqDumpWriter::append(const IQFrame& frame) {
  if (frame.samples.size() != impl_->header.fft_len) {
    throw DataError("IqDumpWriter: frame length mismatch");
  }
  std::vector<float> buf(frame.samples.size() * 2);
  for (std::size_t i = 0; i < frame.samples.size(); ++i) {
    buf[2 * i] = static_cast<float>(frame.samples[i].real());
    buf[2 * i + 1] = static_cast<float>(frame.samples[i].imag());
  }
  impl_->out.write(reinterpret_cast<const char*>(buf.data()),
                   static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!impl_->out) throw IoError("IqDumpWriter: write failed: " + impl_->path);
  ++impl_->frames_written;
}

void IqDumpWriter::close() {
  if (!impl_->out.is_open()) return;
  impl_->header.n_frames = impl_->frames_written;
  impl_->out.seekp(0);
  impl_->out.write(reinterpret_cast<const char*>(&impl_->header), sizeof(IqDumpHeader));
  impl_->out.close();
  if (impl_->out.fail()) throw IoError("IqDumpWriter: close failed: " + impl_->path);
}

struct IqDumpReader::Impl {
  mutable std::ifstream in;
  IqDumpHeader header;
  std::string path;
};

IqDumpReader::IqDumpReader(const std::string& path)
    : impl_(std::make_unique<Impl>()) {
  impl_->in.open(path, std::ios::binary);
  if (!impl_->in) throw IoError("cannot open frame dump: " + path);
  impl_->path = path;
  impl_->in.read(reinterpret_cast<char*>(&impl_->header), sizeof(IqDumpHeader));
  if (!impl_->in || std::memcmp(impl_->header.magic, "PPIQ", 4) != 0 ||
      impl_->header.version != 1) {
    throw DataError("not a pulsepair frame dump: " + path);
  }
}

IqDumpReader::~IqDumpReader() = default;

const IqDumpHeader& IqDumpReader::header() const { return impl_->header; }

double IqDumpReader::frame_mjd(std::size_t frame_index) const {
  const auto& h = impl_->header;
  const std::size_t tick = frame_index / h.frames_per_tick;
  const std::size_t slot = frame_index % h.frames_per_tick;
  const double frame_s = static_cast<double>(h.fft_len) / h.sample_rate_hz;
  return h.start_mjd + (static_cast<double>(tick) * h.tick_interval_s +
                        static_cast<double>(slot) * frame_s) /
                           kSecondsPerDay;
}

IQFrame IqDumpReader::read_frame(std::size_t frame_index) const {
  const auto& h = impl_->header;
  if (frame_index >= h.n_frames) throw DataError("IqDumpReader: frame index out of range");
  const std::streamoff off =
      static_cast<std::streamoff>(sizeof(IqDumpHeader)) +
      static_cast<std::streamoff>(frame_index) *
          static_cast<std::streamoff>(h.fft_len * 2 * sizeof(float));
  impl_->in.seekg(off);
  std::vector<float> buf(h.fft_len * 2);
  impl_->in.read(reinterpret_cast<char*>(buf.data()),
                 static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!impl_->in) throw IoError("IqDumpReader: short read: " + impl_->path);

  IQFrame frame;
  frame.element = h.element == 0 ? Element::East : Element::West;
  frame.start_mjd = frame_mjd(frame_index);
  frame.sample_rate_hz = h.sample_rate_hz;
  frame.lo_freq_hz = h.lo_freq_hz;
  frame.samples.resize(h.fft_len);
  for (std::size_t i = 0; i < h.fft_len; ++i) {
    frame.samples[i] = {static_cast<double>(buf[2 * i]),
                        static_cast<double>(buf[2 * i + 1])};
  }
  return frame;
}

}  // namespace pulsepair
