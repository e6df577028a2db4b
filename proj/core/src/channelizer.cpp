#include "pulsepair/channelizer.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <vector>

#include "pulsepair/errors.hpp"
#include "pulsepair/excision.hpp"

namespace pulsepair {

namespace {

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct Channelizer::Impl {
  fftw_complex* in = nullptr;
  fftw_complex* out = nullptr;
  fftw_plan plan = nullptr;

  ~Impl() {
    if (plan) fftw_destroy_plan(plan);
    if (in) fftw_free(in);
    if (out) fftw_free(out);
  }
};

Channelizer::Channelizer(std::size_t fft_len)
    : fft_len_(fft_len), impl_(std::make_unique<Impl>()) {
  if (fft_len_ < kBinsPerSegment || (fft_len_ & (fft_len_ - 1)) != 0) {
    throw DataError("Channelizer: fft_len must be a power of two >= 256");
  }
  impl_->in = fftw_alloc_complex(fft_len_);
  impl_->out = fftw_alloc_complex(fft_len_);
  std::lock_guard<std::mutex> lock(plan_mutex());
  // FFTW_ESTIMATE keeps plan selection deterministic run to run.
  impl_->plan = fftw_plan_dft_1d(static_cast<int>(fft_len_), impl_->in,
                                 impl_->out, FFTW_FORWARD, FFTW_ESTIMATE);
}

Channelizer::~Channelizer() = default;

SpectralFrame Channelizer::channelize(const IQFrame& frame) {
  if (frame.samples.size() != fft_len_) {
    throw DataError("channelize: frame length does not match fft_len");
  }
  const std::size_t n = fft_len_;
  for (std::size_t i = 0; i < n; ++i) {
    impl_->in[i][0] = frame.samples[i].real();
    impl_->in[i][1] = frame.samples[i].imag();
  }
  fftw_execute(impl_->plan);

  SpectralFrame out;
  out.element = frame.element;
  out.start_mjd = frame.start_mjd;
  out.sample_rate_hz = frame.sample_rate_hz;
  out.lo_freq_hz = frame.lo_freq_hz;
  out.bin_width_hz = frame.sample_rate_hz / static_cast<double>(n);
  out.bins.resize(n);

  // Unitary scaling plus fftshift: RF-ascending index j maps to DFT index
  // (j + n/2) mod n.
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const std::size_t half = n / 2;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k = j < half ? j + half : j - half;
    out.bins[j] = {impl_->out[k][0] * scale, impl_->out[k][1] * scale};
  }

  const std::size_t n_seg = (n + kBinsPerSegment - 1) / kBinsPerSegment;
  out.segment_power.assign(n_seg, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    out.segment_power[j / kBinsPerSegment] += std::norm(out.bins[j]);
  }

  // Widest-band power: sampled span clipped to the first-level band and to
  // +/- 25 MHz around the LO (the nominal 50 MHz measurement).
  const NotchSet notches;
  const double span_lo = std::max({frame.lo_freq_hz - frame.sample_rate_hz / 2.0,
                                   notches.first_level_lo_hz,
                                   frame.lo_freq_hz - 25e6});
  const double span_hi = std::min({frame.lo_freq_hz + frame.sample_rate_hz / 2.0,
                                   notches.first_level_hi_hz,
                                   frame.lo_freq_hz + 25e6});
  double wb = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double rf = out.rf_of_bin(j);
    if (rf >= span_lo && rf <= span_hi) wb += std::norm(out.bins[j]);
  }
  out.wideband_power = wb;
  return out;
}

double segment_power(const SpectralFrame& frame, std::size_t segment_index) {
  if (segment_index >= frame.segment_power.size()) {
    throw DataError("segment_power: segment index out of range");
  }
  return frame.segment_power[segment_index];
}

double bin_snr_db(const SpectralFrame& frame, std::size_t bin) {
  if (bin >= frame.bins.size()) throw DataError("bin_snr_db: bin out of range");
  const std::size_t seg = frame.segment_of_bin(bin);
  const std::size_t seg_start = seg * kBinsPerSegment;
  const std::size_t seg_size =
      std::min(kBinsPerSegment, frame.bins.size() - seg_start);
  const double p = frame.bin_power(bin);
  const double noise =
      (frame.segment_power[seg] - p) / static_cast<double>(seg_size - 1);
  if (!(noise > 0.0)) throw DataError("bin_snr_db: degenerate noise estimate");
  return 10.0 * std::log10(p / noise);
}

struct SpectraDumpWriter::DumpImpl {
  std::ofstream out;
  std::string path;
  std::uint64_t fft_len = 0;
  std::uint64_t n_frames = 0;
  char header[64];
};

SpectraDumpWriter::SpectraDumpWriter(const std::string& path,
                                     double sample_rate_hz, std::size_t fft_len,
                                     double start_mjd, double tick_interval_s,
                                     int frames_per_tick, int element,
                                     double lo_freq_hz)
    : dump_(std::make_unique<DumpImpl>()) {
  dump_->out.open(path, std::ios::binary | std::ios::trunc);
  if (!dump_->out) throw IoError("cannot open spectra dump: " + path);
  dump_->path = path;
  dump_->fft_len = fft_len;
  char* h = dump_->header;
  std::memset(h, 0, sizeof(dump_->header));
  std::memcpy(h, "PPSP", 4);
  const std::uint32_t version = 1;
  std::memcpy(h + 4, &version, 4);
  std::memcpy(h + 8, &sample_rate_hz, 8);
  const std::uint64_t len64 = fft_len;
  std::memcpy(h + 16, &len64, 8);
  std::memcpy(h + 24, &start_mjd, 8);
  std::memcpy(h + 32, &tick_interval_s, 8);
  const std::uint32_t fpt = static_cast<std::uint32_t>(frames_per_tick);
  std::memcpy(h + 40, &fpt, 4);
  const std::uint32_t el = static_cast<std::uint32_t>(element);
  std::memcpy(h + 44, &el, 4);
  std::memcpy(h + 48, &lo_freq_hz, 8);
  dump_->out.write(h, sizeof(dump_->header));
}

SpectraDumpWriter::~SpectraDumpWriter() {
  try {
    close();
  } catch (...) {
  }
}

void SpectraDumpWriter::append(const SpectralFrame& frame) {
  if (frame.fft_len() != dump_->fft_len) {
    throw DataError("SpectraDumpWriter: frame length mismatch");
  }
  std::vector<float> buf(frame.fft_len());
  for (std::size_t j = 0; j < buf.size(); ++j) {
    buf[j] = static_cast<float>(frame.bin_power(j));
  }
  dump_->out.write(reinterpret_cast<const char*>(buf.data()),
                   static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!dump_->out) throw IoError("SpectraDumpWriter: write failed: " + dump_->path);
  ++dump_->n_frames;
}

void SpectraDumpWriter::close() {
  if (!dump_->out.is_open()) return;
  std::memcpy(dump_->header + 56, &dump_->n_frames, 8);
  dump_->out.seekp(0);
  dump_->out.write(dump_->header, sizeof(dump_->header));
  dump_->out.close();
  if (dump_->out.fail()) throw IoError("SpectraDumpWriter: close failed: " + dump_->path);
}

}  // namespace pulsepair
