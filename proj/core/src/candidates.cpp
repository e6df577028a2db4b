#include "pulsepair/candidates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pulsepair/channelizer.hpp"
#include "pulsepair/errors.hpp"
#include "pulsepair/timebase.hpp"

namespace pulsepair {

double wrap_phase(double rad) {
  double w = std::remainder(rad, 2.0 * std::numbers::pi);
  if (w <= -std::numbers::pi) w = std::numbers::pi;
  return w;
}

FirstLevelResult first_level_filter(const SpectralFrame& east,
                                    const SpectralFrame& west,
                                    const NotchSet& notches,
                                    SegmentLedger& ledger, double ra_hr,
                                    const DetectionConfig& cfg) {
  if (east.start_mjd != west.start_mjd || east.fft_len() != west.fft_len() ||
      east.bin_width_hz != west.bin_width_hz ||
      east.lo_freq_hz != west.lo_freq_hz) {
    throw DataError("first_level_filter: element frames are misaligned");
  }
  if (east.element != Element::East || west.element != Element::West) {
    throw DataError("first_level_filter: element roles are swapped");
  }

  const std::size_t n = east.fft_len();
  const double t_lin = std::pow(10.0, cfg.snr_threshold_db / 10.0);
  const int ra_bin = ra_bin_of(ra_hr);

  // Per-segment power cutoffs equivalent to the leave-one-out SNR test:
  //   p > t * (S - p) / (m - 1)  <=>  p > t * S / (m - 1 + t).
  const std::size_t n_seg = east.n_segments();
  std::vector<double> cut_e(n_seg), cut_w(n_seg);
  for (std::size_t s = 0; s < n_seg; ++s) {
    const std::size_t seg_start = s * kBinsPerSegment;
    const auto m = static_cast<double>(std::min(kBinsPerSegment, n - seg_start));
    cut_e[s] = t_lin * east.segment_power[s] / (m - 1.0 + t_lin);
    cut_w[s] = t_lin * west.segment_power[s] / (m - 1.0 + t_lin);
  }

  FirstLevelResult result;
  for (std::size_t bin = 0; bin < n; ++bin) {
    const std::size_t seg = bin / kBinsPerSegment;
    const double pe = east.bin_power(bin);
    if (pe <= cut_e[seg]) continue;
    const double pw = west.bin_power(bin);
    if (pw <= cut_w[seg]) continue;
    const double rf = east.rf_of_bin(bin);
    if (notch_check(rf, notches, FilterLevel::First) != NotchResult::Keep) {
      continue;
    }
    const Route route = ledger.admit(east.start_mjd, seg);
    if (route == Route::Dropped) continue;

    CandidateRecord rec;
    rec.mjd = east.start_mjd;
    rec.ra_hr = ra_hr;
    rec.ra_bin = ra_bin;
    rec.rf_hz = rf;
    rec.bin_index = bin;
    rec.snr_east_db = bin_snr_db(east, bin);
    rec.snr_west_db = bin_snr_db(west, bin);
    rec.phi_east_rad = std::arg(east.bins[bin]);
    rec.phi_west_rad = std::arg(west.bins[bin]);
    rec.p954_east = east.segment_power[seg];
    rec.p954_west = west.segment_power[seg];
    rec.p50m_east = east.wideband_power;
    rec.p50m_west = west.wideband_power;
    (route == Route::CandidateFile ? result.candidates : result.rfi)
        .push_back(rec);
  }
  return result;
}

std::vector<PairRecord> form_pairs(const std::vector<CandidateRecord>& cands) {
  std::vector<PairRecord> pairs;
  if (cands.size() < 2) return pairs;
  pairs.reserve(cands.size() - 1);
  for (std::size_t i = 1; i < cands.size(); ++i) {
    const CandidateRecord& lo = cands[i - 1];
    const CandidateRecord& hi = cands[i];
    if (hi.mjd != lo.mjd) throw DataError("form_pairs: candidates span frames");
    if (hi.bin_index <= lo.bin_index) {
      throw DataError("form_pairs: candidates are not bin-sorted");
    }
    PairRecord p;
    p.lower = lo;
    p.upper = hi;
    p.delta_f_hz = hi.rf_hz - lo.rf_hz;
    p.log10_df_mhz = std::log10(p.delta_f_hz / 1e6);
    const double d_hi = hi.phi_west_rad - hi.phi_east_rad;
    const double d_lo = lo.phi_west_rad - lo.phi_east_rad;
    p.dd_phi_abs_rad = std::abs(wrap_phase(d_hi - d_lo));
    p.pair_mjd = hi.mjd;
    p.ra_bin = hi.ra_bin;
    pairs.push_back(p);
  }
  return pairs;
}

std::vector<PairRecord> second_level_filter(std::vector<PairRecord> pairs,
                                            const NotchSet& notches,
                                            double max_delta_f_hz,
                                            double max_dd_phi_rad) {
  auto outside = [&](double rf) {
    return rf < notches.second_level_lo_hz || rf > notches.second_level_hi_hz;
  };
  std::erase_if(pairs, [&](const PairRecord& p) {
    return outside(p.lower.rf_hz) || outside(p.upper.rf_hz) ||
           p.delta_f_hz >= max_delta_f_hz ||
           p.dd_phi_abs_rad >= max_dd_phi_rad;
  });
  std::sort(pairs.begin(), pairs.end(),
            [](const PairRecord& a, const PairRecord& b) {
              if (a.dd_phi_abs_rad != b.dd_phi_abs_rad) {
                return a.dd_phi_abs_rad < b.dd_phi_abs_rad;
              }
              if (a.pair_mjd != b.pair_mjd) return a.pair_mjd < b.pair_mjd;
              return a.upper.rf_hz < b.upper.rf_hz;
            });
  return pairs;
}

}  // namespace pulsepair
