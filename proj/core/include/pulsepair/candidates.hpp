#pragma once

#include <cstddef>
#include <vector>

#include "pulsepair/excision.hpp"
#include "pulsepair/frame.hpp"

namespace pulsepair {

// One first-level detection: a bin above threshold on both elements, clear
// of the fixed notches, routed to the candidate file by the segment ledger.
struct CandidateRecord {
  double mjd = 0.0;
  double ra_hr = 0.0;
  int ra_bin = 0;
  double rf_hz = 0.0;
  std::size_t bin_index = 0;
  double snr_east_db = 0.0;
  double snr_west_db = 0.0;
  double phi_east_rad = 0.0;
  double phi_west_rad = 0.0;
  double p954_east = 0.0;
  double p954_west = 0.0;
  double p50m_east = 0.0;
  double p50m_west = 0.0;
  int margin_low = -1;   // filled from the ledger at end of file
  int margin_high = -1;
};

// One dt=0 pulse pair: two bin-consecutive candidates from one frame.
struct PairRecord {
  CandidateRecord lower;
  CandidateRecord upper;
  double delta_f_hz = 0.0;
  double log10_df_mhz = 0.0;
  double dd_phi_abs_rad = 0.0;
  double pair_mjd = 0.0;
  int ra_bin = 0;
};

struct DetectionConfig {
  double snr_threshold_db = 8.5;
};

struct FirstLevelResult {
  std::vector<CandidateRecord> candidates;  // routed to the candidate file
  std::vector<CandidateRecord> rfi;         // diverted by the segment ledger
};

// Dual-element first-level filter for one frame pair. Records are emitted in
// bin order; margins are left unfilled (end-of-file annotation). Throws
// DataError if the frames are misaligned.
FirstLevelResult first_level_filter(const SpectralFrame& east,
                                    const SpectralFrame& west,
                                    const NotchSet& notches,
                                    SegmentLedger& ledger, double ra_hr,
                                    const DetectionConfig& cfg = {});

// Wraps an angle to (-pi, pi].
double wrap_phase(double rad);

// Consecutive-candidate pairs per Eq-style index rule: candidates i-1 and i
// of one bin-sorted frame form pair i. Throws DataError on mixed frames or
// unsorted input; fewer than two candidates yield an empty list.
std::vector<PairRecord> form_pairs(const std::vector<CandidateRecord>& cands);

// Second-level cut: both components inside the second-level band,
// delta_f < max_delta_f_hz, |ddPhi| < max_dd_phi_rad; result sorted by
// ascending |ddPhi| with (mjd, upper RF) tie-break.
std::vector<PairRecord> second_level_filter(std::vector<PairRecord> pairs,
                                            const NotchSet& notches,
                                            double max_delta_f_hz = 100e3,
                                            double max_dd_phi_rad = 0.1);

}  // namespace pulsepair
