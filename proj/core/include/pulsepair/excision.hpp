#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace pulsepair {

// Fixed frequency-domain excision rules. All values in RF Hz.
struct NotchSet {
  double harmonic_base_hz = 100e3;
  double harmonic_halfwidth_hz = 15e3;
  double lo_exclusion_lo_hz = 1424e6;
  double lo_exclusion_hi_hz = 1426e6;
  double first_level_lo_hz = 1398e6;
  double first_level_hi_hz = 1451e6;
  double second_level_lo_hz = 1405e6;
  double second_level_hi_hz = 1435e6;
};

enum class FilterLevel { First, Second };

enum class NotchResult { Keep, Harmonic, LoExclusion, OutOfBand };

const char* notch_result_name(NotchResult r);

// Fixed-filter check for a single RF frequency. OutOfBand uses the first- or
// second-level band depending on level.
NotchResult notch_check(double rf_hz, const NotchSet& notches, FilterLevel level);

enum class Route { CandidateFile, RfiFile, Dropped };

const char* route_name(Route r);

// Per-segment candidate bookkeeping for one capture file. Counts candidates
// per 256-bin segment; once a segment's count passes the trip threshold its
// subsequent records are diverted to the RFI file, capped per segment and
// per frame. Single writer, time-ordered input; a fresh ledger is used for
// each capture file.
class SegmentLedger {
 public:
  explicit SegmentLedger(std::size_t n_segments, int trip_threshold = 10,
                         int max_rfi_per_segment = 200,
                         int max_rfi_per_frame = 100);

  // Routes the next candidate, presented in time order (equal mjd = same
  // frame). Throws DataError if mjd moves backwards.
  Route admit(double mjd, std::size_t segment);

  bool tripped(std::size_t segment) const;
  int candidate_count(std::size_t segment) const;
  std::size_t n_segments() const { return count_.size(); }
  int trip_threshold() const { return trip_threshold_; }

  // Segments from `segment` to the nearest tripped segment below and above.
  // (0, 0) inside a tripped segment; n_segments() as saturating sentinel
  // when no tripped segment exists on a side.
  std::pair<int, int> rfi_margins(std::size_t segment) const;

  // O(n_segments) precomputation of both margin directions, for bulk
  // annotation at end of file.
  struct MarginIndex {
    std::vector<int> low;
    std::vector<int> high;
  };
  MarginIndex margin_index() const;

  void reset();

 private:
  std::vector<int> count_;
  std::vector<int> rfi_stored_;
  int trip_threshold_;
  int max_rfi_per_segment_;
  int max_rfi_per_frame_;
  int rfi_this_frame_ = 0;
  double last_mjd_;
  bool saw_any_ = false;
};

}  // namespace pulsepair
