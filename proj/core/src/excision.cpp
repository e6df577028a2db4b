#include "pulsepair/excision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pulsepair/errors.hpp"

namespace pulsepair {

const char* notch_result_name(NotchResult r) {
  switch (r) {
    case NotchResult::Keep: return "keep";
    case NotchResult::Harmonic: return "harmonic";
    case NotchResult::LoExclusion: return "lo_exclusion";
    case NotchResult::OutOfBand: return "out_of_band";
  }
  return "?";
}

const char* route_name(Route r) {
  switch (r) {
    case Route::CandidateFile: return "candidate";
    case Route::RfiFile: return "segment_trip";
    case Route::Dropped: return "dropped";
  }
  return "?";
}

NotchResult notch_check(double rf_hz, const NotchSet& notches, FilterLevel level) {
  const double lo = level == FilterLevel::First ? notches.first_level_lo_hz
                                                : notches.second_level_lo_hz;
  const double hi = level == FilterLevel::First ? notches.first_level_hi_hz
                                                : notches.second_level_hi_hz;
  if (rf_hz < lo || rf_hz > hi) return NotchResult::OutOfBand;
  if (rf_hz >= notches.lo_exclusion_lo_hz && rf_hz <= notches.lo_exclusion_hi_hz) {
    return NotchResult::LoExclusion;
  }
  const double dist =
      std::abs(std::remainder(rf_hz, notches.harmonic_base_hz));
  if (dist <= notches.harmonic_halfwidth_hz) return NotchResult::Harmonic;
  return NotchResult::Keep;
}

SegmentLedger::SegmentLedger(std::size_t n_segments, int trip_threshold,
                             int max_rfi_per_segment, int max_rfi_per_frame)
    : count_(n_segments, 0),
      rfi_stored_(n_segments, 0),
      trip_threshold_(trip_threshold),
      max_rfi_per_segment_(max_rfi_per_segment),
      max_rfi_per_frame_(max_rfi_per_frame),
      last_mjd_(-std::numeric_limits<double>::infinity()) {}

Route SegmentLedger::admit(double mjd, std::size_t segment) {
  if (segment >= count_.size()) throw DataError("SegmentLedger: segment out of range");
  if (saw_any_ && mjd < last_mjd_) {
    throw DataError("SegmentLedger: candidates must be presented in time order");
  }
  if (!saw_any_ || mjd > last_mjd_) {
    rfi_this_frame_ = 0;
    last_mjd_ = mjd;
    saw_any_ = true;
  }
  const int n = ++count_[segment];
  if (n <= trip_threshold_) return Route::CandidateFile;
  if (rfi_stored_[segment] >= max_rfi_per_segment_) return Route::Dropped;
  if (rfi_this_frame_ >= max_rfi_per_frame_) return Route::Dropped;
  ++rfi_stored_[segment];
  ++rfi_this_frame_;
  return Route::RfiFile;
}

bool SegmentLedger::tripped(std::size_t segment) const {
  return count_[segment] >= trip_threshold_;
}

int SegmentLedger::candidate_count(std::size_t segment) const {
  return count_[segment];
}

std::pair<int, int> SegmentLedger::rfi_margins(std::size_t segment) const {
  const int n = static_cast<int>(count_.size());
  const int s = static_cast<int>(segment);
  if (tripped(segment)) return {0, 0};
  int low = n;
  for (int i = s - 1; i >= 0; --i) {
    if (tripped(static_cast<std::size_t>(i))) {
      low = s - i;
      break;
    }
  }
  int high = n;
  for (int i = s + 1; i < n; ++i) {
    if (tripped(static_cast<std::size_t>(i))) {
      high = i - s;
      break;
    }
  }
  return {low, high};
}

SegmentLedger::MarginIndex SegmentLedger::margin_index() const {
  const int n = static_cast<int>(count_.size());
  MarginIndex idx;
  idx.low.assign(count_.size(), n);
  idx.high.assign(count_.size(), n);
  int last = -1;
  for (int i = 0; i < n; ++i) {
    if (tripped(static_cast<std::size_t>(i))) {
      idx.low[static_cast<std::size_t>(i)] = 0;
      idx.high[static_cast<std::size_t>(i)] = 0;
      last = i;
    } else if (last >= 0) {
      idx.low[static_cast<std::size_t>(i)] = i - last;
    }
  }
  last = -1;
  for (int i = n - 1; i >= 0; --i) {
    if (tripped(static_cast<std::size_t>(i))) {
      last = i;
    } else if (last >= 0) {
      idx.high[static_cast<std::size_t>(i)] = last - i;
    }
  }
  return idx;
}

void SegmentLedger::reset() {
  std::fill(count_.begin(), count_.end(), 0);
  std::fill(rfi_stored_.begin(), rfi_stored_.end(), 0);
  rfi_this_frame_ = 0;
  last_mjd_ = -std::numeric_limits<double>::infinity();
  saw_any_ = false;
}

}  // namespace pulsepair
