#pragma once

#include <array>
#include <string>
#include <vector>

#include "pulsepair/candidates.hpp"
#include "pulsepair/scenario.hpp"
#include "pulsepair/stats.hpp"

namespace pulsepair {

struct CaptureOptions {
  bool dump_frames = false;
  bool dump_spectra = false;  // per-frame bin powers, debug interface
};

struct CaptureFileInfo {
  std::string cand_path;
  std::string rfi_path;
  double window_start_mjd = 0.0;
  double window_end_mjd = 0.0;
  double ra_start_hr = 0.0;
  double ra_sweep_hr = 0.0;
  long n_candidates = 0;
  long n_rfi = 0;
};

struct CaptureSummary {
  std::vector<CaptureFileInfo> files;
  long total_frames = 0;
  long total_candidates = 0;
  long total_rfi = 0;
  long clipped_samples = 0;
};

// Simulates every planned window and writes one candidate and one RFI file
// per window (cand_<mjd>.csv / rfi_<mjd>.csv), plus run_summary.txt.
// Deterministic for a fixed scenario.
CaptureSummary run_capture(const Scenario& scenario, const std::string& out_dir,
                           const CaptureOptions& options = {});

// Detection over dumped frames (one window per east/west dump pair).
CaptureFileInfo capture_from_dumps(const std::string& east_path,
                                   const std::string& west_path,
                                   const Scenario& scenario,
                                   const std::string& out_dir);

// Candidate files (cand_*.csv) under a directory, sorted by name.
std::vector<std::string> list_candidate_files(const std::string& dir);

// One file per MJD day: the earliest file whose RA sweep contains the RA of
// interest. Days without coverage are omitted.
std::vector<std::string> select_daily_files(const std::vector<std::string>& files,
                                            double ra_of_interest_hr);

struct AnalysisResult {
  std::vector<PairRecord> sorted_pairs;  // second-level filtered + sorted
  std::array<double, kNumRaBins> probabilities{};
  std::vector<std::string> selected_files;
  long first_level_records = 0;
  long pairs_before_filter = 0;
  double mjd_min = 0.0;
  double mjd_max = 0.0;
};

AnalysisResult analyze_files(const std::vector<std::string>& selected_files);
AnalysisResult analyze_directory(const std::string& dir, double ra_of_interest_hr);

void write_pairs_csv(const std::string& path, const AnalysisResult& result);
void write_table_csv(const std::string& path, const AnalysisResult& result);

// Reloads sorted pairs from a pairs CSV. Only the lower component's fields
// and the pair-level fields are recoverable; the upper component carries its
// RF frequency alone.
std::vector<PairRecord> read_pairs_csv(const std::string& path);
std::array<double, kNumRaBins> read_probabilities_csv(const std::string& path);

}  // namespace pulsepair
