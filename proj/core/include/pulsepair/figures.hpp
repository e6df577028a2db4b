#pragma once

#include <array>
#include <string>
#include <vector>

#include "pulsepair/candidates.hpp"
#include "pulsepair/timebase.hpp"

namespace pulsepair {

// Caption constants carried in every figure dataset header.
struct FigureHeader {
  long points = 0;
  double mjd_min = 0.0;
  double mjd_max = 0.0;
  double log10_df_mhz_max = -1.0;
  double dd_phi_max_rad = 0.1;
};

// Writes figure_01..figure_13 CSV datasets plus SVG scatter renders into
// out_dir. Pairs must be second-level filtered and sorted by |ddPhi|.
// Datasets are the contract; a plotting failure only skips the image.
void emit_figures(const std::vector<PairRecord>& sorted_pairs,
                  const std::array<double, kNumRaBins>& probabilities,
                  const FigureHeader& header, const std::string& out_dir);

}  // namespace pulsepair
