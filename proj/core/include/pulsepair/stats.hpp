#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "pulsepair/candidates.hpp"
#include "pulsepair/skysim.hpp"
#include "pulsepair/timebase.hpp"

namespace pulsepair {

// Rayleigh exceedance P(amplitude > r) = exp(-r^2 / (2 sigma^2)), sigma the
// per-quadrature Gaussian std deviation.
double rayleigh_tail(double r, double sigma);

struct ThresholdModel {
  double sigma = 1.0;
  double snr_threshold_db = 8.5;
  double n_fft = 1.0;
  int n_elements = 2;
};

// Expected dual(or M)-element candidates per FFT interval:
//   n_fft * exp(-n_elements * 10^(snr_threshold_db / 10)).
double expected_candidates(const ThresholdModel& model);

// SNR threshold (dB) at which an M-element coincidence yields the given
// candidate count per FFT interval.
double equal_rate_threshold_db(double n_fft, double n_candidates,
                               int n_elements);

// An RA interval swept by one capture file, start in hours (wraps mod 24).
struct RaInterval {
  double start_hr = 0.0;
  double length_hr = 0.0;
};

// Per-bin event probability from accumulated dwell time, normalized to 1.
// Throws DataError if total dwell is zero.
std::array<double, kNumRaBins> event_probabilities(
    const std::vector<RaInterval>& dwell);

// P(X >= k) and P(X <= k) for X ~ Binomial(n, p); log-space summation,
// stable up to n ~ 1e6. Throws DataError for p outside (0, 1).
double binomial_tail(long n, long k, double p);
double binomial_cdf(long n, long k, double p);

// Effect size (events - trials*p) / sqrt(trials*p*(1-p)).
double cohens_d(long events, long trials, double p);

// Probability that a Poisson-spaced neighbor lies within delta_f:
//   1 - exp(-density * delta_f).  Surrogate for the close-spacing score.
double df_likelihood(double delta_f_hz, double candidate_density_per_hz);

// log10 of the dual-element Rayleigh tail at the given SNR. Surrogate for
// the per-pair SNR likelihood.
double snr_likelihood_log10(double snr_db);

// Small-angle sky pointing difference, degrees, for a differential phase at
// the reference frequency.
double phase_to_sky_angle_deg(double dd_phi_rad,
                              const BaselineGeometry& geometry);

// Per-RA-bin trial/event bookkeeping over the sorted second-level pairs.
class RaBinTable {
 public:
  explicit RaBinTable(std::array<double, kNumRaBins> probability);

  const std::array<double, kNumRaBins>& probability() const { return prob_; }
  long trials() const { return trials_; }
  long events(int bin) const { return events_[static_cast<std::size_t>(bin)]; }
  double sum_log10_df(int bin) const {
    return sum_log10_df_[static_cast<std::size_t>(bin)];
  }
  // Cohen's d for a bin at the current trial count; 0 before any trial.
  double d_value(int bin) const;

  void add_trial(const PairRecord& pair);

 private:
  std::array<double, kNumRaBins> prob_{};
  std::array<long, kNumRaBins> events_{};
  std::array<double, kNumRaBins> sum_log10_df_{};
  long trials_ = 0;
};

// Folds sorted pairs into the table, emitting the running d series: after
// each trial, one callback per bin with nonzero probability. Throws
// DataError if pairs are not ascending in |ddPhi|.
using DSeriesEmit =
    std::function<void(long trial, int bin, double d, bool event_bin)>;
void running_d_series(const std::vector<PairRecord>& sorted_pairs,
                      RaBinTable& table, const DSeriesEmit& emit);

}  // namespace pulsepair
