#include "pulsepair/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pulsepair/errors.hpp"

namespace pulsepair {

double rayleigh_tail(double r, double sigma) {
  if (r < 0.0 || !(sigma > 0.0)) throw DataError("rayleigh_tail: invalid arguments");
  return std::exp(-(r * r) / (2.0 * sigma * sigma));
}

double expected_candidates(const ThresholdModel& model) {
  if (model.n_elements < 1 || model.n_fft < 1.0) {
    throw DataError("expected_candidates: invalid model");
  }
  const double snr_lin = std::pow(10.0, model.snr_threshold_db / 10.0);
  return model.n_fft * std::exp(-static_cast<double>(model.n_elements) * snr_lin);
}

double equal_rate_threshold_db(double n_fft, double n_candidates,
                               int n_elements) {
  if (!(n_fft > 0.0) || !(n_candidates > 0.0) || n_candidates >= n_fft ||
      n_elements < 1) {
    throw DataError("equal_rate_threshold_db: invalid arguments");
  }
  const double snr_lin =
      std::log(n_fft / n_candidates) / static_cast<double>(n_elements);
  return 10.0 * std::log10(snr_lin);
}

std::array<double, kNumRaBins> event_probabilities(
    const std::vector<RaInterval>& dwell) {
  std::array<double, kNumRaBins> acc{};
  double total = 0.0;
  // Adds dwell over [a, b] with 0 <= a <= b <= 24, walking bins by index.
  auto add_span = [&](double a, double b) {
    int bin = std::min(kNumRaBins - 1,
                       static_cast<int>(std::floor(a / kRaBinWidthHr)));
    while (a < b - 1e-15 && bin < kNumRaBins) {
      const double hi = std::min(b, (bin + 1) * kRaBinWidthHr);
      if (hi > a) {
        acc[static_cast<std::size_t>(bin)] += hi - a;
        total += hi - a;
        a = hi;
      }
      ++bin;
    }
  };
  for (const auto& iv : dwell) {
    if (!(iv.length_hr > 0.0)) continue;
    const double start = iv.start_hr - 24.0 * std::floor(iv.start_hr / 24.0);
    const double len = std::min(iv.length_hr, 24.0);
    if (start + len <= 24.0) {
      add_span(start, start + len);
    } else {
      add_span(start, 24.0);
      add_span(0.0, start + len - 24.0);
    }
  }
  if (!(total > 0.0)) throw DataError("event_probabilities: zero total dwell");
  for (auto& p : acc) p /= total;
  return acc;
}

namespace {

// log C(n, k) + k log p + (n - k) log q
double log_pmf(long n, long k, double log_p, double log_q) {
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0) +
         static_cast<double>(k) * log_p + static_cast<double>(n - k) * log_q;
}

// Streaming log-sum-exp over binomial terms j in [j0, j1]. The term log is
// refreshed from lgamma periodically so recurrence rounding cannot
// accumulate over ~1e6 steps; the remaining floor is the lgamma ulp.
double binomial_sum(long n, long j0, long j1, double p) {
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  double max_log = -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  double log_t = log_pmf(n, j0, log_p, log_q);
  const double log_ratio_base = log_p - log_q;
  for (long j = j0;; ++j) {
    if (log_t > max_log) {
      acc = acc * std::exp(max_log - log_t) + 1.0;
      max_log = log_t;
    } else {
      acc += std::exp(log_t - max_log);
    }
    if (j == j1) break;
    if ((j - j0) % 4096 == 4095) {
      log_t = log_pmf(n, j + 1, log_p, log_q);
    } else {
      // t_{j+1} / t_j = (n - j) / (j + 1) * p / q
      log_t += std::log(static_cast<double>(n - j) /
                        (static_cast<double>(j) + 1.0)) +
               log_ratio_base;
    }
  }
  const double v = max_log + std::log(acc);
  return v >= 0.0 ? 1.0 : std::exp(v);
}

}  // namespace

double binomial_tail(long n, long k, double p) {
  if (!(p > 0.0 && p < 1.0)) throw DataError("binomial_tail: p outside (0, 1)");
  if (n < 0 || k < 0) throw DataError("binomial_tail: negative arguments");
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  return binomial_sum(n, k, n, p);
}

double binomial_cdf(long n, long k, double p) {
  if (!(p > 0.0 && p < 1.0)) throw DataError("binomial_cdf: p outside (0, 1)");
  if (n < 0) throw DataError("binomial_cdf: negative n");
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  return binomial_sum(n, 0, k, p);
}

double cohens_d(long events, long trials, double p) {
  if (trials < 1) throw DataError("cohens_d: trials must be >= 1");
  if (!(p > 0.0 && p < 1.0)) throw DataError("cohens_d: p outside (0, 1)");
  const double nt = static_cast<double>(trials);
  return (static_cast<double>(events) - nt * p) / std::sqrt(nt * p * (1.0 - p));
}

double df_likelihood(double delta_f_hz, double candidate_density_per_hz) {
  if (!(candidate_density_per_hz > 0.0)) {
    throw DataError("df_likelihood: density must be positive");
  }
  if (delta_f_hz < 0.0) throw DataError("df_likelihood: negative delta_f");
  return -std::expm1(-candidate_density_per_hz * delta_f_hz);
}

double snr_likelihood_log10(double snr_db) {
  const double snr_lin = std::pow(10.0, snr_db / 10.0);
  return -2.0 * snr_lin / std::numbers::ln10;
}

double phase_to_sky_angle_deg(double dd_phi_rad,
                              const BaselineGeometry& geometry) {
  const double rad =
      dd_phi_rad / (2.0 * std::numbers::pi * geometry.baseline_wavelengths);
  return rad * 180.0 / std::numbers::pi;
}

RaBinTable::RaBinTable(std::array<double, kNumRaBins> probability)
    : prob_(probability) {}

double RaBinTable::d_value(int bin) const {
  const auto b = static_cast<std::size_t>(bin);
  if (trials_ == 0 || !(prob_[b] > 0.0 && prob_[b] < 1.0)) return 0.0;
  return cohens_d(events_[b], trials_, prob_[b]);
}

void RaBinTable::add_trial(const PairRecord& pair) {
  const auto b = static_cast<std::size_t>(pair.ra_bin);
  ++trials_;
  ++events_[b];
  sum_log10_df_[b] += pair.log10_df_mhz;
}

void running_d_series(const std::vector<PairRecord>& sorted_pairs,
                      RaBinTable& table, const DSeriesEmit& emit) {
  double last = -1.0;
  for (const auto& pair : sorted_pairs) {
    if (pair.dd_phi_abs_rad < last) {
      throw DataError("running_d_series: pairs not sorted by |ddPhi|");
    }
    last = pair.dd_phi_abs_rad;
    table.add_trial(pair);
    if (!emit) continue;
    for (int bin = 0; bin < kNumRaBins; ++bin) {
      const double p = table.probability()[static_cast<std::size_t>(bin)];
      if (!(p > 0.0)) continue;
      emit(table.trials(), bin, table.d_value(bin), bin == pair.ra_bin);
    }
  }
}

}  // namespace pulsepair
