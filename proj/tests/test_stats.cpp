#include <doctest.h>

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numbers>

#include "pulsepair/errors.hpp"
#include "pulsepair/rng.hpp"
#include "pulsepair/stats.hpp"

using namespace pulsepair;

TEST_CASE("rayleigh_tail closed forms and Monte Carlo") {
  CHECK(rayleigh_tail(0.0, 1.0) == 1.0);
  const double sigma = 1.4;
  const double r_half = sigma * std::sqrt(2.0 * std::log(2.0));
  CHECK(rayleigh_tail(r_half, sigma) == doctest::Approx(0.5).epsilon(1e-12));

  Rng rng(99);
  const double r = 2.0;
  long exceed = 0;
  const long n = 200000;
  for (long i = 0; i < n; ++i) {
    if (std::abs(rng.normal_complex(sigma)) > r) ++exceed;
  }
  const double p = rayleigh_tail(r, sigma);
  CHECK(std::abs(exceed - n * p) < 3.0 * std::sqrt(n * p * (1 - p)));
}

TEST_CASE("expected_candidates and the equal-rate threshold steps") {
  ThresholdModel model;
  model.n_fft = 1 << 24;
  model.snr_threshold_db = -300.0;  // exp term -> 1
  model.n_elements = 2;
  CHECK(expected_candidates(model) ==
        doctest::Approx(static_cast<double>(1 << 24)).epsilon(1e-9));

  // thresholds for equal candidate rate: 3.01 dB down for 1->2 elements,
  // 1.76 dB more for 2->3
  const double n_fft = 1 << 24, n_cand = 15.0;
  const double t1 = equal_rate_threshold_db(n_fft, n_cand, 1);
  const double t2 = equal_rate_threshold_db(n_fft, n_cand, 2);
  const double t3 = equal_rate_threshold_db(n_fft, n_cand, 3);
  CHECK(t1 - t2 == doctest::Approx(10.0 * std::log10(2.0)).epsilon(1e-12));
  CHECK(t2 - t3 == doctest::Approx(10.0 * std::log10(1.5)).epsilon(1e-12));
  CHECK(t1 - t2 == doctest::Approx(3.0103).epsilon(1e-4));
  CHECK(t2 - t3 == doctest::Approx(1.7609).epsilon(1e-4));

  // consistency: expected_candidates at the solved threshold returns n_cand
  model.snr_threshold_db = t2;
  model.n_elements = 2;
  model.n_fft = n_fft;
  CHECK(expected_candidates(model) == doctest::Approx(n_cand).epsilon(1e-9));
}

TEST_CASE("event probabilities: uniform sweep over bins 40..80") {
  const auto probs = event_probabilities({{4.0, 4.1}});
  double total = 0.0;
  for (int bin = 0; bin < kNumRaBins; ++bin) {
    const double p = probs[static_cast<std::size_t>(bin)];
    total += p;
    if (bin >= 40 && bin <= 80) {
      CHECK(p == doctest::Approx(1.0 / 41.0).epsilon(1e-9));
    } else {
      CHECK(p == 0.0);
    }
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("event probabilities: drifting daily windows give a peaked profile") {
  // 61 days of 4-hour windows whose RA coverage drifts by the sidereal
  // excess each day, as when fixed-UTC blocks are selected per day.
  std::vector<RaInterval> dwell;
  const double sweep = 4.0 * kSiderealRate;
  const double drift = 24.0 * (kSiderealRate - 1.0);
  const double center = 5.25;
  for (int day = 0; day < 61; ++day) {
    const double start = center - sweep + day * drift;
    dwell.push_back({start, sweep});
  }
  const auto probs = event_probabilities(dwell);
  double total = 0.0;
  int peak_bin = 0;
  double peak = -1.0;
  for (int bin = 0; bin < kNumRaBins; ++bin) {
    total += probs[static_cast<std::size_t>(bin)];
    if (probs[static_cast<std::size_t>(bin)] > peak) {
      peak = probs[static_cast<std::size_t>(bin)];
      peak_bin = bin;
    }
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(peak_bin - ra_bin_of(center)) <= 2);
  // profile decays away from the peak on both sides
  CHECK(probs[static_cast<std::size_t>(peak_bin - 20)] < peak);
  CHECK(probs[static_cast<std::size_t>(peak_bin + 20)] < peak);

  CHECK_THROWS_AS(event_probabilities({}), DataError);
}

TEST_CASE("binomial tail values from the paper's Fig. 3") {
  CHECK(binomial_tail(2, 1, 0.024) == doctest::Approx(0.047424).epsilon(1e-9));
  // exact summation gives 0.0127876; the paper rounds to 0.011
  CHECK(binomial_tail(38, 4, 0.024) ==
        doctest::Approx(0.0127876430).epsilon(1e-7));
  CHECK(binomial_tail(10, 0, 0.3) == 1.0);
  CHECK(binomial_tail(10, 11, 0.3) == 0.0);
}

TEST_CASE("binomial tail + cdf partition to 1, and match the beta oracle") {
  const struct {
    long n, k;
    double p;
  } cases[] = {
      {10, 3, 0.2},      {100, 50, 0.5},    {1000, 10, 0.005},
      {38, 4, 0.024},    {100000, 120, 0.001}, {1000000, 500000, 0.5},
      {1000000, 501000, 0.5},
  };
  for (const auto& c : cases) {
    const double tail = binomial_tail(c.n, c.k, c.p);
    const double cdf = binomial_cdf(c.n, c.k - 1, c.p);
    // exact partition at moderate n; at n ~ 1e6 the double-precision lgamma
    // ulp (~1e-9 absolute in a log of ~1e7) is the attainable floor
    CHECK(std::abs(tail + cdf - 1.0) < (c.n <= 10000 ? 1e-12 : 1e-8));
    // oracle: P(X >= k) = I_p(k, n-k+1)
    if (c.k >= 1 && c.k <= c.n) {
      const double oracle = boost::math::ibeta(
          static_cast<double>(c.k), static_cast<double>(c.n - c.k + 1), c.p);
      CHECK(tail == doctest::Approx(oracle).epsilon(1e-8));
    }
  }
  // frozen large-n spot values
  CHECK(binomial_tail(1000000, 500000, 0.5) ==
        doctest::Approx(0.50039894).epsilon(1e-7));
  CHECK(binomial_tail(1000000, 501000, 0.5) ==
        doctest::Approx(0.022804150).epsilon(1e-7));
  CHECK_THROWS_AS(binomial_tail(10, 2, 0.0), DataError);
  CHECK_THROWS_AS(binomial_tail(10, 2, 1.0), DataError);
}

TEST_CASE("cohens_d arithmetic and symmetry") {
  CHECK(cohens_d(26, 1300, 0.02) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(cohens_d(60, 1280, 0.02) == doctest::Approx(6.8679231).epsilon(1e-7));
  // antisymmetric about events = trials * p
  const double up = cohens_d(30, 100, 0.25);
  const double down = cohens_d(20, 100, 0.25);
  CHECK(up == doctest::Approx(-down).epsilon(1e-12));
  CHECK_THROWS_AS(cohens_d(5, 0, 0.5), DataError);
  CHECK_THROWS_AS(cohens_d(5, 10, 0.0), DataError);
}

namespace {

PairRecord pair_in_bin(int bin, double ddphi, double log10df = -3.0) {
  PairRecord p;
  p.ra_bin = bin;
  p.dd_phi_abs_rad = ddphi;
  p.log10_df_mhz = log10df;
  p.pair_mjd = 60284.0 + ddphi;
  return p;
}

}  // namespace

TEST_CASE("running d grows as sqrt(i) when one bin takes every event") {
  std::array<double, kNumRaBins> probs{};
  probs[10] = 0.5;
  probs[11] = 0.5;
  RaBinTable table(probs);
  std::vector<PairRecord> pairs;
  for (int i = 0; i < 25; ++i) pairs.push_back(pair_in_bin(10, 0.001 * i));
  std::vector<double> series;
  running_d_series(pairs, table, [&](long trial, int bin, double d, bool) {
    if (bin == 10) series.push_back(d);
    (void)trial;
  });
  REQUIRE(series.size() == 25);
  for (int i = 1; i <= 25; ++i) {
    CHECK(series[static_cast<std::size_t>(i - 1)] ==
          doctest::Approx(std::sqrt(static_cast<double>(i))).epsilon(1e-9));
  }
  CHECK(table.trials() == 25);
  CHECK(table.events(10) == 25);
  CHECK(table.sum_log10_df(10) == doctest::Approx(25.0 * -3.0).epsilon(1e-9));
}

TEST_CASE("running d stays bounded when events follow the probabilities") {
  // null Monte Carlo: events multinomial across bins proportional to p
  std::array<double, kNumRaBins> probs{};
  for (int bin = 40; bin < 80; ++bin) probs[static_cast<std::size_t>(bin)] = 1.0 / 40.0;
  Rng rng(7);
  int over = 0;
  const int runs = 20;
  for (int run = 0; run < runs; ++run) {
    RaBinTable table(probs);
    std::vector<PairRecord> pairs;
    for (int i = 0; i < 200; ++i) {
      const int bin = 40 + static_cast<int>(rng.uniform01() * 40.0);
      pairs.push_back(pair_in_bin(bin, 1e-4 * i));
    }
    running_d_series(pairs, table, nullptr);
    double max_abs = 0.0;
    for (int bin = 40; bin < 80; ++bin) {
      max_abs = std::max(max_abs, std::abs(table.d_value(bin)));
    }
    if (max_abs > 3.0) ++over;
  }
  CHECK(over <= 4);  // family-wise excursions beyond 3 are rare

  // unsorted input is rejected
  RaBinTable table(probs);
  std::vector<PairRecord> bad = {pair_in_bin(41, 0.05), pair_in_bin(41, 0.01)};
  CHECK_THROWS_AS(running_d_series(bad, table, nullptr), DataError);

  // empty input emits nothing
  RaBinTable empty_table(probs);
  long emitted = 0;
  running_d_series({}, empty_table,
                   [&](long, int, double, bool) { ++emitted; });
  CHECK(emitted == 0);
  CHECK(empty_table.trials() == 0);
}

TEST_CASE("df_likelihood analytic points and sampling oracle") {
  CHECK(df_likelihood(0.0, 1e-3) == 0.0);
  const double density = 2.5e-4;
  CHECK(df_likelihood(std::log(2.0) / density, density) ==
        doctest::Approx(0.5).epsilon(1e-12));

  Rng rng(11);
  const double x = 3000.0;
  long below = 0;
  const long n = 100000;
  for (long i = 0; i < n; ++i) {
    const double spacing = -std::log(1.0 - rng.uniform01()) / density;
    if (spacing < x) ++below;
  }
  const double p = df_likelihood(x, density);
  CHECK(std::abs(below - n * p) < 3.0 * std::sqrt(n * p * (1 - p)));
  CHECK_THROWS_AS(df_likelihood(100.0, 0.0), DataError);
}

TEST_CASE("snr_likelihood_log10 matches the dual-element tail") {
  CHECK(snr_likelihood_log10(8.5) == doctest::Approx(-6.1491390).epsilon(1e-7));
  CHECK(snr_likelihood_log10(-300.0) == doctest::Approx(0.0).epsilon(1e-12));

  // Monte Carlo: both elements' bin SNR above s
  Rng rng(13);
  const double snr_db = 3.0;
  const double s = std::pow(10.0, snr_db / 10.0);
  long both = 0;
  const long n = 200000;
  for (long i = 0; i < n; ++i) {
    const double a = std::norm(rng.normal_complex(1.0)) / 2.0;
    const double b = std::norm(rng.normal_complex(1.0)) / 2.0;
    if (a > s && b > s) ++both;
  }
  const double p = std::pow(10.0, snr_likelihood_log10(snr_db));
  CHECK(std::abs(both - n * p) < 3.0 * std::sqrt(n * p * (1 - p)));
}

TEST_CASE("phase to sky angle conversion") {
  BaselineGeometry geom;
  CHECK(phase_to_sky_angle_deg(0.1, geom) ==
        doctest::Approx(0.0284966).epsilon(1e-5));
  CHECK(std::abs(phase_to_sky_angle_deg(0.1, geom) - 0.0285) < 0.001);
  CHECK(phase_to_sky_angle_deg(0.0, geom) == 0.0);
  CHECK(phase_to_sky_angle_deg(0.2, geom) ==
        doctest::Approx(2.0 * phase_to_sky_angle_deg(0.1, geom)).epsilon(1e-12));
}
