#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pulsepair/skysim.hpp"
#include "pulsepair/timebase.hpp"

namespace pulsepair {

// Which windows of the daily grid get simulated.
enum class Coverage {
  Selected,  // only the per-day window covering the RA of interest
  All,
};

// A pulse-pair injection as written in a scenario. With daily_at_transit
// the pair is re-injected each day when the source crosses the meridian,
// aligned to the enclosing window's frame grid.
struct PairSpec {
  InjectedPair pair;
  bool daily_at_transit = false;
};

// Parsed scenario file: simulation scale, clock/geometry, injections and
// the capture-window plan.
struct Scenario {
  SimConfig sim;
  BaselineGeometry geometry;
  ObservatoryClock clock;
  Pointing pointing;
  std::vector<PairSpec> pair_specs;
  std::vector<InjectedRfi> rfi;

  double start_mjd = 60284.0;
  int n_days = 1;
  double file_duration_hr = 0.1;
  double ra_of_interest_hr = 5.25;
  Coverage coverage = Coverage::Selected;
  bool margins_at_candidate_time = false;
};

// One planned capture window. frame_offset gives the global frame index of
// the window's first frame, used for per-frame RNG seeding.
struct WindowPlan {
  double start_mjd = 0.0;
  std::size_t n_ticks = 0;
  std::uint64_t frame_offset = 0;
  double ra_start_hr = 0.0;
  double ra_sweep_hr = 0.0;

  double end_mjd(const ObservatoryClock& clock) const {
    return start_mjd +
           static_cast<double>(n_ticks) * clock.tick_interval_s / 86400.0;
  }
};

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

// Daily window grid (one file per file_duration_hr slot), filtered to the
// RA-covering window per day when coverage is Selected.
std::vector<WindowPlan> plan_windows(const Scenario& scenario);

// Expands daily_at_transit pair specs against the window plan; explicit
// start times pass through unchanged.
std::vector<InjectedPair> resolve_injections(const Scenario& scenario,
                                             const std::vector<WindowPlan>& windows);

// True if x lies in the half-open RA interval [start, start+len) mod 24.
bool ra_interval_contains(double start_hr, double length_hr, double x_hr);

}  // namespace pulsepair
