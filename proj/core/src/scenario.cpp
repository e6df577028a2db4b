#include "pulsepair/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "pulsepair/csvio.hpp"
#include "pulsepair/errors.hpp"

namespace pulsepair {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  std::size_t b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v, int line_no) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw UsageError("scenario line " + std::to_string(line_no) +
                   ": expected boolean, got '" + v + "'");
}

double wrap24(double h) { return h - 24.0 * std::floor(h / 24.0); }

}  // namespace

bool ra_interval_contains(double start_hr, double length_hr, double x_hr) {
  return wrap24(x_hr - start_hr) < length_hr;
}

Scenario parse_scenario(const std::string& text) {
  Scenario sc;
  sc.sim = desk_sim_config();
  sc.sim.quantize_bits = 0;

  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  // Injection sections under construction.
  bool pair_open = false, rfi_open = false;
  PairSpec cur_pair;
  InjectedRfi cur_rfi;
  auto flush_inject = [&]() {
    if (pair_open) sc.pair_specs.push_back(cur_pair);
    if (rfi_open) sc.rfi.push_back(cur_rfi);
    pair_open = rfi_open = false;
  };

  auto fail = [&](const std::string& msg) -> void {
    throw UsageError("scenario line " + std::to_string(line_no) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header");
      flush_inject();
      section = trim(line.substr(1, line.size() - 2));
      if (section == "inject_pair") {
        pair_open = true;
        cur_pair = PairSpec{};
      } else if (section == "inject_rfi") {
        rfi_open = true;
        cur_rfi = InjectedRfi{};
      } else if (section != "sim" && section != "clock" &&
                 section != "pointing" && section != "geometry" &&
                 section != "run") {
        fail("unknown section [" + section + "]");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto num = [&]() { return parse_double(value); };

    if (section == "sim") {
      if (key == "preset") {
        if (value == "desk") {
          const auto keep_seed = sc.sim.seed;
          const auto keep_q = sc.sim.quantize_bits;
          sc.sim = desk_sim_config();
          sc.sim.seed = keep_seed;
          sc.sim.quantize_bits = keep_q;
        } else if (value == "full") {
          const auto keep_seed = sc.sim.seed;
          const auto keep_q = sc.sim.quantize_bits;
          sc.sim = full_sim_config();
          sc.sim.seed = keep_seed;
          sc.sim.quantize_bits = keep_q;
          sc.file_duration_hr = 4.0;
        } else {
          fail("preset must be desk or full");
        }
      } else if (key == "sample_rate_hz") {
        sc.sim.sample_rate_hz = num();
      } else if (key == "fft_len") {
        sc.sim.fft_len = static_cast<std::size_t>(parse_long(value));
      } else if (key == "lo_freq_hz") {
        sc.sim.lo_freq_hz = num();
      } else if (key == "sigma") {
        sc.sim.sigma = num();
      } else if (key == "correlated_fraction") {
        sc.sim.correlated_fraction = num();
      } else if (key == "quantize_bits") {
        sc.sim.quantize_bits = static_cast<int>(parse_long(value));
      } else if (key == "seed") {
        sc.sim.seed = static_cast<std::uint64_t>(parse_long(value));
      } else if (key == "tones_on_bin_centers") {
        sc.sim.tones_on_bin_centers = parse_bool(value, line_no);
      } else if (key == "frames_per_tick") {
        sc.sim.frames_per_tick = static_cast<int>(parse_long(value));
      } else {
        fail("unknown [sim] key '" + key + "'");
      }
    } else if (section == "clock") {
      if (key == "start_mjd") {
        sc.start_mjd = num();
        sc.clock.mjd_epoch = sc.start_mjd;
      } else if (key == "site_longitude_deg") {
        sc.clock.site_longitude_deg = num();
      } else if (key == "tick_interval_s") {
        sc.clock.tick_interval_s = num();
      } else {
        fail("unknown [clock] key '" + key + "'");
      }
    } else if (section == "pointing") {
      if (key == "dec_deg") {
        sc.pointing.dec_deg = num();
      } else if (key == "azimuth_deg") {
        sc.pointing.azimuth_deg = num();
      } else {
        fail("unknown [pointing] key '" + key + "'");
      }
    } else if (section == "geometry") {
      if (key == "baseline_wavelengths") {
        sc.geometry.baseline_wavelengths = num();
      } else if (key == "reference_freq_hz") {
        sc.geometry.reference_freq_hz = num();
      } else {
        fail("unknown [geometry] key '" + key + "'");
      }
    } else if (section == "run") {
      if (key == "n_days") {
        sc.n_days = static_cast<int>(parse_long(value));
      } else if (key == "file_duration_hr") {
        sc.file_duration_hr = num();
      } else if (key == "ra_of_interest_hr") {
        sc.ra_of_interest_hr = num();
      } else if (key == "coverage") {
        if (value == "selected") {
          sc.coverage = Coverage::Selected;
        } else if (value == "all") {
          sc.coverage = Coverage::All;
        } else {
          fail("coverage must be selected or all");
        }
      } else if (key == "margins_at_candidate_time") {
        sc.margins_at_candidate_time = parse_bool(value, line_no);
      } else {
        fail("unknown [run] key '" + key + "'");
      }
    } else if (section == "inject_pair") {
      if (key == "f_low_hz") {
        cur_pair.pair.f_low_hz = num();
      } else if (key == "delta_f_hz") {
        cur_pair.pair.delta_f_hz = num();
      } else if (key == "snr_db") {
        cur_pair.pair.snr_db = num();
      } else if (key == "source_ra_hr") {
        cur_pair.pair.source_ra_hr = num();
      } else if (key == "duration_s") {
        cur_pair.pair.duration_s = num();
      } else if (key == "start_mjd") {
        cur_pair.pair.start_mjd = num();
      } else if (key == "daily_at_transit") {
        cur_pair.daily_at_transit = parse_bool(value, line_no);
      } else {
        fail("unknown [inject_pair] key '" + key + "'");
      }
    } else if (section == "inject_rfi") {
      if (key == "freq_hz") {
        cur_rfi.freq_hz = num();
      } else if (key == "power") {
        cur_rfi.power = num();
      } else if (key == "duty_cycle") {
        cur_rfi.duty_cycle = num();
      } else if (key == "persistent") {
        cur_rfi.persistent = parse_bool(value, line_no);
      } else {
        fail("unknown [inject_rfi] key '" + key + "'");
      }
    } else {
      fail("key outside any section");
    }
  }
  flush_inject();

  if (sc.n_days < 1) throw UsageError("scenario: n_days must be >= 1");
  if (!(sc.file_duration_hr > 0.0)) {
    throw UsageError("scenario: file_duration_hr must be positive");
  }
  if (!(sc.ra_of_interest_hr >= 0.0 && sc.ra_of_interest_hr < 24.0)) {
    throw UsageError("scenario: ra_of_interest_hr outside [0, 24)");
  }
  if (!(sc.clock.tick_interval_s > 0.0)) {
    throw UsageError("scenario: tick_interval_s must be positive");
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::vector<WindowPlan> plan_windows(const Scenario& sc) {
  const double dur_hr = sc.file_duration_hr;
  const double tick_s = sc.clock.tick_interval_s;
  const auto n_ticks =
      static_cast<std::size_t>(std::floor(dur_hr * 3600.0 / tick_s + 0.5));
  if (n_ticks == 0) throw UsageError("plan_windows: window shorter than one tick");
  const int per_day = std::max(1, static_cast<int>(std::floor(24.0 / dur_hr)));
  const double sweep_hr = dur_hr * kSiderealRate;

  std::vector<WindowPlan> plan;
  std::uint64_t frame_offset = 0;
  const auto frames_per_window =
      n_ticks * static_cast<std::size_t>(sc.sim.frames_per_tick);
  for (int day = 0; day < sc.n_days; ++day) {
    bool taken = false;
    for (int k = 0; k < per_day; ++k) {
      WindowPlan w;
      w.start_mjd = sc.start_mjd + day + k * dur_hr / 24.0;
      w.n_ticks = n_ticks;
      w.ra_start_hr = lst_hours(w.start_mjd, sc.clock.site_longitude_deg);
      w.ra_sweep_hr = sweep_hr;
      if (sc.coverage == Coverage::Selected) {
        if (taken ||
            !ra_interval_contains(w.ra_start_hr, w.ra_sweep_hr,
                                  sc.ra_of_interest_hr)) {
          continue;
        }
        taken = true;
      }
      w.frame_offset = frame_offset;
      frame_offset += frames_per_window;
      plan.push_back(w);
    }
  }
  return plan;
}

std::vector<InjectedPair> resolve_injections(
    const Scenario& sc, const std::vector<WindowPlan>& windows) {
  std::vector<InjectedPair> out;
  const double tick_s = sc.clock.tick_interval_s;
  for (const auto& spec : sc.pair_specs) {
    if (!spec.daily_at_transit) {
      if (spec.pair.start_mjd <= 0.0) {
        throw UsageError(
            "inject_pair: start_mjd required unless daily_at_transit");
      }
      out.push_back(spec.pair);
      continue;
    }
    for (const auto& w : windows) {
      const double ahead_hr =
          spec.pair.source_ra_hr - w.ra_start_hr -
          24.0 * std::floor((spec.pair.source_ra_hr - w.ra_start_hr) / 24.0);
      if (ahead_hr >= w.ra_sweep_hr) continue;  // no transit in this window
      const double transit_mjd = w.start_mjd + ahead_hr / 24.06570982441908;
      auto tick = static_cast<std::size_t>(
          std::floor((transit_mjd - w.start_mjd) * 86400.0 / tick_s + 0.5));
      if (tick >= w.n_ticks) tick = w.n_ticks - 1;
      InjectedPair p = spec.pair;
      p.start_mjd = w.start_mjd + static_cast<double>(tick) * tick_s / 86400.0;
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace pulsepair
