// Command-line front end: simulate, detect, analyze, report, correlate, run.

#include <CLI11.hpp>

#include <complex>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "pulsepair/channelizer.hpp"
#include "pulsepair/correlator.hpp"
#include "pulsepair/csvio.hpp"
#include "pulsepair/errors.hpp"
#include "pulsepair/figures.hpp"
#include "pulsepair/pipeline.hpp"
#include "pulsepair/scenario.hpp"
#include "pulsepair/skysim.hpp"

namespace fs = std::filesystem;
using namespace pulsepair;

namespace {

struct CommonOverrides {
  std::string preset;
  double file_duration_hr = -1.0;
  double ra_of_interest_hr = -1.0;
  long seed = -1;
};

void add_override_flags(CLI::App* cmd, CommonOverrides& ov) {
  cmd->add_option("--preset", ov.preset, "Scale preset override (desk|full)");
  cmd->add_option("--file-duration-hr", ov.file_duration_hr,
                  "Capture window duration override, hours");
  cmd->add_option("--ra-of-interest", ov.ra_of_interest_hr,
                  "RA of interest override, hours");
  cmd->add_option("--seed", ov.seed, "RNG seed override");
}

Scenario load_with_overrides(const std::string& path, const CommonOverrides& ov) {
  Scenario sc = load_scenario(path);
  if (!ov.preset.empty()) {
    const auto keep = sc.sim;
    if (ov.preset == "desk") {
      sc.sim = desk_sim_config();
    } else if (ov.preset == "full") {
      sc.sim = full_sim_config();
    } else {
      throw UsageError("--preset must be desk or full");
    }
    sc.sim.sigma = keep.sigma;
    sc.sim.correlated_fraction = keep.correlated_fraction;
    sc.sim.quantize_bits = keep.quantize_bits;
    sc.sim.seed = keep.seed;
    sc.sim.tones_on_bin_centers = keep.tones_on_bin_centers;
    sc.sim.frames_per_tick = keep.frames_per_tick;
  }
  if (ov.file_duration_hr > 0.0) sc.file_duration_hr = ov.file_duration_hr;
  if (ov.ra_of_interest_hr >= 0.0) sc.ra_of_interest_hr = ov.ra_of_interest_hr;
  if (ov.seed >= 0) sc.sim.seed = static_cast<std::uint64_t>(ov.seed);
  return sc;
}

void do_analyze_and_report(const AnalysisResult& analysis,
                           const std::string& out_dir) {
  write_pairs_csv((fs::path(out_dir) / "pairs.csv").string(), analysis);
  write_table_csv((fs::path(out_dir) / "rabin_table.csv").string(), analysis);
  FigureHeader hdr;
  hdr.points = static_cast<long>(analysis.sorted_pairs.size());
  hdr.mjd_min = analysis.mjd_min;
  hdr.mjd_max = analysis.mjd_max;
  emit_figures(analysis.sorted_pairs, analysis.probabilities, hdr,
               (fs::path(out_dir) / "figures").string());
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Two-element interferometer pulse-pair detection pipeline"};
  app.require_subcommand(1);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Generate frame dumps from a scenario");
  std::string sim_scenario, sim_out;
  CommonOverrides sim_ov;
  sim_cmd->add_option("--scenario", sim_scenario, "Scenario file")->required();
  sim_cmd->add_option("--out", sim_out, "Output directory")->required();
  add_override_flags(sim_cmd, sim_ov);

  // detect
  auto* det_cmd = app.add_subcommand(
      "detect", "Run first-level detection, writing candidate/RFI files");
  std::string det_scenario, det_out, det_east, det_west;
  bool det_dump_spectra = false;
  CommonOverrides det_ov;
  det_cmd->add_option("--scenario", det_scenario, "Scenario file")->required();
  det_cmd->add_option("--out", det_out, "Output directory")->required();
  det_cmd->add_option("--frames-east", det_east, "East frame dump (skips simulation)");
  det_cmd->add_option("--frames-west", det_west, "West frame dump");
  det_cmd->add_flag("--dump-spectra", det_dump_spectra,
                    "Also write per-frame bin power dumps");
  add_override_flags(det_cmd, det_ov);

  // analyze
  auto* ana_cmd = app.add_subcommand(
      "analyze", "Pair, filter and sort candidates from capture files");
  std::string ana_in, ana_out;
  double ana_ra = 5.25;
  ana_cmd->add_option("--in", ana_in, "Directory holding cand_*.csv")->required();
  ana_cmd->add_option("--out", ana_out, "Output directory")->required();
  ana_cmd->add_option("--ra-of-interest", ana_ra, "RA of interest, hours");

  // report
  auto* rep_cmd = app.add_subcommand("report", "Emit figure datasets and plots");
  std::string rep_pairs, rep_table, rep_out;
  rep_cmd->add_option("--pairs", rep_pairs, "pairs.csv path")->required();
  rep_cmd->add_option("--table", rep_table, "rabin_table.csv path")->required();
  rep_cmd->add_option("--out", rep_out, "Output directory")->required();

  // correlate
  auto* cor_cmd = app.add_subcommand("correlate", "Emit lag-domain correlation profile");
  std::string cor_scenario, cor_out;
  long cor_ticks = 1;
  long cor_max_lag = 0;
  bool cor_raw = false;
  CommonOverrides cor_ov;
  cor_cmd->add_option("--scenario", cor_scenario, "Scenario file")->required();
  cor_cmd->add_option("--out", cor_out, "Output CSV path")->required();
  cor_cmd->add_option("--ticks", cor_ticks, "Ticks to average (default 1)");
  cor_cmd->add_option("--max-lag", cor_max_lag,
                      "Emit taps within +/- this lag (0 = all)");
  cor_cmd->add_flag("--raw", cor_raw, "Skip coherence normalization");
  add_override_flags(cor_cmd, cor_ov);

  // run
  auto* run_cmd = app.add_subcommand("run", "Capture + analyze + report");
  std::string run_scenario, run_out;
  std::string run_level = "second";
  bool run_dump = false;
  CommonOverrides run_ov;
  run_cmd->add_option("--scenario", run_scenario, "Scenario file")->required();
  run_cmd->add_option("--out", run_out, "Output directory")->required();
  run_cmd->add_option("--level", run_level, "Stop level: first|second");
  run_cmd->add_flag("--dump-frames", run_dump, "Also write raw frame dumps");
  add_override_flags(run_cmd, run_ov);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // exit code 1 for any usage problem; 0 for --help and friends
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (sim_cmd->parsed()) {
    Scenario sc = load_with_overrides(sim_scenario, sim_ov);
    std::error_code ec;
    fs::create_directories(sim_out, ec);
    if (ec) throw IoError("cannot create output directory: " + sim_out);
    const auto windows = plan_windows(sc);
    const auto injections = resolve_injections(sc, windows);
    for (const auto& win : windows) {
      FrameGenerator gen(sc.sim, sc.geometry, injections, sc.rfi, sc.clock,
                         sc.pointing, win.start_mjd, win.n_ticks,
                         win.frame_offset);
      IqDumpHeader h{};
      h.sample_rate_hz = sc.sim.sample_rate_hz;
      h.fft_len = sc.sim.fft_len;
      h.start_mjd = win.start_mjd;
      h.tick_interval_s = sc.clock.tick_interval_s;
      h.frames_per_tick = static_cast<std::uint32_t>(sc.sim.frames_per_tick);
      h.lo_freq_hz = sc.sim.lo_freq_hz;
      const std::string tag = format_mjd(win.start_mjd);
      h.element = 0;
      IqDumpWriter east((fs::path(sim_out) / ("frames_" + tag + "_east.iq")).string(), h);
      h.element = 1;
      IqDumpWriter west((fs::path(sim_out) / ("frames_" + tag + "_west.iq")).string(), h);
      for (std::size_t i = 0; i < gen.n_frames(); ++i) {
        FramePair fp = gen.generate(i);
        east.append(fp.east);
        west.append(fp.west);
      }
      east.close();
      west.close();
      std::cout << "simulated window " << tag << " (" << gen.n_frames()
                << " frame pairs)\n";
    }
    return 0;
  }

  if (det_cmd->parsed()) {
    Scenario sc = load_with_overrides(det_scenario, det_ov);
    if (!det_east.empty() || !det_west.empty()) {
      if (det_east.empty() || det_west.empty()) {
        throw UsageError("detect: --frames-east and --frames-west go together");
      }
      const auto info = capture_from_dumps(det_east, det_west, sc, det_out);
      std::cout << "wrote " << info.cand_path << " (" << info.n_candidates
                << " candidates, " << info.n_rfi << " RFI records)\n";
    } else {
      CaptureOptions opts;
      opts.dump_spectra = det_dump_spectra;
      const auto summary = run_capture(sc, det_out, opts);
      std::cout << "wrote " << summary.files.size() << " capture file pairs, "
                << summary.total_candidates << " candidates, "
                << summary.total_rfi << " RFI records\n";
    }
    return 0;
  }

  if (ana_cmd->parsed()) {
    std::error_code ec;
    fs::create_directories(ana_out, ec);
    if (ec) throw IoError("cannot create output directory: " + ana_out);
    const auto analysis = analyze_directory(ana_in, ana_ra);
    write_pairs_csv((fs::path(ana_out) / "pairs.csv").string(), analysis);
    write_table_csv((fs::path(ana_out) / "rabin_table.csv").string(), analysis);
    std::cout << "selected " << analysis.selected_files.size() << " files, "
              << analysis.sorted_pairs.size() << " second-level pairs\n";
    return 0;
  }

  if (rep_cmd->parsed()) {
    const auto pairs = read_pairs_csv(rep_pairs);
    const auto probs = read_probabilities_csv(rep_table);
    const CsvTable meta = read_csv(rep_pairs);
    FigureHeader hdr;
    hdr.points = static_cast<long>(pairs.size());
    hdr.mjd_min = meta.meta_double("mjd_min");
    hdr.mjd_max = meta.meta_double("mjd_max");
    emit_figures(pairs, probs, hdr, rep_out);
    std::cout << "wrote figure datasets to " << rep_out << "\n";
    return 0;
  }

  if (cor_cmd->parsed()) {
    Scenario sc = load_with_overrides(cor_scenario, cor_ov);
    const auto windows = plan_windows(sc);
    if (windows.empty()) throw DataError("correlate: no planned windows");
    const auto injections = resolve_injections(sc, windows);
    const auto& win = windows.front();
    FrameGenerator gen(sc.sim, sc.geometry, injections, sc.rfi, sc.clock,
                       sc.pointing, win.start_mjd, win.n_ticks,
                       win.frame_offset);
    Channelizer chan(sc.sim.fft_len);
    Correlator corr(sc.sim.fft_len);
    const auto n_frames = std::min<std::size_t>(
        gen.n_frames(),
        static_cast<std::size_t>(cor_ticks) *
            static_cast<std::size_t>(sc.sim.frames_per_tick));
    if (n_frames == 0) throw DataError("correlate: nothing to process");
    std::vector<std::complex<double>> avg(sc.sim.fft_len, {0.0, 0.0});
    LagSpectrum last;
    for (std::size_t i = 0; i < n_frames; ++i) {
      FramePair fp = gen.generate(i);
      last = corr.cross_correlate(chan.channelize(fp.east),
                                  chan.channelize(fp.west),
                                  cor_raw ? CorrelationNorm::Raw
                                          : CorrelationNorm::Coherence);
      for (std::size_t t = 0; t < avg.size(); ++t) avg[t] += last.taps[t];
    }
    for (auto& v : avg) v /= static_cast<double>(n_frames);

    CsvWriter w(cor_out);
    w.meta("schema", "1");
    w.meta("frames_averaged", static_cast<double>(n_frames));
    w.meta("tap_interval_s", last.tap_interval_s);
    w.columns({"tap_index", "delay_s", "magnitude", "phase_rad"});
    const auto zero = static_cast<std::ptrdiff_t>(last.zero_lag_index);
    const auto n = static_cast<std::ptrdiff_t>(avg.size());
    for (std::ptrdiff_t t = 0; t < n; ++t) {
      const std::ptrdiff_t lag = t - zero;
      if (cor_max_lag > 0 && std::abs(lag) > cor_max_lag) continue;
      w.row({std::to_string(lag),
             format_double(static_cast<double>(lag) * last.tap_interval_s),
             format_double(std::abs(avg[static_cast<std::size_t>(t)])),
             format_double(std::arg(avg[static_cast<std::size_t>(t)]))});
    }
    w.close();
    std::cout << "wrote " << cor_out << "\n";
    return 0;
  }

  if (run_cmd->parsed()) {
    if (run_level != "first" && run_level != "second") {
      throw UsageError("run: --level must be first or second");
    }
    Scenario sc = load_with_overrides(run_scenario, run_ov);
    CaptureOptions opts;
    opts.dump_frames = run_dump;
    const auto summary = run_capture(sc, run_out, opts);
    std::cout << "capture: " << summary.files.size() << " windows, "
              << summary.total_candidates << " candidates, "
              << summary.total_rfi << " RFI records\n";
    if (run_level == "second") {
      const auto analysis = analyze_directory(run_out, sc.ra_of_interest_hr);
      do_analyze_and_report(analysis, run_out);
      std::cout << "analysis: " << analysis.sorted_pairs.size()
                << " second-level pairs from " << analysis.selected_files.size()
                << " selected files\n";
    }
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
