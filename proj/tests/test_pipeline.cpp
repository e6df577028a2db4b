#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "pulsepair/csvio.hpp"
#include "pulsepair/errors.hpp"
#include "pulsepair/figures.hpp"
#include "pulsepair/pipeline.hpp"
#include "pulsepair/scenario.hpp"

using namespace pulsepair;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Small-FFT desk-style scenario centered on whatever RA the window sweeps.
std::string small_scenario(std::uint64_t seed, const std::string& extra = "") {
  const double start_mjd = 60284.0;
  const double ra = lst_hours(start_mjd + 0.005 / 24.0, 0.0);
  std::ostringstream s;
  s << "[sim]\n"
    << "preset = desk\n"
    << "fft_len = 16384\n"
    << "quantize_bits = 0\n"
    << "seed = " << seed << "\n"
    << "[clock]\n"
    << "start_mjd = " << format_mjd(start_mjd) << "\n"
    << "tick_interval_s = 3.0\n"
    << "[run]\n"
    << "n_days = 1\n"
    << "file_duration_hr = 0.02\n"
    << "ra_of_interest_hr = " << format_double(ra) << "\n"
    << extra;
  return s.str();
}

}  // namespace

TEST_CASE("scenario parsing rejects unknown keys and accepts the full grammar") {
  CHECK_THROWS_AS(parse_scenario("[sim]\nbogus_key = 1\n"), UsageError);
  CHECK_THROWS_AS(parse_scenario("[nope]\n"), UsageError);
  CHECK_THROWS_AS(parse_scenario("stray = 1\n"), UsageError);

  const Scenario sc = parse_scenario(
      "[sim]\npreset = desk\nsigma = 2.5\nseed = 17\nquantize_bits = 8\n"
      "[clock]\nstart_mjd = 60290.5\nsite_longitude_deg = -79.8\n"
      "[geometry]\nbaseline_wavelengths = 32\n"
      "[run]\nn_days = 3\nfile_duration_hr = 4\nra_of_interest_hr = 5.25\n"
      "coverage = selected\n"
      "[inject_pair]\nf_low_hz = 1414.95e6\ndelta_f_hz = 3.90625\n"
      "snr_db = 30\nsource_ra_hr = 5.25\ndaily_at_transit = true\n"
      "[inject_rfi]\nfreq_hz = 1415.05e6\npower = 1000\nduty_cycle = 1.0\n");
  CHECK(sc.sim.sigma == 2.5);
  CHECK(sc.sim.seed == 17);
  CHECK(sc.sim.fft_len == (std::size_t{1} << 18));
  CHECK(sc.sim.lo_freq_hz == 1415e6);
  CHECK(sc.n_days == 3);
  CHECK(sc.pair_specs.size() == 1);
  CHECK(sc.pair_specs[0].daily_at_transit);
  CHECK(sc.rfi.size() == 1);
  CHECK(sc.clock.site_longitude_deg == -79.8);
}

TEST_CASE("window planning selects the covering window each day") {
  Scenario sc = parse_scenario(
      "[sim]\npreset = desk\n[clock]\nstart_mjd = 60284.0\n"
      "[run]\nn_days = 3\nfile_duration_hr = 4\nra_of_interest_hr = 5.25\n");
  const auto windows = plan_windows(sc);
  REQUIRE(windows.size() == 3);
  std::set<std::uint64_t> offsets;
  for (const auto& w : windows) {
    CHECK(ra_interval_contains(w.ra_start_hr, w.ra_sweep_hr, 5.25));
    CHECK(w.n_ticks == 4800);
    offsets.insert(w.frame_offset);
  }
  CHECK(offsets.size() == 3);

  // daily transit injections land inside their windows on the tick grid
  sc.pair_specs.push_back({InjectedPair{1414.95e6, 3.90625, 30.0, 5.25, 0.0, 0.0},
                           true});
  const auto injections = resolve_injections(sc, windows);
  REQUIRE(injections.size() == 3);
  for (std::size_t d = 0; d < 3; ++d) {
    const auto& w = windows[d];
    const auto& inj = injections[d];
    CHECK(inj.start_mjd >= w.start_mjd);
    CHECK(inj.start_mjd < w.end_mjd(sc.clock));
    const double ticks =
        (inj.start_mjd - w.start_mjd) * 86400.0 / sc.clock.tick_interval_s;
    CHECK(std::abs(ticks - std::round(ticks)) < 1e-6);
    // at the injection instant the pointing RA is within a tick of 5.25
    CHECK(std::abs(lst_hours(inj.start_mjd, 0.0) - 5.25) < 0.01);
  }
}

TEST_CASE("run_capture writes ordered, deterministic capture files") {
  TempDir dir_a("pp_capture_a"), dir_b("pp_capture_b");
  const std::string text = small_scenario(99);
  const Scenario sc = parse_scenario(text);
  const auto sum_a = run_capture(sc, dir_a.str());
  const auto sum_b = run_capture(parse_scenario(text), dir_b.str());
  REQUIRE(sum_a.files.size() == 1);
  CHECK(sum_a.total_frames == 48);

  // byte-identical across runs
  CHECK(read_file(sum_a.files[0].cand_path) ==
        read_file(sum_b.files[0].cand_path));
  CHECK(read_file(sum_a.files[0].rfi_path) ==
        read_file(sum_b.files[0].rfi_path));

  // rows are in non-decreasing MJD and bin-sorted within a frame
  const CsvTable table = read_csv(sum_a.files[0].cand_path);
  double last_mjd = 0.0;
  for (const auto& row : table.rows) {
    const double mjd = parse_double(row[0]);
    CHECK(mjd >= last_mjd);
    last_mjd = mjd;
  }
  CHECK(table.meta.count("ra_start_hr") == 1);
  CHECK(table.meta.count("window_start_mjd") == 1);
}

TEST_CASE("select_daily_files picks one covering file per day") {
  TempDir dir("pp_select");
  // three days, two windows each: only one covers RA 5.25; plus an
  // overlapping duplicate on day 0 that starts later
  auto write_stub = [&](const std::string& name, double start_mjd,
                        double ra_start) {
    CsvWriter w((fs::path(dir.str()) / name).string());
    w.meta("schema", "1");
    w.meta("window_start_mjd", format_mjd(start_mjd));
    w.meta("window_end_mjd", format_mjd(start_mjd + 4.0 / 24.0));
    w.meta("ra_start_hr", ra_start);
    w.meta("ra_sweep_hr", 4.0109516);
    w.columns({"mjd"});
    w.close();
  };
  write_stub("cand_a0.csv", 60284.10, 4.0);
  write_stub("cand_a1.csv", 60284.12, 4.5);  // also covers, starts later
  write_stub("cand_a2.csv", 60284.40, 12.0); // does not cover
  write_stub("cand_b0.csv", 60285.10, 4.1);
  write_stub("cand_c0.csv", 60286.40, 15.0); // day without coverage

  const auto files = list_candidate_files(dir.str());
  CHECK(files.size() == 5);
  const auto selected = select_daily_files(files, 5.25);
  REQUIRE(selected.size() == 2);
  CHECK(selected[0].find("cand_a0") != std::string::npos);
  CHECK(selected[1].find("cand_b0") != std::string::npos);
}

TEST_CASE("end-to-end mini run: injection recovered, files self-consistent") {
  TempDir dir("pp_e2e");
  // an injected pair at the window's RA plus a persistent RFI tone
  const std::string extra =
      "[inject_pair]\n"
      "f_low_hz = 1414.95e6\n"
      "delta_f_hz = 62.5\n"
      "snr_db = 35\n"
      "source_ra_hr = __RA__\n"
      "daily_at_transit = true\n"
      "[inject_rfi]\n"
      "freq_hz = 1415.05e6\n"
      "power = 1000\n"
      "duty_cycle = 1.0\n"
      "persistent = true\n";
  std::string text = small_scenario(4242, extra);
  const double ra = lst_hours(60284.0 + 0.005 / 24.0, 0.0);
  const auto pos = text.find("__RA__");
  text.replace(pos, 6, format_double(ra));

  const Scenario sc = parse_scenario(text);
  const auto summary = run_capture(sc, dir.str());
  REQUIRE(summary.files.size() == 1);

  // persistent RFI: exactly trip-threshold leaks into the candidate file
  const CsvTable cand = read_csv(summary.files[0].cand_path);
  const CsvTable rfi = read_csv(summary.files[0].rfi_path);
  const int rf_col = cand.column_index("rf_hz");
  long rfi_freq_in_cand = 0;
  for (const auto& row : cand.rows) {
    if (std::abs(parse_double(row[static_cast<std::size_t>(rf_col)]) - 1415.05e6) < 31.0) {
      ++rfi_freq_in_cand;
    }
  }
  CHECK(rfi_freq_in_cand == 10);
  CHECK(rfi.rows.size() >= 30);  // 48 frames - 10 leaks, minus none dropped
  const int reason_col = rfi.column_index("route_reason");
  REQUIRE(reason_col >= 0);
  for (const auto& row : rfi.rows) {
    CHECK(row[static_cast<std::size_t>(reason_col)] == "segment_trip");
  }

  // analysis: the injected pair survives to the sorted second level
  const auto analysis = analyze_directory(dir.str(), sc.ra_of_interest_hr);
  REQUIRE(analysis.sorted_pairs.size() >= 1);
  bool found = false;
  for (const auto& p : analysis.sorted_pairs) {
    if (std::abs(p.lower.rf_hz - 1414.95e6) < 31.0 &&
        std::abs(p.delta_f_hz - 62.5) < 1.0) {
      found = true;
      CHECK(p.dd_phi_abs_rad < 0.1);
      CHECK(p.ra_bin == ra_bin_of(ra));
    }
  }
  CHECK(found);

  // referential integrity: each pair component exists in the candidate file
  std::set<std::string> keys;
  const int mjd_col = cand.column_index("mjd");
  for (const auto& row : cand.rows) {
    keys.insert(row[static_cast<std::size_t>(mjd_col)] + "|" +
                row[static_cast<std::size_t>(rf_col)]);
  }
  for (const auto& p : analysis.sorted_pairs) {
    CHECK(keys.count(format_mjd(p.pair_mjd) + "|" + format_double(p.lower.rf_hz)));
    CHECK(keys.count(format_mjd(p.pair_mjd) + "|" + format_double(p.upper.rf_hz)));
  }

  // pairs/table CSVs round-trip
  const std::string pairs_path = (fs::path(dir.str()) / "pairs.csv").string();
  const std::string table_path = (fs::path(dir.str()) / "rabin_table.csv").string();
  write_pairs_csv(pairs_path, analysis);
  write_table_csv(table_path, analysis);
  const auto pairs_back = read_pairs_csv(pairs_path);
  REQUIRE(pairs_back.size() == analysis.sorted_pairs.size());
  for (std::size_t i = 0; i < pairs_back.size(); ++i) {
    CHECK(pairs_back[i].dd_phi_abs_rad ==
          doctest::Approx(analysis.sorted_pairs[i].dd_phi_abs_rad).epsilon(1e-8));
    CHECK(pairs_back[i].ra_bin == analysis.sorted_pairs[i].ra_bin);
  }
  const auto probs_back = read_probabilities_csv(table_path);
  for (int bin = 0; bin < kNumRaBins; ++bin) {
    CHECK(probs_back[static_cast<std::size_t>(bin)] ==
          doctest::Approx(analysis.probabilities[static_cast<std::size_t>(bin)])
              .epsilon(1e-8));
  }

  // figures: 13 datasets with the caption constants in the header
  FigureHeader hdr;
  hdr.points = static_cast<long>(analysis.sorted_pairs.size());
  hdr.mjd_min = analysis.mjd_min;
  hdr.mjd_max = analysis.mjd_max;
  const std::string fig_dir = (fs::path(dir.str()) / "figures").string();
  emit_figures(analysis.sorted_pairs, analysis.probabilities, hdr, fig_dir);
  for (int id = 1; id <= 13; ++id) {
    char name[32];
    std::snprintf(name, sizeof(name), "figure_%02d.csv", id);
    const CsvTable fig = read_csv((fs::path(fig_dir) / name).string());
    CHECK(fig.meta.at("points") ==
          format_double(static_cast<double>(hdr.points)));
    CHECK(fig.meta.at("log10_df_mhz_max") == "-1");
    CHECK(fig.meta.at("ddphi_max_rad") == "0.1");
    CHECK(fig.meta.count("mjd_min") == 1);
    CHECK(fig.meta.count("mjd_max") == 1);
  }
  // figure 1 counts the injected pair's RA bin
  const CsvTable fig1 = read_csv((fs::path(fig_dir) / "figure_01.csv").string());
  long count_at_source = 0;
  for (const auto& row : fig1.rows) {
    if (parse_long(row[0]) == ra_bin_of(ra)) count_at_source = parse_long(row[1]);
  }
  CHECK(count_at_source >= 1);
  // figure 10 is labeled as a surrogate
  const CsvTable fig10 = read_csv((fs::path(fig_dir) / "figure_10.csv").string());
  CHECK(fig10.meta.at("likelihood") == "surrogate");

  // empty input still produces headed datasets
  TempDir empty_dir("pp_fig_empty");
  emit_figures({}, analysis.probabilities, FigureHeader{}, empty_dir.str());
  const CsvTable fig3 = read_csv((fs::path(empty_dir.str()) / "figure_03.csv").string());
  CHECK(fig3.rows.empty());
  CHECK(fig3.meta.at("points") == "0");
}

TEST_CASE("capture from dumps matches in-memory capture") {
  TempDir dir_mem("pp_dump_mem"), dir_dump("pp_dump_files");
  const std::string text = small_scenario(31415);
  const Scenario sc = parse_scenario(text);
  CaptureOptions opts;
  opts.dump_frames = true;
  const auto mem = run_capture(sc, dir_mem.str(), opts);
  REQUIRE(mem.files.size() == 1);

  // locate the dumps written next to the capture files
  std::string east, west;
  for (const auto& entry : fs::directory_iterator(dir_mem.str())) {
    const auto name = entry.path().filename().string();
    if (name.ends_with("_east.iq")) east = entry.path().string();
    if (name.ends_with("_west.iq")) west = entry.path().string();
  }
  REQUIRE(!east.empty());
  REQUIRE(!west.empty());

  const auto redetected = capture_from_dumps(east, west, sc, dir_dump.str());
  const CsvTable a = read_csv(mem.files[0].cand_path);
  const CsvTable b = read_csv(redetected.cand_path);
  REQUIRE(a.rows.size() == b.rows.size());
  // float32 dumps round the samples, so compare detections loosely
  const int rf_col = a.column_index("rf_hz");
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i][0] == b.rows[i][0]);
    CHECK(a.rows[i][static_cast<std::size_t>(rf_col)] ==
          b.rows[i][static_cast<std::size_t>(rf_col)]);
  }
}
