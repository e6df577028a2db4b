#include "pulsepair/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "pulsepair/channelizer.hpp"
#include "pulsepair/csvio.hpp"
#include "pulsepair/errors.hpp"

namespace pulsepair {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kCandidateColumns = {
    "mjd",          "ra_hr",        "ra_bin",       "rf_hz",
    "bin_index",    "snr_east_db",  "snr_west_db",  "phi_east_rad",
    "phi_west_rad", "p954_east",    "p954_west",    "p50m_east",
    "p50m_west",    "margin_low",   "margin_high"};

std::vector<std::string> candidate_fields(const CandidateRecord& r) {
  return {format_mjd(r.mjd),
          format_double(r.ra_hr),
          std::to_string(r.ra_bin),
          format_double(r.rf_hz),
          std::to_string(r.bin_index),
          format_double(r.snr_east_db),
          format_double(r.snr_west_db),
          format_double(r.phi_east_rad),
          format_double(r.phi_west_rad),
          format_double(r.p954_east),
          format_double(r.p954_west),
          format_double(r.p50m_east),
          format_double(r.p50m_west),
          std::to_string(r.margin_low),
          std::to_string(r.margin_high)};
}

CandidateRecord candidate_from_fields(const std::vector<std::string>& f) {
  CandidateRecord r;
  r.mjd = parse_double(f[0]);
  r.ra_hr = parse_double(f[1]);
  r.ra_bin = static_cast<int>(parse_long(f[2]));
  r.rf_hz = parse_double(f[3]);
  r.bin_index = static_cast<std::size_t>(parse_long(f[4]));
  r.snr_east_db = parse_double(f[5]);
  r.snr_west_db = parse_double(f[6]);
  r.phi_east_rad = parse_double(f[7]);
  r.phi_west_rad = parse_double(f[8]);
  r.p954_east = parse_double(f[9]);
  r.p954_west = parse_double(f[10]);
  r.p50m_east = parse_double(f[11]);
  r.p50m_west = parse_double(f[12]);
  r.margin_low = static_cast<int>(parse_long(f[13]));
  r.margin_high = static_cast<int>(parse_long(f[14]));
  return r;
}

void write_capture_meta(CsvWriter& w, const Scenario& sc, const WindowPlan& win) {
  w.meta("schema", "1");
  w.meta("window_start_mjd", format_mjd(win.start_mjd));
  w.meta("window_end_mjd", format_mjd(win.end_mjd(sc.clock)));
  w.meta("ra_start_hr", win.ra_start_hr);
  w.meta("ra_sweep_hr", win.ra_sweep_hr);
  w.meta("fft_len", static_cast<double>(sc.sim.fft_len));
  w.meta("sample_rate_hz", sc.sim.sample_rate_hz);
  w.meta("lo_freq_hz", sc.sim.lo_freq_hz);
  w.meta("tick_interval_s", sc.clock.tick_interval_s);
  w.meta("frames_per_tick", static_cast<double>(sc.sim.frames_per_tick));
  w.meta("seed", std::to_string(sc.sim.seed));
}

struct WindowBuffers {
  std::vector<CandidateRecord> candidates;
  std::vector<CandidateRecord> rfi;
};

void fill_margins(std::vector<CandidateRecord>& recs,
                  const SegmentLedger::MarginIndex& idx) {
  for (auto& r : recs) {
    const std::size_t seg = r.bin_index / kBinsPerSegment;
    r.margin_low = idx.low[seg];
    r.margin_high = idx.high[seg];
  }
}

CaptureFileInfo write_window_files(const Scenario& sc, const WindowPlan& win,
                                   const std::string& out_dir,
                                   WindowBuffers& buf,
                                   const SegmentLedger& ledger) {
  if (!sc.margins_at_candidate_time) {
    const auto idx = ledger.margin_index();
    fill_margins(buf.candidates, idx);
    fill_margins(buf.rfi, idx);
  }

  CaptureFileInfo info;
  info.window_start_mjd = win.start_mjd;
  info.window_end_mjd = win.end_mjd(sc.clock);
  info.ra_start_hr = win.ra_start_hr;
  info.ra_sweep_hr = win.ra_sweep_hr;
  info.n_candidates = static_cast<long>(buf.candidates.size());
  info.n_rfi = static_cast<long>(buf.rfi.size());

  const std::string tag = format_mjd(win.start_mjd);
  info.cand_path = (fs::path(out_dir) / ("cand_" + tag + ".csv")).string();
  info.rfi_path = (fs::path(out_dir) / ("rfi_" + tag + ".csv")).string();

  {
    CsvWriter w(info.cand_path);
    write_capture_meta(w, sc, win);
    w.columns(kCandidateColumns);
    for (const auto& r : buf.candidates) w.row(candidate_fields(r));
    w.close();
  }
  {
    CsvWriter w(info.rfi_path);
    write_capture_meta(w, sc, win);
    auto cols = kCandidateColumns;
    cols.push_back("route_reason");
    w.columns(cols);
    for (const auto& r : buf.rfi) {
      auto fields = candidate_fields(r);
      fields.push_back(route_name(Route::RfiFile));
      w.row(fields);
    }
    w.close();
  }
  return info;
}

}  // namespace

CaptureSummary run_capture(const Scenario& sc, const std::string& out_dir,
                           const CaptureOptions& options) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);

  const auto windows = plan_windows(sc);
  const auto injections = resolve_injections(sc, windows);
  const NotchSet notches;
  Channelizer chan(sc.sim.fft_len);

  CaptureSummary summary;
  for (const auto& win : windows) {
    FrameGenerator gen(sc.sim, sc.geometry, injections, sc.rfi, sc.clock,
                       sc.pointing, win.start_mjd, win.n_ticks,
                       win.frame_offset);
    const std::size_t n_seg =
        (sc.sim.fft_len + kBinsPerSegment - 1) / kBinsPerSegment;
    SegmentLedger ledger(n_seg);
    WindowBuffers buf;

    std::unique_ptr<IqDumpWriter> dump_e, dump_w;
    std::unique_ptr<SpectraDumpWriter> spec_e, spec_w;
    const std::string tag = format_mjd(win.start_mjd);
    if (options.dump_frames) {
      IqDumpHeader h{};
      h.sample_rate_hz = sc.sim.sample_rate_hz;
      h.fft_len = sc.sim.fft_len;
      h.start_mjd = win.start_mjd;
      h.tick_interval_s = sc.clock.tick_interval_s;
      h.frames_per_tick = static_cast<std::uint32_t>(sc.sim.frames_per_tick);
      h.lo_freq_hz = sc.sim.lo_freq_hz;
      h.element = 0;
      dump_e = std::make_unique<IqDumpWriter>(
          (fs::path(out_dir) / ("frames_" + tag + "_east.iq")).string(), h);
      h.element = 1;
      dump_w = std::make_unique<IqDumpWriter>(
          (fs::path(out_dir) / ("frames_" + tag + "_west.iq")).string(), h);
    }
    if (options.dump_spectra) {
      auto make = [&](int element, const char* name) {
        return std::make_unique<SpectraDumpWriter>(
            (fs::path(out_dir) / ("spectra_" + tag + "_" + name + ".psd"))
                .string(),
            sc.sim.sample_rate_hz, sc.sim.fft_len, win.start_mjd,
            sc.clock.tick_interval_s, sc.sim.frames_per_tick, element,
            sc.sim.lo_freq_hz);
      };
      spec_e = make(0, "east");
      spec_w = make(1, "west");
    }

    for (std::size_t i = 0; i < gen.n_frames(); ++i) {
      FramePair fp = gen.generate(i);
      summary.clipped_samples +=
          static_cast<long>(fp.clipped_east + fp.clipped_west);
      if (dump_e) dump_e->append(fp.east);
      if (dump_w) dump_w->append(fp.west);
      const SpectralFrame east = chan.channelize(fp.east);
      const SpectralFrame west = chan.channelize(fp.west);
      if (spec_e) spec_e->append(east);
      if (spec_w) spec_w->append(west);
      const double ra = pointing_ra_hours(east.start_mjd, sc.clock, sc.pointing);
      auto res = first_level_filter(east, west, notches, ledger, ra);
      if (sc.margins_at_candidate_time) {
        for (auto* vec : {&res.candidates, &res.rfi}) {
          for (auto& r : *vec) {
            const auto m = ledger.rfi_margins(r.bin_index / kBinsPerSegment);
            r.margin_low = m.first;
            r.margin_high = m.second;
          }
        }
      }
      buf.candidates.insert(buf.candidates.end(), res.candidates.begin(),
                            res.candidates.end());
      buf.rfi.insert(buf.rfi.end(), res.rfi.begin(), res.rfi.end());
      ++summary.total_frames;
    }
    if (dump_e) dump_e->close();
    if (dump_w) dump_w->close();
    if (spec_e) spec_e->close();
    if (spec_w) spec_w->close();

    auto info = write_window_files(sc, win, out_dir, buf, ledger);
    summary.total_candidates += info.n_candidates;
    summary.total_rfi += info.n_rfi;
    summary.files.push_back(std::move(info));
  }

  std::ofstream log((fs::path(out_dir) / "run_summary.txt").string(),
                    std::ios::trunc);
  log << "windows = " << summary.files.size() << "\n"
      << "frames = " << summary.total_frames << "\n"
      << "candidates = " << summary.total_candidates << "\n"
      << "rfi_records = " << summary.total_rfi << "\n"
      << "clipped_samples = " << summary.clipped_samples << "\n";
  for (const auto& f : summary.files) {
    log << "file " << fs::path(f.cand_path).filename().string() << " candidates "
        << f.n_candidates << " rfi " << f.n_rfi << "\n";
  }
  return summary;
}

CaptureFileInfo capture_from_dumps(const std::string& east_path,
                                   const std::string& west_path,
                                   const Scenario& sc,
                                   const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);

  IqDumpReader east(east_path), west(west_path);
  const auto& h = east.header();
  if (h.fft_len != west.header().fft_len ||
      h.start_mjd != west.header().start_mjd ||
      h.n_frames != west.header().n_frames) {
    throw DataError("capture_from_dumps: element dumps are misaligned");
  }

  WindowPlan win;
  win.start_mjd = h.start_mjd;
  win.n_ticks = (h.n_frames + h.frames_per_tick - 1) / h.frames_per_tick;
  win.ra_start_hr = lst_hours(h.start_mjd, sc.clock.site_longitude_deg);
  ObservatoryClock clock = sc.clock;
  clock.tick_interval_s = h.tick_interval_s;
  win.ra_sweep_hr = static_cast<double>(win.n_ticks) * h.tick_interval_s /
                    3600.0 * kSiderealRate;

  Scenario file_sc = sc;
  file_sc.clock = clock;
  file_sc.sim.fft_len = h.fft_len;
  file_sc.sim.sample_rate_hz = h.sample_rate_hz;
  file_sc.sim.lo_freq_hz = h.lo_freq_hz;
  file_sc.sim.frames_per_tick = static_cast<int>(h.frames_per_tick);

  const NotchSet notches;
  Channelizer chan(h.fft_len);
  const std::size_t n_seg = (h.fft_len + kBinsPerSegment - 1) / kBinsPerSegment;
  SegmentLedger ledger(n_seg);
  WindowBuffers buf;
  for (std::size_t i = 0; i < h.n_frames; ++i) {
    const SpectralFrame e = chan.channelize(east.read_frame(i));
    const SpectralFrame w = chan.channelize(west.read_frame(i));
    const double ra = pointing_ra_hours(e.start_mjd, clock, sc.pointing);
    auto res = first_level_filter(e, w, notches, ledger, ra);
    if (sc.margins_at_candidate_time) {
      for (auto* vec : {&res.candidates, &res.rfi}) {
        for (auto& r : *vec) {
          const auto m = ledger.rfi_margins(r.bin_index / kBinsPerSegment);
          r.margin_low = m.first;
          r.margin_high = m.second;
        }
      }
    }
    buf.candidates.insert(buf.candidates.end(), res.candidates.begin(),
                          res.candidates.end());
    buf.rfi.insert(buf.rfi.end(), res.rfi.begin(), res.rfi.end());
  }
  return write_window_files(file_sc, win, out_dir, buf, ledger);
}

std::vector<std::string> list_candidate_files(const std::string& dir) {
  std::vector<std::string> files;
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("cand_", 0) == 0 && entry.path().extension() == ".csv") {
      files.push_back(entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

namespace {

// Reads only the "# key = value" preamble of a capture file.
std::map<std::string, double> read_capture_meta(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::map<std::string, double> meta;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] != '#') break;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(1, eq - 1));
    try {
      meta[key] = parse_double(trim(line.substr(eq + 1)));
    } catch (const DataError&) {
      // non-numeric metadata (e.g. schema notes) is skipped here
    }
  }
  return meta;
}

}  // namespace

std::vector<std::string> select_daily_files(const std::vector<std::string>& files,
                                            double ra_of_interest_hr) {
  std::map<long, std::pair<double, std::string>> per_day;  // day -> (start, path)
  for (const auto& path : files) {
    const auto meta = read_capture_meta(path);
    const auto it_start = meta.find("window_start_mjd");
    const auto it_ra = meta.find("ra_start_hr");
    const auto it_sweep = meta.find("ra_sweep_hr");
    if (it_start == meta.end() || it_ra == meta.end() || it_sweep == meta.end()) {
      throw DataError("candidate file lacks coverage metadata: " + path);
    }
    if (!ra_interval_contains(it_ra->second, it_sweep->second,
                              ra_of_interest_hr)) {
      continue;
    }
    const long day = static_cast<long>(std::floor(it_start->second));
    auto it = per_day.find(day);
    if (it == per_day.end() || it_start->second < it->second.first) {
      per_day[day] = {it_start->second, path};
    }
  }
  std::vector<std::string> selected;
  selected.reserve(per_day.size());
  for (const auto& [day, entry] : per_day) selected.push_back(entry.second);
  return selected;
}

AnalysisResult analyze_files(const std::vector<std::string>& selected_files) {
  AnalysisResult result;
  result.selected_files = selected_files;

  std::vector<RaInterval> dwell;
  std::vector<PairRecord> all_pairs;
  double cover_lo = 0.0, cover_hi = 0.0;
  bool have_cover = false;

  for (const auto& path : selected_files) {
    const CsvTable table = read_csv(path);
    dwell.push_back(
        {table.meta_double("ra_start_hr"), table.meta_double("ra_sweep_hr")});
    const double w0 = table.meta_double("window_start_mjd");
    const double w1 = table.meta_double("window_end_mjd");
    if (!have_cover) {
      cover_lo = w0;
      cover_hi = w1;
      have_cover = true;
    } else {
      cover_lo = std::min(cover_lo, w0);
      cover_hi = std::max(cover_hi, w1);
    }

    result.first_level_records += static_cast<long>(table.rows.size());
    std::vector<CandidateRecord> frame;
    std::string frame_mjd;
    auto flush = [&]() {
      if (frame.size() >= 2) {
        auto pairs = form_pairs(frame);
        all_pairs.insert(all_pairs.end(), pairs.begin(), pairs.end());
      }
      frame.clear();
    };
    for (const auto& row : table.rows) {
      if (row[0] != frame_mjd) {
        flush();
        frame_mjd = row[0];
      }
      frame.push_back(candidate_from_fields(row));
    }
    flush();
  }

  result.pairs_before_filter = static_cast<long>(all_pairs.size());
  result.probabilities = event_probabilities(dwell);
  result.sorted_pairs = second_level_filter(std::move(all_pairs), NotchSet{});

  if (!result.sorted_pairs.empty()) {
    auto [lo, hi] = std::minmax_element(
        result.sorted_pairs.begin(), result.sorted_pairs.end(),
        [](const PairRecord& a, const PairRecord& b) {
          return a.pair_mjd < b.pair_mjd;
        });
    result.mjd_min = lo->pair_mjd;
    result.mjd_max = hi->pair_mjd;
  } else if (have_cover) {
    result.mjd_min = cover_lo;
    result.mjd_max = cover_hi;
  }
  return result;
}

AnalysisResult analyze_directory(const std::string& dir,
                                 double ra_of_interest_hr) {
  const auto files = list_candidate_files(dir);
  if (files.empty()) throw DataError("no candidate files under " + dir);
  const auto selected = select_daily_files(files, ra_of_interest_hr);
  if (selected.empty()) {
    throw DataError("no candidate file covers the RA of interest");
  }
  return analyze_files(selected);
}

void write_pairs_csv(const std::string& path, const AnalysisResult& result) {
  CsvWriter w(path);
  w.meta("schema", "1");
  w.meta("points", static_cast<double>(result.sorted_pairs.size()));
  w.meta("mjd_min", format_mjd(result.mjd_min));
  w.meta("mjd_max", format_mjd(result.mjd_max));
  w.meta("log10_df_mhz_max", -1.0);
  w.meta("ddphi_max_rad", 0.1);
  auto cols = kCandidateColumns;
  cols.insert(cols.end(),
              {"delta_f_hz", "log10_df_mhz", "dd_phi_abs_rad", "upper_rf_hz"});
  w.columns(cols);
  for (const auto& p : result.sorted_pairs) {
    auto fields = candidate_fields(p.lower);
    fields.push_back(format_double(p.delta_f_hz));
    fields.push_back(format_double(p.log10_df_mhz));
    fields.push_back(format_double(p.dd_phi_abs_rad));
    fields.push_back(format_double(p.upper.rf_hz));
    w.row(fields);
  }
  w.close();
}

void write_table_csv(const std::string& path, const AnalysisResult& result) {
  RaBinTable table(result.probabilities);
  running_d_series(result.sorted_pairs, table, nullptr);

  CsvWriter w(path);
  w.meta("schema", "1");
  w.meta("trials", static_cast<double>(table.trials()));
  w.columns({"ra_bin", "center_hr", "probability", "events", "final_d",
             "sum_log10_df_mhz"});
  for (int bin = 0; bin < kNumRaBins; ++bin) {
    w.row({std::to_string(bin), format_double(ra_bin_center_hr(bin)),
           format_double(result.probabilities[static_cast<std::size_t>(bin)]),
           std::to_string(table.events(bin)), format_double(table.d_value(bin)),
           format_double(table.sum_log10_df(bin))});
  }
  w.close();
}

std::vector<PairRecord> read_pairs_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  std::vector<PairRecord> pairs;
  pairs.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    PairRecord p;
    p.lower = candidate_from_fields(row);
    p.delta_f_hz = parse_double(row[15]);
    p.log10_df_mhz = parse_double(row[16]);
    p.dd_phi_abs_rad = parse_double(row[17]);
    p.upper.rf_hz = parse_double(row[18]);
    p.upper.mjd = p.lower.mjd;
    p.pair_mjd = p.lower.mjd;
    p.ra_bin = p.lower.ra_bin;
    pairs.push_back(p);
  }
  return pairs;
}

std::array<double, kNumRaBins> read_probabilities_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  const int bin_col = table.column_index("ra_bin");
  const int p_col = table.column_index("probability");
  if (bin_col < 0 || p_col < 0) throw DataError("not a table CSV: " + path);
  std::array<double, kNumRaBins> probs{};
  for (const auto& row : table.rows) {
    const long bin = parse_long(row[static_cast<std::size_t>(bin_col)]);
    if (bin < 0 || bin >= kNumRaBins) throw DataError("bad ra_bin in " + path);
    probs[static_cast<std::size_t>(bin)] =
        parse_double(row[static_cast<std::size_t>(p_col)]);
  }
  return probs;
}

}  // namespace pulsepair
