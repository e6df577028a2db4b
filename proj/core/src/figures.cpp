#include "pulsepair/figures.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>

#include "pulsepair/csvio.hpp"
#include "pulsepair/errors.hpp"
#include "pulsepair/stats.hpp"

namespace pulsepair {

namespace fs = std::filesystem;

namespace {

struct XY {
  double x;
  double y;
};

// Minimal deterministic scatter render; datasets stay the contract.
void write_svg_scatter(const std::string& path, const std::string& title,
                       const std::string& ylabel, const std::vector<XY>& pts) {
  const double width = 760, height = 420;
  const double ml = 70, mr = 20, mt = 40, mb = 50;
  double ymin = std::numeric_limits<double>::infinity();
  double ymax = -std::numeric_limits<double>::infinity();
  for (const auto& p : pts) {
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  if (pts.empty()) {
    ymin = 0.0;
    ymax = 1.0;
  }
  if (ymin == ymax) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  const double xmin = 0.0, xmax = static_cast<double>(kNumRaBins);
  auto sx = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr);
  };
  auto sy = [&](double y) {
    return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);
  };

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\""
      << width - mr << "\" y2=\"" << height - mb
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
  for (int bx = 0; bx <= 240; bx += 40) {
    const double x = sx(bx);
    out << "<line x1=\"" << x << "\" y1=\"" << height - mb << "\" x2=\"" << x
        << "\" y2=\"" << height - mb + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << x << "\" y=\"" << height - mb + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << bx << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double y = ymin + (ymax - ymin) * i / 4.0;
    const double py = sy(y);
    out << "<line x1=\"" << ml - 5 << "\" y1=\"" << py << "\" x2=\"" << ml
        << "\" y2=\"" << py << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << py + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << format_double(y) << "</text>\n";
  }
  out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">RA bin (0.1 hr)</text>\n";
  out << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
      << "transform=\"rotate(-90 16 " << (mt + height - mb) / 2 << ")\">"
      << ylabel << "</text>\n";
  for (const auto& p : pts) {
    out << "<circle cx=\"" << sx(p.x) << "\" cy=\"" << sy(p.y)
        << "\" r=\"2\" fill=\"none\" stroke=\"#1f4e8c\"/>\n";
  }
  out << "</svg>\n";
}

class FigureFile {
 public:
  FigureFile(const std::string& out_dir, int id, const std::string& title,
             const FigureHeader& hdr, const std::vector<std::string>& columns,
             bool surrogate = false)
      : id_(id), title_(title) {
    char name[32];
    std::snprintf(name, sizeof(name), "figure_%02d", id);
    base_ = (fs::path(out_dir) / name).string();
    writer_ = std::make_unique<CsvWriter>(base_ + ".csv");
    writer_->meta("figure", std::to_string(id));
    writer_->meta("title", title);
    writer_->meta("points", static_cast<double>(hdr.points));
    writer_->meta("mjd_min", format_mjd(hdr.mjd_min));
    writer_->meta("mjd_max", format_mjd(hdr.mjd_max));
    writer_->meta("log10_df_mhz_max", hdr.log10_df_mhz_max);
    writer_->meta("ddphi_max_rad", hdr.dd_phi_max_rad);
    if (surrogate) writer_->meta("likelihood", "surrogate");
    writer_->columns(columns);
  }

  void row(const std::vector<std::string>& fields, double x, double y) {
    writer_->row(fields);
    pts_.push_back({x, y});
  }

  void finish(const std::string& ylabel) {
    writer_->close();
    try {
      write_svg_scatter(base_ + ".svg", title_, ylabel, pts_);
    } catch (...) {
      // image is best-effort
    }
  }

 private:
  int id_;
  std::string title_;
  std::string base_;
  std::unique_ptr<CsvWriter> writer_;
  std::vector<XY> pts_;
};

}  // namespace

void emit_figures(const std::vector<PairRecord>& pairs,
                  const std::array<double, kNumRaBins>& probabilities,
                  const FigureHeader& hdr, const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create figure directory: " + out_dir);

  RaBinTable table(probabilities);

  FigureFile f2(out_dir, 2, "pulse pair binomial effect size per RA bin", hdr,
                {"trial", "ra_bin", "cohens_d", "at_event"});
  running_d_series(pairs, table,
                   [&](long trial, int bin, double d, bool at_event) {
                     f2.row({std::to_string(trial), std::to_string(bin),
                             format_double(d), at_event ? "1" : "0"},
                            bin, d);
                   });
  f2.finish("Cohen's d");

  {
    FigureFile f(out_dir, 1, "pulse pair count per RA bin", hdr,
                 {"ra_bin", "count"});
    for (int bin = 0; bin < kNumRaBins; ++bin) {
      f.row({std::to_string(bin), std::to_string(table.events(bin))}, bin,
            static_cast<double>(table.events(bin)));
    }
    f.finish("count");
  }
  {
    FigureFile f(out_dir, 3, "pulse pair log10(df/MHz) per RA bin", hdr,
                 {"ra_bin", "log10_df_mhz"});
    for (const auto& p : pairs) {
      f.row({std::to_string(p.ra_bin), format_double(p.log10_df_mhz)},
            p.ra_bin, p.log10_df_mhz);
    }
    f.finish("log10(df/MHz)");
  }
  {
    FigureFile f(out_dir, 4, "sum of log10(df/MHz) per RA bin", hdr,
                 {"ra_bin", "sum_log10_df_mhz"});
    for (int bin = 0; bin < kNumRaBins; ++bin) {
      f.row({std::to_string(bin), format_double(table.sum_log10_df(bin))}, bin,
            table.sum_log10_df(bin));
    }
    f.finish("sum log10(df/MHz)");
  }
  {
    FigureFile f(out_dir, 5, "954 Hz East power per pulse pair", hdr,
                 {"ra_bin", "p954_east"});
    for (const auto& p : pairs) {
      f.row({std::to_string(p.ra_bin), format_double(p.lower.p954_east)},
            p.ra_bin, p.lower.p954_east);
    }
    f.finish("954 Hz power (linear)");
  }
  {
    FigureFile f(out_dir, 6, "wideband East power per pulse pair", hdr,
                 {"ra_bin", "p50m_east"});
    for (const auto& p : pairs) {
      f.row({std::to_string(p.ra_bin), format_double(p.lower.p50m_east)},
            p.ra_bin, p.lower.p50m_east);
    }
    f.finish("50 MHz power (linear)");
  }
  {
    FigureFile f(out_dir, 7, "pulse pair MJD per RA bin", hdr,
                 {"ra_bin", "mjd"});
    for (const auto& p : pairs) {
      f.row({std::to_string(p.ra_bin), format_mjd(p.pair_mjd)}, p.ra_bin,
            p.pair_mjd);
    }
    f.finish("MJD");
  }
  {
    FigureFile f(out_dir, 8, "upper component RF per pulse pair", hdr,
                 {"ra_bin", "upper_rf_hz"});
    for (const auto& p : pairs) {
      f.row({std::to_string(p.ra_bin), format_double(p.upper.rf_hz)}, p.ra_bin,
            p.upper.rf_hz);
    }
    f.finish("RF (Hz)");
  }
  {
    FigureFile f(out_dir, 9, "RA bin event probability", hdr,
                 {"ra_bin", "event_probability"});
    for (int bin = 0; bin < kNumRaBins; ++bin) {
      const double p = probabilities[static_cast<std::size_t>(bin)];
      f.row({std::to_string(bin), format_double(p)}, bin, p);
    }
    f.finish("probability");
  }
  {
    FigureFile f(out_dir, 10, "log10 SNR likelihood per pulse pair", hdr,
                 {"ra_bin", "log10_snr_likelihood"}, /*surrogate=*/true);
    for (const auto& p : pairs) {
      const double snr = std::min(p.lower.snr_east_db, p.lower.snr_west_db);
      const double v = snr_likelihood_log10(snr);
      f.row({std::to_string(p.ra_bin), format_double(v)}, p.ra_bin, v);
    }
    f.finish("log10 likelihood");
  }
  {
    FigureFile f(out_dir, 11, "pulse pair |ddPhi| per RA bin", hdr,
                 {"ra_bin", "dd_phi_abs_rad"});
    for (const auto& p : pairs) {
      f.row({std::to_string(p.ra_bin), format_double(p.dd_phi_abs_rad)},
            p.ra_bin, p.dd_phi_abs_rad);
    }
    f.finish("|ddPhi| (rad)");
  }
  {
    FigureFile f(out_dir, 12, "low-side RFI margin per pulse pair", hdr,
                 {"ra_bin", "margin_low"});
    for (const auto& p : pairs) {
      f.row({std::to_string(p.ra_bin), std::to_string(p.lower.margin_low)},
            p.ra_bin, static_cast<double>(p.lower.margin_low));
    }
    f.finish("segments to RFI (low side)");
  }
  {
    FigureFile f(out_dir, 13, "high-side RFI margin per pulse pair", hdr,
                 {"ra_bin", "margin_high"});
    for (const auto& p : pairs) {
      f.row({std::to_string(p.ra_bin), std::to_string(p.lower.margin_high)},
            p.ra_bin, static_cast<double>(p.lower.margin_high));
    }
    f.finish("segments to RFI (high side)");
  }
}

}  // namespace pulsepair
