#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace pulsepair {

// Locale-independent formatting used for every CSV field. Doubles use the
// shortest round-trip representation (sub-Hz frequency differences at RF
// survive re-parsing); MJD columns use fixed 7 decimal places so
// adjacent-time frames stay distinguishable.
std::string format_double(double v);
std::string format_mjd(double mjd);

double parse_double(const std::string& s);
long parse_long(const std::string& s);

// Comment-headed CSV: "# key = value" metadata lines, one column-name line,
// then rows.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  ~CsvWriter();

  void meta(const std::string& key, const std::string& value);
  void meta(const std::string& key, double value);
  void columns(const std::vector<std::string>& names);
  void row(const std::vector<std::string>& fields);
  void close();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct CsvTable {
  std::map<std::string, std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  int column_index(const std::string& name) const;  // -1 if absent
  double meta_double(const std::string& key) const;
};

CsvTable read_csv(const std::string& path);

}  // namespace pulsepair
