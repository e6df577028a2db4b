#include "pulsepair/csvio.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "pulsepair/errors.hpp"

namespace pulsepair {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw DataError("format_double failed");
  return {buf, ptr};
}

std::string format_mjd(double mjd) {
  char buf[64];
  auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), mjd, std::chars_format::fixed, 7);
  if (ec != std::errc{}) throw DataError("format_mjd failed");
  return {buf, ptr};
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw DataError("bad numeric field: '" + s + "'");
  }
  return v;
}

long parse_long(const std::string& s) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw DataError("bad integer field: '" + s + "'");
  }
  return v;
}

struct CsvWriter::Impl {
  std::ofstream out;
  std::string path;
  bool columns_written = false;
  std::size_t n_columns = 0;
};

CsvWriter::CsvWriter(const std::string& path) : impl_(std::make_unique<Impl>()) {
  impl_->out.open(path, std::ios::trunc);
  if (!impl_->out) throw IoError("cannot open for writing: " + path);
  impl_->path = path;
}

CsvWriter::~CsvWriter() {
  try {
    close();
  } catch (...) {
  }
}

void CsvWriter::meta(const std::string& key, const std::string& value) {
  if (impl_->columns_written) throw DataError("CsvWriter: metadata after columns");
  impl_->out << "# " << key << " = " << value << "\n";
}

void CsvWriter::meta(const std::string& key, double value) {
  meta(key, format_double(value));
}

void CsvWriter::columns(const std::vector<std::string>& names) {
  if (impl_->columns_written) throw DataError("CsvWriter: columns written twice");
  impl_->columns_written = true;
  impl_->n_columns = names.size();
  for (std::size_t i = 0; i < names.size(); ++i) {
    impl_->out << names[i] << (i + 1 == names.size() ? "\n" : ",");
  }
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (!impl_->columns_written || fields.size() != impl_->n_columns) {
    throw DataError("CsvWriter: row shape mismatch");
  }
  for (std::size_t i = 0; i < fields.size(); ++i) {
    impl_->out << fields[i] << (i + 1 == fields.size() ? "\n" : ",");
  }
}

void CsvWriter::close() {
  if (!impl_->out.is_open()) return;
  impl_->out.close();
  if (impl_->out.fail()) throw IoError("write failed: " + impl_->path);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  std::size_t b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

}  // namespace

int CsvTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return static_cast<int>(i);
  }
  return -1;
}

double CsvTable::meta_double(const std::string& key) const {
  auto it = meta.find(key);
  if (it == meta.end()) throw DataError("missing CSV metadata key: " + key);
  return parse_double(it->second);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  CsvTable table;
  std::string line;
  bool have_columns = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        table.meta[trim(line.substr(1, eq - 1))] = trim(line.substr(eq + 1));
      }
      continue;
    }
    if (trim(line).empty()) continue;
    if (!have_columns) {
      table.columns = split_csv_line(line);
      have_columns = true;
    } else {
      auto fields = split_csv_line(line);
      if (fields.size() != table.columns.size()) {
        throw DataError("ragged CSV row in " + path);
      }
      table.rows.push_back(std::move(fields));
    }
  }
  return table;
}

}  // namespace pulsepair
