#include "tss/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tss {

int TimeSeriesDataset::column_index(const std::string& name) const {
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (columns[j] == name) return static_cast<int>(j);
  return -1;
}

Eigen::VectorXd TimeSeriesDataset::column(const std::string& name) const {
  const int j = column_index(name);
  if (j < 0) throw std::invalid_argument("dataset has no column named '" + name + "'");
  return values.col(j);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

double parse_cell(const std::string& raw, long row, long col) {
  const std::string s = trim(raw);
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || s.empty())
    throw CsvError("non-numeric cell at row " + std::to_string(row) + ", column " +
                   std::to_string(col) + ": '" + s + "'");
  if (std::isnan(v))
    throw CsvError("NaN at row " + std::to_string(row) + ", column " + std::to_string(col));
  return v;
}

}  // namespace

TimeSeriesDataset ingest_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open '" + path + "'");

  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;  // comment/audit lines
    if (line.empty()) continue;
    lines.push_back(line);
  }
  if (lines.empty()) throw CsvError("'" + path + "' is empty");

  TimeSeriesDataset data;
  std::size_t first_data = 0;
  std::vector<std::string> header;
  if (schema.has_header) {
    header = split_row(lines[0]);
    for (auto& h : header) h = trim(h);
    first_data = 1;
  } else {
    const std::size_t m = split_row(lines[0]).size();
    for (std::size_t j = 0; j < m; ++j) header.push_back("x" + std::to_string(j + 1));
  }

  int time_col = -1;
  if (schema.time_column) {
    for (std::size_t j = 0; j < header.size(); ++j)
      if (header[j] == *schema.time_column) time_col = static_cast<int>(j);
    if (time_col < 0) {
      // no header match: accept a 0-based index given as text
      try {
        time_col = std::stoi(*schema.time_column);
      } catch (...) {
        throw CsvError("time column '" + *schema.time_column + "' not found");
      }
      if (time_col < 0 || time_col >= static_cast<int>(header.size()))
        throw CsvError("time column '" + *schema.time_column + "' not found");
    }
  }

  const std::size_t ncols = header.size();
  const std::size_t nrows = lines.size() - first_data;
  if (nrows == 0) throw CsvError("'" + path + "' has no data rows");

  const std::size_t nvalues = ncols - (time_col >= 0 ? 1 : 0);
  data.values.resize(static_cast<Eigen::Index>(nrows), static_cast<Eigen::Index>(nvalues));
  for (std::size_t j = 0; j < ncols; ++j)
    if (static_cast<int>(j) != time_col) data.columns.push_back(header[j]);

  for (std::size_t r = 0; r < nrows; ++r) {
    const auto cells = split_row(lines[first_data + r]);
    if (cells.size() != ncols)
      throw CsvError("ragged row " + std::to_string(r + 1) + ": expected " +
                     std::to_string(ncols) + " cells, got " + std::to_string(cells.size()));
    Eigen::Index jj = 0;
    for (std::size_t j = 0; j < ncols; ++j) {
      if (static_cast<int>(j) == time_col) {
        data.time.push_back(trim(cells[j]));
      } else {
        data.values(static_cast<Eigen::Index>(r), jj++) =
            parse_cell(cells[j], static_cast<long>(r + 1), static_cast<long>(j + 1));
      }
    }
  }
  return data;
}

void write_csv(const TimeSeriesDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CsvError("cannot write '" + path + "'");
  const bool with_time = !data.time.empty();
  if (with_time && data.time.size() != static_cast<std::size_t>(data.rows()))
    throw std::invalid_argument("time label count does not match row count");

  if (with_time) out << "time,";
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    out << (j < static_cast<Eigen::Index>(data.columns.size()) ? data.columns[j]
                                                               : "x" + std::to_string(j + 1));
    out << (j + 1 < data.cols() ? "," : "\n");
  }
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    if (with_time) out << data.time[i] << ",";
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      out << format_double(data.values(i, j));
      out << (j + 1 < data.cols() ? "," : "\n");
    }
  }
}

}  // namespace tss
