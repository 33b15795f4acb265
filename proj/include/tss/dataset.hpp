#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tss {

/// Numeric dataset with named columns; row order is time order.
struct TimeSeriesDataset {
  std::vector<std::string> columns;  // size = values.cols()
  std::vector<std::string> time;     // optional labels, size = values.rows() or empty
  Eigen::MatrixXd values;            // n x m

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }

  /// Index of a named column, or -1 if absent.
  int column_index(const std::string& name) const;
  Eigen::VectorXd column(const std::string& name) const;  // throws if absent
};

struct CsvSchema {
  bool has_header = true;
  /// Column treated as a time label (kept as text, excluded from values).
  std::optional<std::string> time_column;
};

struct CsvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Reads a rectangular numeric CSV. Ragged rows, non-numeric cells and NaN
/// are rejected with the 1-based (data row, column) location in the message.
TimeSeriesDataset ingest_csv(const std::string& path, const CsvSchema& schema = {});

/// Writes header + rows; numbers carry 17 significant digits so a
/// write/ingest round trip is lossless.
void write_csv(const TimeSeriesDataset& data, const std::string& path);

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double v);

}  // namespace tss
