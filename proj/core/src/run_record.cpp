#include "autoexplore/run_record.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace autoexplore {

RunRecord::RunRecord(std::vector<std::string> columns) : columns_(std::move(columns)) {
  iter_col_ = column_index("iter");
  samples_col_ = column_index("samples_cum");
}

int RunRecord::column_index(const std::string& name) const {
  const auto it = std::find(columns_.begin(), columns_.end(), name);
  return it == columns_.end() ? -1 : static_cast<int>(it - columns_.begin());
}

void RunRecord::add_row(std::vector<double> values) {
  if (values.size() != columns_.size()) {
    throw std::logic_error("RunRecord: row has " + std::to_string(values.size()) +
                           " values, expected " + std::to_string(columns_.size()));
  }
  if (!rows_.empty()) {
    const auto& prev = rows_.back();
    if (iter_col_ >= 0 && !(values[iter_col_] > prev[iter_col_])) {
      throw std::logic_error("RunRecord: iteration index must increase");
    }
    if (samples_col_ >= 0 && values[samples_col_] < prev[samples_col_]) {
      throw std::logic_error("RunRecord: samples_cum must be non-decreasing");
    }
  }
  rows_.push_back(std::move(values));
}

double RunRecord::at(std::size_t row, const std::string& name) const {
  const int col = column_index(name);
  if (col < 0) {
    throw std::out_of_range("RunRecord: no column '" + name + "'");
  }
  return rows_.at(row)[static_cast<std::size_t>(col)];
}

std::vector<double> RunRecord::column(const std::string& name) const {
  const int col = column_index(name);
  if (col < 0) {
    throw std::out_of_range("RunRecord: no column '" + name + "'");
  }
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& row : rows_) {
    out.push_back(row[static_cast<std::size_t>(col)]);
  }
  return out;
}

std::string format_double(double value) {
  if (std::isnan(value)) {
    return "nan";
  }
  if (std::isinf(value)) {
    return value > 0 ? "inf" : "-inf";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void RunRecord::write_csv(std::ostream& out, const std::vector<std::string>& comments) const {
  for (const auto& line : comments) {
    out << "# " << line << '\n';
  }
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    out << (c ? "," : "") << columns_[c];
  }
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << (c ? "," : "") << format_double(row[c]);
    }
    out << '\n';
  }
}

}  // namespace autoexplore
