#pragma once

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace autoexplore {

/**
 * Ordered per-iteration metric rows plus a free-form summary block.
 *
 * If an "iter" column exists it must be strictly increasing; a
 * "samples_cum" column must be non-decreasing. Violations throw
 * std::logic_error at insertion.
 */
class RunRecord {
 public:
  RunRecord() = default;
  explicit RunRecord(std::vector<std::string> columns);

  void add_row(std::vector<double> values);

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<std::vector<double>>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }

  int column_index(const std::string& name) const;
  double at(std::size_t row, const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
  double last(const std::string& name) const { return at(rows_.size() - 1, name); }

  nlohmann::json& summary() noexcept { return summary_; }
  const nlohmann::json& summary() const noexcept { return summary_; }

  /// `# key=value` comment lines, then a header row, then %.17g values ("nan" for NaN).
  void write_csv(std::ostream& out, const std::vector<std::string>& comments = {}) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
  int iter_col_ = -1;
  int samples_col_ = -1;
  nlohmann::json summary_ = nlohmann::json::object();
};

/// %.17g, with "nan" / "inf" / "-inf" spelled out.
std::string format_double(double value);

}  // namespace autoexplore
