#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tgf/core/tensor.hpp"
#include "tgf/data/date.hpp"

namespace tgf {

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

inline bool parse_double(std::string_view s, double& out) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size() && std::isfinite(out);
}

namespace columns {
inline constexpr const char* kDate = "date";
inline constexpr const char* kClose = "close";
inline constexpr const char* kVolume = "volume";
inline constexpr const char* kFgi = "fgi";
inline constexpr const char* kSentiment = "sentiment";
inline constexpr const char* kTrends = "trends";
inline constexpr const char* kBtcClose = "btc_close";
}  // namespace columns

/// Date-indexed table of k named feature columns in original units.
class SeriesFrame {
 public:
  SeriesFrame() = default;

  SeriesFrame(std::vector<Date> dates, std::vector<std::string> names, Tensor2 values)
      : dates_(std::move(dates)), names_(std::move(names)), values_(std::move(values)) {
    validate();
    check_domains();
  }

  /// A frame on a rescaled axis: shape, ordering and finiteness are checked but
  /// not the original-unit ranges of fgi, trends and sentiment.
  static SeriesFrame scaled(std::vector<Date> dates, std::vector<std::string> names, Tensor2 values) {
    SeriesFrame f;
    f.dates_ = std::move(dates);
    f.names_ = std::move(names);
    f.values_ = std::move(values);
    f.validate();
    return f;
  }

  std::size_t rows() const noexcept { return dates_.size(); }
  std::size_t cols() const noexcept { return names_.size(); }
  const std::vector<Date>& dates() const noexcept { return dates_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const Tensor2& values() const noexcept { return values_; }

  bool has_column(std::string_view name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
  }

  std::size_t column_index(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw SchemaError("unknown column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - names_.begin());
  }

  std::vector<double> column(std::string_view name) const {
    const auto j = column_index(name);
    std::vector<double> out(rows());
    for (std::size_t i = 0; i < rows(); ++i) out[i] = values_(i, j);
    return out;
  }

  /// Rows [begin, end).
  SeriesFrame slice(std::size_t begin, std::size_t end) const {
    if (begin > end || end > rows()) throw SizeError("slice out of range");
    std::vector<Date> d(dates_.begin() + static_cast<std::ptrdiff_t>(begin),
                        dates_.begin() + static_cast<std::ptrdiff_t>(end));
    Tensor2 v(end - begin, cols());
    for (std::size_t i = begin; i < end; ++i) {
      std::copy_n(values_.row(i).begin(), cols(), v.row(i - begin).begin());
    }
    return SeriesFrame::scaled(std::move(d), names_, std::move(v));
  }

  /// Keeps only `keep`, in that order.
  SeriesFrame select(const std::vector<std::string>& keep) const {
    Tensor2 v(rows(), keep.size());
    for (std::size_t j = 0; j < keep.size(); ++j) {
      const auto src = column_index(keep[j]);
      for (std::size_t i = 0; i < rows(); ++i) v(i, j) = values_(i, src);
    }
    return SeriesFrame::scaled(dates_, keep, std::move(v));
  }

  SeriesFrame with_column(const std::string& name, const std::vector<double>& data) const {
    if (has_column(name)) throw SchemaError("column '" + name + "' already present");
    if (data.size() != rows()) throw DimensionError("with_column: length mismatch");
    auto names = names_;
    names.push_back(name);
    Tensor2 v(rows(), cols() + 1);
    for (std::size_t i = 0; i < rows(); ++i) {
      std::copy_n(values_.row(i).begin(), cols(), v.row(i).begin());
      v(i, cols()) = data[i];
    }
    return SeriesFrame(dates_, std::move(names), std::move(v));
  }

  friend bool operator==(const SeriesFrame&, const SeriesFrame&) = default;

 private:
  void validate() const {
    if (values_.rows() != dates_.size() || values_.cols() != names_.size()) {
      throw DimensionError("SeriesFrame: values " + values_.shape_string() + " vs " +
                           std::to_string(dates_.size()) + " dates, " +
                           std::to_string(names_.size()) + " columns");
    }
    if (names_.empty()) throw SchemaError("SeriesFrame: at least one feature column required");
    for (std::size_t i = 1; i < dates_.size(); ++i) {
      if (dates_[i] <= dates_[i - 1]) {
        throw OrderingError("date " + format_iso_date(dates_[i]) + " at row " +
                            std::to_string(i + 1) + " does not follow " +
                            format_iso_date(dates_[i - 1]));
      }
    }
    if (!values_.all_finite()) throw ParseError("SeriesFrame: non-finite value");
  }

  void check_domains() const {
    check_range(columns::kFgi, 0.0, 100.0);
    check_range(columns::kTrends, 0.0, 100.0);
    check_range(columns::kSentiment, -1.0, 1.0);
  }

  void check_range(std::string_view name, double lo, double hi) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return;
    const auto j = static_cast<std::size_t>(it - names_.begin());
    for (std::size_t i = 0; i < rows(); ++i) {
      const double v = values_(i, j);
      if (v < lo || v > hi) {
        throw DomainError("column '" + std::string(name) + "' value " + format_double(v) +
                          " on " + format_iso_date(dates_[i]) + " outside [" + format_double(lo) +
                          ", " + format_double(hi) + "]");
      }
    }
  }

  std::vector<Date> dates_;
  std::vector<std::string> names_;
  Tensor2 values_;
};

/// Which CSV columns to read. Required columns must exist; optional ones are
/// taken when present. The frame keeps required columns first, then optional
/// ones, each in declaration order.
struct SeriesSchema {
  std::string date_column = columns::kDate;
  std::vector<std::string> required{columns::kClose, columns::kVolume};
  std::vector<std::string> optional{columns::kFgi, columns::kSentiment, columns::kTrends,
                                    columns::kBtcClose};
};

namespace detail {
inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    auto cell = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '"')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\r' || cell.back() == '"'))
      cell.remove_suffix(1);
    out.push_back(cell);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}
}  // namespace detail

inline SeriesFrame parse_series(std::istream& in, const SeriesSchema& schema,
                                const std::string& source = "<stream>") {
  std::string header_line;
  if (!std::getline(in, header_line)) throw SchemaError(source + ": empty file");
  if (header_line.size() >= 3 && header_line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    header_line.erase(0, 3);
  }
  const auto header = detail::split_csv_line(header_line);
  auto find = [&](std::string_view name) -> std::ptrdiff_t {
    for (std::size_t j = 0; j < header.size(); ++j)
      if (header[j] == name) return static_cast<std::ptrdiff_t>(j);
    return -1;
  };

  const auto date_col = find(schema.date_column);
  if (date_col < 0) throw SchemaError(source + ": missing column '" + schema.date_column + "'");
  std::vector<std::string> names;
  std::vector<std::size_t> src;
  for (const auto& name : schema.required) {
    const auto j = find(name);
    if (j < 0) throw SchemaError(source + ": missing column '" + name + "'");
    names.push_back(name);
    src.push_back(static_cast<std::size_t>(j));
  }
  for (const auto& name : schema.optional) {
    const auto j = find(name);
    if (j < 0) continue;
    names.push_back(name);
    src.push_back(static_cast<std::size_t>(j));
  }

  std::vector<Date> dates;
  std::vector<double> values;
  std::string line;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ParseError(source + ": row " + std::to_string(row) + " has " +
                       std::to_string(cells.size()) + " cells, header has " +
                       std::to_string(header.size()));
    }
    const auto date = parse_iso_date(cells[static_cast<std::size_t>(date_col)]);
    if (!date) {
      throw ParseError(source + ": row " + std::to_string(row) + ": unparseable date '" +
                       std::string(cells[static_cast<std::size_t>(date_col)]) + "'");
    }
    if (!dates.empty() && *date <= dates.back()) {
      throw OrderingError(source + ": row " + std::to_string(row) + ": date " +
                          format_iso_date(*date) + " is not after " + format_iso_date(dates.back()));
    }
    dates.push_back(*date);
    for (std::size_t j = 0; j < src.size(); ++j) {
      double v = 0.0;
      if (!parse_double(cells[src[j]], v)) {
        throw ParseError(source + ": row " + std::to_string(row) + ": column '" + names[j] +
                         "' is not a finite number: '" + std::string(cells[src[j]]) + "'");
      }
      values.push_back(v);
    }
  }
  const auto n = dates.size();
  const auto k = names.size();
  return SeriesFrame(std::move(dates), std::move(names), Tensor2(n, k, std::move(values)));
}

inline SeriesFrame load_series(const std::string& path, const SeriesSchema& schema = {}) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return parse_series(in, schema, path);
}

inline void write_series_csv(const SeriesFrame& frame, std::ostream& out) {
  out << columns::kDate;
  for (const auto& n : frame.names()) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < frame.rows(); ++i) {
    out << format_iso_date(frame.dates()[i]);
    for (std::size_t j = 0; j < frame.cols(); ++j) out << ',' << format_double(frame.values()(i, j));
    out << '\n';
  }
}

inline std::string series_to_csv(const SeriesFrame& frame) {
  std::ostringstream os;
  write_series_csv(frame, os);
  return os.str();
}

}  // namespace tgf
