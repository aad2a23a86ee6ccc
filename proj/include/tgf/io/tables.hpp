#pragma once

#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tgf/data/fgi.hpp"
#include "tgf/eval/comparison.hpp"
#include "tgf/eval/metrics.hpp"
#include "tgf/forecast.hpp"
#include "tgf/io/json_codec.hpp"

namespace tgf {

/// Header plus string cells; enough for the flat tables this tool writes.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name, const std::string& source) const {
    for (std::size_t j = 0; j < header.size(); ++j)
      if (header[j] == name) return j;
    throw SchemaError(source + ": missing column '" + std::string(name) + "'");
  }
};

inline CsvTable parse_csv_table(std::istream& in, const std::string& source) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(source + ": empty file");
  for (auto c : detail::split_csv_line(line)) t.header.emplace_back(c);
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> cells;
    for (auto c : detail::split_csv_line(line)) cells.emplace_back(c);
    if (cells.size() != t.header.size()) {
      throw ParseError(source + ": row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                       " cells, header has " + std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  return t;
}

inline CsvTable load_csv_table(const std::string& path) {
  std::istringstream in(read_text_file(path));
  return parse_csv_table(in, path);
}

inline double csv_number(const std::string& cell, const std::string& source, std::size_t row) {
  double v = 0.0;
  if (!parse_double(cell, v)) {
    throw ParseError(source + ": row " + std::to_string(row + 2) + ": not a finite number: '" + cell + "'");
  }
  return v;
}

// --- predictions -----------------------------------------------------------

inline std::string forecast_to_csv(const Forecast& fc) {
  std::ostringstream os;
  os << "date,actual,predicted,lower,upper\n";
  const bool band = fc.lower.size() == fc.size();
  for (std::size_t i = 0; i < fc.size(); ++i) {
    os << format_iso_date(fc.dates[i]) << ',' << format_double(fc.actual[i]) << ','
       << format_double(fc.predicted[i]) << ',' << (band ? format_double(fc.lower[i]) : "") << ','
       << (band ? format_double(fc.upper[i]) : "") << '\n';
  }
  return os.str();
}

inline Forecast forecast_from_csv(std::istream& in, const std::string& source) {
  const auto t = parse_csv_table(in, source);
  const auto cd = t.column("date", source), ca = t.column("actual", source),
             cp = t.column("predicted", source), cl = t.column("lower", source),
             cu = t.column("upper", source);
  Forecast fc;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const auto d = parse_iso_date(row[cd]);
    if (!d) throw ParseError(source + ": row " + std::to_string(r + 2) + ": bad date '" + row[cd] + "'");
    if (!fc.dates.empty() && *d <= fc.dates.back()) {
      throw OrderingError(source + ": date " + row[cd] + " is not after " + format_iso_date(fc.dates.back()));
    }
    fc.dates.push_back(*d);
    fc.actual.push_back(csv_number(row[ca], source, r));
    fc.predicted.push_back(csv_number(row[cp], source, r));
    if (!row[cl].empty() || !row[cu].empty()) {
      fc.lower.push_back(csv_number(row[cl], source, r));
      fc.upper.push_back(csv_number(row[cu], source, r));
    }
  }
  if (!fc.lower.empty() && fc.lower.size() != fc.size()) {
    throw ParseError(source + ": interval bounds present on some rows only");
  }
  return fc;
}

inline Forecast load_forecast(const std::string& path) {
  std::istringstream in(read_text_file(path));
  return forecast_from_csv(in, path);
}

// --- metrics and loss traces ---------------------------------------------------

inline std::string metrics_to_csv(const std::vector<std::string>& models,
                                  const std::vector<MetricReport>& reports) {
  std::ostringstream os;
  os << "model,mse,rmse,mae,mape\n";
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto& r = reports[i];
    os << models[i] << ',' << format_double(r.mse) << ',' << format_double(r.rmse) << ','
       << format_double(r.mae) << ',' << format_double(r.mape_percent) << '\n';
  }
  return os.str();
}

inline std::string loss_trace_to_csv(const std::vector<double>& trace) {
  std::ostringstream os;
  os << "epoch,loss\n";
  for (std::size_t e = 0; e < trace.size(); ++e) os << e + 1 << ',' << format_double(trace[e]) << '\n';
  return os.str();
}

// --- comparison report ---------------------------------------------------------

inline Json comparison_to_json(const ComparisonReport& rep) {
  Json ranks = Json::object();
  for (std::size_t j = 0; j < rep.models.size(); ++j) ranks[rep.models[j]] = rep.friedman.mean_ranks[j];
  Json pairs = Json::array();
  for (const auto& p : rep.pairs) {
    pairs.push_back({{"model1", p.model1},
                     {"model2", p.model2},
                     {"wilcoxon_R", p.wilcoxon_r},
                     {"raw_p", p.p_raw},
                     {"bonferroni_p", p.p_corrected},
                     {"significant", p.significant},
                     {"n_effective", p.n_effective}});
  }
  return Json{{"models", rep.models},
              {"friedman",
               {{"chi2", rep.friedman.chi2},
                {"df", rep.friedman.df},
                {"p_value", rep.friedman.p_value},
                {"blocks", rep.friedman.blocks},
                {"mean_ranks", ranks}}},
              {"comparisons", rep.comparisons},
              {"alpha", rep.alpha},
              {"pairs", pairs}};
}

inline std::string comparison_to_csv(const ComparisonReport& rep) {
  std::ostringstream os;
  os << "model1,model2,wilcoxon_R,raw_p,bonferroni_p,significant\n";
  for (const auto& p : rep.pairs) {
    os << p.model1 << ',' << p.model2 << ',' << format_double(p.wilcoxon_r) << ','
       << format_double(p.p_raw) << ',' << format_double(p.p_corrected) << ','
       << (p.significant ? "true" : "false") << '\n';
  }
  return os.str();
}

/// Aligns forecasts on their dates and runs the comparison on absolute errors.
inline ComparisonReport compare_forecasts(const std::vector<std::string>& names,
                                          const std::vector<Forecast>& forecasts, double alpha = 0.05) {
  if (names.size() != forecasts.size()) throw DimensionError("compare_forecasts: names vs forecasts");
  if (forecasts.size() < 2) throw SizeError("compare: need prediction files for at least two models");
  const auto& ref = forecasts.front();
  std::vector<std::vector<double>> errors;
  for (std::size_t m = 0; m < forecasts.size(); ++m) {
    const auto& fc = forecasts[m];
    const auto common = std::min(fc.size(), ref.size());
    for (std::size_t i = 0; i < common; ++i) {
      if (fc.dates[i] != ref.dates[i]) {
        throw AlignmentError("compare: '" + names[m] + "' is misaligned with '" + names[0] +
                             "' at date " + format_iso_date(fc.dates[i]) + " (expected " +
                             format_iso_date(ref.dates[i]) + ")");
      }
    }
    if (fc.size() != ref.size()) {
      const auto& longer = fc.size() > ref.size() ? fc : ref;
      throw AlignmentError("compare: '" + names[m] + "' and '" + names[0] +
                           "' cover different dates; first unmatched date " +
                           format_iso_date(longer.dates[common]));
    }
    std::vector<double> e(fc.size());
    for (std::size_t i = 0; i < fc.size(); ++i) e[i] = std::abs(fc.actual[i] - fc.predicted[i]);
    errors.push_back(std::move(e));
  }
  return compare_models(names, errors, alpha);
}

// --- plot data -------------------------------------------------------------------

/// Tidy long-format rows: date, series, value, band_lo, band_hi, fgi_category.
/// One `actual` row per date, one row per model forecast, and an `fgi` row when
/// the index is available.
inline std::string plot_data_csv(const std::vector<std::string>& models,
                                 const std::vector<Forecast>& forecasts,
                                 const std::map<Date, double>& fgi = {}) {
  std::ostringstream os;
  os << "date,series,value,band_lo,band_hi,fgi_category\n";
  if (forecasts.empty()) return os.str();
  auto category = [&](Date d) -> std::string {
    const auto it = fgi.find(d);
    return it == fgi.end() ? "" : std::string(to_string(classify_fgi(it->second)));
  };
  const auto& ref = forecasts.front();
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const auto d = ref.dates[i];
    const auto cat = category(d);
    const auto date = format_iso_date(d);
    os << date << ",actual," << format_double(ref.actual[i]) << ",,," << cat << '\n';
    for (std::size_t m = 0; m < forecasts.size(); ++m) {
      const auto& fc = forecasts[m];
      if (i >= fc.size()) continue;
      const bool band = fc.lower.size() == fc.size();
      os << date << ',' << models[m] << ',' << format_double(fc.predicted[i]) << ','
         << (band ? format_double(fc.lower[i]) : "") << ',' << (band ? format_double(fc.upper[i]) : "")
         << ',' << cat << '\n';
    }
    const auto it = fgi.find(d);
    if (it != fgi.end()) os << date << ",fgi," << format_double(it->second) << ",,," << cat << '\n';
  }
  return os.str();
}

}  // namespace tgf
