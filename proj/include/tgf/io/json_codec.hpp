#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "tgf/data/pipeline.hpp"

namespace tgf {

using Json = nlohmann::ordered_json;

inline Json tensor_to_json(const Tensor2& t) {
  return Json{{"rows", t.rows()}, {"cols", t.cols()}, {"data", t.vector()}};
}

inline Tensor2 tensor_from_json(const Json& j, const std::string& what) {
  try {
    const auto rows = j.at("rows").get<std::size_t>();
    const auto cols = j.at("cols").get<std::size_t>();
    auto data = j.at("data").get<std::vector<double>>();
    if (data.size() != rows * cols) {
      throw ParseError(what + ": " + std::to_string(data.size()) + " values for shape " +
                       std::to_string(rows) + "x" + std::to_string(cols));
    }
    return Tensor2(rows, cols, std::move(data));
  } catch (const Json::exception& e) {
    throw ParseError(what + ": " + e.what());
  }
}

inline Json norm_stats_to_json(const NormStats& s) {
  Json out = Json::object();
  for (std::size_t j = 0; j < s.names.size(); ++j) out[s.names[j]] = {{"min", s.min[j]}, {"max", s.max[j]}};
  return out;
}

inline NormStats norm_stats_from_json(const Json& j) {
  NormStats s;
  try {
    for (const auto& [name, v] : j.items()) {
      s.names.push_back(name);
      s.min.push_back(v.at("min").get<double>());
      s.max.push_back(v.at("max").get<double>());
    }
  } catch (const Json::exception& e) {
    throw ParseError(std::string("norm stats: ") + e.what());
  }
  return s;
}

inline Json frame_to_json(const SeriesFrame& f) {
  Json dates = Json::array();
  for (const auto& d : f.dates()) dates.push_back(format_iso_date(d));
  Json cols = Json::object();
  for (const auto& name : f.names()) cols[name] = f.column(name);
  return Json{{"dates", dates}, {"columns", cols}};
}

inline SeriesFrame frame_from_json(const Json& j) {
  try {
    std::vector<Date> dates;
    for (const auto& d : j.at("dates")) {
      const auto parsed = parse_iso_date(d.get<std::string>());
      if (!parsed) throw ParseError("frame: bad date '" + d.get<std::string>() + "'");
      dates.push_back(*parsed);
    }
    std::vector<std::string> names;
    Tensor2 v(dates.size(), j.at("columns").size());
    std::size_t c = 0;
    for (const auto& [name, col] : j.at("columns").items()) {
      names.push_back(name);
      const auto values = col.get<std::vector<double>>();
      if (values.size() != dates.size()) throw ParseError("frame: column '" + name + "' length mismatch");
      for (std::size_t i = 0; i < values.size(); ++i) v(i, c) = values[i];
      ++c;
    }
    return SeriesFrame::scaled(std::move(dates), std::move(names), std::move(v));
  } catch (const Json::exception& e) {
    throw ParseError(std::string("frame: ") + e.what());
  }
}

/// Inspection artifact for a supervised dataset: one record per sample.
inline Json window_set_to_json(const WindowSet& ws) {
  Json samples = Json::array();
  for (std::size_t i = 0; i < ws.size(); ++i) {
    samples.push_back({{"target_date", format_iso_date(ws.target_dates[i])},
                       {"last_input_date", format_iso_date(ws.last_input_dates[i])},
                       {"target", ws.targets[i]},
                       {"inputs", tensor_to_json(ws.inputs[i])}});
  }
  return Json{{"window", ws.window},
              {"features", ws.feature_names},
              {"target_column", ws.target_column},
              {"samples", samples}};
}

inline WindowSet window_set_from_json(const Json& j) {
  WindowSet ws;
  try {
    ws.window = j.at("window").get<std::size_t>();
    ws.feature_names = j.at("features").get<std::vector<std::string>>();
    ws.target_column = j.at("target_column").get<std::string>();
    for (const auto& s : j.at("samples")) {
      const auto td = parse_iso_date(s.at("target_date").get<std::string>());
      const auto ld = parse_iso_date(s.at("last_input_date").get<std::string>());
      if (!td || !ld) throw ParseError("window set: bad date");
      ws.target_dates.push_back(*td);
      ws.last_input_dates.push_back(*ld);
      ws.targets.push_back(s.at("target").get<double>());
      ws.inputs.push_back(tensor_from_json(s.at("inputs"), "window set sample"));
    }
  } catch (const Json::exception& e) {
    throw ParseError(std::string("window set: ") + e.what());
  }
  return ws;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

/// Two-space indented, trailing newline.
inline std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
  if (!out) throw DataError("failed writing '" + path + "'");
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace tgf
