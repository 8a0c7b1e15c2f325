#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "windtwin/errors.hpp"
#include "windtwin/fileio.hpp"
#include "windtwin/ingest/schema.hpp"
#include "windtwin/time.hpp"

namespace windtwin::ingest {

// One multi-channel sample. values[] is aligned with the schema channel order;
// a missing measurement is nullopt, never 0.0.
struct ScadaFrame {
  Timestamp timestamp = 0;
  std::vector<std::optional<double>> values;
  int status_code = 0;
  int operational_code = 0;

  int code(DowntimeField f) const {
    return f == DowntimeField::status_code ? status_code : operational_code;
  }
};

using Series = std::vector<ScadaFrame>;

namespace csv_detail {

inline std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline void strip_cr(std::string& s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
}

}  // namespace csv_detail

// Maps CSV columns onto a schema. Built from the header row; reused by the
// batch reader and the streaming follower.
struct CsvLayout {
  std::size_t timestamp_col = 0;
  std::size_t status_col = 0;
  std::size_t operational_col = 0;
  std::vector<std::size_t> channel_cols;  // schema order
  std::size_t column_count = 0;

  static CsvLayout from_header(const std::string& header_line, const Schema& schema) {
    auto cols = csv_detail::split_line(header_line);
    CsvLayout layout;
    layout.column_count = cols.size();
    auto find_col = [&](std::string_view name) -> std::size_t {
      for (std::size_t i = 0; i < cols.size(); ++i) {
        if (cols[i] == name) return i;
      }
      throw SchemaError("missing column in CSV header: " + std::string(name));
    };
    layout.timestamp_col = find_col("timestamp");
    layout.status_col = find_col("status_code");
    layout.operational_col = find_col("operational_code");
    for (const auto& ch : schema.channels()) {
      layout.channel_cols.push_back(find_col(ch.id));
    }
    return layout;
  }

  // line_number is 1-based and refers to the physical file line.
  ScadaFrame parse_row(const std::string& line, std::size_t line_number) const {
    const auto cells = csv_detail::split_line(line);
    if (cells.size() != column_count) {
      throw DataError("line " + std::to_string(line_number) + ": expected " +
                      std::to_string(column_count) + " fields, got " +
                      std::to_string(cells.size()));
    }
    ScadaFrame frame;
    const auto ts = parse_iso8601(cells[timestamp_col]);
    if (!ts) {
      throw DataError("line " + std::to_string(line_number) +
                      ": unparseable timestamp: " + cells[timestamp_col]);
    }
    frame.timestamp = *ts;
    const auto status = parse_int(cells[status_col]);
    const auto oper = parse_int(cells[operational_col]);
    if (!status || !oper) {
      throw DataError("line " + std::to_string(line_number) + ": unparseable code field");
    }
    frame.status_code = static_cast<int>(*status);
    frame.operational_code = static_cast<int>(*oper);
    frame.values.reserve(channel_cols.size());
    for (const auto col : channel_cols) {
      // Empty or non-numeric cells become missing values, not errors.
      frame.values.push_back(parse_double(cells[col]));
    }
    return frame;
  }
};

// Reads a raw SCADA CSV. Frames come back sorted by timestamp; duplicate
// timestamps are a data error. A zero-byte file is an empty series.
inline Series parse_csv(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open CSV file: " + path.string());

  std::string line;
  if (!std::getline(in, line)) return {};
  csv_detail::strip_cr(line);
  const auto layout = CsvLayout::from_header(line, schema);

  std::vector<std::pair<ScadaFrame, std::size_t>> rows;  // frame + line number
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    csv_detail::strip_cr(line);
    if (line.empty()) continue;
    rows.emplace_back(layout.parse_row(line, line_number), line_number);
  }

  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.first.timestamp < b.first.timestamp;
  });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].first.timestamp == rows[i - 1].first.timestamp) {
      throw DataError("line " + std::to_string(rows[i].second) + ": duplicate timestamp " +
                      format_iso8601(rows[i].first.timestamp));
    }
  }

  Series series;
  series.reserve(rows.size());
  for (auto& [frame, ln] : rows) series.push_back(std::move(frame));
  return series;
}

inline std::string csv_header(const Schema& schema) {
  std::string h = "timestamp,status_code,operational_code";
  for (const auto& ch : schema.channels()) {
    h += ',';
    h += ch.id;
  }
  return h;
}

inline std::string csv_row(const ScadaFrame& frame) {
  std::string row = format_iso8601(frame.timestamp);
  row += ',';
  row += std::to_string(frame.status_code);
  row += ',';
  row += std::to_string(frame.operational_code);
  for (const auto& v : frame.values) {
    row += ',';
    if (v) row += format_double(*v);
  }
  return row;
}

inline std::string to_csv(const Series& series, const Schema& schema) {
  std::string out = csv_header(schema);
  out += '\n';
  for (const auto& frame : series) {
    out += csv_row(frame);
    out += '\n';
  }
  return out;
}

inline void write_csv(const std::filesystem::path& path, const Series& series,
                      const Schema& schema) {
  write_text_file(path, to_csv(series, schema));
}

}  // namespace windtwin::ingest
