#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "windtwin/detect/detector.hpp"
#include "windtwin/service/alerts.hpp"
#include "windtwin/service/artifacts.hpp"
#include "windtwin/service/pipeline.hpp"

namespace windtwin::service {

struct FollowOptions {
  int poll_ms = 1000;
  bool once = false;  // drain what is there, then return
  std::vector<SinkConfig> sinks;
  std::ostream* sink_stdout = &std::cout;
};

struct FollowStats {
  std::size_t frames = 0;
  std::size_t events = 0;
  std::size_t alerts = 0;
};

// Tails an append-only CSV in the ingest format (minute-averaged rows), feeds
// each new row through the detector, appends events to the event log and
// dispatches alerts for measurement and sensor anomalies. The cursor file
// persists the byte offset, line number and detector state after every drained
// batch, so a restarted follower resumes without re-alerting.
class Follower {
 public:
  Follower(const fs::path& csv, const fs::path& cursor, const fs::path& events_out,
           IngestConfig config, std::vector<nom::NomModel> models, ThresholdsArtifact thresholds,
           FollowOptions options)
      : csv_(csv),
        cursor_path_(cursor),
        events_out_(events_out),
        config_(std::move(config)),
        options_(std::move(options)),
        detector_(config_.schema, models, thresholds.thresholds, config_.detector_config(),
                  make_diagnoser(models, thresholds)) {
    require_file(csv_, "follow watches an existing CSV");
    std::ifstream in(csv_, std::ios::binary);
    std::string header;
    if (!std::getline(in, header)) throw StreamError("watched file has no header: " + csv_.string());
    if (!header.empty() && header.back() == '\r') header.pop_back();
    header_ = header;
    layout_ = ingest::CsvLayout::from_header(header_, config_.schema);
    offset_ = static_cast<std::int64_t>(in.tellg());
    line_number_ = 1;
    if (fs::exists(cursor_path_)) restore_cursor();
  }

  // One drain pass: consume every complete appended line. Returns the number
  // of frames processed.
  std::size_t drain(FollowStats& stats) {
    std::ifstream in(csv_, std::ios::binary);
    if (!in) throw StreamError("watched file disappeared: " + csv_.string());
    in.seekg(offset_);
    std::size_t processed = 0;
    std::string line;
    while (std::getline(in, line)) {
      if (in.eof() && !line.empty()) break;  // incomplete trailing line, wait for more
      const auto consumed = static_cast<std::int64_t>(in.tellg()) - offset_;
      ++line_number_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) {
        process_line(line, stats);
        ++processed;
      }
      offset_ += consumed;
    }
    if (processed > 0) persist_cursor();
    return processed;
  }

  FollowStats run() {
    FollowStats stats;
    while (true) {
      drain(stats);
      if (options_.once) break;
      std::this_thread::sleep_for(std::chrono::milliseconds(options_.poll_ms));
    }
    return stats;
  }

 private:
  void process_line(const std::string& line, FollowStats& stats) {
    ingest::ScadaFrame frame;
    try {
      frame = layout_.parse_row(line, line_number_);
    } catch (const DataError& e) {
      throw StreamError(std::string("corrupt appended line: ") + e.what());
    }
    auto result = detector_.step(frame);  // throws StreamError on non-monotonic input
    ++stats.frames;
    for (const auto& event : result.events) {
      append_text_file(events_out_, event_to_json(event, config_.schema).dump() + "\n");
      ++stats.events;
      if (event.kind != detect::AnomalyKind::suppressed_extended_reheating &&
          !options_.sinks.empty()) {
        AlertDispatcher dispatcher(options_.sinks, options_.sink_stdout);
        dispatcher.dispatch(make_alert(event, config_.schema, config_.farm, config_.turbine));
        ++stats.alerts;
      }
    }
  }

  void persist_cursor() const {
    nlohmann::json j{{"format", "windtwin-cursor"},
                     {"version", 1},
                     {"byte_offset", offset_},
                     {"line_number", line_number_},
                     {"header", header_},
                     {"detector_state", detector_.state_to_json()}};
    write_text_file(cursor_path_, j.dump(2) + "\n");
  }

  void restore_cursor() {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_text_file(cursor_path_));
    } catch (const nlohmann::json::exception& e) {
      throw StreamError("corrupt cursor file " + cursor_path_.string() + ": " + e.what());
    }
    if (j.value("format", "") != "windtwin-cursor")
      throw StreamError("not a cursor file: " + cursor_path_.string());
    if (j.at("header").get<std::string>() != header_)
      throw StreamError("cursor was written for a different file layout: " +
                        cursor_path_.string());
    offset_ = j.at("byte_offset").get<std::int64_t>();
    line_number_ = j.at("line_number").get<std::size_t>();
    detector_.restore_state(j.at("detector_state"));
  }

  fs::path csv_, cursor_path_, events_out_;
  IngestConfig config_;
  FollowOptions options_;
  detect::Detector detector_;
  ingest::CsvLayout layout_;
  std::string header_;
  std::int64_t offset_ = 0;
  std::size_t line_number_ = 1;
};

inline FollowStats run_follow(const fs::path& csv, const fs::path& config_path,
                              const fs::path& models_dir, const fs::path& thresholds_path,
                              const fs::path& cursor, const fs::path& events_out,
                              FollowOptions options = {}) {
  require_file(config_path, "ingest config JSON");
  require_file(thresholds_path, "run `calibrate` first");
  Follower follower(csv, cursor, events_out, load_ingest_config(config_path),
                    load_models(models_dir), load_thresholds(thresholds_path),
                    std::move(options));
  return follower.run();
}

}  // namespace windtwin::service
