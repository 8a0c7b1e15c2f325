#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "windtwin/detect/detector.hpp"
#include "windtwin/detect/thresholds.hpp"
#include "windtwin/diagnose/diagnosis.hpp"
#include "windtwin/fileio.hpp"
#include "windtwin/ingest/mask.hpp"
#include "windtwin/ingest/pipeline.hpp"
#include "windtwin/ingest/schema.hpp"

namespace windtwin::service {

using nlohmann::json;

// File names shared by the CLI stages.
inline constexpr const char* kScadaCsv = "scada.csv";
inline constexpr const char* kGroundTruthJson = "ground_truth.json";
inline constexpr const char* kScenarioJson = "scenario.json";
inline constexpr const char* kIngestConfigJson = "ingest_config.json";
inline constexpr const char* kFramesCsv = "frames.csv";
inline constexpr const char* kTrainCsv = "train.csv";
inline constexpr const char* kTestCsv = "test.csv";
inline constexpr const char* kMaskCsv = "mask.csv";
inline constexpr const char* kManifestJson = "manifest.json";
inline constexpr const char* kThresholdsJson = "thresholds.json";
inline constexpr const char* kEventsJsonl = "events.jsonl";
inline constexpr const char* kSummaryJson = "summary.json";

// Everything the ingest stage needs to interpret a raw CSV: the channel
// schema, the downtime code mapping, and pipeline parameters.
struct IngestConfig {
  ingest::Schema schema;
  ingest::StatusCodeMap status_map;
  ingest::DowntimeField downtime_field = ingest::DowntimeField::status_code;
  int reheat_minutes = 60;
  double train_fraction = 0.6;
  std::size_t min_train_samples = 1000;
  int missing_threshold = 10;
  std::string farm = "demo-farm";
  std::string turbine = "wt-01";

  detect::DetectorConfig detector_config() const {
    detect::DetectorConfig cfg;
    cfg.status_map = status_map;
    cfg.downtime_field = downtime_field;
    cfg.reheat_minutes = reheat_minutes;
    cfg.missing_threshold = missing_threshold;
    return cfg;
  }

  json to_json() const {
    json channels = json::array();
    for (const auto& ch : schema.channels()) {
      channels.push_back({{"id", ch.id},
                          {"role", std::string(ingest::to_string(ch.role))},
                          {"unit", ch.unit},
                          {"component_tag", ch.component_tag}});
    }
    return json{{"farm", farm},
                {"turbine", turbine},
                {"channels", channels},
                {"status_codes",
                 {{"operating", std::vector<int>(status_map.operating.begin(),
                                                 status_map.operating.end())},
                  {"down", std::vector<int>(status_map.down.begin(), status_map.down.end())},
                  {"unlisted_is_down", status_map.unlisted_is_down}}},
                {"downtime_field", std::string(ingest::to_string(downtime_field))},
                {"reheat_minutes", reheat_minutes},
                {"train_fraction", train_fraction},
                {"min_train_samples", min_train_samples},
                {"missing_threshold", missing_threshold}};
  }

  static IngestConfig from_json(const json& j) {
    IngestConfig cfg;
    std::vector<ingest::ChannelSpec> channels;
    for (const auto& cj : j.at("channels")) {
      channels.push_back({cj.at("id").get<std::string>(),
                          ingest::channel_role_from_string(cj.at("role").get<std::string>()),
                          cj.value("unit", ""), cj.value("component_tag", "")});
    }
    cfg.schema = ingest::Schema(std::move(channels));
    if (j.contains("status_codes")) {
      const auto& sc = j.at("status_codes");
      cfg.status_map.operating.clear();
      for (const auto c : sc.value("operating", std::vector<int>{0}))
        cfg.status_map.operating.insert(c);
      for (const auto c : sc.value("down", std::vector<int>{})) cfg.status_map.down.insert(c);
      cfg.status_map.unlisted_is_down = sc.value("unlisted_is_down", true);
    }
    cfg.downtime_field =
        ingest::downtime_field_from_string(j.value("downtime_field", "status_code"));
    cfg.reheat_minutes = j.value("reheat_minutes", 60);
    cfg.train_fraction = j.value("train_fraction", 0.6);
    cfg.min_train_samples = j.value("min_train_samples", std::size_t{1000});
    cfg.missing_threshold = j.value("missing_threshold", 10);
    cfg.farm = j.value("farm", "demo-farm");
    cfg.turbine = j.value("turbine", "wt-01");
    return cfg;
  }
};

inline IngestConfig load_ingest_config(const std::filesystem::path& path) {
  try {
    return IngestConfig::from_json(json::parse(read_text_file(path)));
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse ingest config " + path.string() + ": " + e.what());
  }
}

// Event log line. Keys are emitted in lexicographic order, so logs from
// identical runs compare byte-for-byte. The coincidence probability is only
// known to batch replay; streaming mode writes null.
inline json event_to_json(const detect::AnomalyEvent& event, const ingest::Schema& schema) {
  json j{{"timestamp", format_iso8601(event.timestamp)},
         {"channel", event.channel},
         {"kind", std::string(detect::to_string(event.kind))},
         {"residual_sq", event.residual_sq},
         {"threshold", event.threshold}};
  j["coincidence_probability"] =
      event.coincidence_probability ? json(*event.coincidence_probability) : json(nullptr);
  if (event.diagnosis) {
    const auto& d = *event.diagnosis;
    json contributions = json::object();
    for (std::size_t k = 0; k < d.attribution.contributions.size() && k < schema.size(); ++k) {
      contributions[schema.at(k).id] = d.attribution.contributions[k];
    }
    j["diagnosis"] = json{{"case", d.case_id},
                          {"responsible", d.responsible_channels},
                          {"narrative", d.narrative},
                          {"base_value", d.attribution.base_value},
                          {"contributions", contributions}};
  } else {
    j["diagnosis"] = nullptr;
  }
  return j;
}

inline detect::AnomalyEvent event_from_json(const json& j, const ingest::Schema& schema) {
  detect::AnomalyEvent event;
  const auto ts = parse_iso8601(j.at("timestamp").get<std::string>());
  if (!ts) throw DataError("unparseable event timestamp");
  event.timestamp = *ts;
  event.channel = j.at("channel").get<std::string>();
  event.kind = detect::anomaly_kind_from_string(j.at("kind").get<std::string>());
  event.residual_sq = j.at("residual_sq").get<double>();
  event.threshold = j.at("threshold").get<double>();
  if (!j.at("coincidence_probability").is_null())
    event.coincidence_probability = j.at("coincidence_probability").get<double>();
  if (!j.at("diagnosis").is_null()) {
    const auto& dj = j.at("diagnosis");
    diagnose::DiagnosisReport report;
    report.case_id = dj.at("case").get<int>();
    report.responsible_channels = dj.at("responsible").get<std::vector<std::string>>();
    report.narrative = dj.at("narrative").get<std::string>();
    report.attribution.base_value = dj.at("base_value").get<double>();
    report.attribution.contributions.assign(schema.size(), 0.0);
    for (const auto& [key, value] : dj.at("contributions").items()) {
      report.attribution.contributions[schema.index_of(key)] = value.get<double>();
    }
    event.diagnosis = std::move(report);
  }
  return event;
}

// Calibration artifact: residual thresholds plus the diagnosis context (the
// attribution bounds and the frozen background sample they were computed
// against).
struct ThresholdsArtifact {
  detect::ThresholdSet thresholds;
  diagnose::DiagnosisThresholds shap;
  std::vector<nn::Vec> background;

  json to_json() const {
    json channels = json::object();
    for (const auto& [channel, d] : thresholds.d) {
      channels[channel] = json{{"d", d}, {"d_er", thresholds.d_er.at(channel)}};
    }
    json d_s2 = json::object();
    for (const auto& [channel, row] : shap.d_s2) d_s2[channel] = row;
    return json{{"format", "windtwin-thresholds"},
                {"version", 1},
                {"safety_factor", thresholds.safety_factor},
                {"channels", channels},
                {"shap",
                 {{"dominance_fraction", shap.dominance_fraction},
                  {"factor", shap.shap_factor},
                  {"d_s2", d_s2},
                  {"background", background}}}};
  }

  static ThresholdsArtifact from_json(const json& j) {
    if (j.value("format", "") != "windtwin-thresholds" || j.value("version", -1) != 1)
      throw ConfigError("unsupported thresholds artifact");
    ThresholdsArtifact art;
    art.thresholds.safety_factor = j.at("safety_factor").get<double>();
    for (const auto& [channel, cj] : j.at("channels").items()) {
      art.thresholds.d[channel] = cj.at("d").get<double>();
      art.thresholds.d_er[channel] = cj.at("d_er").get<double>();
    }
    const auto& shap = j.at("shap");
    art.shap.dominance_fraction = shap.at("dominance_fraction").get<double>();
    art.shap.shap_factor = shap.at("factor").get<double>();
    for (const auto& [channel, row] : shap.at("d_s2").items()) {
      art.shap.d_s2[channel] = row.get<std::vector<double>>();
    }
    art.background = shap.at("background").get<std::vector<nn::Vec>>();
    return art;
  }
};

inline void save_thresholds(const ThresholdsArtifact& art, const std::filesystem::path& path) {
  write_text_file(path, art.to_json().dump(2) + "\n");
}

inline ThresholdsArtifact load_thresholds(const std::filesystem::path& path) {
  try {
    return ThresholdsArtifact::from_json(json::parse(read_text_file(path)));
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse thresholds " + path.string() + ": " + e.what());
  }
}

inline void write_mask_csv(const std::filesystem::path& path, const ingest::Series& series,
                           const ingest::OperatingMask& mask) {
  std::string out = "timestamp,label\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out += format_iso8601(series[i].timestamp);
    out += ',';
    out += ingest::to_string(mask.labels[i]);
    out += '\n';
  }
  write_text_file(path, out);
}

inline ingest::OperatingMask read_mask_csv(const std::filesystem::path& path,
                                           const ingest::Series& series) {
  const auto text = read_text_file(path);
  ingest::OperatingMask mask;
  std::size_t pos = text.find('\n');  // skip header
  if (pos == std::string::npos) throw DataError("empty mask file: " + path.string());
  ++pos;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    const std::string_view line(text.data() + pos, eol - pos);
    pos = eol + 1;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) throw DataError("bad mask line in " + path.string());
    const auto label = line.substr(comma + 1);
    ingest::MaskLabel parsed;
    if (label == "normal") parsed = ingest::MaskLabel::normal;
    else if (label == "fault") parsed = ingest::MaskLabel::fault;
    else if (label == "reheating") parsed = ingest::MaskLabel::reheating;
    else if (label == "causal-window") parsed = ingest::MaskLabel::causal_window;
    else if (label == "extended-reheating") parsed = ingest::MaskLabel::extended_reheating;
    else if (label == "excluded-missing") parsed = ingest::MaskLabel::excluded_missing;
    else throw DataError("unknown mask label: " + std::string(label));
    mask.labels.push_back(parsed);
  }
  if (mask.labels.size() != series.size())
    throw DataError("mask length does not match series: " + path.string());
  return mask;
}

}  // namespace windtwin::service
