#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "windtwin/detect/detector.hpp"
#include "windtwin/diagnose/diagnosis.hpp"
#include "windtwin/ingest/frame.hpp"
#include "windtwin/ingest/pipeline.hpp"
#include "windtwin/nom/io.hpp"
#include "windtwin/nom/train.hpp"
#include "windtwin/service/alerts.hpp"
#include "windtwin/service/artifacts.hpp"
#include "windtwin/service/plots.hpp"
#include "windtwin/synth/generate.hpp"
#include "windtwin/synth/library.hpp"

namespace windtwin::service {

namespace fs = std::filesystem;

inline void require_file(const fs::path& path, const std::string& hint) {
  if (!fs::exists(path))
    throw UsageError("missing input artifact: " + path.string() + " (" + hint + ")");
}

inline IngestConfig default_ingest_config(const ingest::Schema& schema) {
  IngestConfig cfg;
  cfg.schema = schema;
  cfg.status_map.operating = {0};
  cfg.status_map.unlisted_is_down = true;
  return cfg;
}

// ---- simulate --------------------------------------------------------------

struct SimulateResult {
  fs::path csv;
  fs::path ground_truth;
  synth::ScenarioSpec spec;
};

inline synth::ScenarioSpec resolve_scenario(const std::string& name_or_path,
                                            std::optional<std::uint64_t> seed_override) {
  synth::ScenarioSpec spec;
  const auto lib = synth::scenario_library();
  if (const auto it = lib.find(name_or_path); it != lib.end()) {
    spec = it->second;
  } else if (fs::exists(name_or_path)) {
    spec = synth::scenario_json::from_json(nlohmann::json::parse(read_text_file(name_or_path)));
  } else {
    std::string names;
    for (const auto& [n, _] : lib) {
      if (!names.empty()) names += ", ";
      names += n;
    }
    throw UsageError("unknown scenario '" + name_or_path + "' (library: " + names +
                     "; or pass a scenario JSON file)");
  }
  if (seed_override) spec.seed = *seed_override;
  return spec;
}

inline SimulateResult run_simulate(const std::string& scenario, const fs::path& out_dir,
                                   std::optional<std::uint64_t> seed_override = std::nullopt) {
  const auto spec = resolve_scenario(scenario, seed_override);
  const auto data = synth::generate(spec);
  fs::create_directories(out_dir);

  SimulateResult result;
  result.spec = spec;
  result.csv = out_dir / kScadaCsv;
  result.ground_truth = out_dir / kGroundTruthJson;
  ingest::write_csv(result.csv, data.frames, spec.schema());
  write_text_file(result.ground_truth, data.truth.to_json().dump(2) + "\n");
  write_text_file(out_dir / kScenarioJson, synth::scenario_json::to_json(spec).dump(2) + "\n");
  write_text_file(out_dir / kIngestConfigJson,
                  default_ingest_config(spec.schema()).to_json().dump(2) + "\n");
  return result;
}

// ---- ingest ----------------------------------------------------------------

struct IngestResult {
  std::size_t frames = 0;
  std::size_t train_usable = 0;
  std::size_t test_frames = 0;
};

inline IngestResult run_ingest(const fs::path& csv_path, const fs::path& config_path,
                               const fs::path& out_dir) {
  require_file(csv_path, "raw SCADA CSV; run `simulate` or point --data at your export");
  require_file(config_path, "ingest config JSON");
  const auto config = load_ingest_config(config_path);

  const auto raw = ingest::parse_csv(csv_path, config.schema);
  const auto frames = ingest::average_to_minutes(raw);
  const auto mask = ingest::build_mask(frames, config.status_map, config.downtime_field,
                                       config.reheat_minutes);
  const auto split = ingest::split_train_test(frames, mask, config.train_fraction,
                                              config.min_train_samples);
  const auto normalization = ingest::fit_normalization(split.train.frames, config.schema);

  fs::create_directories(out_dir);
  ingest::write_csv(out_dir / kFramesCsv, frames, config.schema);
  write_mask_csv(out_dir / kMaskCsv, frames, mask);
  ingest::write_csv(out_dir / kTrainCsv, split.train.frames, config.schema);
  ingest::write_csv(out_dir / kTestCsv, split.test.frames, config.schema);

  nlohmann::json manifest{{"format", "windtwin-ingest"},
                          {"version", 1},
                          {"config", config.to_json()},
                          {"normalization",
                           {{"lo", normalization.lo}, {"hi", normalization.hi}}},
                          {"counts",
                           {{"frames", frames.size()},
                            {"train_usable", split.train.frames.size()},
                            {"test", split.test.frames.size()}}}};
  write_text_file(out_dir / kManifestJson, manifest.dump(2) + "\n");

  return {frames.size(), split.train.frames.size(), split.test.frames.size()};
}

struct IngestArtifacts {
  IngestConfig config;
  ingest::NormalizationParams normalization;
  ingest::Series frames;
  ingest::OperatingMask mask;
  ingest::Partition train;
};

inline IngestArtifacts load_ingest_dir(const fs::path& dir, bool with_frames = true) {
  require_file(dir / kManifestJson, "run `ingest` first");
  const auto manifest = nlohmann::json::parse(read_text_file(dir / kManifestJson));
  IngestArtifacts art;
  art.config = IngestConfig::from_json(manifest.at("config"));
  art.normalization.lo = manifest.at("normalization").at("lo").get<std::vector<double>>();
  art.normalization.hi = manifest.at("normalization").at("hi").get<std::vector<double>>();
  art.train.frames = ingest::parse_csv(dir / kTrainCsv, art.config.schema);
  art.train.mask.labels.assign(art.train.frames.size(), ingest::MaskLabel::normal);
  if (with_frames) {
    art.frames = ingest::parse_csv(dir / kFramesCsv, art.config.schema);
    art.mask = read_mask_csv(dir / kMaskCsv, art.frames);
  }
  return art;
}

// ---- train -----------------------------------------------------------------

struct TrainOptions {
  nom::ModelKind kind = nom::ModelKind::dense;
  nom::TrainingConfig config;
  std::vector<std::string> channels;  // default: every endogenous channel
};

struct TrainResult {
  std::vector<fs::path> model_files;
  std::map<std::string, nom::TrainingFingerprint> fingerprints;
};

inline TrainResult run_train(const fs::path& ingest_dir, const fs::path& out_dir,
                             TrainOptions options = {}) {
  auto art = load_ingest_dir(ingest_dir, /*with_frames=*/false);
  auto channels = options.channels;
  if (channels.empty()) channels = art.config.schema.endogenous_ids();

  auto cfg = options.config;
  cfg.normalization = art.normalization;

  fs::create_directories(out_dir);
  TrainResult result;
  nlohmann::json summary = nlohmann::json::object();
  for (const auto& channel : channels) {
    const auto model = options.kind == nom::ModelKind::dense
                           ? nom::train_dense_nom(art.train, channel, art.config.schema, cfg)
                           : nom::train_lstm_nom(art.train, channel, art.config.schema, cfg);
    const auto file = out_dir / (std::string(nom::to_string(options.kind)) + "_" + channel + ".json");
    nom::save_model(model, file);
    result.model_files.push_back(file);
    result.fingerprints[channel] = model.fingerprint;
    summary[channel] = {{"seed", model.fingerprint.seed},
                        {"epochs", model.fingerprint.epochs},
                        {"final_training_mae", model.fingerprint.final_training_mae},
                        {"holdout_mae", model.fingerprint.holdout_mae},
                        {"file", file.filename().string()}};
  }
  write_text_file(out_dir / "training_summary.json", summary.dump(2) + "\n");
  return result;
}

inline std::vector<nom::NomModel> load_models(const fs::path& models_dir) {
  if (!fs::is_directory(models_dir))
    throw UsageError("missing models directory: " + models_dir.string() + " (run `train` first)");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(models_dir)) {
    if (entry.path().extension() == ".json" &&
        entry.path().filename().string().rfind("training_summary", 0) != 0) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw UsageError("no model files in " + models_dir.string() + " (run `train` first)");
  std::vector<nom::NomModel> models;
  models.reserve(files.size());
  for (const auto& f : files) models.push_back(nom::load_model(f));
  return models;
}

// ---- calibrate -------------------------------------------------------------

struct CalibrateOptions {
  double safety_factor = 1.2;
  double shap_factor = 1.2;
  double dominance_fraction = 0.7;
  std::size_t background_count = 100;
  std::uint64_t background_seed = 424242;
  std::size_t shap_sample_count = 1000;
  std::uint64_t shap_sample_seed = 9001;
};

inline ThresholdsArtifact run_calibrate(const fs::path& ingest_dir, const fs::path& models_dir,
                                        const fs::path& out_path, CalibrateOptions options = {}) {
  auto art = load_ingest_dir(ingest_dir, /*with_frames=*/false);
  auto models = load_models(models_dir);

  ThresholdsArtifact artifact;
  artifact.thresholds = detect::calibrate_thresholds(models, art.train, options.safety_factor);
  artifact.shap.dominance_fraction = options.dominance_fraction;
  artifact.shap.shap_factor = options.shap_factor;

  const bool any_dense = std::any_of(models.begin(), models.end(), [](const auto& m) {
    return m.kind == nom::ModelKind::dense;
  });
  if (any_dense) {
    artifact.background = diagnose::sample_background(art.train, art.normalization,
                                                      options.background_count,
                                                      options.background_seed);
    for (const auto& model : models) {
      if (model.kind != nom::ModelKind::dense) continue;
      artifact.shap.d_s2[model.target_channel] = diagnose::calibrate_shap_thresholds(
          model, art.train, artifact.background, options.shap_factor, options.shap_sample_count,
          options.shap_sample_seed);
    }
  }
  save_thresholds(artifact, out_path);
  return artifact;
}

// ---- replay ----------------------------------------------------------------

// Diagnoser used by both replay and follow: exact Shapley attribution at the
// trigger frame, classified against the calibrated bounds. Dense models only.
inline detect::Detector::Diagnoser make_diagnoser(const std::vector<nom::NomModel>& models,
                                                  const ThresholdsArtifact& artifact) {
  // Copy what the closure needs; the caller's vectors may move.
  auto models_copy = std::make_shared<std::vector<nom::NomModel>>(models);
  auto art_copy = std::make_shared<ThresholdsArtifact>(artifact);
  return [models_copy, art_copy](const detect::AnomalyEvent& event,
                                 const ingest::ScadaFrame& frame)
             -> std::optional<diagnose::DiagnosisReport> {
    for (const auto& model : *models_copy) {
      if (model.target_channel != event.channel || model.kind != nom::ModelKind::dense) continue;
      const auto x = model.normalized_input(frame);
      if (!x || art_copy->background.empty()) return std::nullopt;
      const auto attribution = diagnose::shapley_exact(model, *x, art_copy->background);
      return diagnose::diagnose(event, model, attribution, art_copy->shap);
    }
    return std::nullopt;
  };
}

struct ReplayOutcome {
  detect::ReplayResult result;
  std::vector<AlertPayload> alerts;
  std::vector<DeliveryReport> deliveries;
};

inline nlohmann::json summary_to_json(const detect::ReplayResult& result,
                                      const std::vector<nom::NomModel>& models,
                                      const detect::ThresholdSet& thresholds,
                                      std::size_t frame_count) {
  nlohmann::json by_kind = nlohmann::json::object();
  for (const auto& event : result.events) {
    const auto key = std::string(detect::to_string(event.kind));
    by_kind[key] = by_kind.value(key, 0) + 1;
  }
  nlohmann::json episodes = nlohmann::json::array();
  for (const auto& a : result.annotations) {
    const auto& event = result.events[a.event_index];
    nlohmann::json ej{{"timestamp", format_iso8601(event.timestamp)},
                      {"channel", event.channel},
                      {"residual_sq", event.residual_sq}};
    ej["lead_seconds"] = a.lead_seconds ? nlohmann::json(*a.lead_seconds) : nullptr;
    ej["fault_duration_seconds"] =
        a.fault_duration_seconds ? nlohmann::json(*a.fault_duration_seconds) : nullptr;
    ej["coincidence_probability"] =
        a.coincidence_probability ? nlohmann::json(*a.coincidence_probability) : nullptr;
    if (event.diagnosis) {
      ej["case"] = event.diagnosis->case_id;
      ej["responsible"] = event.diagnosis->responsible_channels;
    }
    episodes.push_back(std::move(ej));
  }
  nlohmann::json faults = nlohmann::json::array();
  for (const auto& f : result.faults.faults) {
    faults.push_back({{"start", format_iso8601(f.start)},
                      {"duration_seconds", f.duration()}});
  }
  nlohmann::json first_trigger = nlohmann::json::object();
  for (const auto& [channel, ts] : result.first_trigger) first_trigger[channel] = format_iso8601(ts);

  nlohmann::json channels = nlohmann::json::object();
  for (std::size_t m = 0; m < models.size(); ++m) {
    double max_r = 0.0;
    std::size_t evaluable = 0;
    for (const auto& row : result.residuals) {
      if (row[m]) {
        ++evaluable;
        max_r = std::max(max_r, *row[m]);
      }
    }
    const auto& channel = models[m].target_channel;
    channels[channel] = {{"kind", std::string(nom::to_string(models[m].kind))},
                         {"d", thresholds.d_for(channel)},
                         {"d_er", thresholds.d_er_for(channel)},
                         {"max_residual_sq", max_r},
                         {"evaluable_timesteps", evaluable}};
  }
  return nlohmann::json{{"format", "windtwin-summary"}, {"version", 1},
                        {"frames", frame_count},      {"by_kind", by_kind},
                        {"episodes", episodes},       {"faults", faults},
                        {"first_trigger", first_trigger}, {"channels", channels}};
}

inline ReplayOutcome run_replay(const fs::path& ingest_dir, const fs::path& models_dir,
                                const fs::path& thresholds_path, const fs::path& out_dir,
                                const std::vector<SinkConfig>& sinks = {},
                                std::ostream* sink_stdout = &std::cout) {
  auto art = load_ingest_dir(ingest_dir);
  auto models = load_models(models_dir);
  require_file(thresholds_path, "run `calibrate` first");
  const auto thresholds_artifact = load_thresholds(thresholds_path);

  const auto diagnoser = make_diagnoser(models, thresholds_artifact);
  ReplayOutcome outcome;
  outcome.result = detect::replay(art.frames, art.mask, art.config.schema, models,
                                  thresholds_artifact.thresholds, art.config.detector_config(),
                                  diagnoser);
  const auto& result = outcome.result;

  fs::create_directories(out_dir);
  std::string event_log;
  for (const auto& event : result.events) {
    event_log += event_to_json(event, art.config.schema).dump();
    event_log += '\n';
  }
  write_text_file(out_dir / kEventsJsonl, event_log);
  write_text_file(out_dir / kSummaryJson,
                  summary_to_json(result, models, thresholds_artifact.thresholds,
                                  art.frames.size())
                          .dump(2) +
                      "\n");

  // Residual traces: CSV plus an SVG rendering per channel.
  std::vector<Timestamp> times;
  times.reserve(art.frames.size());
  for (const auto& frame : art.frames) times.push_back(frame.timestamp);
  fs::create_directories(out_dir / "residuals");
  fs::create_directories(out_dir / "plots");
  for (std::size_t m = 0; m < models.size(); ++m) {
    const auto& channel = models[m].target_channel;
    std::string csv = "timestamp,residual_sq\n";
    std::vector<std::optional<double>> trace(art.frames.size());
    for (std::size_t i = 0; i < art.frames.size(); ++i) {
      trace[i] = result.residuals[i][m];
      csv += format_iso8601(times[i]);
      csv += ',';
      if (trace[i]) csv += format_double(*trace[i]);
      csv += '\n';
    }
    write_text_file(out_dir / "residuals" / (channel + ".csv"), csv);
    write_residual_plot(out_dir / "plots" / (channel + "_residual.svg"),
                        channel + " squared residual (" +
                            std::string(nom::to_string(models[m].kind)) + " NOM)",
                        times, trace, thresholds_artifact.thresholds.d_for(channel),
                        thresholds_artifact.thresholds.d_er_for(channel));
  }

  // Alerts: one per measurement/sensor event, in order. The event log above is
  // already persisted at this point.
  if (!sinks.empty()) {
    AlertDispatcher dispatcher(sinks, sink_stdout);
    for (const auto& event : result.events) {
      if (event.kind == detect::AnomalyKind::suppressed_extended_reheating) continue;
      auto payload = make_alert(event, art.config.schema, art.config.farm, art.config.turbine);
      outcome.deliveries.push_back(dispatcher.dispatch(payload));
      outcome.alerts.push_back(std::move(payload));
    }
  }
  return outcome;
}

// ---- diagnose --------------------------------------------------------------

struct DiagnoseOptions {
  std::string channel;
  std::optional<Timestamp> at;    // attribution at one timestep
  std::size_t table_samples = 200;  // training attribution table size
  std::uint64_t sample_seed = 31337;
};

inline nlohmann::json run_diagnose(const fs::path& ingest_dir, const fs::path& models_dir,
                                   const fs::path& thresholds_path, const fs::path& out_dir,
                                   const DiagnoseOptions& options) {
  auto art = load_ingest_dir(ingest_dir);
  auto models = load_models(models_dir);
  require_file(thresholds_path, "run `calibrate` first");
  const auto artifact = load_thresholds(thresholds_path);

  const nom::NomModel* model = nullptr;
  for (const auto& m : models) {
    if (m.target_channel == options.channel && m.kind == nom::ModelKind::dense) model = &m;
  }
  if (!model)
    throw UsageError("no dense model for channel " + options.channel + " in " +
                     models_dir.string());

  fs::create_directories(out_dir);
  std::vector<std::string> feature_names;
  for (const auto& ch : art.config.schema.channels()) feature_names.push_back(ch.id);

  // Training attribution table (the normal-operation picture).
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < art.train.frames.size(); ++i) {
    if (ingest::normalized_input(art.train.frames[i], model->normalization)) candidates.push_back(i);
  }
  if (candidates.empty()) throw CalibrationError("no evaluable training frames to diagnose");
  Rng rng(options.sample_seed);
  rng.shuffle(candidates);
  if (candidates.size() > options.table_samples) candidates.resize(options.table_samples);
  std::sort(candidates.begin(), candidates.end());

  std::string table_csv = "timestamp";
  for (const auto& name : feature_names) table_csv += "," + name;
  table_csv += "\n";
  std::vector<std::vector<double>> rows;
  for (const auto i : candidates) {
    const auto x = *ingest::normalized_input(art.train.frames[i], model->normalization);
    const auto attribution = diagnose::shapley_exact(*model, x, artifact.background);
    table_csv += format_iso8601(art.train.frames[i].timestamp);
    for (const auto v : attribution.contributions) table_csv += "," + format_double(v);
    table_csv += "\n";
    rows.push_back(attribution.contributions);
  }
  write_text_file(out_dir / ("train_attributions_" + options.channel + ".csv"), table_csv);
  write_attribution_scatter(out_dir / ("train_attributions_" + options.channel + ".svg"),
                            options.channel + " NOM attributions over training samples",
                            feature_names, rows);

  nlohmann::json report{{"channel", options.channel},
                        {"table_samples", candidates.size()}};

  if (options.at) {
    const auto target = *options.at;
    const ingest::ScadaFrame* frame = nullptr;
    for (const auto& f : art.frames) {
      if (f.timestamp == target) frame = &f;
    }
    if (!frame)
      throw UsageError("no frame at " + format_iso8601(target) + " in " + ingest_dir.string());
    const auto x = ingest::normalized_input(*frame, model->normalization);
    if (!x) throw DataError("frame at " + format_iso8601(target) + " has missing values");
    const auto attribution = diagnose::shapley_exact(*model, *x, artifact.background);
    detect::AnomalyEvent probe;
    probe.timestamp = target;
    probe.channel = options.channel;
    probe.kind = detect::AnomalyKind::measurement;
    const auto diagnosis = diagnose::diagnose(probe, *model, attribution, artifact.shap);

    std::string csv = "channel,contribution,d_s2\n";
    const auto& row = artifact.shap.row_for(options.channel);
    for (std::size_t j = 0; j < feature_names.size(); ++j) {
      csv += feature_names[j] + "," + format_double(attribution.contributions[j]) + "," +
             format_double(row[j]) + "\n";
    }
    const auto stamp = format_iso8601(target);
    write_text_file(out_dir / ("attribution_" + options.channel + "_" + stamp + ".csv"), csv);
    write_attribution_bars(out_dir / ("attribution_" + options.channel + "_" + stamp + ".svg"),
                           options.channel + " attribution at " + stamp, feature_names,
                           attribution.contributions);
    report["at"] = stamp;
    report["case"] = diagnosis.case_id;
    report["responsible"] = diagnosis.responsible_channels;
    report["narrative"] = diagnosis.narrative;
    report["base_value"] = attribution.base_value;
  }
  return report;
}

// ---- report ----------------------------------------------------------------

inline std::string run_report(const fs::path& replay_dir) {
  require_file(replay_dir / kSummaryJson, "run `replay` first");
  const auto summary = nlohmann::json::parse(read_text_file(replay_dir / kSummaryJson));

  std::string out;
  out += "windtwin replay report\n";
  out += "======================\n";
  out += "frames processed: " + std::to_string(summary.value("frames", 0)) + "\n\n";
  out += "events by kind:\n";
  for (const auto& [kind, count] : summary.at("by_kind").items()) {
    out += "  " + kind + ": " + std::to_string(count.get<int>()) + "\n";
  }
  if (summary.at("by_kind").empty()) out += "  (none)\n";
  out += "\nmeasurement episodes:\n";
  for (const auto& ej : summary.at("episodes")) {
    out += "  " + ej.at("timestamp").get<std::string>() + "  " +
           ej.at("channel").get<std::string>();
    if (!ej.at("lead_seconds").is_null()) {
      const double hours = ej.at("lead_seconds").get<double>() / 3600.0;
      out += "  lead to next fault: " + format_double(hours) + " h";
    }
    if (!ej.at("coincidence_probability").is_null()) {
      out += "  p = " + format_double(ej.at("coincidence_probability").get<double>());
    }
    if (ej.contains("case")) out += "  case " + std::to_string(ej.at("case").get<int>());
    out += "\n";
  }
  if (summary.at("episodes").empty()) out += "  (none)\n";
  out += "\nfirst trigger per channel:\n";
  for (const auto& [channel, ts] : summary.at("first_trigger").items()) {
    out += "  " + channel + ": " + ts.get<std::string>() + "\n";
  }
  if (summary.at("first_trigger").empty()) out += "  (none)\n";
  out += "\nfaults in the series:\n";
  for (const auto& fj : summary.at("faults")) {
    const double days = fj.at("duration_seconds").get<double>() / 86400.0;
    out += "  " + fj.at("start").get<std::string>() + "  " + format_double(days) + " d\n";
  }
  if (summary.at("faults").empty()) out += "  (none)\n";
  return out;
}

}  // namespace windtwin::service
