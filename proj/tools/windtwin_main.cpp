// windtwin command line: synthetic data, ingest, NOM training, threshold
// calibration, batch replay, live follow, diagnosis and reporting.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "windtwin/windtwin.hpp"

namespace {

using namespace windtwin;

std::string error_type(const Error& e) {
  if (dynamic_cast<const UsageError*>(&e)) return "usage";
  if (dynamic_cast<const SchemaError*>(&e)) return "schema";
  if (dynamic_cast<const DataError*>(&e)) return "data";
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const InsufficientDataError*>(&e)) return "insufficient-data";
  if (dynamic_cast<const DegenerateChannelError*>(&e)) return "degenerate-channel";
  if (dynamic_cast<const TrainingError*>(&e)) return "training";
  if (dynamic_cast<const CalibrationError*>(&e)) return "calibration";
  if (dynamic_cast<const StreamError*>(&e)) return "stream";
  if (dynamic_cast<const ModelFormatError*>(&e)) return "model-format";
  if (dynamic_cast<const ProbabilityError*>(&e)) return "probability";
  if (dynamic_cast<const ScenarioError*>(&e)) return "scenario";
  if (dynamic_cast<const DeliveryError*>(&e)) return "delivery";
  return "error";
}

void print_error(const std::string& type, const std::string& message) {
  nlohmann::json j{{"error", {{"type", type}, {"message", message}}}};
  std::cerr << j.dump() << '\n';
}

std::vector<service::SinkConfig> load_sinks(const std::string& path) {
  if (path.empty()) return {};
  return service::sinks_from_json(nlohmann::json::parse(read_text_file(path)));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"windtwin: normal-operation modeling and anomaly diagnosis for turbine SCADA data"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic SCADA scenario");
  std::string sim_scenario, sim_out;
  std::optional<std::uint64_t> sim_seed;
  simulate->add_option("--scenario", sim_scenario,
                       "Library scenario name or scenario JSON file")->required();
  simulate->add_option("--out", sim_out, "Output directory")->required();
  simulate->add_option("--seed", sim_seed, "Override the scenario seed");

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "Parse, average, mask and split a SCADA CSV");
  std::string ing_data, ing_config, ing_out;
  ingest_cmd->add_option("--data", ing_data, "Raw SCADA CSV")->required();
  ingest_cmd->add_option("--config", ing_config, "Ingest config JSON")->required();
  ingest_cmd->add_option("--out", ing_out, "Output directory")->required();

  // train
  auto* train = app.add_subcommand("train", "Train normal-operation models");
  std::string tr_ingest, tr_out, tr_kind = "dense";
  int tr_restarts = 3, tr_epochs = 5;
  std::uint64_t tr_seed = 1;
  double tr_lr = 0.01;
  std::size_t tr_batch = 32;
  int tr_window = 30;
  std::vector<std::string> tr_channels;
  train->add_option("--ingest", tr_ingest, "Ingest artifact directory")->required();
  train->add_option("--out", tr_out, "Model output directory")->required();
  train->add_option("--kind", tr_kind, "dense or lstm")->check(CLI::IsMember({"dense", "lstm"}));
  train->add_option("--restarts", tr_restarts, "Seeded restarts per channel");
  train->add_option("--seed", tr_seed, "Base seed; restart k uses seed+k");
  train->add_option("--epochs", tr_epochs, "Training epochs");
  train->add_option("--learning-rate", tr_lr, "Adam learning rate");
  train->add_option("--batch-size", tr_batch, "Minibatch size");
  train->add_option("--lstm-window", tr_window, "LSTM window length in minutes");
  train->add_option("--channel", tr_channels, "Restrict to specific channels (repeatable)");

  // calibrate
  auto* calibrate = app.add_subcommand("calibrate", "Calibrate residual and attribution thresholds");
  std::string cal_ingest, cal_models, cal_out;
  double cal_safety = 1.2;
  std::size_t cal_shap_samples = 1000, cal_background = 100;
  calibrate->add_option("--ingest", cal_ingest, "Ingest artifact directory")->required();
  calibrate->add_option("--models", cal_models, "Model directory")->required();
  calibrate->add_option("--out", cal_out, "Thresholds JSON output path")->required();
  calibrate->add_option("--safety-factor", cal_safety, "Margin on the residual maximum");
  calibrate->add_option("--shap-samples", cal_shap_samples, "Training samples per attribution row");
  calibrate->add_option("--background", cal_background, "Background sample count");

  // replay
  auto* replay = app.add_subcommand("replay", "Batch anomaly detection over an ingested series");
  std::string rp_ingest, rp_models, rp_thresholds, rp_out, rp_sinks;
  replay->add_option("--ingest", rp_ingest, "Ingest artifact directory")->required();
  replay->add_option("--models", rp_models, "Model directory")->required();
  replay->add_option("--thresholds", rp_thresholds, "Thresholds JSON")->required();
  replay->add_option("--out", rp_out, "Output directory")->required();
  replay->add_option("--sinks", rp_sinks, "Alert sinks config JSON (optional)");

  // follow
  auto* follow = app.add_subcommand("follow", "Tail a growing CSV and alert in real time");
  std::string fo_watch, fo_config, fo_models, fo_thresholds, fo_cursor, fo_events, fo_sinks;
  int fo_poll = 1000;
  bool fo_once = false;
  follow->add_option("--watch", fo_watch, "Append-only CSV in the ingest format")->required();
  follow->add_option("--config", fo_config, "Ingest config JSON")->required();
  follow->add_option("--models", fo_models, "Model directory")->required();
  follow->add_option("--thresholds", fo_thresholds, "Thresholds JSON")->required();
  follow->add_option("--cursor", fo_cursor, "Cursor file for crash-safe resume")->required();
  follow->add_option("--events", fo_events, "Event log to append to")->required();
  follow->add_option("--sinks", fo_sinks, "Alert sinks config JSON (optional)");
  follow->add_option("--poll-ms", fo_poll, "Poll interval");
  follow->add_flag("--once", fo_once, "Drain available rows, then exit");

  // diagnose
  auto* diagnose_cmd = app.add_subcommand("diagnose", "Dump per-feature attribution tables");
  std::string dg_ingest, dg_models, dg_thresholds, dg_out, dg_channel, dg_at;
  std::size_t dg_samples = 200;
  diagnose_cmd->add_option("--ingest", dg_ingest, "Ingest artifact directory")->required();
  diagnose_cmd->add_option("--models", dg_models, "Model directory")->required();
  diagnose_cmd->add_option("--thresholds", dg_thresholds, "Thresholds JSON")->required();
  diagnose_cmd->add_option("--out", dg_out, "Output directory")->required();
  diagnose_cmd->add_option("--channel", dg_channel, "Model target channel")->required();
  diagnose_cmd->add_option("--at", dg_at, "Attribution at this ISO 8601 timestamp");
  diagnose_cmd->add_option("--samples", dg_samples, "Training table sample count");

  // report
  auto* report = app.add_subcommand("report", "Human-readable summary of a replay");
  std::string rep_dir;
  report->add_option("--replay", rep_dir, "Replay output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*simulate) {
      const auto result = service::run_simulate(sim_scenario, sim_out, sim_seed);
      std::cout << "scenario " << result.spec.name << " (seed " << result.spec.seed << ", "
                << result.spec.duration_days << " d) -> " << result.csv.string() << '\n';
    } else if (*ingest_cmd) {
      const auto result = service::run_ingest(ing_data, ing_config, ing_out);
      std::cout << "ingested " << result.frames << " minute frames; " << result.train_usable
                << " usable training samples, " << result.test_frames << " test frames\n";
    } else if (*train) {
      service::TrainOptions options;
      options.kind = nom::model_kind_from_string(tr_kind);
      options.config.restarts = tr_restarts;
      options.config.base_seed = tr_seed;
      options.config.epochs = tr_epochs;
      options.config.learning_rate = tr_lr;
      options.config.batch_size = tr_batch;
      options.config.lstm_window = tr_window;
      options.channels = tr_channels;
      const auto result = service::run_train(tr_ingest, tr_out, options);
      for (const auto& [channel, fp] : result.fingerprints) {
        std::cout << channel << ": seed " << fp.seed << ", holdout MAE "
                  << format_double(fp.holdout_mae) << '\n';
      }
    } else if (*calibrate) {
      service::CalibrateOptions options;
      options.safety_factor = cal_safety;
      options.shap_sample_count = cal_shap_samples;
      options.background_count = cal_background;
      const auto artifact = service::run_calibrate(cal_ingest, cal_models, cal_out, options);
      for (const auto& [channel, d] : artifact.thresholds.d) {
        std::cout << channel << ": d = " << format_double(d)
                  << ", d_er = " << format_double(artifact.thresholds.d_er.at(channel)) << '\n';
      }
    } else if (*replay) {
      const auto outcome =
          service::run_replay(rp_ingest, rp_models, rp_thresholds, rp_out, load_sinks(rp_sinks));
      std::cout << outcome.result.events.size() << " events, " << outcome.alerts.size()
                << " alerts -> " << rp_out << '\n';
    } else if (*follow) {
      service::FollowOptions options;
      options.poll_ms = fo_poll;
      options.once = fo_once;
      options.sinks = load_sinks(fo_sinks);
      const auto stats = service::run_follow(fo_watch, fo_config, fo_models, fo_thresholds,
                                             fo_cursor, fo_events, options);
      std::cout << "processed " << stats.frames << " frames, " << stats.events << " events, "
                << stats.alerts << " alerts\n";
    } else if (*diagnose_cmd) {
      service::DiagnoseOptions options;
      options.channel = dg_channel;
      options.table_samples = dg_samples;
      if (!dg_at.empty()) {
        const auto ts = parse_iso8601(dg_at);
        if (!ts) throw UsageError("unparseable --at timestamp: " + dg_at);
        options.at = *ts;
      }
      const auto result =
          service::run_diagnose(dg_ingest, dg_models, dg_thresholds, dg_out, options);
      std::cout << result.dump(2) << '\n';
    } else if (*report) {
      std::cout << service::run_report(rep_dir);
    }
  } catch (const UsageError& e) {
    print_error("usage", e.what());
    return 2;
  } catch (const Error& e) {
    print_error(error_type(e), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
  return 0;
}
