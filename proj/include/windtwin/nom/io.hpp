#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "windtwin/fileio.hpp"
#include "windtwin/nom/model.hpp"

namespace windtwin::nom {

inline constexpr int kModelFormatVersion = 1;
inline constexpr const char* kModelFormatName = "windtwin-nom";

namespace io_detail {

using nlohmann::json;

inline json matrix_to_json(const nn::Matrix& m) {
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

inline nn::Matrix matrix_from_json(const json& j) {
  nn::Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != m.rows() * m.cols()) throw ModelFormatError("matrix size mismatch");
  m.data() = std::move(data);
  return m;
}

inline json dense_to_json(const nn::DenseNet& net) {
  json layers = json::array();
  for (const auto& layer : net.layers) {
    layers.push_back(json{{"weights", matrix_to_json(layer.weights)},
                          {"bias", layer.bias},
                          {"activation", std::string(to_string(layer.activation))}});
  }
  return json{{"layers", layers}};
}

inline nn::DenseNet dense_from_json(const json& j) {
  nn::DenseNet net;
  for (const auto& lj : j.at("layers")) {
    nn::DenseLayer layer;
    layer.weights = matrix_from_json(lj.at("weights"));
    layer.bias = lj.at("bias").get<nn::Vec>();
    layer.activation = nn::activation_from_string(lj.at("activation").get<std::string>());
    net.layers.push_back(std::move(layer));
  }
  return net;
}

inline json lstm_to_json(const nn::LstmNet& net) {
  const auto& c = net.cell;
  return json{{"cell",
               json{{"w_forget", matrix_to_json(c.w_forget)},
                    {"w_input", matrix_to_json(c.w_input)},
                    {"w_output", matrix_to_json(c.w_output)},
                    {"w_cell", matrix_to_json(c.w_cell)},
                    {"u_forget", matrix_to_json(c.u_forget)},
                    {"u_input", matrix_to_json(c.u_input)},
                    {"u_output", matrix_to_json(c.u_output)},
                    {"u_cell", matrix_to_json(c.u_cell)},
                    {"b_forget", c.b_forget},
                    {"b_input", c.b_input},
                    {"b_output", c.b_output},
                    {"b_cell", c.b_cell}}},
              {"head", dense_to_json(net.head)}};
}

inline nn::LstmNet lstm_from_json(const json& j) {
  nn::LstmNet net;
  const auto& cj = j.at("cell");
  net.cell.w_forget = matrix_from_json(cj.at("w_forget"));
  net.cell.w_input = matrix_from_json(cj.at("w_input"));
  net.cell.w_output = matrix_from_json(cj.at("w_output"));
  net.cell.w_cell = matrix_from_json(cj.at("w_cell"));
  net.cell.u_forget = matrix_from_json(cj.at("u_forget"));
  net.cell.u_input = matrix_from_json(cj.at("u_input"));
  net.cell.u_output = matrix_from_json(cj.at("u_output"));
  net.cell.u_cell = matrix_from_json(cj.at("u_cell"));
  net.cell.b_forget = cj.at("b_forget").get<nn::Vec>();
  net.cell.b_input = cj.at("b_input").get<nn::Vec>();
  net.cell.b_output = cj.at("b_output").get<nn::Vec>();
  net.cell.b_cell = cj.at("b_cell").get<nn::Vec>();
  net.head = dense_from_json(j.at("head"));
  return net;
}

inline json model_to_json(const NomModel& model) {
  json j{{"kind", std::string(to_string(model.kind))},
         {"target_channel", model.target_channel},
         {"input_channels", model.input_channels},
         {"window_minutes", model.window_minutes},
         {"normalization", json{{"lo", model.normalization.lo}, {"hi", model.normalization.hi}}},
         {"fingerprint",
          json{{"seed", model.fingerprint.seed},
               {"epochs", model.fingerprint.epochs},
               {"final_training_mae", model.fingerprint.final_training_mae},
               {"holdout_mae", model.fingerprint.holdout_mae}}}};
  if (model.kind == ModelKind::dense) {
    j["network"] = dense_to_json(model.dense);
  } else {
    j["network"] = lstm_to_json(model.lstm);
  }
  return j;
}

inline NomModel model_from_json(const json& j) {
  NomModel model;
  model.kind = model_kind_from_string(j.at("kind").get<std::string>());
  model.target_channel = j.at("target_channel").get<std::string>();
  model.input_channels = j.at("input_channels").get<std::vector<std::string>>();
  model.window_minutes = j.at("window_minutes").get<int>();
  model.normalization.lo = j.at("normalization").at("lo").get<std::vector<double>>();
  model.normalization.hi = j.at("normalization").at("hi").get<std::vector<double>>();
  const auto& fp = j.at("fingerprint");
  model.fingerprint.seed = fp.at("seed").get<std::uint64_t>();
  model.fingerprint.epochs = fp.at("epochs").get<int>();
  model.fingerprint.final_training_mae = fp.at("final_training_mae").get<double>();
  model.fingerprint.holdout_mae = fp.at("holdout_mae").get<double>();
  if (model.kind == ModelKind::dense) {
    model.dense = dense_from_json(j.at("network"));
  } else {
    model.lstm = lstm_from_json(j.at("network"));
  }
  bool found = false;
  for (std::size_t i = 0; i < model.input_channels.size(); ++i) {
    if (model.input_channels[i] == model.target_channel) {
      model.target_index = i;
      found = true;
    }
  }
  if (!found) throw ModelFormatError("target channel missing from input channel list");
  return model;
}

}  // namespace io_detail

// Versioned self-describing model file: JSON with an FNV-1a checksum over the
// canonical serialization of the payload. Doubles are written in shortest
// round-trip form, so a load-save cycle is bit-identical.
inline void save_model(const NomModel& model, const std::filesystem::path& path) {
  using nlohmann::json;
  const json payload = io_detail::model_to_json(model);
  json file{{"format", kModelFormatName},
            {"version", kModelFormatVersion},
            {"checksum", fnv1a64_hex(payload.dump())},
            {"model", payload}};
  write_text_file(path, file.dump(2) + "\n");
}

inline NomModel load_model(const std::filesystem::path& path) {
  using nlohmann::json;
  json file;
  try {
    file = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ModelFormatError("cannot parse model file " + path.string() + ": " + e.what());
  }
  if (!file.is_object() || file.value("format", "") != kModelFormatName)
    throw ModelFormatError("not a model file: " + path.string());
  const int version = file.value("version", -1);
  if (version != kModelFormatVersion)
    throw ModelFormatError("unsupported model format version " + std::to_string(version) +
                           " in " + path.string());
  const auto& payload = file.at("model");
  if (fnv1a64_hex(payload.dump()) != file.value("checksum", ""))
    throw ModelFormatError("checksum failure in " + path.string());
  return io_detail::model_from_json(payload);
}

}  // namespace windtwin::nom
