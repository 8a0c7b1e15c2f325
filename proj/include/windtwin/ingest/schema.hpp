#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "windtwin/errors.hpp"

namespace windtwin::ingest {

enum class ChannelRole { endogenous, exogenous };

inline std::string_view to_string(ChannelRole r) {
  return r == ChannelRole::endogenous ? "endogenous" : "exogenous";
}

inline ChannelRole channel_role_from_string(std::string_view s) {
  if (s == "endogenous") return ChannelRole::endogenous;
  if (s == "exogenous") return ChannelRole::exogenous;
  throw ConfigError("unknown channel role: " + std::string(s));
}

struct ChannelSpec {
  std::string id;
  ChannelRole role = ChannelRole::endogenous;
  std::string unit;           // "°C" or "RPM"
  std::string component_tag;  // e.g. "generator-rotor"
};

// Ordered list of channels; the order fixes the model input vector layout.
class Schema {
 public:
  Schema() = default;

  explicit Schema(std::vector<ChannelSpec> channels) : channels_(std::move(channels)) {
    std::set<std::string> seen;
    bool has_exo = false;
    for (const auto& ch : channels_) {
      if (!seen.insert(ch.id).second) throw SchemaError("duplicate channel id: " + ch.id);
      if (ch.role == ChannelRole::exogenous) has_exo = true;
    }
    if (!channels_.empty() && !has_exo)
      throw SchemaError("schema must contain at least one exogenous channel");
  }

  const std::vector<ChannelSpec>& channels() const { return channels_; }
  std::size_t size() const { return channels_.size(); }
  const ChannelSpec& at(std::size_t i) const { return channels_.at(i); }

  std::optional<std::size_t> find(std::string_view id) const {
    for (std::size_t i = 0; i < channels_.size(); ++i) {
      if (channels_[i].id == id) return i;
    }
    return std::nullopt;
  }

  std::size_t index_of(std::string_view id) const {
    if (auto i = find(id)) return *i;
    throw SchemaError("unknown channel id: " + std::string(id));
  }

  std::vector<std::string> endogenous_ids() const {
    std::vector<std::string> out;
    for (const auto& ch : channels_) {
      if (ch.role == ChannelRole::endogenous) out.push_back(ch.id);
    }
    return out;
  }

 private:
  std::vector<ChannelSpec> channels_;
};

// Which raw code column marks turbine downtime.
enum class DowntimeField { status_code, operational_code };

inline std::string_view to_string(DowntimeField f) {
  return f == DowntimeField::status_code ? "status_code" : "operational_code";
}

inline DowntimeField downtime_field_from_string(std::string_view s) {
  if (s == "status_code") return DowntimeField::status_code;
  if (s == "operational_code") return DowntimeField::operational_code;
  throw ConfigError("unknown downtime field: " + std::string(s));
}

// Maps turbine codes to operating/down. Default: code 0 operates, everything
// else is down. With unlisted_is_down disabled, an unmapped code is a
// configuration error.
struct StatusCodeMap {
  std::set<int> operating{0};
  std::set<int> down;
  bool unlisted_is_down = true;

  bool is_down(int code) const {
    if (operating.count(code)) return false;
    if (down.count(code)) return true;
    if (unlisted_is_down) return true;
    throw ConfigError("status code not covered by configuration: " + std::to_string(code));
  }
};

}  // namespace windtwin::ingest
