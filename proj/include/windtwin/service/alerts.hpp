#pragma once

#include <chrono>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "windtwin/detect/events.hpp"
#include "windtwin/errors.hpp"
#include "windtwin/fileio.hpp"
#include "windtwin/ingest/schema.hpp"

namespace windtwin::service {

// Notification content: asset identity, the responsible component and sensor,
// and the diagnosis summary.
struct AlertPayload {
  std::string farm;
  std::string turbine;
  std::string component;
  std::string signal_type;
  std::string sensor;
  Timestamp timestamp = 0;
  std::string kind;
  std::string diagnosis_summary;
  std::optional<double> coincidence_probability;

  nlohmann::json to_json() const {
    nlohmann::json j{{"farm", farm},
                     {"turbine", turbine},
                     {"component", component},
                     {"signal_type", signal_type},
                     {"sensor", sensor},
                     {"timestamp", format_iso8601(timestamp)},
                     {"kind", kind},
                     {"diagnosis", diagnosis_summary}};
    if (coincidence_probability) j["coincidence_probability"] = *coincidence_probability;
    else j["coincidence_probability"] = nullptr;
    return j;
  }

  static AlertPayload from_json(const nlohmann::json& j) {
    AlertPayload p;
    p.farm = j.at("farm").get<std::string>();
    p.turbine = j.at("turbine").get<std::string>();
    p.component = j.at("component").get<std::string>();
    p.signal_type = j.at("signal_type").get<std::string>();
    p.sensor = j.at("sensor").get<std::string>();
    const auto ts = parse_iso8601(j.at("timestamp").get<std::string>());
    if (!ts) throw DataError("unparseable alert timestamp");
    p.timestamp = *ts;
    p.kind = j.at("kind").get<std::string>();
    p.diagnosis_summary = j.at("diagnosis").get<std::string>();
    if (j.contains("coincidence_probability") && !j.at("coincidence_probability").is_null())
      p.coincidence_probability = j.at("coincidence_probability").get<double>();
    return p;
  }
};

inline std::string component_of_tag(const std::string& tag) {
  const auto dash = tag.find('-');
  return dash == std::string::npos ? tag : tag.substr(0, dash);
}

inline std::string signal_type_of_unit(const std::string& unit) {
  if (unit == "°C" || unit == "degC" || unit == "C") return "temperature";
  if (unit == "RPM" || unit == "rpm") return "rpm";
  return unit;
}

inline AlertPayload make_alert(const detect::AnomalyEvent& event, const ingest::Schema& schema,
                               const std::string& farm, const std::string& turbine) {
  AlertPayload p;
  p.farm = farm;
  p.turbine = turbine;
  const auto& channel = schema.at(schema.index_of(event.channel));
  p.component = component_of_tag(channel.component_tag);
  p.signal_type = signal_type_of_unit(channel.unit);
  p.sensor = channel.id;
  p.timestamp = event.timestamp;
  p.kind = std::string(detect::to_string(event.kind));
  p.diagnosis_summary = event.diagnosis ? event.diagnosis->narrative : "";
  p.coincidence_probability = event.coincidence_probability;
  return p;
}

struct RetryPolicy {
  int attempts = 3;
  int backoff_ms = 200;  // doubles after each failed attempt
};

struct SinkConfig {
  enum class Kind { stdout_sink, file, webhook };
  Kind kind = Kind::stdout_sink;
  std::string path;         // file sink
  std::string url;          // webhook sink, http:// only
  std::string auth_header;  // sent as the Authorization header value
  RetryPolicy retry;

  std::string describe() const {
    switch (kind) {
      case Kind::stdout_sink: return "stdout";
      case Kind::file: return "file:" + path;
      case Kind::webhook: return "webhook:" + url;
    }
    return "?";
  }
};

inline std::vector<SinkConfig> sinks_from_json(const nlohmann::json& j) {
  std::vector<SinkConfig> sinks;
  for (const auto& sj : j.at("sinks")) {
    SinkConfig sink;
    const auto kind = sj.at("kind").get<std::string>();
    if (kind == "stdout") {
      sink.kind = SinkConfig::Kind::stdout_sink;
    } else if (kind == "file") {
      sink.kind = SinkConfig::Kind::file;
      sink.path = sj.at("path").get<std::string>();
    } else if (kind == "webhook") {
      sink.kind = SinkConfig::Kind::webhook;
      sink.url = sj.at("url").get<std::string>();
      sink.auth_header = sj.value("auth_header", "");
    } else {
      throw ConfigError("unknown sink kind: " + kind);
    }
    if (sj.contains("retry")) {
      sink.retry.attempts = sj.at("retry").value("attempts", sink.retry.attempts);
      sink.retry.backoff_ms = sj.at("retry").value("backoff_ms", sink.retry.backoff_ms);
    }
    sinks.push_back(std::move(sink));
  }
  if (sinks.empty()) throw ConfigError("alerting is enabled but no sink is configured");
  return sinks;
}

struct SinkDelivery {
  std::string sink;
  bool ok = false;
  int attempts = 0;
  std::string error;
};

struct DeliveryReport {
  std::vector<SinkDelivery> sinks;

  bool any_ok() const {
    for (const auto& s : sinks) {
      if (s.ok) return true;
    }
    return false;
  }
};

namespace alert_detail {

struct ParsedUrl {
  std::string host;
  int port = 80;
  std::string path = "/";
};

inline ParsedUrl parse_http_url(const std::string& url) {
  const std::string scheme = "http://";
  if (url.rfind(scheme, 0) != 0)
    throw ConfigError("webhook sink supports http:// URLs only: " + url);
  ParsedUrl out;
  auto rest = url.substr(scheme.size());
  const auto slash = rest.find('/');
  std::string authority = slash == std::string::npos ? rest : rest.substr(0, slash);
  if (slash != std::string::npos) out.path = rest.substr(slash);
  const auto colon = authority.find(':');
  if (colon == std::string::npos) {
    out.host = authority;
  } else {
    out.host = authority.substr(0, colon);
    const auto port = parse_int(authority.substr(colon + 1));
    if (!port) throw ConfigError("bad port in webhook URL: " + url);
    out.port = static_cast<int>(*port);
  }
  if (out.host.empty()) throw ConfigError("missing host in webhook URL: " + url);
  return out;
}

}  // namespace alert_detail

// Serializes one JSON object per alert to every configured sink; the webhook
// sink POSTs with content-type application/json and retries per policy.
class AlertDispatcher {
 public:
  explicit AlertDispatcher(std::vector<SinkConfig> sinks, std::ostream* out = &std::cout)
      : sinks_(std::move(sinks)), out_(out) {}

  // Throws DeliveryError if every sink fails; callers persist the event in the
  // event log before dispatching.
  DeliveryReport dispatch(const AlertPayload& payload) const {
    const std::string line = payload.to_json().dump();
    DeliveryReport report;
    for (const auto& sink : sinks_) {
      report.sinks.push_back(deliver(sink, line));
    }
    if (!report.any_ok()) {
      std::string detail;
      for (const auto& s : report.sinks) {
        if (!detail.empty()) detail += "; ";
        detail += s.sink + ": " + s.error;
      }
      throw DeliveryError("all alert sinks failed: " + detail);
    }
    return report;
  }

 private:
  SinkDelivery deliver(const SinkConfig& sink, const std::string& line) const {
    SinkDelivery d;
    d.sink = sink.describe();
    const int attempts = std::max(1, sink.retry.attempts);
    int backoff = sink.retry.backoff_ms;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
      d.attempts = attempt;
      try {
        if (try_once(sink, line, d.error)) {
          d.ok = true;
          return d;
        }
      } catch (const Error&) {
        throw;  // configuration problems are not retryable
      }
      if (attempt < attempts && backoff > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
        backoff *= 2;
      }
    }
    return d;
  }

  bool try_once(const SinkConfig& sink, const std::string& line, std::string& error) const {
    switch (sink.kind) {
      case SinkConfig::Kind::stdout_sink:
        (*out_) << line << '\n';
        out_->flush();
        return true;
      case SinkConfig::Kind::file:
        append_text_file(sink.path, line + "\n");
        return true;
      case SinkConfig::Kind::webhook: {
        const auto url = alert_detail::parse_http_url(sink.url);
        httplib::Client client(url.host, url.port);
        client.set_connection_timeout(5, 0);
        httplib::Headers headers;
        if (!sink.auth_header.empty()) headers.insert({"Authorization", sink.auth_header});
        const auto res = client.Post(url.path, headers, line, "application/json");
        if (!res) {
          error = "connection failed";
          return false;
        }
        if (res->status < 200 || res->status >= 300) {
          error = "http status " + std::to_string(res->status);
          return false;
        }
        return true;
      }
    }
    return false;
  }

  std::vector<SinkConfig> sinks_;
  std::ostream* out_;
};

}  // namespace windtwin::service
