#pragma once

#include <algorithm>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "windtwin/fileio.hpp"
#include "windtwin/time.hpp"

namespace windtwin::service {

// Hand-rolled SVG output; enough for residual traces and attribution charts
// without pulling in a plotting dependency.
namespace svg {

inline std::string header(int width, int height, const std::string& title) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
                  "\" height=\"" + std::to_string(height) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"12\" y=\"18\" font-family=\"sans-serif\" font-size=\"14\">" + title +
       "</text>\n";
  return s;
}

inline std::string hline(double y, int width, const std::string& color, bool dashed,
                         const std::string& label) {
  std::string s = "<line x1=\"50\" x2=\"" + std::to_string(width - 10) + "\" y1=\"" +
                  format_double(y) + "\" y2=\"" + format_double(y) + "\" stroke=\"" + color +
                  "\"";
  if (dashed) s += " stroke-dasharray=\"6,4\"";
  s += "/>\n";
  if (!label.empty()) {
    s += "<text x=\"" + std::to_string(width - 60) + "\" y=\"" + format_double(y - 4) +
         "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"" + color + "\">" + label +
         "</text>\n";
  }
  return s;
}

}  // namespace svg

// Residual trace with the trigger and release thresholds, matching the content
// of the per-channel MSE figures.
inline void write_residual_plot(const std::filesystem::path& path, const std::string& title,
                                const std::vector<Timestamp>& times,
                                const std::vector<std::optional<double>>& residuals, double d,
                                double d_er) {
  const int width = 1200, height = 320;
  const double left = 50, right = width - 10, top = 30, bottom = height - 20;

  double y_max = d * 1.3;
  for (const auto& r : residuals) {
    if (r) y_max = std::max(y_max, *r * 1.1);
  }
  if (!(y_max > 0)) y_max = 1.0;
  const Timestamp t0 = times.empty() ? 0 : times.front();
  const Timestamp t1 = times.empty() ? 1 : std::max(times.back(), t0 + 1);

  auto x_of = [&](Timestamp t) {
    return left + (right - left) * static_cast<double>(t - t0) / static_cast<double>(t1 - t0);
  };
  auto y_of = [&](double v) { return bottom - (bottom - top) * std::min(v, y_max) / y_max; };

  std::string out = svg::header(width, height, title);
  out += svg::hline(y_of(d), width, "#c0392b", false, "d");
  out += svg::hline(y_of(d_er), width, "#e67e22", true, "d_er");

  std::string points;
  bool open = false;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!residuals[i]) {
      if (open) {
        out += "<polyline fill=\"none\" stroke=\"#2c3e50\" stroke-width=\"1\" points=\"" +
               points + "\"/>\n";
        points.clear();
        open = false;
      }
      continue;
    }
    points += format_double(x_of(times[i])) + "," + format_double(y_of(*residuals[i])) + " ";
    open = true;
  }
  if (open) {
    out += "<polyline fill=\"none\" stroke=\"#2c3e50\" stroke-width=\"1\" points=\"" + points +
           "\"/>\n";
  }
  out += "<text x=\"12\" y=\"" + format_double(bottom) +
         "\" font-family=\"sans-serif\" font-size=\"10\">0</text>\n";
  out += "<text x=\"12\" y=\"" + format_double(top + 10) +
         "\" font-family=\"sans-serif\" font-size=\"10\">" + format_double(y_max) + "</text>\n";
  out += "</svg>\n";
  write_text_file(path, out);
}

// Per-feature attribution scatter over many samples: one column per input,
// jittered x, signed contribution on y.
inline void write_attribution_scatter(const std::filesystem::path& path, const std::string& title,
                                      const std::vector<std::string>& feature_names,
                                      const std::vector<std::vector<double>>& samples) {
  const int width = 900, height = 420;
  const double left = 60, right = width - 20, top = 40, bottom = height - 60;
  double extent = 1e-9;
  for (const auto& row : samples) {
    for (double v : row) extent = std::max(extent, std::abs(v));
  }
  const std::size_t n = feature_names.size();
  auto x_of = [&](std::size_t j, std::size_t sample_idx) {
    const double slot = (right - left) / static_cast<double>(n);
    const double jitter =
        0.35 * slot * (static_cast<double>(sample_idx % 17) / 17.0 - 0.5);
    return left + slot * (static_cast<double>(j) + 0.5) + jitter;
  };
  auto y_of = [&](double v) {
    return (top + bottom) / 2.0 - (bottom - top) / 2.0 * (v / extent);
  };

  std::string out = svg::header(width, height, title);
  out += svg::hline(y_of(0.0), width, "#999999", true, "");
  for (std::size_t s = 0; s < samples.size(); ++s) {
    for (std::size_t j = 0; j < n && j < samples[s].size(); ++j) {
      out += "<circle cx=\"" + format_double(x_of(j, s)) + "\" cy=\"" +
             format_double(y_of(samples[s][j])) +
             "\" r=\"1.5\" fill=\"#2980b9\" fill-opacity=\"0.5\"/>\n";
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    out += "<text x=\"" + format_double(x_of(j, 8)) + "\" y=\"" + std::to_string(height - 30) +
           "\" font-family=\"sans-serif\" font-size=\"9\" text-anchor=\"middle\" "
           "transform=\"rotate(20 " +
           format_double(x_of(j, 8)) + " " + std::to_string(height - 30) + ")\">" +
           feature_names[j] + "</text>\n";
  }
  out += "</svg>\n";
  write_text_file(path, out);
}

// Signed contribution bars for a single attribution.
inline void write_attribution_bars(const std::filesystem::path& path, const std::string& title,
                                   const std::vector<std::string>& feature_names,
                                   const std::vector<double>& contributions) {
  const int width = 700;
  const int row_height = 26;
  const int height = 60 + row_height * static_cast<int>(feature_names.size());
  const double mid = width * 0.55;
  double extent = 1e-9;
  for (double v : contributions) extent = std::max(extent, std::abs(v));
  const double scale = (width * 0.4) / extent;

  std::string out = svg::header(width, height, title);
  for (std::size_t j = 0; j < feature_names.size() && j < contributions.size(); ++j) {
    const double y = 40 + row_height * static_cast<double>(j);
    const double v = contributions[j];
    const double x0 = v >= 0 ? mid : mid + v * scale;
    out += "<rect x=\"" + format_double(x0) + "\" y=\"" + format_double(y) + "\" width=\"" +
           format_double(std::abs(v) * scale) + "\" height=\"16\" fill=\"" +
           (v >= 0 ? std::string("#c0392b") : std::string("#2980b9")) + "\"/>\n";
    out += "<text x=\"8\" y=\"" + format_double(y + 12) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + feature_names[j] + "</text>\n";
    out += "<text x=\"" + format_double(mid + (v >= 0 ? std::abs(v) * scale + 6 : -std::abs(v) * scale - 48)) +
           "\" y=\"" + format_double(y + 12) +
           "\" font-family=\"sans-serif\" font-size=\"10\">" + format_double(v) + "</text>\n";
  }
  out += "</svg>\n";
  write_text_file(path, out);
}

}  // namespace windtwin::service
