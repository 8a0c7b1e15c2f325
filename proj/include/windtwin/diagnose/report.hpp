#pragma once

#include <string>
#include <vector>

namespace windtwin::diagnose {

// Signed per-input contributions to one model output, normalized units.
// Efficiency: base_value + sum(contributions) equals the model output.
struct AttributionVector {
  std::vector<double> contributions;  // schema order
  double base_value = 0.0;

  double total_magnitude() const {
    double acc = 0.0;
    for (double c : contributions) acc += c < 0.0 ? -c : c;
    return acc;
  }
};

// Diagnostic classification of a measurement anomaly.
//   case 1: the target's own input dominates the attribution
//   case 2: contributions look like normal operation; the measured output is off
//   case 3: specific inputs contribute more than ever seen in training
struct DiagnosisReport {
  int case_id = 0;
  std::vector<std::string> responsible_channels;
  AttributionVector attribution;
  std::string narrative;
};

}  // namespace windtwin::diagnose
