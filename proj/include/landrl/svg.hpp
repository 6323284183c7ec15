#pragma once

#include <span>
#include <string>
#include <vector>

namespace landrl::svg {

// Parsed rows of a training log (episode,steps,reward,epsilon,ma10,ma100).
struct TrainingCurve {
  std::vector<double> episode;
  std::vector<double> reward;
  std::vector<double> ma100;
};

// One polyline on a sweep chart.
struct SweepSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Standalone SVG line chart: raw rewards in grey, ma100 on top.
// Deterministic output; identical input gives identical bytes.
std::string render_training_svg(const TrainingCurve& curve);

// final_ma100 (or any y) against a numeric axis, one polyline per series.
std::string render_sweep_svg(std::span<const SweepSeries> series,
                             const std::string& x_label,
                             const std::string& y_label);

}  // namespace landrl::svg
