#ifndef ARDC_ENSEMBLE_HPP
#define ARDC_ENSEMBLE_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ardc/raster.hpp"

namespace ardc {

/// Per-chip softmax probabilities, planar [class][row][col], anchored at a
/// (col, row) offset of the full canvas.
struct PredictionChip {
    int col = 0;
    int row = 0;
    int window = 0;
    std::vector<std::string> classes;
    std::vector<float> probs;

    std::size_t class_offset(std::size_t cls) const {
        return cls * static_cast<std::size_t>(window) * window;
    }
};

void validate(const PredictionChip& chip);

void save_prediction_chip(const PredictionChip& chip, const std::filesystem::path& path);
PredictionChip load_prediction_chip(const std::filesystem::path& path);

/// Per-pixel, per-class arithmetic mean of two model outputs for the same
/// window. Shape or class-list mismatch is an error.
PredictionChip ensemble_pair(const PredictionChip& a, const PredictionChip& b);

/// Inclusive threshold: binary = probs >= tau, each class independently.
std::vector<std::uint8_t> threshold_probs(const std::vector<float>& probs, double tau);

/// Full-scene per-class probability canvas. `covered` marks pixels touched by
/// at least one chip; uncovered pixels carry no data.
struct ProbabilityCanvas {
    int width = 0;
    int height = 0;
    std::vector<std::string> classes;
    std::vector<float> probs;    // planar [class][row][col]
    std::vector<std::uint8_t> covered;  // [row][col]

    std::size_t class_offset(std::size_t cls) const {
        return cls * static_cast<std::size_t>(width) * height;
    }
};

/// Geospatial max-pool merge: each canvas pixel/class takes the maximum over
/// all chips covering it.
ProbabilityCanvas merge_chips(const std::vector<PredictionChip>& chips, int width, int height);

/// Canvas persistence on top of the raster container (float32, one band per
/// class, uncovered pixels = nodata).
void save_canvas(const ProbabilityCanvas& canvas, const std::filesystem::path& path);
ProbabilityCanvas load_canvas(const std::filesystem::path& path);

struct ClassConfusion {
    std::string class_name;
    long long tp = 0;
    long long fn = 0;
    long long fp = 0;
    long long tn = 0;

    /// TP / (TP + FN); absent when the class has no positive labels.
    std::optional<double> recall() const;
};

/// Per-class confusion counts restricted to each mask's labeled extent.
/// `pred_binary` is planar per class in the canvas class order; `truth` is
/// matched to canvas classes by name.
std::vector<ClassConfusion> confusion(const std::vector<std::uint8_t>& pred_binary,
                                      const std::vector<std::string>& classes, int width,
                                      int height, const std::vector<LabelMask>& truth);

struct RecallReport {
    std::vector<ClassConfusion> classes;  // report column order
    double tau = 0.35;
};

nlohmann::json to_report_json(const RecallReport& report, const std::string& model,
                              const std::string& input);

/// ensemble -> merge -> threshold -> recall over two model chip sets.
RecallReport evaluate_pipeline(const std::vector<PredictionChip>& model_a,
                               const std::vector<PredictionChip>& model_b,
                               const std::vector<LabelMask>& truth, double tau, int canvas_width,
                               int canvas_height);

/// Orders confusion rows for reporting: trees, buildings, water, roads first,
/// any remaining classes after in input order.
std::vector<ClassConfusion> report_order(std::vector<ClassConfusion> classes);

}  // namespace ardc

#endif
