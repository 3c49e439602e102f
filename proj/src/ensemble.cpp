#include "ardc/ensemble.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "ardc/errors.hpp"
#include "ardc/json_io.hpp"

namespace ardc {

using nlohmann::json;

void validate(const PredictionChip& chip) {
    if (chip.window <= 0) throw DomainError("prediction chip window must be positive");
    if (chip.classes.empty()) throw DomainError("prediction chip has no classes");
    const std::size_t n =
        chip.classes.size() * static_cast<std::size_t>(chip.window) * chip.window;
    if (chip.probs.size() != n)
        throw DomainError("prediction chip sample count mismatch");
    for (float p : chip.probs)
        if (!(p >= 0.0f && p <= 1.0f))
            throw DomainError("prediction chip probability outside [0, 1]");
}

void save_prediction_chip(const PredictionChip& chip, const std::filesystem::path& path) {
    validate(chip);
    json meta{{"origin", {chip.col, chip.row}},
              {"window", chip.window},
              {"classes", chip.classes}};
    save_json_file(meta, path.string() + ".json");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open prediction chip for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(chip.probs.data()),
              static_cast<std::streamsize>(chip.probs.size() * sizeof(float)));
    if (!out) throw IoError("write failed: " + path.string());
}

PredictionChip load_prediction_chip(const std::filesystem::path& path) {
    const auto side = path.string() + ".json";
    if (!std::filesystem::exists(side)) throw IoError("missing sidecar: " + side);
    const json meta = load_json_file(side);
    PredictionChip chip;
    try {
        chip.col = meta.at("origin").at(0).get<int>();
        chip.row = meta.at("origin").at(1).get<int>();
        meta.at("window").get_to(chip.window);
        meta.at("classes").get_to(chip.classes);
    } catch (const json::exception& e) {
        throw IoError("bad chip sidecar " + side + ": " + e.what());
    }
    const std::size_t n =
        chip.classes.size() * static_cast<std::size_t>(chip.window) * chip.window;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open prediction chip: " + path.string());
    chip.probs.resize(n);
    in.read(reinterpret_cast<char*>(chip.probs.data()),
            static_cast<std::streamsize>(n * sizeof(float)));
    if (!in) throw IoError("truncated prediction chip: " + path.string());
    validate(chip);
    return chip;
}

PredictionChip ensemble_pair(const PredictionChip& a, const PredictionChip& b) {
    if (a.col != b.col || a.row != b.row || a.window != b.window)
        throw DomainError("ensemble_pair: chip windows do not match");
    if (a.classes != b.classes)
        throw DomainError("ensemble_pair: chip class lists do not match");
    PredictionChip out = a;
    for (std::size_t i = 0; i < out.probs.size(); ++i)
        out.probs[i] = 0.5f * (a.probs[i] + b.probs[i]);
    return out;
}

std::vector<std::uint8_t> threshold_probs(const std::vector<float>& probs, double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw DomainError("threshold tau must be in (0, 1)");
    std::vector<std::uint8_t> out(probs.size());
    const float t = static_cast<float>(tau);
    for (std::size_t i = 0; i < probs.size(); ++i) out[i] = probs[i] >= t ? 1 : 0;
    return out;
}

ProbabilityCanvas merge_chips(const std::vector<PredictionChip>& chips, int width, int height) {
    if (width <= 0 || height <= 0) throw DomainError("canvas dimensions must be positive");
    ProbabilityCanvas canvas;
    canvas.width = width;
    canvas.height = height;
    if (chips.empty()) {
        canvas.covered.assign(static_cast<std::size_t>(width) * height, 0);
        return canvas;
    }
    canvas.classes = chips.front().classes;
    const std::size_t npix = static_cast<std::size_t>(width) * height;
    canvas.probs.assign(canvas.classes.size() * npix, 0.0f);
    canvas.covered.assign(npix, 0);

    for (const auto& chip : chips) {
        validate(chip);
        if (chip.classes != canvas.classes)
            throw DomainError("merge_chips: inconsistent class lists");
        if (chip.col < 0 || chip.row < 0 || chip.col + chip.window > width ||
            chip.row + chip.window > height)
            throw DomainError("merge_chips: chip window outside canvas");
        for (std::size_t cls = 0; cls < canvas.classes.size(); ++cls) {
            const std::size_t cbase = canvas.class_offset(cls);
            const std::size_t pbase = chip.class_offset(cls);
            for (int y = 0; y < chip.window; ++y) {
                const std::size_t crow =
                    cbase + static_cast<std::size_t>(chip.row + y) * width + chip.col;
                const std::size_t prow = pbase + static_cast<std::size_t>(y) * chip.window;
                for (int x = 0; x < chip.window; ++x) {
                    const std::size_t ci = crow + x;
                    canvas.probs[ci] = std::max(canvas.probs[ci], chip.probs[prow + x]);
                }
            }
        }
        for (int y = 0; y < chip.window; ++y) {
            const std::size_t row = static_cast<std::size_t>(chip.row + y) * width + chip.col;
            std::fill_n(canvas.covered.begin() + row, chip.window, std::uint8_t{1});
        }
    }
    return canvas;
}

void save_canvas(const ProbabilityCanvas& canvas, const std::filesystem::path& path) {
    RasterScene scene;
    scene.width = canvas.width;
    scene.height = canvas.height;
    scene.bands = static_cast<int>(canvas.classes.size());
    scene.sample_type = SampleType::F32;
    scene.nodata = -9999.0;
    scene.band_names = canvas.classes;
    const std::size_t npix = static_cast<std::size_t>(canvas.width) * canvas.height;
    scene.f32.resize(canvas.probs.size());
    for (std::size_t cls = 0; cls < canvas.classes.size(); ++cls) {
        const std::size_t base = canvas.class_offset(cls);
        for (std::size_t i = 0; i < npix; ++i)
            scene.f32[base + i] =
                canvas.covered[i] ? canvas.probs[base + i] : static_cast<float>(scene.nodata);
    }
    write_scene(scene, path);
}

ProbabilityCanvas load_canvas(const std::filesystem::path& path) {
    const RasterScene scene = read_scene(path);
    if (scene.sample_type != SampleType::F32)
        throw IoError("probability canvas must be float32: " + path.string());
    if (scene.band_names.empty())
        throw IoError("probability canvas sidecar lacks band_names (class list): " +
                      path.string());
    ProbabilityCanvas canvas;
    canvas.width = scene.width;
    canvas.height = scene.height;
    canvas.classes = scene.band_names;
    const std::size_t npix = static_cast<std::size_t>(canvas.width) * canvas.height;
    canvas.probs.assign(scene.f32.size(), 0.0f);
    canvas.covered.assign(npix, 1);
    const float sentinel = static_cast<float>(scene.nodata);
    for (std::size_t i = 0; i < npix; ++i)
        if (scene.f32[i] == sentinel) canvas.covered[i] = 0;
    for (std::size_t cls = 0; cls < canvas.classes.size(); ++cls) {
        const std::size_t base = canvas.class_offset(cls);
        for (std::size_t i = 0; i < npix; ++i)
            canvas.probs[base + i] = canvas.covered[i] ? scene.f32[base + i] : 0.0f;
    }
    return canvas;
}

std::optional<double> ClassConfusion::recall() const {
    if (tp + fn == 0) return std::nullopt;
    return static_cast<double>(tp) / static_cast<double>(tp + fn);
}

std::vector<ClassConfusion> confusion(const std::vector<std::uint8_t>& pred_binary,
                                      const std::vector<std::string>& classes, int width,
                                      int height, const std::vector<LabelMask>& truth) {
    const std::size_t npix = static_cast<std::size_t>(width) * height;
    if (pred_binary.size() != classes.size() * npix)
        throw DomainError("confusion: prediction grid size mismatch");

    std::vector<ClassConfusion> out;
    for (std::size_t cls = 0; cls < classes.size(); ++cls) {
        auto it = std::find_if(truth.begin(), truth.end(),
                               [&](const LabelMask& m) { return m.class_name == classes[cls]; });
        if (it == truth.end()) continue;  // no ground truth for this class
        const LabelMask& mask = *it;
        if (mask.width != width || mask.height != height)
            throw DomainError("confusion: truth mask dimensions do not match canvas for class '" +
                              mask.class_name + "'");
        ClassConfusion c;
        c.class_name = classes[cls];
        const std::size_t base = cls * npix;
        for (std::size_t i = 0; i < npix; ++i) {
            if (!mask.labeled_extent[i]) continue;  // sparse-label rule
            const bool pred = pred_binary[base + i] != 0;
            const bool pos = mask.mask[i] != 0;
            if (pos)
                pred ? ++c.tp : ++c.fn;
            else
                pred ? ++c.fp : ++c.tn;
        }
        out.push_back(c);
    }
    return out;
}

std::vector<ClassConfusion> report_order(std::vector<ClassConfusion> classes) {
    const std::vector<std::string> canonical = {"trees", "buildings", "water", "roads"};
    std::vector<ClassConfusion> ordered;
    for (const auto& name : canonical) {
        auto it = std::find_if(classes.begin(), classes.end(),
                               [&](const ClassConfusion& c) { return c.class_name == name; });
        if (it != classes.end()) {
            ordered.push_back(*it);
            classes.erase(it);
        }
    }
    for (auto& c : classes) ordered.push_back(std::move(c));
    return ordered;
}

nlohmann::json to_report_json(const RecallReport& report, const std::string& model,
                              const std::string& input) {
    auto display = [](std::string s) {
        if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
        return s;
    };
    json header = json::array({"Model", "Input"});
    json row = json::array({model, input});
    json counts = json::object();
    for (const auto& c : report.classes) {
        header.push_back(display(c.class_name));
        const auto r = c.recall();
        if (r)
            row.push_back(*r * 100.0);  // percent, matching the published layout
        else
            row.push_back(nullptr);
        counts[c.class_name] = {{"tp", c.tp}, {"fn", c.fn}, {"fp", c.fp}, {"tn", c.tn}};
    }
    return json{{"tau", report.tau}, {"header", header}, {"rows", json::array({row})},
                {"counts", counts}};
}

RecallReport evaluate_pipeline(const std::vector<PredictionChip>& model_a,
                               const std::vector<PredictionChip>& model_b,
                               const std::vector<LabelMask>& truth, double tau, int canvas_width,
                               int canvas_height) {
    if (model_a.size() != model_b.size())
        throw DomainError("evaluate_pipeline: model chip sets differ in size");
    std::vector<PredictionChip> ensembled;
    ensembled.reserve(model_a.size());
    for (std::size_t i = 0; i < model_a.size(); ++i)
        ensembled.push_back(ensemble_pair(model_a[i], model_b[i]));

    const ProbabilityCanvas canvas = merge_chips(ensembled, canvas_width, canvas_height);
    const auto binary = threshold_probs(canvas.probs, tau);

    RecallReport report;
    report.tau = tau;
    report.classes = report_order(
        confusion(binary, canvas.classes, canvas_width, canvas_height, truth));
    return report;
}

}  // namespace ardc
