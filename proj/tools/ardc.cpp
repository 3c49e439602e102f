// ardc - batch atmospheric correction and ARD pipeline tool.
//
// Exit codes: 0 success, 1 usage error, 2 bad configuration,
// 3 I/O error, 4 domain error (bad geometry/data), 5 internal error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ardc/config.hpp"
#include "ardc/correction.hpp"
#include "ardc/ensemble.hpp"
#include "ardc/errors.hpp"
#include "ardc/json_io.hpp"
#include "ardc/lut.hpp"
#include "ardc/raster.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOpts {
    std::string config_path;
    unsigned long seed = 0;  // reserved for fixture generators; core is deterministic
};

ardc::PipelineConfig resolve_config(const GlobalOpts& g) {
    if (!g.config_path.empty()) return ardc::load_config(g.config_path);
    if (const char* dir = std::getenv("ARDC_CONFIG_DIR")) {
        const fs::path candidate = fs::path(dir) / "config.json";
        if (fs::exists(candidate)) return ardc::load_config(candidate);
    }
    return ardc::default_config();
}

std::vector<ardc::LutTable> load_tables(const std::vector<std::string>& lut_files,
                                        const std::string& lut_dir) {
    std::vector<ardc::LutTable> tables;
    for (const auto& f : lut_files) tables.push_back(ardc::load_lut(f));
    if (!lut_dir.empty()) {
        std::vector<fs::path> found;
        for (const auto& entry : fs::directory_iterator(lut_dir))
            if (entry.path().extension() == ".lut") found.push_back(entry.path());
        std::sort(found.begin(), found.end());
        for (const auto& p : found) tables.push_back(ardc::load_lut(p));
    }
    if (tables.empty()) throw ardc::ConfigError("no LUT tables given (--lut / --lut-dir)");
    return tables;
}

std::vector<fs::path> sorted_chip_files(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".chip") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ardc::IoError("no .chip files in " + dir.string());
    return files;
}

std::vector<ardc::LabelMask> load_truth(const fs::path& dir) {
    std::vector<ardc::LabelMask> truth;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".mask") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& p : files) truth.push_back(ardc::load_mask(p));
    if (truth.empty()) throw ardc::IoError("no .mask files in " + dir.string());
    return truth;
}

void print_recall_table(const json& report) {
    for (const auto& h : report.at("header")) std::cout << h.get<std::string>() << "\t";
    std::cout << "\n";
    for (const auto& row : report.at("rows")) {
        for (const auto& cell : row) {
            if (cell.is_null())
                std::cout << "-\t";
            else if (cell.is_number())
                std::cout << cell.get<double>() << "\t";
            else
                std::cout << cell.get<std::string>() << "\t";
        }
        std::cout << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "ardc: LUT-based atmospheric correction and ARD pipeline\n"
        "Exit codes: 0 ok, 1 usage, 2 config, 3 I/O, 4 domain, 5 internal"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path,
                   "Pipeline config JSON (default: $ARDC_CONFIG_DIR/config.json, else built-ins)");
    app.add_option("--seed", g.seed, "Seed for fixture generation (core pipeline is deterministic)");

    // lut build / lut query
    auto* lut_cmd = app.add_subcommand("lut", "Build or query coefficient look-up tables");
    lut_cmd->require_subcommand(1);
    auto* lut_build = lut_cmd->add_subcommand("build", "Simulate LUTs for configured bands");
    std::string band_name, out_path;
    int workers = 0;
    lut_build->add_option("--band", band_name, "Build only this band");
    lut_build->add_option("--out", out_path, "Output file (single band) or directory")->required();
    lut_build->add_option("--workers", workers, "Worker threads (0 = all cores)");

    auto* lut_query = lut_cmd->add_subcommand("query", "Interpolate coefficients from a LUT");
    std::string lut_path;
    ardc::AcquisitionGeometry qgeom;
    ardc::AtmosphereState qatmos;
    bool clamp_hull = false;
    lut_query->add_option("--lut", lut_path, "LUT file")->required();
    lut_query->add_option("--theta-s", qgeom.theta_s, "Solar zenith (deg)")->required();
    lut_query->add_option("--theta-v", qgeom.theta_v, "View zenith (deg)")->required();
    lut_query->add_option("--dphi", qgeom.delta_phi, "Relative azimuth (deg)")->required();
    lut_query->add_option("--aot", qatmos.aot550, "AOT at 550 nm")->required();
    lut_query->add_option("--wv", qatmos.water_vapour, "Water vapour (g/cm^2)")->required();
    lut_query->add_option("--ozone", qatmos.ozone, "Ozone (DU)")->required();
    lut_query->add_option("--elev", qatmos.elevation, "Elevation (km)")->required();
    lut_query->add_flag("--clamp", clamp_hull, "Clamp out-of-hull queries to the axis hull");

    // correct
    auto* correct = app.add_subcommand("correct", "DN scene -> BOA surface reflectance");
    std::string in_path, report_path, lut_dir;
    std::vector<std::string> lut_files;
    bool clamp_negative = false;
    correct->add_option("--in", in_path, "Input DN scene")->required();
    correct->add_option("--out", out_path, "Output reflectance scene")->required();
    correct->add_option("--lut", lut_files, "LUT file (repeat per band)");
    correct->add_option("--lut-dir", lut_dir, "Directory of .lut files");
    correct->add_option("--report", report_path, "Correction report JSON");
    correct->add_flag("--clamp", clamp_negative, "Clamp negative reflectance to zero");
    correct->add_option("--workers", workers, "Worker threads (0 = all cores)");

    // chip
    auto* chip = app.add_subcommand("chip", "Sliding-window chipping of a scene");
    int window = 0, stride = 0;
    chip->add_option("--in", in_path, "Input scene")->required();
    chip->add_option("--out", out_path, "Output directory")->required();
    chip->add_option("--window", window, "Chip window (pixels; default from config)");
    chip->add_option("--stride", stride, "Chip stride (pixels; default from config)");

    // rasterize
    auto* rasterize = app.add_subcommand("rasterize", "Polygon ground truth -> binary masks");
    std::string template_path;
    rasterize->add_option("--in", in_path, "Polygon JSON document")->required();
    rasterize->add_option("--template", template_path, "Template scene for grid/geotransform")
        ->required();
    rasterize->add_option("--out", out_path, "Output directory for .mask files")->required();

    // ensemble
    auto* ensemble = app.add_subcommand("ensemble", "Average softmax chips from two models");
    std::string a_path, b_path;
    ensemble->add_option("--a", a_path, "Model A chip file or directory")->required();
    ensemble->add_option("--b", b_path, "Model B chip file or directory")->required();
    ensemble->add_option("--out", out_path, "Output chip file or directory")->required();

    // merge
    auto* merge = app.add_subcommand("merge", "Max-pool merge chips onto a full canvas");
    int canvas_w = 0, canvas_h = 0;
    merge->add_option("--chips", in_path, "Directory of .chip files")->required();
    merge->add_option("--width", canvas_w, "Canvas width (pixels)")->required();
    merge->add_option("--height", canvas_h, "Canvas height (pixels)")->required();
    merge->add_option("--out", out_path, "Output canvas raster")->required();

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Recall against sparse ground truth");
    std::string pred_path, truth_dir, model_label = "model", input_label = "scene";
    double tau = -1.0;
    eval_cmd->add_option("--pred", pred_path, "Merged probability canvas");
    eval_cmd->add_option("--a", a_path, "Model A chip directory (full pipeline mode)");
    eval_cmd->add_option("--b", b_path, "Model B chip directory (full pipeline mode)");
    eval_cmd->add_option("--width", canvas_w, "Canvas width (full pipeline mode)");
    eval_cmd->add_option("--height", canvas_h, "Canvas height (full pipeline mode)");
    eval_cmd->add_option("--truth", truth_dir, "Directory of .mask ground truth")->required();
    eval_cmd->add_option("--tau", tau, "Probability threshold (default from config)");
    eval_cmd->add_option("--out", out_path, "Recall report JSON");
    eval_cmd->add_option("--model", model_label, "Model label for the report row");
    eval_cmd->add_option("--input", input_label, "Input label for the report row");

    // report
    auto* report_cmd = app.add_subcommand("report", "Per-band before/after statistics as CSV");
    report_cmd->add_option("--in", in_path, "Correction report JSON")->required();
    report_cmd->add_option("--out", out_path, "Output CSV (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        const ardc::PipelineConfig cfg = resolve_config(g);

        if (lut_build->parsed()) {
            std::vector<ardc::BandDefinition> bands = cfg.bands;
            if (!band_name.empty()) bands = {ardc::band_by_name(cfg, band_name)};
            const bool single_file = bands.size() == 1 && !fs::is_directory(out_path);
            if (!single_file) fs::create_directories(out_path);
            for (const auto& band : bands) {
                const auto table = ardc::build_lut(band, cfg.axes, cfg.aerosol,
                                                   ardc::gas_for_band(cfg, band.name),
                                                   cfg.constants, workers);
                const fs::path dest =
                    single_file ? fs::path(out_path) : fs::path(out_path) / (band.name + ".lut");
                ardc::save_lut(table, dest);
                std::cout << "built " << dest.string() << " (" << table.values.size()
                          << " nodes)\n";
            }
        } else if (lut_query->parsed()) {
            const auto table = ardc::load_lut(lut_path);
            const auto res = ardc::interpolate(table, qgeom, qatmos, clamp_hull);
            json out{{"band", table.band.name},
                     {"t_gas", res.coeffs.t_gas},
                     {"rho_path", res.coeffs.rho_path},
                     {"t_scatter_total", res.coeffs.t_scatter_total},
                     {"spherical_albedo", res.coeffs.spherical_albedo},
                     {"clamped", res.clamped}};
            std::cout << out.dump(2) << "\n";
        } else if (correct->parsed()) {
            const auto scene = ardc::read_scene(in_path);
            if (!scene.context)
                throw ardc::ConfigError("input scene sidecar lacks a radiometric context");
            const auto tables = load_tables(lut_files, lut_dir);
            const auto policy = (clamp_negative || cfg.clamp_negative)
                                    ? ardc::NegativePolicy::ClampToZero
                                    : ardc::NegativePolicy::Keep;
            const int w = workers > 0 ? workers : cfg.workers;
            const auto result = ardc::correct_scene(scene, *scene.context, tables, policy, w);
            ardc::write_scene(result.boa, out_path);
            if (!report_path.empty()) {
                json jr = result.report;
                ardc::save_json_file(jr, report_path);
            }
        } else if (chip->parsed()) {
            const auto scene = ardc::read_scene(in_path);
            const int w = window > 0 ? window : cfg.chip_window;
            const int s = stride > 0 ? stride : cfg.chip_stride;
            fs::create_directories(out_path);
            const auto chips = ardc::chip_scene(scene, w, s);
            for (const auto& rec : chips) {
                char name[64];
                std::snprintf(name, sizeof(name), "chip_r%06d_c%06d.raw", rec.row, rec.col);
                ardc::write_scene(rec.data, fs::path(out_path) / name);
            }
            std::cout << chips.size() << " chips written to " << out_path << "\n";
        } else if (rasterize->parsed()) {
            const auto tmpl = ardc::read_scene(template_path);
            const auto sets = ardc::read_polygons(in_path);
            fs::create_directories(out_path);
            for (const auto& set : sets) {
                const auto res = ardc::rasterize_polygons(set.rings, set.class_name, tmpl);
                if (res.skipped_rings > 0)
                    std::cerr << "warning: skipped " << res.skipped_rings
                              << " degenerate ring(s) for class " << set.class_name << "\n";
                ardc::save_mask(res.mask, fs::path(out_path) / (set.class_name + ".mask"));
            }
        } else if (ensemble->parsed()) {
            if (fs::is_directory(a_path)) {
                const auto a_files = sorted_chip_files(a_path);
                const auto b_files = sorted_chip_files(b_path);
                if (a_files.size() != b_files.size())
                    throw ardc::DomainError("model chip directories differ in file count");
                fs::create_directories(out_path);
                for (std::size_t i = 0; i < a_files.size(); ++i) {
                    const auto out = ardc::ensemble_pair(ardc::load_prediction_chip(a_files[i]),
                                                         ardc::load_prediction_chip(b_files[i]));
                    ardc::save_prediction_chip(out, fs::path(out_path) / a_files[i].filename());
                }
            } else {
                const auto out = ardc::ensemble_pair(ardc::load_prediction_chip(a_path),
                                                     ardc::load_prediction_chip(b_path));
                ardc::save_prediction_chip(out, out_path);
            }
        } else if (merge->parsed()) {
            std::vector<ardc::PredictionChip> chips;
            for (const auto& f : sorted_chip_files(in_path))
                chips.push_back(ardc::load_prediction_chip(f));
            const auto canvas = ardc::merge_chips(chips, canvas_w, canvas_h);
            ardc::save_canvas(canvas, out_path);
        } else if (eval_cmd->parsed()) {
            const double t = tau > 0.0 ? tau : cfg.tau;
            const auto truth = load_truth(truth_dir);
            ardc::RecallReport report;
            if (!pred_path.empty()) {
                const auto canvas = ardc::load_canvas(pred_path);
                const auto binary = ardc::threshold_probs(canvas.probs, t);
                report.tau = t;
                report.classes = ardc::report_order(ardc::confusion(
                    binary, canvas.classes, canvas.width, canvas.height, truth));
            } else {
                if (a_path.empty() || b_path.empty() || canvas_w <= 0 || canvas_h <= 0)
                    throw ardc::ConfigError(
                        "eval needs either --pred or --a/--b with --width/--height");
                std::vector<ardc::PredictionChip> a_chips, b_chips;
                for (const auto& f : sorted_chip_files(a_path))
                    a_chips.push_back(ardc::load_prediction_chip(f));
                for (const auto& f : sorted_chip_files(b_path))
                    b_chips.push_back(ardc::load_prediction_chip(f));
                report = ardc::evaluate_pipeline(a_chips, b_chips, truth, t, canvas_w, canvas_h);
            }
            const json jr = ardc::to_report_json(report, model_label, input_label);
            if (!out_path.empty()) ardc::save_json_file(jr, out_path);
            print_recall_table(jr);
        } else if (report_cmd->parsed()) {
            const json jr = ardc::load_json_file(in_path);
            std::ostringstream csv;
            csv << "band,toa_min,toa_mean,toa_max,boa_min,boa_mean,boa_max\n";
            for (const auto& b : jr.at("bands")) {
                csv << b.at("band").get<std::string>();
                for (const char* section : {"toa", "boa"})
                    for (const char* field : {"min", "mean", "max"})
                        csv << "," << b.at(section).at(field).get<double>();
                csv << "\n";
            }
            if (out_path.empty()) {
                std::cout << csv.str();
            } else {
                std::ofstream out(out_path, std::ios::trunc);
                if (!out) throw ardc::IoError("cannot open " + out_path);
                out << csv.str();
            }
        }
    } catch (const ardc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ardc::IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 3;
    } catch (const ardc::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 5;
    }
    return 0;
}
