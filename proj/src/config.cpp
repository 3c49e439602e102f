#include "ardc/config.hpp"

#include <algorithm>

#include "ardc/errors.hpp"
#include "ardc/json_io.hpp"

namespace ardc {

using nlohmann::json;

PipelineConfig default_config() {
    PipelineConfig cfg;
    // Placeholder radiometry: gains/offsets/F0 are not published for this
    // sensor class and must come from scene metadata for absolute work.
    cfg.bands = {
        {"blue", 0.45, 0.52, 0.485, 0.2, 0.0, 1984.0},
        {"green", 0.52, 0.59, 0.555, 0.2, 0.0, 1826.0},
        {"red", 0.62, 0.68, 0.650, 0.2, 0.0, 1571.0},
        {"nir", 0.77, 0.86, 0.815, 0.2, 0.0, 1069.0},
    };
    // Approximate Chappuis-band ozone in green/red, weak water vapour in NIR.
    cfg.gas = {
        {"blue", {2.0e-6, 0.0}},
        {"green", {3.3e-5, 0.0}},
        {"red", {4.5e-5, 0.0}},
        {"nir", {0.0, 0.015}},
    };
    cfg.axes = LutAxes::default_grid();
    return cfg;
}

void validate(const PipelineConfig& cfg) {
    if (cfg.bands.empty()) throw ConfigError("config declares no bands");
    for (const auto& b : cfg.bands) validate(b);
    validate(cfg.aerosol);
    validate(cfg.axes);
    if (cfg.chip_window < 1 || cfg.chip_stride < 1)
        throw ConfigError("chip window and stride must be positive");
    if (!(cfg.tau > 0.0 && cfg.tau < 1.0)) throw ConfigError("tau must be in (0, 1)");
    if (cfg.workers < 0) throw ConfigError("workers must be >= 0");
}

const BandDefinition& band_by_name(const PipelineConfig& cfg, const std::string& name) {
    auto it = std::find_if(cfg.bands.begin(), cfg.bands.end(),
                           [&](const BandDefinition& b) { return b.name == name; });
    if (it == cfg.bands.end()) throw ConfigError("unknown band '" + name + "'");
    return *it;
}

const GasCoefficients& gas_for_band(const PipelineConfig& cfg, const std::string& band_name) {
    auto it = cfg.gas.find(band_name);
    if (it == cfg.gas.end())
        throw ConfigError("no gas absorption coefficients configured for band '" + band_name +
                          "'");
    return it->second;
}

namespace {

void axes_from_json(const json& j, LutAxes& axes) {
    for (int i = 0; i < LutAxes::kAxisCount; ++i)
        if (j.contains(LutAxes::kAxisNames[i]))
            j.at(LutAxes::kAxisNames[i]).get_to(axes.axis(i));
}

json axes_to_json(const LutAxes& axes) {
    json j = json::object();
    for (int i = 0; i < LutAxes::kAxisCount; ++i) j[LutAxes::kAxisNames[i]] = axes.axis(i);
    return j;
}

void constants_from_json(const json& j, RtConstants& c) {
    auto get = [&](const char* key, double& field) {
        if (j.contains(key)) j.at(key).get_to(field);
    };
    get("rayleigh_a", c.rayleigh_a);
    get("rayleigh_b", c.rayleigh_b);
    get("rayleigh_c", c.rayleigh_c);
    get("pressure_scale_height_km", c.pressure_scale_height_km);
    get("diffuse_rayleigh", c.diffuse_rayleigh);
    get("diffuse_aerosol", c.diffuse_aerosol);
    get("salbedo_rayleigh", c.salbedo_rayleigh);
    get("salbedo_aerosol", c.salbedo_aerosol);
    get("salbedo_cap", c.salbedo_cap);
    get("min_mu_product", c.min_mu_product);
}

json constants_to_json(const RtConstants& c) {
    return json{{"rayleigh_a", c.rayleigh_a},
                {"rayleigh_b", c.rayleigh_b},
                {"rayleigh_c", c.rayleigh_c},
                {"pressure_scale_height_km", c.pressure_scale_height_km},
                {"diffuse_rayleigh", c.diffuse_rayleigh},
                {"diffuse_aerosol", c.diffuse_aerosol},
                {"salbedo_rayleigh", c.salbedo_rayleigh},
                {"salbedo_aerosol", c.salbedo_aerosol},
                {"salbedo_cap", c.salbedo_cap},
                {"min_mu_product", c.min_mu_product}};
}

}  // namespace

PipelineConfig load_config(const std::filesystem::path& path) {
    const json doc = load_json_file(path);
    PipelineConfig cfg = default_config();
    try {
        if (doc.contains("bands")) doc.at("bands").get_to(cfg.bands);
        if (doc.contains("aerosol")) doc.at("aerosol").get_to(cfg.aerosol);
        if (doc.contains("gas")) {
            cfg.gas.clear();
            for (const auto& [name, jg] : doc.at("gas").items())
                cfg.gas[name] = jg.get<GasCoefficients>();
        }
        if (doc.contains("constants")) constants_from_json(doc.at("constants"), cfg.constants);
        if (doc.contains("lut_axes")) axes_from_json(doc.at("lut_axes"), cfg.axes);
        if (doc.contains("chip_window")) doc.at("chip_window").get_to(cfg.chip_window);
        if (doc.contains("chip_stride")) doc.at("chip_stride").get_to(cfg.chip_stride);
        if (doc.contains("tau")) doc.at("tau").get_to(cfg.tau);
        if (doc.contains("clamp_negative")) doc.at("clamp_negative").get_to(cfg.clamp_negative);
        if (doc.contains("workers")) doc.at("workers").get_to(cfg.workers);
    } catch (const json::exception& e) {
        throw ConfigError("bad config " + path.string() + ": " + e.what());
    }
    validate(cfg);
    return cfg;
}

void save_config(const PipelineConfig& cfg, const std::filesystem::path& path) {
    json doc{{"bands", cfg.bands},
             {"aerosol", cfg.aerosol},
             {"constants", constants_to_json(cfg.constants)},
             {"lut_axes", axes_to_json(cfg.axes)},
             {"chip_window", cfg.chip_window},
             {"chip_stride", cfg.chip_stride},
             {"tau", cfg.tau},
             {"clamp_negative", cfg.clamp_negative},
             {"workers", cfg.workers}};
    json jgas = json::object();
    for (const auto& [name, g] : cfg.gas) jgas[name] = g;
    doc["gas"] = jgas;
    save_json_file(doc, path);
}

}  // namespace ardc
