#include "ardc/json_io.hpp"

#include <filesystem>
#include <fstream>

#include "ardc/errors.hpp"

namespace ardc {

using nlohmann::json;

void to_json(json& j, const BandDefinition& b) {
    j = json{{"name", b.name},
             {"lambda_lo", b.lambda_lo},
             {"lambda_hi", b.lambda_hi},
             {"lambda_center", b.lambda_center},
             {"gain", b.gain},
             {"offset", b.offset},
             {"solar_irradiance", b.solar_irradiance}};
}

void from_json(const json& j, BandDefinition& b) {
    j.at("name").get_to(b.name);
    j.at("lambda_lo").get_to(b.lambda_lo);
    j.at("lambda_hi").get_to(b.lambda_hi);
    j.at("lambda_center").get_to(b.lambda_center);
    j.at("gain").get_to(b.gain);
    j.at("offset").get_to(b.offset);
    j.at("solar_irradiance").get_to(b.solar_irradiance);
}

void to_json(json& j, const AcquisitionGeometry& g) {
    j = json{{"theta_s", g.theta_s}, {"theta_v", g.theta_v}, {"delta_phi", g.delta_phi}};
}

void from_json(const json& j, AcquisitionGeometry& g) {
    j.at("theta_s").get_to(g.theta_s);
    j.at("theta_v").get_to(g.theta_v);
    j.at("delta_phi").get_to(g.delta_phi);
}

void to_json(json& j, const AtmosphereState& a) {
    j = json{{"aot550", a.aot550},
             {"water_vapour", a.water_vapour},
             {"ozone", a.ozone},
             {"elevation", a.elevation}};
}

void from_json(const json& j, AtmosphereState& a) {
    j.at("aot550").get_to(a.aot550);
    j.at("water_vapour").get_to(a.water_vapour);
    j.at("ozone").get_to(a.ozone);
    j.at("elevation").get_to(a.elevation);
}

void to_json(json& j, const AerosolModel& m) {
    j = json{{"angstrom_exponent", m.angstrom_exponent},
             {"single_scattering_albedo", m.single_scattering_albedo},
             {"asymmetry_g", m.asymmetry_g}};
}

void from_json(const json& j, AerosolModel& m) {
    m = AerosolModel{};
    if (j.contains("angstrom_exponent")) j.at("angstrom_exponent").get_to(m.angstrom_exponent);
    if (j.contains("single_scattering_albedo"))
        j.at("single_scattering_albedo").get_to(m.single_scattering_albedo);
    if (j.contains("asymmetry_g")) j.at("asymmetry_g").get_to(m.asymmetry_g);
}

void to_json(json& j, const GasCoefficients& g) {
    j = json{{"k_ozone", g.k_ozone}, {"k_water", g.k_water}};
}

void from_json(const json& j, GasCoefficients& g) {
    g = GasCoefficients{};
    if (j.contains("k_ozone")) j.at("k_ozone").get_to(g.k_ozone);
    if (j.contains("k_water")) j.at("k_water").get_to(g.k_water);
}

void to_json(json& j, const RadiometricContext& c) {
    j = json{{"bands", c.bands},
             {"geometry", c.geom},
             {"atmosphere", c.atmos},
             {"acquisition_date", c.acquisition_date},
             {"earth_sun_distance", c.earth_sun_distance},
             {"bit_depth", c.bit_depth}};
}

void from_json(const json& j, RadiometricContext& c) {
    c = RadiometricContext{};
    j.at("bands").get_to(c.bands);
    j.at("geometry").get_to(c.geom);
    j.at("atmosphere").get_to(c.atmos);
    if (j.contains("acquisition_date")) j.at("acquisition_date").get_to(c.acquisition_date);
    if (j.contains("bit_depth")) j.at("bit_depth").get_to(c.bit_depth);
    if (j.contains("earth_sun_distance")) {
        j.at("earth_sun_distance").get_to(c.earth_sun_distance);
    } else if (!c.acquisition_date.empty()) {
        c.earth_sun_distance = earth_sun_distance_au(day_of_year(c.acquisition_date));
    }
}

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw IoError("bad JSON in " + path.string() + ": " + e.what());
    }
}

void save_json_file(const json& j, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace ardc
