#ifndef ARDC_JSON_IO_HPP
#define ARDC_JSON_IO_HPP

#include <filesystem>

#include <json.hpp>

#include "ardc/rt.hpp"

// JSON bindings shared by sidecars, configuration files and reports.

namespace ardc {

void to_json(nlohmann::json& j, const BandDefinition& b);
void from_json(const nlohmann::json& j, BandDefinition& b);

void to_json(nlohmann::json& j, const AcquisitionGeometry& g);
void from_json(const nlohmann::json& j, AcquisitionGeometry& g);

void to_json(nlohmann::json& j, const AtmosphereState& a);
void from_json(const nlohmann::json& j, AtmosphereState& a);

void to_json(nlohmann::json& j, const AerosolModel& m);
void from_json(const nlohmann::json& j, AerosolModel& m);

void to_json(nlohmann::json& j, const GasCoefficients& g);
void from_json(const nlohmann::json& j, GasCoefficients& g);

void to_json(nlohmann::json& j, const RadiometricContext& c);
void from_json(const nlohmann::json& j, RadiometricContext& c);

nlohmann::json load_json_file(const std::filesystem::path& path);
void save_json_file(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace ardc

#endif
