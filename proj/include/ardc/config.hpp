#ifndef ARDC_CONFIG_HPP
#define ARDC_CONFIG_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ardc/lut.hpp"
#include "ardc/rt.hpp"

namespace ardc {

/// Whole-pipeline configuration: sensor band table, aerosol model, gaseous
/// absorption coefficients per band, LUT axes, chipping and evaluation knobs.
/// A JSON config file overrides any subset of the defaults; CLI flags win
/// over the file.
struct PipelineConfig {
    std::vector<BandDefinition> bands;
    AerosolModel aerosol;
    std::map<std::string, GasCoefficients> gas;
    RtConstants constants;
    LutAxes axes;
    int chip_window = 256;
    int chip_stride = 256;
    double tau = 0.35;
    bool clamp_negative = false;
    int workers = 0;  // 0 = hardware concurrency
};

/// Default 4-band VIS-NIR sensor table. Calibration values (gain, offset, F0)
/// are placeholders, not published sensor constants; override them with real
/// metadata for absolute work.
PipelineConfig default_config();

PipelineConfig load_config(const std::filesystem::path& path);
void save_config(const PipelineConfig& cfg, const std::filesystem::path& path);

void validate(const PipelineConfig& cfg);

const BandDefinition& band_by_name(const PipelineConfig& cfg, const std::string& name);

/// Absorption coefficients for a band; missing entry is a configuration error.
const GasCoefficients& gas_for_band(const PipelineConfig& cfg, const std::string& band_name);

}  // namespace ardc

#endif
