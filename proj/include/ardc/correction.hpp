#ifndef ARDC_CORRECTION_HPP
#define ARDC_CORRECTION_HPP

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ardc/lut.hpp"
#include "ardc/raster.hpp"
#include "ardc/rt.hpp"

namespace ardc {

struct RadianceSample {
    double radiance = 0.0;
    bool saturated = false;
};

/// Linear calibration L = gain * dn + offset. DN above the sensor range is
/// clamped and flagged.
RadianceSample dn_to_radiance(unsigned dn, const BandDefinition& band, int bit_depth = 11);

/// Apparent reflectance rho* = pi * L * d^2 / (F0 * mu_s).
double radiance_to_toa_reflectance(double radiance, const BandDefinition& band,
                                   const RadiometricContext& ctx);

/// Algebraic inversion of forward_toa. Empty result means the pixel is
/// nonphysical (1 + S*y <= 0) and should be recorded as no-data.
std::optional<double> invert_boa(double rho_star, const CorrectionCoefficients& coeffs);

enum class NegativePolicy { Keep, ClampToZero };

struct BandStatistics {
    double min = 0.0;
    double mean = 0.0;
    double max = 0.0;
};

struct BandReport {
    std::string band;
    CorrectionCoefficients coefficients;
    bool hull_clamped = false;  // LUT query clamped to the axis hull
    long long negative = 0;
    long long clamped = 0;
    long long saturated = 0;
    long long nodata = 0;
    BandStatistics toa;
    BandStatistics boa;
};

struct CorrectionReport {
    std::vector<BandReport> bands;
    NegativePolicy policy = NegativePolicy::Keep;
};

void to_json(nlohmann::json& j, const CorrectionReport& r);

struct CorrectionResult {
    RasterScene boa;  // float32 surface reflectance, nodata sentinel preserved
    CorrectionReport report;
};

/// Full DN -> radiance -> TOA -> BOA pixel pipeline with one interpolated
/// coefficient set per band (scene-constant geometry/atmosphere). Parallel
/// over row blocks; output is independent of the worker count.
CorrectionResult correct_scene(const RasterScene& scene, const RadiometricContext& ctx,
                               const std::vector<LutTable>& tables,
                               NegativePolicy policy = NegativePolicy::Keep, int workers = 0);

}  // namespace ardc

#endif
