#ifndef ARDC_LUT_HPP
#define ARDC_LUT_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ardc/rt.hpp"

namespace ardc {

/// Grid axes of the coefficient table, in the fixed order
/// (theta_s, theta_v, delta_phi, aot550, water_vapour, ozone, elevation).
/// Each axis is strictly increasing; a single-node axis pins that dimension.
struct LutAxes {
    static constexpr int kAxisCount = 7;
    static const std::array<const char*, kAxisCount> kAxisNames;

    std::vector<double> theta_s;
    std::vector<double> theta_v;
    std::vector<double> delta_phi;
    std::vector<double> aot550;
    std::vector<double> water_vapour;
    std::vector<double> ozone;
    std::vector<double> elevation;

    const std::vector<double>& axis(int i) const;
    std::vector<double>& axis(int i);
    std::size_t node_count() const;

    /// Grid defaults spanning typical acquisition conditions (~118k nodes).
    static LutAxes default_grid();
};

void validate(const LutAxes& axes);

/// Dense table of CorrectionCoefficients over LutAxes, one table per band.
/// Values are row-major in the axis order above. The provenance digest hashes
/// the forward-model configuration that filled the table.
struct LutTable {
    LutAxes axes;
    BandDefinition band;
    std::uint64_t provenance = 0;
    std::vector<CorrectionCoefficients> values;

    std::size_t flat_index(const std::array<std::size_t, LutAxes::kAxisCount>& idx) const;
    const CorrectionCoefficients& at(
        const std::array<std::size_t, LutAxes::kAxisCount>& idx) const;
};

/// Digest of the forward-model configuration (aerosol model, gas coefficients,
/// analytic constants); FNV-1a over the canonical byte layout.
std::uint64_t forward_config_digest(const AerosolModel& model, const GasCoefficients& gas,
                                    const RtConstants& c);

/// Fill every node with forward_coefficients. Nodes are independent; `workers`
/// caps parallelism (0 = hardware concurrency). Deterministic.
LutTable build_lut(const BandDefinition& band, const LutAxes& axes, const AerosolModel& model,
                   const GasCoefficients& gas, const RtConstants& c = {}, int workers = 0);

struct InterpolationResult {
    CorrectionCoefficients coeffs;
    bool clamped = false;  // set when the query was clamped to the hull
};

/// Interpolation coordinate for one axis: the secant of the angle for the two
/// zenith axes (path-length metric), the raw value elsewhere.
double lut_axis_coordinate(int axis, double value);

/// Multilinear interpolation over all non-pinned axes in the transformed
/// coordinates; transmittance fields blend in log space, path reflectance and
/// spherical albedo in value space. Exact at grid nodes. With `clamp` disabled
/// an out-of-hull query throws naming the offending axis.
InterpolationResult interpolate(const LutTable& table, const AcquisitionGeometry& geom,
                                const AtmosphereState& atmos, bool clamp = false);

/// Binary persistence: fixed magic, version, axis descriptors, then
/// little-endian doubles, four per node. load(save(t)) == t bit-exactly.
void save_lut(const LutTable& table, const std::filesystem::path& path);
LutTable load_lut(const std::filesystem::path& path);

}  // namespace ardc

#endif
