#include "ardc/correction.hpp"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <limits>
#include <thread>

#include "ardc/errors.hpp"
#include "ardc/json_io.hpp"

namespace ardc {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

RadianceSample dn_to_radiance(unsigned dn, const BandDefinition& band, int bit_depth) {
    const unsigned max_dn = (1u << bit_depth) - 1u;
    RadianceSample out;
    if (dn > max_dn) {
        dn = max_dn;
        out.saturated = true;
    }
    out.radiance = band.gain * dn + band.offset;
    return out;
}

double radiance_to_toa_reflectance(double radiance, const BandDefinition& band,
                                   const RadiometricContext& ctx) {
    const double mu_s = ctx.geom.mu_s();
    if (!(mu_s > 0.0)) throw DomainError("non-positive solar cosine");
    const double d = ctx.earth_sun_distance;
    return kPi * radiance * d * d / (band.solar_irradiance * mu_s);
}

std::optional<double> invert_boa(double rho_star, const CorrectionCoefficients& coeffs) {
    if (!(coeffs.t_gas > 0.0) || !(coeffs.t_scatter_total > 0.0))
        throw DomainError("invert_boa requires positive transmittances");
    const double y = (rho_star / coeffs.t_gas - coeffs.rho_path) / coeffs.t_scatter_total;
    const double denom = 1.0 + coeffs.spherical_albedo * y;
    if (!(denom > 0.0)) return std::nullopt;
    return y / denom;
}

namespace {

void to_json_stats(nlohmann::json& j, const BandStatistics& s) {
    j = nlohmann::json{{"min", s.min}, {"mean", s.mean}, {"max", s.max}};
}

struct BlockStats {
    long long negative = 0;
    long long clamped = 0;
    long long saturated = 0;
    long long nodata = 0;
    long long valid = 0;
    double toa_min = std::numeric_limits<double>::infinity();
    double toa_max = -std::numeric_limits<double>::infinity();
    double toa_sum = 0.0;
    double boa_min = std::numeric_limits<double>::infinity();
    double boa_max = -std::numeric_limits<double>::infinity();
    double boa_sum = 0.0;

    void merge(const BlockStats& o) {
        negative += o.negative;
        clamped += o.clamped;
        saturated += o.saturated;
        nodata += o.nodata;
        valid += o.valid;
        toa_min = std::min(toa_min, o.toa_min);
        toa_max = std::max(toa_max, o.toa_max);
        toa_sum += o.toa_sum;
        boa_min = std::min(boa_min, o.boa_min);
        boa_max = std::max(boa_max, o.boa_max);
        boa_sum += o.boa_sum;
    }
};

}  // namespace

void to_json(nlohmann::json& j, const CorrectionReport& r) {
    j = nlohmann::json::object();
    j["policy"] = r.policy == NegativePolicy::Keep ? "keep" : "clamp";
    j["bands"] = nlohmann::json::array();
    for (const auto& b : r.bands) {
        nlohmann::json jb{{"band", b.band},
                          {"hull_clamped", b.hull_clamped},
                          {"counts",
                           {{"negative", b.negative},
                            {"clamped", b.clamped},
                            {"saturated", b.saturated},
                            {"nodata", b.nodata}}}};
        jb["coefficients"] = {{"t_gas", b.coefficients.t_gas},
                              {"rho_path", b.coefficients.rho_path},
                              {"t_scatter_total", b.coefficients.t_scatter_total},
                              {"spherical_albedo", b.coefficients.spherical_albedo}};
        to_json_stats(jb["toa"], b.toa);
        to_json_stats(jb["boa"], b.boa);
        j["bands"].push_back(std::move(jb));
    }
}

CorrectionResult correct_scene(const RasterScene& scene, const RadiometricContext& ctx,
                               const std::vector<LutTable>& tables, NegativePolicy policy,
                               int workers) {
    validate(scene);
    validate(ctx);
    if (static_cast<std::size_t>(scene.bands) != ctx.bands.size())
        throw ConfigError("scene band count " + std::to_string(scene.bands) +
                          " does not match context band count " +
                          std::to_string(ctx.bands.size()));

    // one interpolated coefficient set per band, fixed before fan-out
    std::vector<CorrectionCoefficients> coeffs(ctx.bands.size());
    std::vector<bool> hull_clamped(ctx.bands.size(), false);
    for (std::size_t b = 0; b < ctx.bands.size(); ++b) {
        const auto& name = ctx.bands[b].name;
        auto it = std::find_if(tables.begin(), tables.end(),
                               [&](const LutTable& t) { return t.band.name == name; });
        if (it == tables.end()) throw ConfigError("no LUT table for band '" + name + "'");
        auto res = interpolate(*it, ctx.geom, ctx.atmos, /*clamp=*/true);
        coeffs[b] = res.coeffs;
        hull_clamped[b] = res.clamped;
    }

    CorrectionResult out;
    RasterScene& boa = out.boa;
    boa.width = scene.width;
    boa.height = scene.height;
    boa.bands = scene.bands;
    boa.sample_type = SampleType::F32;
    boa.origin_x = scene.origin_x;
    boa.origin_y = scene.origin_y;
    boa.pixel_size_x = scene.pixel_size_x;
    boa.pixel_size_y = scene.pixel_size_y;
    boa.nodata = -9999.0;
    boa.band_names = scene.band_names;
    boa.context = ctx;
    boa.f32.assign(scene.sample_count(), 0.0f);

    const int max_dn = (1 << ctx.bit_depth) - 1;
    const float sentinel = static_cast<float>(boa.nodata);

    unsigned nworkers = workers > 0 ? static_cast<unsigned>(workers)
                                    : std::max(1u, std::thread::hardware_concurrency());
    const int block_rows = 64;
    const int nblocks = (scene.height + block_rows - 1) / block_rows;

    std::vector<std::vector<BlockStats>> block_stats(
        static_cast<std::size_t>(nblocks), std::vector<BlockStats>(scene.bands));

    auto process_block = [&](int block) {
        const int row0 = block * block_rows;
        const int row1 = std::min(scene.height, row0 + block_rows);
        for (int b = 0; b < scene.bands; ++b) {
            const auto& band = ctx.bands[b];
            const auto& c = coeffs[b];
            BlockStats& st = block_stats[block][b];
            const std::size_t base = scene.band_offset(b);
            for (int y = row0; y < row1; ++y) {
                for (int x = 0; x < scene.width; ++x) {
                    const std::size_t i = base + static_cast<std::size_t>(y) * scene.width + x;
                    double dn;
                    if (scene.sample_type == SampleType::U16) {
                        dn = scene.u16[i];
                    } else {
                        dn = scene.f32[i];
                        if (dn == scene.nodata) {
                            boa.f32[i] = sentinel;
                            ++st.nodata;
                            continue;
                        }
                    }
                    if (dn > max_dn) {
                        dn = max_dn;
                        ++st.saturated;
                    }
                    const double radiance = band.gain * dn + band.offset;
                    const double toa = radiance_to_toa_reflectance(radiance, band, ctx);
                    const auto boa_val = invert_boa(toa, c);
                    if (!boa_val) {
                        boa.f32[i] = sentinel;
                        ++st.nodata;
                        continue;
                    }
                    double rho_s = *boa_val;
                    if (rho_s < 0.0) {
                        ++st.negative;
                        if (policy == NegativePolicy::ClampToZero) {
                            rho_s = 0.0;
                            ++st.clamped;
                        }
                    }
                    boa.f32[i] = static_cast<float>(rho_s);
                    ++st.valid;
                    st.toa_min = std::min(st.toa_min, toa);
                    st.toa_max = std::max(st.toa_max, toa);
                    st.toa_sum += toa;
                    st.boa_min = std::min(st.boa_min, rho_s);
                    st.boa_max = std::max(st.boa_max, rho_s);
                    st.boa_sum += rho_s;
                }
            }
        }
    };

    if (nworkers <= 1 || nblocks <= 1) {
        for (int block = 0; block < nblocks; ++block) process_block(block);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < std::min<unsigned>(nworkers, nblocks); ++w) {
            pool.emplace_back([&] {
                for (int block = next.fetch_add(1); block < nblocks; block = next.fetch_add(1))
                    process_block(block);
            });
        }
        for (auto& t : pool) t.join();
    }

    out.report.policy = policy;
    for (int b = 0; b < scene.bands; ++b) {
        // merge in block index order so stats do not depend on worker count
        BlockStats total;
        for (int block = 0; block < nblocks; ++block) total.merge(block_stats[block][b]);
        BandReport rep;
        rep.band = ctx.bands[b].name;
        rep.coefficients = coeffs[b];
        rep.hull_clamped = hull_clamped[b];
        rep.negative = total.negative;
        rep.clamped = total.clamped;
        rep.saturated = total.saturated;
        rep.nodata = total.nodata;
        if (total.valid > 0) {
            rep.toa = {total.toa_min, total.toa_sum / total.valid, total.toa_max};
            rep.boa = {total.boa_min, total.boa_sum / total.valid, total.boa_max};
        }
        out.report.bands.push_back(std::move(rep));
    }
    return out;
}

}  // namespace ardc
