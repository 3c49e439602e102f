#include "ardc/lut.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <thread>

#include "ardc/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "LUT container is little-endian; big-endian hosts need byte swapping");

namespace ardc {

namespace {

constexpr char kMagic[8] = {'A', 'R', 'D', 'L', 'U', 'T', '1', '\n'};
constexpr std::uint32_t kVersion = 1;

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a_doubles(std::uint64_t h, const double* v, std::size_t n) {
    return fnv1a(h, v, n * sizeof(double));
}

}  // namespace

const std::array<const char*, LutAxes::kAxisCount> LutAxes::kAxisNames = {
    "theta_s", "theta_v", "delta_phi", "aot550", "water_vapour", "ozone", "elevation"};

const std::vector<double>& LutAxes::axis(int i) const {
    switch (i) {
        case 0: return theta_s;
        case 1: return theta_v;
        case 2: return delta_phi;
        case 3: return aot550;
        case 4: return water_vapour;
        case 5: return ozone;
        case 6: return elevation;
    }
    throw std::out_of_range("axis index");
}

std::vector<double>& LutAxes::axis(int i) {
    return const_cast<std::vector<double>&>(static_cast<const LutAxes*>(this)->axis(i));
}

std::size_t LutAxes::node_count() const {
    std::size_t n = 1;
    for (int i = 0; i < kAxisCount; ++i) n *= axis(i).size();
    return n;
}

LutAxes LutAxes::default_grid() {
    LutAxes a;
    a.theta_s = {0, 10, 20, 30, 40, 50, 60, 70};
    a.theta_v = {0, 5, 10, 15, 20, 25, 30};
    a.delta_phi = {0, 30, 60, 90, 120, 150, 180};
    a.aot550 = {0.05, 0.1, 0.2, 0.4, 0.8};
    a.water_vapour = {0.5, 1, 2, 3, 4};
    a.ozone = {250, 300, 350};
    a.elevation = {0, 0.5, 1, 2};
    return a;
}

void validate(const LutAxes& axes) {
    for (int i = 0; i < LutAxes::kAxisCount; ++i) {
        const auto& ax = axes.axis(i);
        if (ax.empty())
            throw ConfigError(std::string("LUT axis '") + LutAxes::kAxisNames[i] + "' is empty");
        for (std::size_t k = 1; k < ax.size(); ++k)
            if (!(ax[k] > ax[k - 1]))
                throw ConfigError(std::string("LUT axis '") + LutAxes::kAxisNames[i] +
                                  "' is not strictly increasing");
    }
}

std::size_t LutTable::flat_index(
    const std::array<std::size_t, LutAxes::kAxisCount>& idx) const {
    std::size_t flat = 0;
    for (int i = 0; i < LutAxes::kAxisCount; ++i) flat = flat * axes.axis(i).size() + idx[i];
    return flat;
}

const CorrectionCoefficients& LutTable::at(
    const std::array<std::size_t, LutAxes::kAxisCount>& idx) const {
    return values[flat_index(idx)];
}

std::uint64_t forward_config_digest(const AerosolModel& model, const GasCoefficients& gas,
                                    const RtConstants& c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const double fields[] = {model.angstrom_exponent,
                             model.single_scattering_albedo,
                             model.asymmetry_g,
                             gas.k_ozone,
                             gas.k_water,
                             c.rayleigh_a,
                             c.rayleigh_b,
                             c.rayleigh_c,
                             c.pressure_scale_height_km,
                             c.diffuse_rayleigh,
                             c.diffuse_aerosol,
                             c.salbedo_rayleigh,
                             c.salbedo_aerosol,
                             c.salbedo_cap};
    return fnv1a_doubles(h, fields, sizeof(fields) / sizeof(fields[0]));
}

LutTable build_lut(const BandDefinition& band, const LutAxes& axes, const AerosolModel& model,
                   const GasCoefficients& gas, const RtConstants& c, int workers) {
    validate(band);
    validate(axes);
    validate(model);

    LutTable table;
    table.axes = axes;
    table.band = band;
    table.provenance = forward_config_digest(model, gas, c);
    const std::size_t n = axes.node_count();
    table.values.resize(n);

    auto fill_range = [&](std::size_t begin, std::size_t end) {
        std::array<std::size_t, LutAxes::kAxisCount> idx{};
        // decode the first flat index
        std::size_t rem = begin;
        for (int i = LutAxes::kAxisCount - 1; i >= 0; --i) {
            idx[i] = rem % axes.axis(i).size();
            rem /= axes.axis(i).size();
        }
        for (std::size_t flat = begin; flat < end; ++flat) {
            AcquisitionGeometry geom{axes.theta_s[idx[0]], axes.theta_v[idx[1]],
                                     axes.delta_phi[idx[2]]};
            AtmosphereState atmos{axes.aot550[idx[3]], axes.water_vapour[idx[4]],
                                  axes.ozone[idx[5]], axes.elevation[idx[6]]};
            try {
                table.values[flat] = forward_coefficients(band, geom, atmos, model, gas, c);
            } catch (const std::exception& e) {
                std::string node = "(";
                for (int i = 0; i < LutAxes::kAxisCount; ++i)
                    node += std::string(LutAxes::kAxisNames[i]) + "=" +
                            std::to_string(axes.axis(i)[idx[i]]) +
                            (i + 1 < LutAxes::kAxisCount ? ", " : ")");
                throw DomainError("LUT build failed at node " + node + ": " + e.what());
            }
            // advance the mixed-radix counter
            for (int i = LutAxes::kAxisCount - 1; i >= 0; --i) {
                if (++idx[i] < axes.axis(i).size()) break;
                idx[i] = 0;
            }
        }
    };

    unsigned nworkers = workers > 0 ? static_cast<unsigned>(workers)
                                    : std::max(1u, std::thread::hardware_concurrency());
    nworkers = std::min<std::size_t>(nworkers, n);
    if (nworkers <= 1) {
        fill_range(0, n);
    } else {
        std::vector<std::thread> pool;
        std::exception_ptr first_error;
        std::mutex err_mutex;
        const std::size_t chunk = (n + nworkers - 1) / nworkers;
        for (unsigned w = 0; w < nworkers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back([&, begin, end] {
                try {
                    fill_range(begin, end);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }
    return table;
}

double lut_axis_coordinate(int axis, double value) {
    // zenith axes interpolate against the secant of the angle, matching the
    // 1/mu dependence of the path length
    if (axis == 0 || axis == 1) return 1.0 / std::cos(value * 0.017453292519943295);
    return value;
}

InterpolationResult interpolate(const LutTable& table, const AcquisitionGeometry& geom,
                                const AtmosphereState& atmos, bool clamp) {
    const std::array<double, LutAxes::kAxisCount> query = {
        geom.theta_s,      geom.theta_v, geom.delta_phi, atmos.aot550,
        atmos.water_vapour, atmos.ozone,  atmos.elevation};

    std::array<std::size_t, LutAxes::kAxisCount> lo{};
    std::array<double, LutAxes::kAxisCount> frac{};
    bool clamped = false;

    for (int i = 0; i < LutAxes::kAxisCount; ++i) {
        const auto& ax = table.axes.axis(i);
        double q = query[i];
        if (ax.size() == 1) {
            lo[i] = 0;
            frac[i] = 0.0;
            continue;
        }
        if (q < ax.front() || q > ax.back()) {
            if (!clamp)
                throw DomainError(std::string("LUT query outside hull on axis '") +
                                  LutAxes::kAxisNames[i] + "'");
            q = std::clamp(q, ax.front(), ax.back());
            clamped = true;
        }
        auto it = std::upper_bound(ax.begin(), ax.end(), q);
        std::size_t hi = std::min<std::size_t>(it - ax.begin(), ax.size() - 1);
        lo[i] = std::max<std::size_t>(hi, 1) - 1;
        frac[i] = (lut_axis_coordinate(i, q) - lut_axis_coordinate(i, ax[lo[i]])) /
                  (lut_axis_coordinate(i, ax[lo[i] + 1]) - lut_axis_coordinate(i, ax[lo[i]]));
    }

    // transmittances are log-linear in optical depth and path secant, so they
    // are blended in log space; path reflectance and spherical albedo are
    // close to linear in the transformed coordinates and blend directly
    double log_t_gas = 0.0, log_t_scatter = 0.0, rho_path = 0.0, salbedo = 0.0;
    std::vector<int> free_axes;
    for (int i = 0; i < LutAxes::kAxisCount; ++i)
        if (table.axes.axis(i).size() > 1) free_axes.push_back(i);

    const std::size_t corners = std::size_t{1} << free_axes.size();
    std::array<std::size_t, LutAxes::kAxisCount> idx = lo;
    for (std::size_t corner = 0; corner < corners; ++corner) {
        double w = 1.0;
        for (std::size_t k = 0; k < free_axes.size(); ++k) {
            const int ax = free_axes[k];
            const bool upper = (corner >> k) & 1u;
            idx[ax] = lo[ax] + (upper ? 1 : 0);
            w *= upper ? frac[ax] : 1.0 - frac[ax];
        }
        if (w == 0.0) continue;
        const CorrectionCoefficients& node = table.at(idx);
        log_t_gas += w * std::log(node.t_gas);
        log_t_scatter += w * std::log(node.t_scatter_total);
        rho_path += w * node.rho_path;
        salbedo += w * node.spherical_albedo;
    }
    return {{std::exp(log_t_gas), rho_path, std::exp(log_t_scatter), salbedo}, clamped};
}

namespace {

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::istream& in, T& v, const std::filesystem::path& path) {
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw IoError("truncated LUT file: " + path.string());
}

}  // namespace

void save_lut(const LutTable& table, const std::filesystem::path& path) {
    validate(table.axes);
    if (table.values.size() != table.axes.node_count())
        throw DomainError("LUT value count does not match axis product");

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open LUT file for writing: " + path.string());
    out.write(kMagic, sizeof(kMagic));
    write_pod(out, kVersion);
    write_pod(out, table.provenance);

    const auto name_len = static_cast<std::uint32_t>(table.band.name.size());
    write_pod(out, name_len);
    out.write(table.band.name.data(), name_len);
    const double band_fields[] = {table.band.lambda_lo,  table.band.lambda_hi,
                                  table.band.lambda_center, table.band.gain,
                                  table.band.offset,     table.band.solar_irradiance};
    out.write(reinterpret_cast<const char*>(band_fields), sizeof(band_fields));

    for (int i = 0; i < LutAxes::kAxisCount; ++i) {
        const auto& ax = table.axes.axis(i);
        write_pod(out, static_cast<std::uint32_t>(ax.size()));
        out.write(reinterpret_cast<const char*>(ax.data()),
                  static_cast<std::streamsize>(ax.size() * sizeof(double)));
    }
    out.write(reinterpret_cast<const char*>(table.values.data()),
              static_cast<std::streamsize>(table.values.size() * sizeof(CorrectionCoefficients)));
    if (!out) throw IoError("write failed: " + path.string());
}

LutTable load_lut(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open LUT file: " + path.string());

    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw IoError("not a LUT file (bad magic): " + path.string());
    std::uint32_t version = 0;
    read_pod(in, version, path);
    if (version != kVersion)
        throw IoError("incompatible LUT version " + std::to_string(version) + ": " +
                      path.string());

    LutTable table;
    read_pod(in, table.provenance, path);

    std::uint32_t name_len = 0;
    read_pod(in, name_len, path);
    table.band.name.resize(name_len);
    in.read(table.band.name.data(), name_len);
    if (!in) throw IoError("truncated LUT file: " + path.string());
    double band_fields[6];
    in.read(reinterpret_cast<char*>(band_fields), sizeof(band_fields));
    if (!in) throw IoError("truncated LUT file: " + path.string());
    table.band.lambda_lo = band_fields[0];
    table.band.lambda_hi = band_fields[1];
    table.band.lambda_center = band_fields[2];
    table.band.gain = band_fields[3];
    table.band.offset = band_fields[4];
    table.band.solar_irradiance = band_fields[5];

    for (int i = 0; i < LutAxes::kAxisCount; ++i) {
        std::uint32_t n = 0;
        read_pod(in, n, path);
        auto& ax = table.axes.axis(i);
        ax.resize(n);
        in.read(reinterpret_cast<char*>(ax.data()),
                static_cast<std::streamsize>(n * sizeof(double)));
        if (!in) throw IoError("truncated LUT file: " + path.string());
    }
    validate(table.axes);

    const std::size_t n = table.axes.node_count();
    table.values.resize(n);
    in.read(reinterpret_cast<char*>(table.values.data()),
            static_cast<std::streamsize>(n * sizeof(CorrectionCoefficients)));
    if (!in) throw IoError("truncated LUT file: " + path.string());
    char extra;
    if (in.read(&extra, 1)) throw IoError("trailing bytes in LUT file: " + path.string());
    return table;
}

}  // namespace ardc
