#include "ardc/rt.hpp"

#include <cmath>
#include <ctime>

#include "ardc/errors.hpp"

namespace ardc {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;
}  // namespace

void validate(const BandDefinition& band) {
    if (band.name.empty())
        throw ConfigError("band definition has no name");
    if (!(band.lambda_lo > 0.0 && band.lambda_lo < band.lambda_center &&
          band.lambda_center < band.lambda_hi))
        throw ConfigError("band '" + band.name + "': wavelengths must satisfy 0 < lo < center < hi");
    if (!(band.gain > 0.0))
        throw ConfigError("band '" + band.name + "': gain must be positive");
    if (!(band.solar_irradiance > 0.0))
        throw ConfigError("band '" + band.name + "': solar irradiance must be positive");
}

double AcquisitionGeometry::mu_s() const { return std::cos(theta_s * kDegToRad); }
double AcquisitionGeometry::mu_v() const { return std::cos(theta_v * kDegToRad); }

void validate(const AcquisitionGeometry& geom) {
    if (!(geom.theta_s >= 0.0 && geom.theta_s < 90.0))
        throw DomainError("solar zenith out of [0, 90)");
    if (!(geom.theta_v >= 0.0 && geom.theta_v < 90.0))
        throw DomainError("view zenith out of [0, 90)");
    if (!(geom.delta_phi >= 0.0 && geom.delta_phi <= 180.0))
        throw DomainError("relative azimuth out of [0, 180]");
}

void validate(const AtmosphereState& atmos) {
    auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
    if (!ok(atmos.aot550) || !ok(atmos.water_vapour) || !ok(atmos.ozone) || !ok(atmos.elevation))
        throw DomainError("atmosphere state fields must be finite and non-negative");
}

void validate(const AerosolModel& model) {
    if (!(model.single_scattering_albedo > 0.0 && model.single_scattering_albedo <= 1.0))
        throw ConfigError("aerosol single-scattering albedo out of (0, 1]");
    if (!(model.asymmetry_g > -1.0 && model.asymmetry_g < 1.0))
        throw ConfigError("aerosol asymmetry parameter out of (-1, 1)");
    if (!std::isfinite(model.angstrom_exponent))
        throw ConfigError("aerosol Angstrom exponent not finite");
}

void validate(const CorrectionCoefficients& c) {
    if (!(std::isfinite(c.t_gas) && c.t_gas > 0.0 && c.t_gas <= 1.0))
        throw DomainError("gaseous transmittance out of (0, 1]");
    if (!(std::isfinite(c.rho_path) && c.rho_path >= 0.0 && c.rho_path < 1.0))
        throw DomainError("path reflectance out of [0, 1)");
    if (!(std::isfinite(c.t_scatter_total) && c.t_scatter_total > 0.0 && c.t_scatter_total <= 1.0))
        throw DomainError("scattering transmittance out of (0, 1]");
    if (!(std::isfinite(c.spherical_albedo) && c.spherical_albedo >= 0.0 &&
          c.spherical_albedo < 1.0))
        throw DomainError("spherical albedo out of [0, 1)");
}

double rayleigh_optical_depth(const BandDefinition& band, double elevation_km,
                              const RtConstants& c) {
    const double lambda = band.lambda_center;
    if (!(lambda >= 0.3 && lambda <= 3.0))
        throw DomainError("band '" + band.name + "': wavelength outside [0.3, 3.0] um");
    const double l2 = lambda * lambda;
    const double l4 = l2 * l2;
    const double tau_sea = c.rayleigh_a / l4 * (1.0 + c.rayleigh_b / l2 + c.rayleigh_c / l4);
    return tau_sea * std::exp(-elevation_km / c.pressure_scale_height_km);
}

double aerosol_optical_depth(const BandDefinition& band, const AtmosphereState& atmos,
                             const AerosolModel& model) {
    return atmos.aot550 * std::pow(band.lambda_center / 0.55, -model.angstrom_exponent);
}

double scattering_angle_cos(const AcquisitionGeometry& geom) {
    const double ts = geom.theta_s * kDegToRad;
    const double tv = geom.theta_v * kDegToRad;
    const double dphi = geom.delta_phi * kDegToRad;
    return -std::cos(ts) * std::cos(tv) + std::sin(ts) * std::sin(tv) * std::cos(dphi);
}

double rayleigh_phase(double cos_theta) {
    return 0.75 * (1.0 + cos_theta * cos_theta);
}

double henyey_greenstein_phase(double cos_theta, double g) {
    const double denom = 1.0 + g * g - 2.0 * g * cos_theta;
    return (1.0 - g * g) / (denom * std::sqrt(denom));
}

double path_reflectance(const BandDefinition& band, const AcquisitionGeometry& geom,
                        const AtmosphereState& atmos, const AerosolModel& model,
                        const RtConstants& c) {
    const double mu_prod = geom.mu_s() * geom.mu_v();
    if (mu_prod < c.min_mu_product)
        throw DomainError("degenerate geometry: mu_s * mu_v below floor");
    const double tau_r = rayleigh_optical_depth(band, atmos.elevation, c);
    const double tau_a = aerosol_optical_depth(band, atmos, model);
    const double cos_theta = scattering_angle_cos(geom);
    const double molecular = tau_r * rayleigh_phase(cos_theta);
    const double aerosol = model.single_scattering_albedo * tau_a *
                           henyey_greenstein_phase(cos_theta, model.asymmetry_g);
    return (molecular + aerosol) / (4.0 * mu_prod);
}

double scattering_transmittance(double tau_r, double tau_a, double mu, const RtConstants& c) {
    if (!(mu > 0.0))
        throw DomainError("scattering transmittance requires mu > 0");
    if (tau_r < 0.0 || tau_a < 0.0)
        throw DomainError("optical depths must be non-negative");
    const double direct = -(tau_r + tau_a) / mu;
    const double diffuse = (c.diffuse_rayleigh * tau_r + c.diffuse_aerosol * tau_a) / mu;
    return std::exp(direct) * std::exp(diffuse);
}

double gaseous_transmittance(const GasCoefficients& gas, const AcquisitionGeometry& geom,
                             const AtmosphereState& atmos) {
    const double airmass = 1.0 / geom.mu_s() + 1.0 / geom.mu_v();
    const double ozone = std::exp(-gas.k_ozone * atmos.ozone * airmass);
    const double water = std::exp(-gas.k_water * std::sqrt(atmos.water_vapour * airmass));
    return ozone * water;
}

double spherical_albedo(double tau_r, double tau_a, const RtConstants& c) {
    if (tau_r < 0.0 || tau_a < 0.0)
        throw DomainError("optical depths must be non-negative");
    return std::min(c.salbedo_rayleigh * tau_r + c.salbedo_aerosol * tau_a, c.salbedo_cap);
}

CorrectionCoefficients forward_coefficients(const BandDefinition& band,
                                            const AcquisitionGeometry& geom,
                                            const AtmosphereState& atmos,
                                            const AerosolModel& model,
                                            const GasCoefficients& gas,
                                            const RtConstants& c) {
    validate(geom);
    validate(atmos);
    const double tau_r = rayleigh_optical_depth(band, atmos.elevation, c);
    const double tau_a = aerosol_optical_depth(band, atmos, model);
    CorrectionCoefficients out;
    out.t_gas = gaseous_transmittance(gas, geom, atmos);
    out.rho_path = path_reflectance(band, geom, atmos, model, c);
    out.t_scatter_total = scattering_transmittance(tau_r, tau_a, geom.mu_s(), c) *
                          scattering_transmittance(tau_r, tau_a, geom.mu_v(), c);
    out.spherical_albedo = spherical_albedo(tau_r, tau_a, c);
    validate(out);
    return out;
}

double forward_toa(double rho_s, const CorrectionCoefficients& coeffs) {
    const double denom = 1.0 - coeffs.spherical_albedo * rho_s;
    if (!(denom > 0.0))
        throw DomainError("nonphysical surface: 1 - S*rho_s <= 0");
    return coeffs.t_gas *
           (coeffs.rho_path + coeffs.t_scatter_total * rho_s / denom);
}

void validate(const RadiometricContext& ctx) {
    if (ctx.bands.empty())
        throw ConfigError("radiometric context has no bands");
    for (const auto& b : ctx.bands) validate(b);
    validate(ctx.geom);
    validate(ctx.atmos);
    if (!(ctx.earth_sun_distance >= 0.98 && ctx.earth_sun_distance <= 1.02))
        throw ConfigError("earth-sun distance outside [0.98, 1.02] AU");
    if (ctx.bit_depth < 1 || ctx.bit_depth > 16)
        throw ConfigError("sensor bit depth out of [1, 16]");
}

double earth_sun_distance_au(int day_of_year) {
    const double g = 2.0 * kPi * (day_of_year - 4) / 365.256;
    return 1.0 - 0.01672 * std::cos(g);
}

int day_of_year(const std::string& iso_date) {
    int y = 0, m = 0, d = 0;
    if (std::sscanf(iso_date.c_str(), "%d-%d-%d", &y, &m, &d) != 3 || m < 1 || m > 12 || d < 1 ||
        d > 31)
        throw ConfigError("bad ISO date: '" + iso_date + "'");
    static const int cum[12] = {0, 31, 59, 90, 120, 151, 181, 212, 243, 273, 304, 334};
    int doy = cum[m - 1] + d;
    const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    if (leap && m > 2) ++doy;
    return doy;
}

}  // namespace ardc
