#ifndef ARDC_RT_HPP
#define ARDC_RT_HPP

#include <string>
#include <vector>

namespace ardc {

/// Spectral band definition plus radiometric calibration. Wavelengths in
/// micrometres, gain in (W m^-2 sr^-1 um^-1)/DN, offset in W m^-2 sr^-1 um^-1,
/// solar irradiance in W m^-2 um^-1.
struct BandDefinition {
    std::string name;
    double lambda_lo = 0.0;
    double lambda_hi = 0.0;
    double lambda_center = 0.0;
    double gain = 1.0;
    double offset = 0.0;
    double solar_irradiance = 0.0;
};

void validate(const BandDefinition& band);

/// Sun/view geometry in degrees. theta_s, theta_v in [0, 90); delta_phi in
/// [0, 180], where delta_phi = 0 means sun and sensor on the same azimuth.
struct AcquisitionGeometry {
    double theta_s = 0.0;
    double theta_v = 0.0;
    double delta_phi = 0.0;

    double mu_s() const;
    double mu_v() const;
};

void validate(const AcquisitionGeometry& geom);

/// Columnar atmosphere: AOT at 550 nm (unitless), water vapour (g cm^-2),
/// ozone (Dobson units), surface elevation (km).
struct AtmosphereState {
    double aot550 = 0.0;
    double water_vapour = 0.0;
    double ozone = 0.0;
    double elevation = 0.0;
};

void validate(const AtmosphereState& atmos);

struct AerosolModel {
    double angstrom_exponent = 1.3;
    double single_scattering_albedo = 0.89;
    double asymmetry_g = 0.64;
};

void validate(const AerosolModel& model);

/// Per-band gaseous absorption coefficients. k_ozone in DU^-1 against the
/// plain airmass, k_water against sqrt(U_wv * airmass).
struct GasCoefficients {
    double k_ozone = 0.0;
    double k_water = 0.0;
};

/// The per-band solution vector of the Lambertian coupling equation:
/// gaseous transmittance, path reflectance, total (down x up) scattering
/// transmittance and spherical albedo.
struct CorrectionCoefficients {
    double t_gas = 1.0;
    double rho_path = 0.0;
    double t_scatter_total = 1.0;
    double spherical_albedo = 0.0;

    bool operator==(const CorrectionCoefficients&) const = default;
};

void validate(const CorrectionCoefficients& c);

/// Tunable constants of the analytic forward model. Defaults follow the
/// documented closed-form approximations; a higher-fidelity backend can
/// replace them without touching callers.
struct RtConstants {
    // Hansen-Travis Rayleigh depth: a * lambda^-4 * (1 + b lambda^-2 + c lambda^-4)
    double rayleigh_a = 0.008569;
    double rayleigh_b = 0.0113;
    double rayleigh_c = 0.00013;
    double pressure_scale_height_km = 8.434;
    // diffuse recovery fractions in the transmittance approximation
    double diffuse_rayleigh = 0.52;
    double diffuse_aerosol = 0.16;
    // thin-atmosphere spherical albedo
    double salbedo_rayleigh = 0.92;
    double salbedo_aerosol = 0.33;
    double salbedo_cap = 0.9;
    // floor on mu_s * mu_v below which geometry is treated as degenerate
    double min_mu_product = 1e-6;
};

/// Rayleigh optical depth at the band centre wavelength, pressure-scaled by
/// surface elevation. Valid for lambda_center in [0.3, 3.0] um.
double rayleigh_optical_depth(const BandDefinition& band, double elevation_km,
                              const RtConstants& c = {});

/// Angstrom power-law scaling of the 550 nm AOT to the band centre.
double aerosol_optical_depth(const BandDefinition& band, const AtmosphereState& atmos,
                             const AerosolModel& model);

/// Cosine of the scattering angle for the fixed azimuth convention:
/// cos Theta = -mu_s*mu_v + sin(theta_s)*sin(theta_v)*cos(delta_phi).
double scattering_angle_cos(const AcquisitionGeometry& geom);

double rayleigh_phase(double cos_theta);
double henyey_greenstein_phase(double cos_theta, double g);

/// Single-scattering path reflectance from molecules plus aerosol.
double path_reflectance(const BandDefinition& band, const AcquisitionGeometry& geom,
                        const AtmosphereState& atmos, const AerosolModel& model,
                        const RtConstants& c = {});

/// One-way scattering transmittance (direct plus diffuse recovery) for path
/// cosine mu.
double scattering_transmittance(double tau_r, double tau_a, double mu,
                                const RtConstants& c = {});

/// Combined ozone and water-vapour transmittance over the two-way path.
double gaseous_transmittance(const GasCoefficients& gas, const AcquisitionGeometry& geom,
                             const AtmosphereState& atmos);

double spherical_albedo(double tau_r, double tau_a, const RtConstants& c = {});

/// Full solution vector for one band / geometry / atmosphere.
CorrectionCoefficients forward_coefficients(const BandDefinition& band,
                                            const AcquisitionGeometry& geom,
                                            const AtmosphereState& atmos,
                                            const AerosolModel& model,
                                            const GasCoefficients& gas,
                                            const RtConstants& c = {});

/// TOA apparent reflectance of a Lambertian surface:
/// rho* = T_g * [rho_path + T*T * rho_s / (1 - S * rho_s)].
double forward_toa(double rho_s, const CorrectionCoefficients& coeffs);

/// Scene-level radiometric context consumed by the correction stage and
/// carried in raster sidecars.
struct RadiometricContext {
    std::vector<BandDefinition> bands;
    AcquisitionGeometry geom;
    AtmosphereState atmos;
    std::string acquisition_date;  // ISO yyyy-mm-dd, may be empty if distance given
    double earth_sun_distance = 1.0;  // AU
    int bit_depth = 11;
};

void validate(const RadiometricContext& ctx);

/// Earth-Sun distance in AU from day of year (standard eccentricity series).
double earth_sun_distance_au(int day_of_year);

/// Day of year from an ISO date string (yyyy-mm-dd).
int day_of_year(const std::string& iso_date);

}  // namespace ardc

#endif
