/**
 * @file petrophysics.hpp
 * @brief Capillary-pressure and mobility laws for one rock type.
 *
 * Two models are supported:
 *
 *   Brooks-Corey:
 *     S(p)  = s_rw + (1 - s_rn - s_rw) (p / p_b)^(-n)          p <= p_b
 *           = 1 - s_rn                                          p >  p_b
 *     kr(s) = s_eff^(3 + 2/n)
 *
 *   van Genuchten-Mualem:
 *     S(p)  = s_rw + (1 - s_rn - s_rw) [1 + |alpha p / (rho g)|^n]^(-m)   p <= 0
 *           = 1 - s_rn                                                  p >  0
 *     kr(s) = s_eff^(1/2) [1 - (1 - s_eff^(1/m))^m]^2,   m = 1 - 1/n
 *
 * with s_eff = (s - s_rw) / (1 - s_rn - s_rw). Near the wet end (s_eff above
 * 0.998) kr is replaced by a quadratic matching value and slope at the
 * junction and reaching 1 at s = 1 - s_rn.
 *
 * Pressures are in Pa, saturations dimensionless, mobilities in 1/(Pa s).
 */
#pragma once

#include <span>
#include <string>
#include <vector>

namespace richards {

/// Water density [kg/m^3] and gravity [m/s^2].
inline constexpr double kWaterDensity = 1000.0;
inline constexpr double kGravity = 9.81;
/// Water viscosity [Pa s].
inline constexpr double kWaterViscosity = 1.0e-3;
/// Effective saturation above which kr is regularised.
inline constexpr double kRegularisationEffectiveSaturation = 0.998;

enum class CapillaryModel { BrooksCorey, VanGenuchten };

std::string to_string(CapillaryModel model);
CapillaryModel capillary_model_from_string(const std::string& tag);

struct RockType {
    std::string name;
    CapillaryModel model = CapillaryModel::BrooksCorey;
    double porosity = 0.35;
    double permeability = 1.0e-11;  ///< intrinsic permeability [m^2]
    double residual_water = 0.0;    ///< s_rw
    double residual_air = 0.0;      ///< s_rn
    double entry_pressure = -1.0e3; ///< Brooks-Corey p_b [Pa], negative
    double exponent = 2.0;          ///< n (both models)
    double alpha = 1.0;             ///< van Genuchten alpha [1/m]
    double viscosity = kWaterViscosity;

    double max_saturation() const { return 1.0 - residual_air; }
    double saturation_span() const { return 1.0 - residual_air - residual_water; }
    double vg_m() const { return 1.0 - 1.0 / exponent; }
    /// Saturation above which the quadratic kr is used.
    double regularisation_saturation() const
    {
        return residual_water + kRegularisationEffectiveSaturation * saturation_span();
    }
    /// Pressure at and above which S is constant (p_b for BC, 0 for VG).
    double wet_end_pressure() const
    {
        return model == CapillaryModel::BrooksCorey ? entry_pressure : 0.0;
    }

    /// Throws std::invalid_argument on out-of-range parameters.
    void validate() const;

    bool operator==(const RockType&) const = default;
};

/// Presets: RT0-BC, RT1-BC, RT0-VG, RT1-VG.
RockType rock_preset(const std::string& tag);
std::vector<std::string> rock_preset_names();

double effective_saturation(const RockType& rock, double s);

double saturation(const RockType& rock, double p);
/// Exact derivative; at the kink the left limit S'(p-) is returned.
double dsaturation_dp(const RockType& rock, double p);
/// Second derivative on the curved branch (0 on the flat branch).
double d2saturation_dp2(const RockType& rock, double p);
/// Inverse on (s_rw, 1 - s_rn]; returns the wet-end pressure at s = 1 - s_rn.
double saturation_inverse(const RockType& rock, double s);

/// Regularised relative permeability; throws if s is outside [s_rw, 1 - s_rn].
double rel_perm(const RockType& rock, double s);
double drel_perm_ds(const RockType& rock, double s);
/// Unregularised closed form, for inspection.
double rel_perm_raw(const RockType& rock, double s);

inline double mobility(const RockType& rock, double s) { return rel_perm(rock, s) / rock.viscosity; }
inline double dmobility_ds(const RockType& rock, double s) { return drel_perm_ds(rock, s) / rock.viscosity; }

/// Switch point of the (s, p) graph parametrisation.
struct Parametrization {
    double switch_saturation = 1.0;
    double switch_pressure = 0.0;
    double left_slope = 1.0; ///< S'(p_s^-) [1/Pa]
    double lower_bound = 0.0; ///< s_rw; tau must stay above it
};

struct ParamPoint {
    double pressure;
    double saturation;
    double dpressure;   ///< dp/dtau
    double dsaturation; ///< ds/dtau
};

Parametrization parametrize(const RockType& rock);
/// Throws std::domain_error for tau <= s_rw.
ParamPoint eval_param(const RockType& rock, const Parametrization& par, double tau);
/// The unique tau mapping onto (p, S(p)).
double tau_from_pressure(const RockType& rock, const Parametrization& par, double p);

/// Theta(p) = int_0^p sqrt(lambda eta(S(pi))) dpi.
double kirchhoff_theta(const RockType& rock, double p);
/// Upsilon(p) = int_0^p min_i sqrt(lambda_i eta_i(S_i(pi))) dpi.
double kirchhoff_upsilon(std::span<const RockType> rocks, double p);
/// Capillary energy density int_{S(pD)}^{s} phi (S^-1(v) - pD) dv.
double energy_density(const RockType& rock, double s, double dirichlet_pressure);

} // namespace richards
