#include "richards/petrophysics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace richards {

namespace {

constexpr double kQuadratureTolerance = 1.0e-10;
constexpr unsigned kQuadratureDepth = 20;

double pressure_scale(const RockType& rock) { return rock.alpha / (kWaterDensity * kGravity); }

template <class F>
double integrate(F&& f, double a, double b)
{
    if (a == b)
        return 0.0;
    double error = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, a, b, kQuadratureDepth, kQuadratureTolerance, &error);
}

/// Integrates f over [a, b] (either orientation) split at the given points.
template <class F>
double integrate_split(F&& f, double a, double b, std::vector<double> cuts)
{
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    std::erase_if(cuts, [&](double c) { return !(c > lo && c < hi); });
    cuts.push_back(lo);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
        total += integrate(f, cuts[k], cuts[k + 1]);
    return a <= b ? total : -total;
}

/// Breakpoints on the curved (negative pressure) branch, geometrically spaced.
std::vector<double> pressure_cuts(const RockType& rock, double p)
{
    std::vector<double> cuts;
    const double wet = rock.wet_end_pressure();
    cuts.push_back(wet);
    if (rock.regularisation_saturation() < rock.max_saturation())
        cuts.push_back(saturation_inverse(rock, rock.regularisation_saturation()));
    double ref = rock.model == CapillaryModel::BrooksCorey ? wet : -1.0 / (16.0 * pressure_scale(rock));
    for (int k = 0; k < 200 && ref > p; ++k) {
        cuts.push_back(ref);
        ref *= 2.0;
    }
    return cuts;
}

} // namespace

std::string to_string(CapillaryModel model)
{
    return model == CapillaryModel::BrooksCorey ? "brooks-corey" : "van-genuchten";
}

CapillaryModel capillary_model_from_string(const std::string& tag)
{
    if (tag == "brooks-corey" || tag == "bc" || tag == "BC")
        return CapillaryModel::BrooksCorey;
    if (tag == "van-genuchten" || tag == "vg" || tag == "VG")
        return CapillaryModel::VanGenuchten;
    throw std::invalid_argument("unknown capillary model '" + tag + "'");
}

void RockType::validate() const
{
    auto fail = [this](const std::string& what) {
        throw std::invalid_argument("rock type '" + name + "': " + what);
    };
    if (!(porosity > 0.0 && porosity <= 1.0))
        fail("porosity must lie in (0, 1]");
    if (!(permeability > 0.0))
        fail("permeability must be positive");
    if (!(residual_water >= 0.0 && residual_air >= 0.0 && saturation_span() > 0.0))
        fail("residual saturations must satisfy s_rw + s_rn < 1");
    if (!(viscosity > 0.0))
        fail("viscosity must be positive");
    if (model == CapillaryModel::BrooksCorey) {
        if (!(entry_pressure < 0.0))
            fail("Brooks-Corey entry pressure must be negative");
        if (!(exponent > 0.0))
            fail("Brooks-Corey exponent must be positive");
    } else {
        if (!(exponent > 1.0))
            fail("van Genuchten n must exceed 1");
        if (!(alpha > 0.0))
            fail("van Genuchten alpha must be positive");
    }
}

RockType rock_preset(const std::string& tag)
{
    RockType r;
    r.name = tag;
    if (tag == "RT0-BC") {
        r.model = CapillaryModel::BrooksCorey;
        r.residual_air = 0.0;
        r.residual_water = 0.1;
        r.entry_pressure = -1.4708e3;
        r.exponent = 3.0;
        r.permeability = 1.0e-11;
        r.porosity = 0.35;
    } else if (tag == "RT1-BC") {
        r.model = CapillaryModel::BrooksCorey;
        r.residual_air = 0.0;
        r.residual_water = 0.2;
        r.entry_pressure = -3.4301e3;
        r.exponent = 1.5;
        r.permeability = 1.0e-13;
        r.porosity = 0.35;
    } else if (tag == "RT0-VG") {
        r.model = CapillaryModel::VanGenuchten;
        r.residual_air = 0.0;
        r.residual_water = 0.0782;
        r.exponent = 2.239;
        r.permeability = 6.3812e-12;
        r.alpha = 2.8;
        r.porosity = 0.3658;
    } else if (tag == "RT1-VG") {
        r.model = CapillaryModel::VanGenuchten;
        r.residual_air = 0.0;
        r.residual_water = 0.2262;
        r.exponent = 1.3954;
        r.permeability = 1.5461e-13;
        r.alpha = 1.04;
        r.porosity = 0.4686;
    } else {
        throw std::invalid_argument("unknown rock preset '" + tag + "'");
    }
    return r;
}

std::vector<std::string> rock_preset_names() { return {"RT0-BC", "RT1-BC", "RT0-VG", "RT1-VG"}; }

double effective_saturation(const RockType& rock, double s)
{
    return (s - rock.residual_water) / rock.saturation_span();
}

double saturation(const RockType& rock, double p)
{
    const double span = rock.saturation_span();
    if (rock.model == CapillaryModel::BrooksCorey) {
        if (p <= rock.entry_pressure)
            return rock.residual_water + span * std::pow(p / rock.entry_pressure, -rock.exponent);
        return rock.max_saturation();
    }
    if (p <= 0.0) {
        const double x = -pressure_scale(rock) * p;
        return rock.residual_water + span * std::pow(1.0 + std::pow(x, rock.exponent), -rock.vg_m());
    }
    return rock.max_saturation();
}

double dsaturation_dp(const RockType& rock, double p)
{
    const double span = rock.saturation_span();
    const double n = rock.exponent;
    if (rock.model == CapillaryModel::BrooksCorey) {
        if (p <= rock.entry_pressure)
            return span * n * std::pow(p / rock.entry_pressure, -n - 1.0) / std::abs(rock.entry_pressure);
        return 0.0;
    }
    if (p <= 0.0) {
        const double k = pressure_scale(rock);
        const double x = -k * p;
        const double m = rock.vg_m();
        return span * m * n * std::pow(x, n - 1.0) * std::pow(1.0 + std::pow(x, n), -m - 1.0) * k;
    }
    return 0.0;
}

double d2saturation_dp2(const RockType& rock, double p)
{
    const double span = rock.saturation_span();
    const double n = rock.exponent;
    if (rock.model == CapillaryModel::BrooksCorey) {
        if (p <= rock.entry_pressure) {
            const double pb = rock.entry_pressure;
            return span * n * (n + 1.0) * std::pow(p / pb, -n - 2.0) / (pb * pb);
        }
        return 0.0;
    }
    if (p < 0.0) {
        const double k = pressure_scale(rock);
        const double x = -k * p;
        const double m = rock.vg_m();
        const double xn = std::pow(x, n);
        const double bracket = (n - 1.0) * (1.0 + xn) - (m + 1.0) * n * xn;
        return -k * k * span * m * n * std::pow(x, n - 2.0) * std::pow(1.0 + xn, -m - 2.0) * bracket;
    }
    return 0.0;
}

double saturation_inverse(const RockType& rock, double s)
{
    if (!(s > rock.residual_water))
        throw std::domain_error("saturation_inverse: s must exceed the residual saturation");
    if (s > rock.max_saturation() + 1e-12)
        throw std::domain_error("saturation_inverse: s exceeds 1 - s_rn");
    const double se = std::min(effective_saturation(rock, s), 1.0);
    if (rock.model == CapillaryModel::BrooksCorey)
        return rock.entry_pressure * std::pow(se, -1.0 / rock.exponent);
    const double x = std::pow(std::pow(se, -1.0 / rock.vg_m()) - 1.0, 1.0 / rock.exponent);
    return -x / pressure_scale(rock);
}

namespace {

double raw_kr_se(const RockType& rock, double se)
{
    if (se <= 0.0)
        return 0.0;
    if (rock.model == CapillaryModel::BrooksCorey)
        return std::pow(se, 3.0 + 2.0 / rock.exponent);
    const double m = rock.vg_m();
    const double f = 1.0 - std::pow(1.0 - std::pow(se, 1.0 / m), m);
    return std::sqrt(se) * f * f;
}

double raw_dkr_dse(const RockType& rock, double se)
{
    if (se <= 0.0)
        return 0.0;
    if (rock.model == CapillaryModel::BrooksCorey) {
        const double e = 3.0 + 2.0 / rock.exponent;
        return e * std::pow(se, e - 1.0);
    }
    const double m = rock.vg_m();
    const double w = 1.0 - std::pow(se, 1.0 / m);
    const double f = 1.0 - std::pow(w, m);
    const double df = std::pow(w, m - 1.0) * std::pow(se, 1.0 / m - 1.0);
    return 0.5 / std::sqrt(se) * f * f + 2.0 * std::sqrt(se) * f * df;
}

struct Quadratic {
    double value, slope, curvature;
};

/// Quadratic in s_eff on [0.998, 1] matching value and slope at 0.998, equal to 1 at 1.
Quadratic wet_end_quadratic(const RockType& rock)
{
    const double a = kRegularisationEffectiveSaturation;
    const double len = 1.0 - a;
    const double k0 = raw_kr_se(rock, a);
    const double k1 = raw_dkr_dse(rock, a);
    return {k0, k1, (1.0 - k0 - k1 * len) / (len * len)};
}

double checked_effective(const RockType& rock, double s)
{
    constexpr double slack = 1e-12;
    if (s < rock.residual_water - slack || s > rock.max_saturation() + slack)
        throw std::domain_error("rel_perm: saturation outside [s_rw, 1 - s_rn] for rock '" + rock.name + "'");
    return std::clamp(effective_saturation(rock, s), 0.0, 1.0);
}

} // namespace

double rel_perm_raw(const RockType& rock, double s) { return raw_kr_se(rock, checked_effective(rock, s)); }

double rel_perm(const RockType& rock, double s)
{
    const double se = checked_effective(rock, s);
    if (se < kRegularisationEffectiveSaturation)
        return raw_kr_se(rock, se);
    const Quadratic q = wet_end_quadratic(rock);
    const double z = se - kRegularisationEffectiveSaturation;
    return q.value + q.slope * z + q.curvature * z * z;
}

double drel_perm_ds(const RockType& rock, double s)
{
    const double se = checked_effective(rock, s);
    double d;
    if (se < kRegularisationEffectiveSaturation) {
        d = raw_dkr_dse(rock, se);
    } else {
        const Quadratic q = wet_end_quadratic(rock);
        d = q.slope + 2.0 * q.curvature * (se - kRegularisationEffectiveSaturation);
    }
    return d / rock.saturation_span();
}

Parametrization parametrize(const RockType& rock)
{
    rock.validate();
    Parametrization par;
    par.lower_bound = rock.residual_water;
    if (rock.model == CapillaryModel::BrooksCorey) {
        // S is convex on its whole curved branch: switch at the entry pressure.
        par.switch_pressure = rock.entry_pressure;
        par.switch_saturation = rock.max_saturation();
        par.left_slope = dsaturation_dp(rock, rock.entry_pressure);
    } else {
        // Inflexion of the van Genuchten curve: |alpha p / (rho g)|^n = m.
        const double x = std::pow(rock.vg_m(), 1.0 / rock.exponent);
        par.switch_pressure = -x / pressure_scale(rock);
        par.switch_saturation = saturation(rock, par.switch_pressure);
        par.left_slope = dsaturation_dp(rock, par.switch_pressure);
    }
    return par;
}

ParamPoint eval_param(const RockType& rock, const Parametrization& par, double tau)
{
    if (!(tau > par.lower_bound))
        throw std::domain_error("eval_param: tau must exceed the residual saturation");
    if (tau < par.switch_saturation) {
        const double p = saturation_inverse(rock, tau);
        return {p, tau, 1.0 / dsaturation_dp(rock, p), 1.0};
    }
    const double p = par.switch_pressure + (tau - par.switch_saturation) / par.left_slope;
    double ds = dsaturation_dp(rock, p) / par.left_slope;
    if (rock.model == CapillaryModel::BrooksCorey && p > rock.entry_pressure)
        ds = 0.0;
    return {p, saturation(rock, p), 1.0 / par.left_slope, ds};
}

double tau_from_pressure(const RockType& rock, const Parametrization& par, double p)
{
    if (p < par.switch_pressure) {
        const double tiny = 1e-14;
        return std::max(saturation(rock, p), par.lower_bound + tiny);
    }
    return par.switch_saturation + (p - par.switch_pressure) * par.left_slope;
}

double kirchhoff_theta(const RockType& rock, double p)
{
    // S is constant above the wet-end pressure (which is <= 0).
    const double wet = rock.wet_end_pressure();
    const double slope = std::sqrt(rock.permeability / rock.viscosity);
    if (p >= wet)
        return p * slope;
    auto f = [&rock](double pi) { return std::sqrt(rock.permeability * mobility(rock, saturation(rock, pi))); };
    return wet * slope + integrate_split(f, wet, p, pressure_cuts(rock, p));
}

double kirchhoff_upsilon(std::span<const RockType> rocks, double p)
{
    if (rocks.empty())
        throw std::invalid_argument("kirchhoff_upsilon: no rock types");
    auto f = [rocks](double pi) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& r : rocks)
            best = std::min(best, std::sqrt(r.permeability * mobility(r, saturation(r, pi))));
        return best;
    };
    double wet = std::numeric_limits<double>::lowest();
    double slope = std::numeric_limits<double>::infinity();
    for (const auto& r : rocks) {
        wet = std::max(wet, r.wet_end_pressure());
        slope = std::min(slope, std::sqrt(r.permeability / r.viscosity));
    }
    if (p >= wet)
        return p * slope;
    std::vector<double> cuts;
    for (const auto& r : rocks) {
        auto c = pressure_cuts(r, p);
        cuts.insert(cuts.end(), c.begin(), c.end());
    }
    return wet * slope + integrate_split(f, wet, p, std::move(cuts));
}

double energy_density(const RockType& rock, double s, double dirichlet_pressure)
{
    if (!(s > rock.residual_water) || s > rock.max_saturation() + 1e-12)
        throw std::domain_error("energy_density: s must lie in (s_rw, 1 - s_rn]");
    // Integrated by parts into pressure, where the integrand is bounded.
    const double sc = std::min(s, rock.max_saturation());
    const double p = saturation_inverse(rock, sc);
    auto f = [&](double pi) { return rock.porosity * (sc - saturation(rock, pi)); };
    return integrate_split(f, dirichlet_pressure, p, pressure_cuts(rock, std::min(p, dirichlet_pressure)));
}

} // namespace richards
