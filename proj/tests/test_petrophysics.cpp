#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "richards/petrophysics.hpp"

using namespace richards;

namespace {

std::vector<RockType> all_presets()
{
    std::vector<RockType> out;
    for (const auto& n : rock_preset_names())
        out.push_back(rock_preset(n));
    return out;
}

/// Log-spaced negative pressures from -1 Pa to -1e7 Pa.
std::vector<double> pressure_sweep(int n)
{
    std::vector<double> p;
    for (int i = 0; i < n; ++i)
        p.push_back(-std::pow(10.0, 7.0 * i / (n - 1)));
    return p;
}

double trapezoid(auto&& f, double a, double b, int n)
{
    const double h = (b - a) / n;
    double sum = 0.5 * (f(a) + f(b));
    for (int i = 1; i < n; ++i)
        sum += f(a + i * h);
    return sum * h;
}

} // namespace

TEST(Presets, MatchTables)
{
    const RockType a = rock_preset("RT0-BC");
    EXPECT_EQ(a.residual_water, 0.1);
    EXPECT_EQ(a.entry_pressure, -1470.8);
    EXPECT_EQ(a.exponent, 3.0);
    EXPECT_EQ(a.permeability, 1e-11);
    EXPECT_EQ(a.porosity, 0.35);
    const RockType b = rock_preset("RT1-BC");
    EXPECT_EQ(b.residual_water, 0.2);
    EXPECT_EQ(b.entry_pressure, -3430.1);
    EXPECT_EQ(b.exponent, 1.5);
    EXPECT_EQ(b.permeability, 1e-13);
    const RockType c = rock_preset("RT0-VG");
    EXPECT_EQ(c.residual_water, 0.0782);
    EXPECT_EQ(c.exponent, 2.239);
    EXPECT_EQ(c.permeability, 6.3812e-12);
    EXPECT_EQ(c.alpha, 2.8);
    EXPECT_EQ(c.porosity, 0.3658);
    const RockType d = rock_preset("RT1-VG");
    EXPECT_EQ(d.residual_water, 0.2262);
    EXPECT_EQ(d.exponent, 1.3954);
    EXPECT_EQ(d.permeability, 1.5461e-13);
    EXPECT_EQ(d.alpha, 1.04);
    EXPECT_EQ(d.porosity, 0.4686);
    for (const auto& r : all_presets())
        EXPECT_EQ(r.residual_air, 0.0);
    EXPECT_THROW(rock_preset("RT2-BC"), std::invalid_argument);
}

TEST(Presets, ValidateRejectsBadValues)
{
    RockType r = rock_preset("RT0-BC");
    r.porosity = 0.0;
    EXPECT_THROW(r.validate(), std::invalid_argument);
    r = rock_preset("RT0-BC");
    r.permeability = -1.0;
    EXPECT_THROW(r.validate(), std::invalid_argument);
    r = rock_preset("RT0-BC");
    r.entry_pressure = 10.0;
    EXPECT_THROW(r.validate(), std::invalid_argument);
    r = rock_preset("RT0-VG");
    r.exponent = 1.0;
    EXPECT_THROW(r.validate(), std::invalid_argument);
}

TEST(Saturation, BrooksCoreyValues)
{
    const RockType r = rock_preset("RT0-BC");
    EXPECT_DOUBLE_EQ(saturation(r, r.entry_pressure), 1.0);
    EXPECT_NEAR(saturation(r, 2.0 * r.entry_pressure), 0.2125, 1e-15);
    EXPECT_EQ(saturation(r, 0.0), 1.0);
    EXPECT_EQ(saturation(r, 1e5), 1.0);
}

TEST(Saturation, VanGenuchtenWetEnd)
{
    for (const char* tag : {"RT0-VG", "RT1-VG"}) {
        const RockType r = rock_preset(tag);
        EXPECT_EQ(saturation(r, 0.0), r.max_saturation());
        EXPECT_EQ(saturation(r, 10.0), r.max_saturation());
    }
}

TEST(Saturation, MonotoneAndLimits)
{
    for (const auto& r : all_presets()) {
        const auto ps = pressure_sweep(10000);
        for (std::size_t i = 1; i < ps.size(); ++i)
            ASSERT_LE(saturation(r, ps[i]), saturation(r, ps[i - 1])) << r.name;
        EXPECT_NEAR(saturation(r, -1e30), r.residual_water, 1e-6);
    }
}

TEST(Saturation, DerivativeValues)
{
    const RockType r = rock_preset("RT0-BC");
    const double p = 2.0 * r.entry_pressure;
    EXPECT_NEAR(dsaturation_dp(r, p), 0.16875 / 1470.8, 1e-18);
    const double h = 1e-3 * std::abs(r.entry_pressure);
    const double fd = (saturation(r, p + h) - saturation(r, p - h)) / (2.0 * h);
    EXPECT_NEAR(fd, 1.1474e-4, 1e-8);
    EXPECT_EQ(dsaturation_dp(r, r.entry_pressure / 2.0), 0.0);
}

TEST(Saturation, DerivativesMatchFiniteDifferences)
{
    for (const auto& r : all_presets()) {
        for (double p : pressure_sweep(400)) {
            if (r.model == CapillaryModel::BrooksCorey && p > 1.01 * r.entry_pressure)
                continue;
            const double h = 1e-5 * std::abs(p);
            const double fd = (saturation(r, p + h) - saturation(r, p - h)) / (2.0 * h);
            const double d = dsaturation_dp(r, p);
            if (std::abs(d) < 1e-300)
                continue;
            // Truncation plus the rounding of S itself, amplified by 1 / (2h).
            const double noise = 4.0 * std::numeric_limits<double>::epsilon() * saturation(r, p) / (2.0 * h);
            EXPECT_NEAR(fd, d, 1e-6 * std::abs(d) + noise) << r.name << " p=" << p;
            const double fd2 = (dsaturation_dp(r, p + h) - dsaturation_dp(r, p - h)) / (2.0 * h);
            const double d2 = d2saturation_dp2(r, p);
            EXPECT_NEAR(fd2, d2, 1e-5 * std::abs(d2) + 1e-9 * std::abs(d) / std::abs(p)) << r.name << " p=" << p;
        }
    }
}

TEST(Saturation, InverseRoundTrip)
{
    const RockType bc = rock_preset("RT0-BC");
    EXPECT_NEAR(saturation_inverse(bc, 0.2125), -2941.6, 1e-9);
    EXPECT_EQ(saturation_inverse(bc, 1.0), bc.entry_pressure);
    EXPECT_EQ(saturation_inverse(rock_preset("RT0-VG"), 1.0), 0.0);
    for (const auto& r : all_presets()) {
        EXPECT_THROW(saturation_inverse(r, r.residual_water), std::domain_error);
        for (int i = 1; i <= 1000; ++i) {
            const double s = r.residual_water + r.saturation_span() * i / 1000.0;
            EXPECT_NEAR(saturation(r, saturation_inverse(r, s)), s, 1e-12) << r.name;
        }
    }
}

TEST(RelPerm, Values)
{
    const RockType r = rock_preset("RT0-BC");
    const double s = r.residual_water + 0.5 * r.saturation_span();
    EXPECT_NEAR(rel_perm(r, s), std::pow(0.5, 11.0 / 3.0), 1e-15);
    EXPECT_NEAR(rel_perm(r, s), 0.07874, 1e-5);
    EXPECT_NEAR(mobility(r, s), 78.74, 1e-2);
    for (const auto& q : all_presets()) {
        EXPECT_EQ(rel_perm(q, q.residual_water), 0.0);
        EXPECT_NEAR(rel_perm(q, q.max_saturation()), 1.0, 1e-14);
        EXPECT_NEAR(mobility(q, q.max_saturation()), 1000.0, 1e-10);
        EXPECT_THROW(rel_perm(q, q.residual_water - 0.01), std::domain_error);
        EXPECT_THROW(rel_perm(q, q.max_saturation() + 0.01), std::domain_error);
    }
}

TEST(RelPerm, VanGenuchtenFormula)
{
    const RockType r = rock_preset("RT1-VG");
    const double se = 0.3;
    const double m = 1.0 - 1.0 / r.exponent;
    const double expect = std::sqrt(se) * std::pow(1.0 - std::pow(1.0 - std::pow(se, 1.0 / m), m), 2);
    EXPECT_NEAR(rel_perm(r, r.residual_water + se * r.saturation_span()), expect, 1e-15);
}

TEST(RelPerm, RegularisationIsC1)
{
    for (const auto& r : all_presets()) {
        const double s = r.regularisation_saturation();
        const double eps = 1e-9 * r.saturation_span();
        EXPECT_NEAR(rel_perm(r, s - eps), rel_perm(r, s + eps), 3.0 * eps * drel_perm_ds(r, s)) << r.name;
        EXPECT_NEAR(rel_perm_raw(r, s), rel_perm(r, s), 1e-14) << r.name;
        // Compare the analytic one-sided derivatives at the joint.
        const double below = drel_perm_ds(r, s - 1e-13);
        const double at = drel_perm_ds(r, s);
        EXPECT_NEAR(below, at, 1e-10 * std::max(1.0, std::abs(at))) << r.name;
    }
}

TEST(RelPerm, DerivativeMatchesFiniteDifferences)
{
    for (const auto& r : all_presets())
        for (int i = 1; i < 200; ++i) {
            const double s = r.residual_water + r.saturation_span() * i / 200.0;
            const double h = 1e-7;
            const double fd = (rel_perm(r, s + h) - rel_perm(r, s - h)) / (2.0 * h);
            EXPECT_NEAR(fd, drel_perm_ds(r, s), 1e-5 * std::max(1.0, std::abs(fd))) << r.name << " s=" << s;
        }
}

TEST(RelPerm, MobilityOfSaturationMonotoneInPressure)
{
    for (const auto& r : all_presets()) {
        const auto ps = pressure_sweep(10000);
        for (std::size_t i = 1; i < ps.size(); ++i)
            ASSERT_LE(mobility(r, saturation(r, ps[i])), mobility(r, saturation(r, ps[i - 1]))) << r.name;
    }
}

TEST(Parametrization, SwitchPoints)
{
    const RockType bc = rock_preset("RT0-BC");
    const Parametrization pb = parametrize(bc);
    EXPECT_EQ(pb.switch_saturation, 1.0);
    EXPECT_EQ(pb.switch_pressure, bc.entry_pressure);
    EXPECT_NEAR(pb.left_slope, 0.9 * 3.0 / 1470.8, 1e-18);

    for (const char* tag : {"RT0-VG", "RT1-VG"}) {
        const RockType r = rock_preset(tag);
        const Parametrization par = parametrize(r);
        // Bisection oracle on the closed-form second derivative.
        // S'' changes sign once on (-inf, 0): positive on the dry side, negative near 0.
        double lo = -1e6, hi = -1e-3;
        ASSERT_GT(d2saturation_dp2(r, lo), 0.0);
        ASSERT_LT(d2saturation_dp2(r, hi), 0.0);
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (d2saturation_dp2(r, mid) > 0.0 ? lo : hi) = mid;
        }
        EXPECT_NEAR(par.switch_pressure, 0.5 * (lo + hi), 1e-9 * std::abs(lo));
        EXPECT_NEAR(par.switch_saturation, saturation(r, par.switch_pressure), 1e-15);
        EXPECT_GT(d2saturation_dp2(r, par.switch_pressure * 1.01), 0.0);
        EXPECT_LT(d2saturation_dp2(r, par.switch_pressure * 0.99), 0.0);
    }
}

TEST(Parametrization, IdentityOnSweep)
{
    for (const auto& r : all_presets()) {
        const Parametrization par = parametrize(r);
        const int n = 10000;
        const double lo = r.residual_water + 1e-6;
        const double hi = par.switch_saturation + 0.5;
        for (int i = 0; i < n; ++i) {
            const double tau = lo + (hi - lo) * i / (n - 1);
            const ParamPoint pt = eval_param(r, par, tau);
            ASSERT_NEAR(pt.saturation, saturation(r, pt.pressure), 1e-12) << r.name << " tau=" << tau;
            ASSERT_GT(pt.dsaturation + pt.dpressure, 0.0) << r.name << " tau=" << tau;
        }
        EXPECT_THROW(eval_param(r, par, r.residual_water), std::domain_error);
    }
}

TEST(Parametrization, Branches)
{
    const RockType r = rock_preset("RT1-BC");
    const Parametrization par = parametrize(r);
    const ParamPoint a = eval_param(r, par, 0.5);
    EXPECT_EQ(a.saturation, 0.5);
    EXPECT_NEAR(a.pressure, saturation_inverse(r, 0.5), 1e-9);
    const ParamPoint b = eval_param(r, par, 1.2);
    EXPECT_EQ(b.saturation, 1.0);
    EXPECT_NEAR(b.pressure, r.entry_pressure + 0.2 / par.left_slope, 1e-9);
}

TEST(Parametrization, PressureIsC1AtSwitch)
{
    for (const auto& r : all_presets()) {
        const Parametrization par = parametrize(r);
        const double ts = par.switch_saturation;
        const double e = 1e-9;
        const ParamPoint left = eval_param(r, par, ts - e);
        const ParamPoint right = eval_param(r, par, ts + e);
        EXPECT_NEAR(left.pressure, right.pressure, 1e-4 * std::abs(par.switch_pressure)) << r.name;
        EXPECT_NEAR(left.dpressure / right.dpressure, 1.0, 1e-5) << r.name;
        EXPECT_NEAR(left.saturation, right.saturation, 1e-8) << r.name;
        if (r.model == CapillaryModel::VanGenuchten)
            EXPECT_NEAR(left.dsaturation / right.dsaturation, 1.0, 1e-5) << r.name;
        else
            EXPECT_EQ(right.dsaturation, 0.0); // s is only C0 at the Brooks-Corey entry pressure
    }
}

TEST(Parametrization, TauFromPressureRoundTrip)
{
    for (const auto& r : all_presets()) {
        const Parametrization par = parametrize(r);
        for (double p : {-1e6, -5e3, -2e3, -500.0, -1.0, 0.0, 100.0, 3e4}) {
            const double tau = tau_from_pressure(r, par, p);
            const ParamPoint pt = eval_param(r, par, tau);
            EXPECT_NEAR(pt.pressure, p, 1e-8 * std::max(1.0, std::abs(p))) << r.name << " p=" << p;
        }
    }
}

TEST(Kirchhoff, WetBranchIsLinear)
{
    for (const auto& r : all_presets()) {
        EXPECT_EQ(kirchhoff_theta(r, 0.0), 0.0);
        const double slope = std::sqrt(r.permeability / r.viscosity);
        EXPECT_NEAR(kirchhoff_theta(r, 2500.0), 2500.0 * slope, 1e-15 * 2500.0 * slope);
    }
}

TEST(Kirchhoff, MatchesTrapezoidOracle)
{
    for (const auto& r : all_presets()) {
        const double p = -2.0e4;
        auto f = [&](double x) { return std::sqrt(r.permeability * mobility(r, saturation(r, x))); };
        // Split at the wet-end pressure where the integrand has a kink.
        const double wet = r.wet_end_pressure();
        const double oracle = -(trapezoid(f, p, wet, 400000) + trapezoid(f, wet, 0.0, 1000));
        EXPECT_NEAR(kirchhoff_theta(r, p), oracle, 1e-7 * std::abs(oracle)) << r.name;
    }
}

TEST(Kirchhoff, MonotoneAndBounded)
{
    for (const auto& r : all_presets()) {
        double prev = -std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 200; ++i) {
            const double p = -1e6 + i * 1e6 / 200.0;
            const double t = kirchhoff_theta(r, p);
            EXPECT_GT(t, prev) << r.name << " p=" << p;
            prev = t;
        }
    }
}

TEST(Kirchhoff, ThetaBoundedByUpsilon)
{
    for (const auto model : {CapillaryModel::BrooksCorey, CapillaryModel::VanGenuchten}) {
        const std::string suffix = model == CapillaryModel::BrooksCorey ? "-BC" : "-VG";
        const std::vector<RockType> rocks = {rock_preset("RT0" + suffix), rock_preset("RT1" + suffix)};
        const double lmin = std::min(rocks[0].permeability, rocks[1].permeability);
        double c = 1.0;
        for (const auto& r : rocks)
            c = std::max(c, std::sqrt(r.permeability / lmin));
        EXPECT_GT(1.0 + kirchhoff_upsilon(rocks, -1e9), 0.0);
        for (double p : {-1e7, -1e5, -1e4, -3e3, -1e3, -10.0, 0.0, 10.0, 1e3, 1e5}) {
            const double u = kirchhoff_upsilon(rocks, p);
            for (const auto& r : rocks) {
                const double t = kirchhoff_theta(r, p);
                EXPECT_LE(t, c * (1.0 + u)) << r.name << " p=" << p;
                if (p < 0.0)
                    EXPECT_GE(u, t - 1e-12) << r.name << " p=" << p;
            }
        }
    }
}

TEST(EnergyDensity, ZeroAtReferenceAndConvex)
{
    for (const auto& r : all_presets()) {
        const double pd = r.model == CapillaryModel::BrooksCorey ? 2.0 * r.entry_pressure : -3000.0;
        const double s0 = saturation(r, pd);
        EXPECT_NEAR(energy_density(r, s0, pd), 0.0, 1e-12);
        double prev2 = energy_density(r, r.residual_water + 0.01 * r.saturation_span(), pd);
        double prev1 = energy_density(r, r.residual_water + 0.02 * r.saturation_span(), pd);
        for (int i = 3; i < 90; ++i) {
            const double s = r.residual_water + 0.01 * i * r.saturation_span();
            const double e = energy_density(r, s, pd);
            EXPECT_GE(e, 0.0);
            EXPECT_GE(e - 2.0 * prev1 + prev2, -1e-8) << r.name << " s=" << s;
            prev2 = prev1;
            prev1 = e;
        }
    }
}

TEST(EnergyDensity, MatchesTrapezoidOracle)
{
    const RockType r = rock_preset("RT0-BC");
    const double s = 0.5;
    // pD = 0 lies on the flat branch, so S(pD) = 1 and the integral runs from 1 down to s.
    auto f = [&](double v) { return r.porosity * saturation_inverse(r, v); };
    const double oracle = -trapezoid(f, s, 1.0, 2000000);
    EXPECT_NEAR(energy_density(r, s, 0.0), oracle, 1e-8 * std::abs(oracle));
}
