/**
 * @file diagnostics.hpp
 * @brief Discrete energy and mass audits, space-time L2 errors, order fitting.
 *
 * Energy identity per step (multiply the balance of cell K by dt (p_K - p_K^D)
 * and sum by parts):
 *
 *   A = sum_K m_K phi_K (s_K^n - s_K^{n-1}) (p_K^n - p_K^D)
 *   B = dt sum_sigma a_sigma lambda_sigma eta_sigma (theta_K - theta_Ksigma)
 *                                     (p_K - p_K^D - p_Ksigma + p_Ksigma^D)
 *   W = dt sum_{flux faces} m_sigma q_sigma (p_K - p_K^D)
 *
 * and A + B - W vanishes up to the nonlinear residual.
 */
#pragma once

#include <span>
#include <utility>
#include <vector>

#include "richards/scheme.hpp"

namespace richards {

struct EnergyStep {
    int level = 0;
    double time = 0.0;
    double dt = 0.0;
    double a = 0.0;
    double b = 0.0;
    double work = 0.0;
    double identity = 0.0;     ///< A + B - W
    double scale = 0.0;        ///< |A| + |B| + |W| + 1
    double dissipation = 0.0;  ///< dt sum a lambda eta (p_K - p_Ksigma)^2
    double cumulative_dissipation = 0.0;
    double energy = 0.0;       ///< sum m_K E_K(s_K); 0 unless requested
};

struct EnergyReport {
    std::vector<EnergyStep> steps;
    double max_relative_identity() const;
};

/// Streaming form of energy_audit, usable as a StepObserver.
class EnergyAuditor {
public:
    explicit EnergyAuditor(const Problem& problem, bool with_energy = false);
    void observe(const State& previous, const State& next, double dt);
    const EnergyReport& report() const { return report_; }

private:
    const Problem* problem_;
    bool with_energy_;
    EnergyReport report_;
};

/// Audits consecutive pairs of a trajectory (first entry: initial state).
EnergyReport energy_audit(const Problem& problem, const std::vector<State>& trajectory, bool with_energy = false);

struct MassBalance {
    double storage = 0.0;  ///< sum m phi (s^n - s^{n-1})
    double inflow = 0.0;   ///< -dt sum_{boundary} m_sigma F_sigma
    double defect = 0.0;   ///< storage - inflow
    double water = 0.0;   ///< sum m phi s^n
};

MassBalance mass_balance(const Problem& problem, const State& previous, const State& next, double dt);

/// Area-weighted averaging of a mesh's cells onto a tensor grid it refines.
class GridProjection {
public:
    /// Throws std::invalid_argument when a source cell straddles a grid line.
    GridProjection(const Mesh& source, std::span<const double> x_lines, std::span<const double> y_lines);

    std::vector<double> apply(std::span<const double> values) const;
    std::size_t target_size() const { return areas_.size(); }
    const std::vector<double>& target_areas() const { return areas_; }

private:
    std::vector<int> target_;
    std::vector<double> weight_;
    std::vector<double> areas_;
};

/// A scalar field sampled on a fixed tensor grid at successive time levels.
struct SampledTrajectory {
    std::vector<double> x_lines, y_lines;
    std::vector<double> areas;
    std::vector<double> times;
    std::vector<std::vector<double>> values;

    void record(double time, std::vector<double> field);
};

/// Relative space-time L2 difference. Run levels n >= 1 are weighted by
/// t^n - t^{n-1}; the reference is sampled at the first level t_ref >= t^n.
double l2_error(const SampledTrajectory& run, const SampledTrajectory& reference);

/// Saturation error of a run against a reference, both as full trajectories,
/// compared on the base grid of the run mesh.
double l2_error(const Mesh& run_mesh, const std::vector<State>& run, const Mesh& reference_mesh,
                const std::vector<State>& reference);

/// Least-squares order in h ~ cells^{-1/2}: error ~ h^order.
double fit_order(const std::vector<std::pair<double, double>>& cells_and_errors);

} // namespace richards
