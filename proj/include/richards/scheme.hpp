/**
 * @file scheme.hpp
 * @brief Backward-Euler upstream-mobility TPFA discretisation of Richards' equation.
 *
 * For every cell K the discrete volume balance reads
 *
 *   R_K = m_K phi_K (s_K^n - s_K^{n-1}) / dt + sum_sigma m_sigma F_{K,sigma}^n
 *
 *   F_{K,sigma} = lambda_sigma eta_sigma (theta_K - theta_{K,sigma}) / d_sigma
 *
 * where theta = p + psi is the hydraulic head (psi = rho g y, y pointing up),
 * lambda_sigma the harmonic edge permeability and eta_sigma the mobility taken
 * on the side of the larger head. The primary unknown of each cell is the
 * graph parameter tau, with s = s(tau) and p = p(tau) given by the rock's
 * Parametrization.
 */
#pragma once

#include <Eigen/SparseCore>

#include <array>
#include <vector>

#include "richards/mesh.hpp"
#include "richards/petrophysics.hpp"

namespace richards {

struct RockLaw {
    RockType rock;
    Parametrization param;
};

/// Boundary encoding per face plus the per-cell reference pressure p_K^D.
struct BoundaryData {
    /// Dirichlet faces: p_sigma^D [Pa]; prescribed-flux faces: inward flux [m/s]; else 0.
    std::vector<double> face_value;
    /// Set on Neumann faces with a prescribed flux.
    std::vector<char> prescribed_flux;
    /// p_K^D, used by the energy diagnostics.
    std::vector<double> cell_reference_pressure;
    bool has_dirichlet = false;
};

BoundaryData make_boundary_data(const Mesh& mesh, double reference_pressure = 0.0);

/// Mesh, rock laws and boundary data, plus per-face constants reused by every assembly.
class Problem {
public:
    Problem(Mesh mesh, std::vector<RockType> rocks, double reference_pressure = 0.0);

    const Mesh& mesh() const { return mesh_; }
    const BoundaryData& boundary() const { return boundary_; }
    const std::vector<RockLaw>& rocks() const { return rocks_; }
    const RockLaw& law(int cell) const { return rocks_[static_cast<std::size_t>(mesh_.cells[static_cast<std::size_t>(cell)].rock)]; }
    std::size_t size() const { return mesh_.cell_count(); }

    /// m_sigma lambda_sigma / d_sigma.
    double face_coefficient(int face) const { return face_coefficient_[static_cast<std::size_t>(face)]; }
    /// lambda_sigma.
    double face_permeability(int face) const { return face_permeability_[static_cast<std::size_t>(face)]; }
    /// psi_K = rho g y_K.
    double cell_gravity(int cell) const { return cell_gravity_[static_cast<std::size_t>(cell)]; }
    double face_gravity(int face) const { return face_gravity_[static_cast<std::size_t>(face)]; }
    /// S_K(p_sigma^D) on Dirichlet faces.
    double dirichlet_saturation(int face) const { return dirichlet_saturation_[static_cast<std::size_t>(face)]; }

    /// Jacobian with the fixed sparsity pattern (cell + face neighbours), values zero.
    const Eigen::SparseMatrix<double>& jacobian_pattern() const { return pattern_; }
    /// Positions in the value array for (owner, owner), (owner, nb), (nb, owner), (nb, nb).
    const std::array<int, 4>& face_slots(int face) const { return face_slots_[static_cast<std::size_t>(face)]; }
    int diagonal_slot(int cell) const { return diagonal_slot_[static_cast<std::size_t>(cell)]; }

private:
    Mesh mesh_;
    std::vector<RockLaw> rocks_;
    BoundaryData boundary_;
    std::vector<double> face_coefficient_;
    std::vector<double> face_permeability_;
    std::vector<double> cell_gravity_;
    std::vector<double> face_gravity_;
    std::vector<double> dirichlet_saturation_;
    Eigen::SparseMatrix<double> pattern_;
    std::vector<std::array<int, 4>> face_slots_;
    std::vector<int> diagonal_slot_;
};

/// One time level: tau and the derived pressure/saturation per cell.
struct State {
    int level = 0;
    double time = 0.0;
    std::vector<double> tau;
    std::vector<double> pressure;
    std::vector<double> saturation;
};

/// Builds a state from tau, filling the derived fields.
State make_state(const Problem& problem, std::vector<double> tau, int level = 0, double time = 0.0);
/// Builds a state from cell pressures.
State state_from_pressure(const Problem& problem, const std::vector<double>& pressure, int level = 0,
                          double time = 0.0);
/// theta_K = p_K + psi_K.
std::vector<double> hydraulic_head(const Problem& problem, const State& state);

double edge_permeability(double lambda_k, double lambda_l, double d_k, double d_l, double d);
inline double edge_permeability_boundary(double lambda_k) { return lambda_k; }

double upwind_mobility(const RockType& rock_k, const RockType& rock_ks, double s_k, double s_ks, double theta_k,
                       double theta_ks);

/// F_{K,sigma} seen from the face owner; -q for prescribed-influx faces, 0 for no-flux faces.
double face_flux(const Problem& problem, int face, const State& state);

/// Continuation weights: eta^(gamma) = (1 - gamma) / mu + gamma eta, time term scaled by time_weight.
struct Homotopy {
    double gamma = 1.0;
    double time_weight = 1.0;
};

struct Assembly {
    Eigen::VectorXd residual;
    /// Per-row magnitude used to scale the convergence test: storage weight plus
    /// c eta (|p| + |psi| + |tau dp/dtau|) summed over both sides of every face.
    Eigen::VectorXd row_scale;
    Eigen::SparseMatrix<double> jacobian;
};

/// Residual (and optionally Jacobian) of one backward-Euler step.
void assemble(const Problem& problem, const State& state, const std::vector<double>& previous_saturation, double dt,
              const Homotopy& homotopy, bool with_jacobian, Assembly& out);

Eigen::VectorXd residual(const Problem& problem, const State& state, const State& previous, double dt);
Eigen::SparseMatrix<double> jacobian(const Problem& problem, const State& state, const State& previous, double dt);

enum class InitialKind { UniformPressure, Hydrostatic };

struct InitialCondition {
    InitialKind kind = InitialKind::UniformPressure;
    /// Uniform pressure [Pa], or the constant hydraulic head for the hydrostatic profile.
    double value = 0.0;
};

State initialize(const Problem& problem, const InitialCondition& initial);

} // namespace richards
