/**
 * @file cases.hpp
 * @brief The layered test domain, single runs with file output, and the mesh convergence study.
 *
 * Domain [0,5] x [-3,0]: sand in [1,4] x [-1,0] and [0,5] x [-3,-2], clay elsewhere.
 * Filling: dry start at -47.088e5 Pa, 0.5 m/day inflow through the top for x in [1,4].
 * Drainage: hydrostatic start p = -rho g y, p = 0 on the bottom.
 */
#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "richards/config.hpp"
#include "richards/diagnostics.hpp"
#include "richards/solver.hpp"

namespace richards {

inline constexpr double kFillingInitialPressure = -47.088e5;
inline constexpr double kFillingInflow = 0.5 / 86400.0;

Domain layered_domain(CaseKind kind);
Problem make_problem(const CaseConfig& config);
State initial_state(const Problem& problem, const CaseConfig& config);

struct RunReport {
    CaseConfig config;
    NewtonStats newton;
    std::vector<int> iterations;
    std::vector<double> times;
    EnergyReport energy;
    double max_mass_defect = 0.0; ///< max_n |defect| / water volume
    State final_state;
    std::vector<std::string> files;
};

struct RunHooks {
    StepObserver on_step;
    bool write_files = true;
    bool energy = true;
    std::ostream* log = nullptr;
};

/// Runs one case; with write_files, fills config.out_dir with snapshots and CSVs.
RunReport run_case(const CaseConfig& config, const RunHooks& hooks = {});

struct MeshSize {
    int nx = 0, ny = 0;
    std::string tag() const { return std::to_string(nx) + "x" + std::to_string(ny); }
};
/// "50x30,100x60" -> sizes.
std::vector<MeshSize> parse_mesh_list(const std::string& text);

struct StudyOptions {
    std::vector<MeshSize> meshes{{50, 30}, {100, 60}, {200, 120}};
    MeshSize reference{400, 240};
    std::vector<Method> methods{Method::A, Method::B};
    /// Extra method-A runs with these delta values (on the meshes listed in delta_meshes).
    std::vector<double> extra_deltas;
    std::vector<MeshSize> delta_meshes;
    bool write_files = true;
    /// Energy audit on every run (mass is always audited).
    bool energy = true;
    std::ostream* log = nullptr;
};

struct ErrorRow {
    MeshSize mesh;
    std::size_t cells = 0;
    Method method = Method::A;
    double delta = 0.0;
    double error = 0.0;
    double order = 0.0; ///< fitted over the rows of the same method and delta
    NewtonStats newton;
    double max_energy_identity = 0.0;
    double max_mass_defect = 0.0;
    double dissipation = 0.0; ///< cumulative over the run (0 without the energy audit)
};

struct StudyResult {
    std::vector<ErrorRow> rows;
    /// The reference run; error and order are not meaningful.
    ErrorRow reference;
};

/// Runs the reference (method A on the reference mesh) and every ladder member,
/// returning one row per member. Writes errors.csv and newton.csv when asked.
StudyResult convergence_study(const CaseConfig& base, const StudyOptions& options);

void write_errors_csv(std::ostream& os, const std::vector<ErrorRow>& rows);
void write_newton_csv(std::ostream& os, const std::vector<int>& iterations, const std::vector<double>& times);
void write_energy_csv(std::ostream& os, const EnergyReport& report);

/// Writes through a temporary file and renames it into place.
void write_file_atomic(const std::string& path, const std::string& contents);

/// "fields_t<seconds>.vtk" with integral seconds printed without a fraction.
std::string snapshot_name(double time);

} // namespace richards
