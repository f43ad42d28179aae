/**
 * @file solver.hpp
 * @brief Damped Newton for one implicit step, homotopy fallback and the time loop.
 */
#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "richards/scheme.hpp"

namespace richards {

/// Thrown when a step cannot be solved even by continuation.
class SolverFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sparse LU with a fixed sparsity pattern; symbolic analysis is done once.
class LinearSolver {
public:
    LinearSolver();
    ~LinearSolver();
    LinearSolver(LinearSolver&&) noexcept;
    LinearSolver& operator=(LinearSolver&&) noexcept;

    /// Solves A x = b. Returns false if the factorization fails.
    bool solve(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& b, Eigen::VectorXd& x);
    static std::string backend();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct NewtonOptions {
    double residual_tol = 1e-11; ///< on max_K |R_K| / row_scale_K
    /// On the last |delta tau| / max(1, |tau|); guards against accepting a stalled iterate.
    double update_tol = 1e-5;
    int max_iterations = 60;
    int max_halvings = 8;
    /// Iterations that take the full (switch-stopped) step before damping engages.
    int undamped_iterations = 20;
    /// A cell whose update crosses the switch point of its parametrisation stops there.
    bool stop_at_switch = false;
    double lower_margin = 1e-14; ///< tau is kept above s_rw + margin
    /// A cell whose update would cross s_rw moves this fraction of its distance to s_rw instead.
    double boundary_fraction = 0.5;
    bool homotopy_fallback = true;
    double gamma_min_step = 1.0 / 1024.0;
};

struct NewtonResult {
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;
};

struct NewtonStats {
    long total = 0;
    int max = 0;
    int steps = 0;
    double average() const { return steps ? static_cast<double>(total) / steps : 0.0; }
};

/// Newton on R(tau) = 0 for the step previous -> guess (in place).
NewtonResult newton_step(const Problem& problem, State& guess, const std::vector<double>& previous_saturation, double dt,
                         const Homotopy& homotopy, const NewtonOptions& options, LinearSolver& linear);

/// Newton from `guess` (the previous state if null), falling back to continuation in gamma.
/// Returns the number of Newton iterations spent (all sub-solves included).
int solve_step(const Problem& problem, const State& previous, State& next, double dt, const NewtonOptions& options,
               LinearSolver& linear, const std::vector<double>* guess = nullptr);

/// Linear extrapolation tau^n + ratio (tau^n - tau^{n-1}), kept above s_rw like a Newton update.
std::vector<double> extrapolate_tau(const Problem& problem, const State& older, const State& previous, double ratio,
                                    const NewtonOptions& options);

struct RunOptions {
    double dt = 1000.0;
    double t_end = 86400.0;
    NewtonOptions newton;
    /// Start each Newton solve from the extrapolation of the last two levels.
    bool extrapolate = true;
    /// Times at which on_output is called (the initial state is reported at t = 0 when listed).
    std::vector<double> output_times;
    bool verbose = false;
};

struct RunResult {
    State final_state;
    NewtonStats newton;
    std::vector<int> iterations; ///< per step
    std::vector<double> times;   ///< t^n for n >= 1
};

/// Observer receives (previous state, new state, dt) after every accepted step.
using StepObserver = std::function<void(const State&, const State&, double)>;
using OutputObserver = std::function<void(const State&)>;

/// Uniform time stepping with a truncated last step.
RunResult run(const Problem& problem, const State& initial, const RunOptions& options,
              const StepObserver& on_step = {}, const OutputObserver& on_output = {}, std::ostream* log = nullptr);

/// Step sizes: floor(t_end / dt) full steps plus a truncated remainder.
std::vector<double> time_steps(double dt, double t_end);

} // namespace richards
