#include "richards/solver.hpp"

#include <Eigen/SparseLU>
#ifdef RICHARDS_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace richards {

struct LinearSolver::Impl {
#ifdef RICHARDS_HAVE_UMFPACK
    Eigen::UmfPackLU<Eigen::SparseMatrix<double>> lu;
#else
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
#endif
    Eigen::Index analysed_rows = -1;
    Eigen::Index analysed_nnz = -1;
};

LinearSolver::LinearSolver() : impl_(std::make_unique<Impl>()) {}
LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

std::string LinearSolver::backend()
{
#ifdef RICHARDS_HAVE_UMFPACK
    return "umfpack";
#else
    return "eigen-sparselu";
#endif
}

bool LinearSolver::solve(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& b, Eigen::VectorXd& x)
{
    if (impl_->analysed_rows != a.rows() || impl_->analysed_nnz != a.nonZeros()) {
        impl_->lu.analyzePattern(a);
        impl_->analysed_rows = a.rows();
        impl_->analysed_nnz = a.nonZeros();
    }
    impl_->lu.factorize(a);
    if (impl_->lu.info() != Eigen::Success)
        return false;
    x = impl_->lu.solve(b);
    return impl_->lu.info() == Eigen::Success && x.allFinite();
}

namespace {

double scaled_max(const Assembly& a)
{
    double r = 0.0;
    for (Eigen::Index k = 0; k < a.residual.size(); ++k)
        r = std::max(r, std::abs(a.residual[k]) / a.row_scale[k]);
    return r;
}

double merit(const Assembly& a)
{
    return (a.residual.array() / a.row_scale.array()).matrix().norm();
}

/// An update that would leave (s_rw, inf) moves at most `fraction` of the way to s_rw.
void keep_above_residual(const Problem& problem, const std::vector<double>& from, std::vector<double>& tau,
                         double fraction, double margin)
{
    for (std::size_t k = 0; k < tau.size(); ++k) {
        const double lo = problem.law(static_cast<int>(k)).param.lower_bound;
        if (!(tau[k] > lo + margin))
            tau[k] = std::max(lo + (1.0 - fraction) * (from[k] - lo), lo + margin);
    }
}

} // namespace

NewtonResult newton_step(const Problem& problem, State& guess, const std::vector<double>& previous_saturation, double dt,
                         const Homotopy& homotopy, const NewtonOptions& options, LinearSolver& linear)
{
    NewtonResult res;
    Assembly a;
    Assembly trial;
    Eigen::VectorXd d;
    const std::size_t n = problem.size();
    std::vector<double> tau_try(n);
    double update = std::numeric_limits<double>::infinity();

    assemble(problem, guess, previous_saturation, dt, homotopy, true, a);
    for (;;) {
        res.residual = scaled_max(a);
        if (!std::isfinite(res.residual))
            return res;
        if (res.residual <= options.residual_tol && (res.iterations == 0 || update <= options.update_tol)) {
            res.converged = true;
            return res;
        }
        if (res.iterations >= options.max_iterations)
            return res;
        if (!linear.solve(a.jacobian, -a.residual, d))
            return res;
        ++res.iterations;

        const double m0 = merit(a);
        double alpha = 1.0;
        State next;
        for (int h = 0;; ++h) {
            for (std::size_t k = 0; k < n; ++k) {
                tau_try[k] = guess.tau[k] + alpha * d[static_cast<Eigen::Index>(k)];
                if (options.stop_at_switch) {
                    const double ss = problem.law(static_cast<int>(k)).param.switch_saturation;
                    if ((guess.tau[k] - ss) * (tau_try[k] - ss) < 0.0)
                        tau_try[k] = ss;
                }
            }
            keep_above_residual(problem, guess.tau, tau_try, options.boundary_fraction, options.lower_margin);
            next = make_state(problem, tau_try, guess.level, guess.time);
            assemble(problem, next, previous_saturation, dt, homotopy, true, trial);
            const double m1 = merit(trial);
            if (res.iterations <= options.undamped_iterations || (std::isfinite(m1) && m1 <= m0) ||
                h >= options.max_halvings)
                break;
            alpha *= 0.5;
        }
        update = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            update = std::max(update, std::abs(next.tau[k] - guess.tau[k]) / std::max(1.0, std::abs(guess.tau[k])));
        guess = std::move(next);
        std::swap(a, trial);
    }
}

std::vector<double> extrapolate_tau(const Problem& problem, const State& older, const State& previous, double ratio,
                                    const NewtonOptions& options)
{
    std::vector<double> tau(previous.tau.size());
    for (std::size_t k = 0; k < tau.size(); ++k)
        tau[k] = previous.tau[k] + ratio * (previous.tau[k] - older.tau[k]);
    keep_above_residual(problem, previous.tau, tau, options.boundary_fraction, options.lower_margin);
    return tau;
}

int solve_step(const Problem& problem, const State& previous, State& next, double dt, const NewtonOptions& options,
               LinearSolver& linear, const std::vector<double>* guess)
{
    next = guess ? make_state(problem, *guess, previous.level, previous.time) : previous;
    next.level = previous.level + 1;
    next.time = previous.time + dt;
    NewtonResult r = newton_step(problem, next, previous.saturation, dt, Homotopy{}, options, linear);
    int spent = r.iterations;
    if (r.converged)
        return spent;
    if (!options.homotopy_fallback)
        throw SolverFailure("Newton did not converge at t = " + std::to_string(next.time));

    // Continuation from the constant-mobility problem. Without Dirichlet faces
    // the stationary limit is singular, so the storage term keeps full weight.
    const bool weight_time = problem.boundary().has_dirichlet;
    auto homotopy_at = [&](double g) { return Homotopy{g, weight_time ? g : 1.0}; };

    State current = previous;
    current.level = next.level;
    current.time = next.time;
    r = newton_step(problem, current, previous.saturation, dt, homotopy_at(0.0), options, linear);
    spent += r.iterations;
    if (!r.converged)
        throw SolverFailure("continuation start failed at t = " + std::to_string(next.time));
    double gamma = 0.0;
    double step = 0.25;
    while (gamma < 1.0) {
        const double target = std::min(1.0, gamma + step);
        State trial = current;
        r = newton_step(problem, trial, previous.saturation, dt, homotopy_at(target), options, linear);
        spent += r.iterations;
        if (r.converged) {
            current = std::move(trial);
            gamma = target;
            step = std::min(0.5, 2.0 * step);
        } else {
            step *= 0.5;
            if (step < options.gamma_min_step)
                throw SolverFailure("continuation step underflow at gamma = " + std::to_string(gamma) +
                                    ", t = " + std::to_string(next.time));
        }
    }
    next = std::move(current);
    return spent;
}

std::vector<double> time_steps(double dt, double t_end)
{
    if (!(dt > 0.0) || !(t_end >= 0.0))
        throw std::invalid_argument("time_steps: dt must be positive and t_end non-negative");
    std::vector<double> steps;
    double t = 0.0;
    const double eps = 1e-9 * dt;
    while (t_end - t > eps) {
        const double h = std::min(dt, t_end - t);
        steps.push_back(h);
        t += h;
    }
    return steps;
}

RunResult run(const Problem& problem, const State& initial, const RunOptions& options, const StepObserver& on_step,
              const OutputObserver& on_output, std::ostream* log)
{
    RunResult out;
    LinearSolver linear;
    std::vector<double> outputs = options.output_times;
    std::sort(outputs.begin(), outputs.end());
    std::size_t next_output = 0;
    const double eps = 1e-9 * options.dt;
    auto report = [&](const State& s) {
        // Each output time is served by the first level at or after it.
        bool due = false;
        while (next_output < outputs.size() && outputs[next_output] <= s.time + eps) {
            due = true;
            ++next_output;
        }
        if (due && on_output)
            on_output(s);
    };

    State current = initial;
    // initial may alias storage the observers modify; do not touch it again.
    const double t0 = current.time;
    report(current);
    const auto steps = time_steps(options.dt, options.t_end);
    double t = t0;
    State older;
    for (std::size_t n = 0; n < steps.size(); ++n) {
        State next;
        std::vector<double> guess;
        if (options.extrapolate && n > 0)
            guess = extrapolate_tau(problem, older, current, steps[n] / steps[n - 1], options.newton);
        const int its =
            solve_step(problem, current, next, steps[n], options.newton, linear, guess.empty() ? nullptr : &guess);
        t += steps[n];
        next.time = (n + 1 == steps.size()) ? t0 + options.t_end : t;
        out.iterations.push_back(its);
        out.times.push_back(next.time);
        out.newton.total += its;
        out.newton.max = std::max(out.newton.max, its);
        ++out.newton.steps;
        if (on_step)
            on_step(current, next, steps[n]);
        report(next);
        if (log && options.verbose)
            *log << "step " << n + 1 << "/" << steps.size() << " t=" << next.time << " newton=" << its << '\n';
        older = std::move(current);
        current = std::move(next);
    }
    out.final_state = std::move(current);
    return out;
}

} // namespace richards
