#include "richards/cases.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace richards {

Domain layered_domain(CaseKind kind)
{
    Domain d;
    d.box = {0.0, 5.0, -3.0, 0.0};
    constexpr int sand = 0, clay = 1;
    d.subdomains = {
        {{1.0, 4.0, -1.0, 0.0}, sand},
        {{0.0, 5.0, -3.0, -2.0}, sand},
        {{0.0, 1.0, -2.0, 0.0}, clay},
        {{4.0, 5.0, -2.0, 0.0}, clay},
        {{1.0, 4.0, -2.0, -1.0}, clay},
    };
    if (kind == CaseKind::Filling)
        d.boundary = {{Side::Top, 1.0, 4.0, BoundaryKind::Flux, kFillingInflow}};
    else
        d.boundary = {{Side::Bottom, 0.0, 5.0, BoundaryKind::Dirichlet, 0.0}};
    return d;
}

Problem make_problem(const CaseConfig& config)
{
    config.validate();
    Mesh mesh = build_mesh(layered_domain(config.kind), config.nx, config.ny, config.method, config.delta);
    return Problem(std::move(mesh), config.rocks, 0.0);
}

State initial_state(const Problem& problem, const CaseConfig& config)
{
    if (config.kind == CaseKind::Filling)
        return initialize(problem, {InitialKind::UniformPressure, kFillingInitialPressure});
    return initialize(problem, {InitialKind::Hydrostatic, 0.0});
}

std::string snapshot_name(double time)
{
    std::ostringstream os;
    os << "fields_t";
    if (time == std::round(time) && std::abs(time) < 1e15)
        os << static_cast<long long>(std::llround(time));
    else
        os << std::setprecision(12) << time;
    os << ".vtk";
    return os.str();
}

void write_file_atomic(const std::string& path, const std::string& contents)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path())
        fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out << contents;
        out.flush();
        if (!out)
            throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

void write_newton_csv(std::ostream& os, const std::vector<int>& iterations, const std::vector<double>& times)
{
    os << "step,time,iterations\n" << std::setprecision(17);
    for (std::size_t n = 0; n < iterations.size(); ++n)
        os << n + 1 << ',' << times[n] << ',' << iterations[n] << '\n';
}

void write_energy_csv(std::ostream& os, const EnergyReport& report)
{
    os << "step,time,dt,A,B,W,identity,scale,dissipation,cumulative_dissipation,energy\n" << std::setprecision(17);
    for (const auto& s : report.steps)
        os << s.level << ',' << s.time << ',' << s.dt << ',' << s.a << ',' << s.b << ',' << s.work << ','
           << s.identity << ',' << s.scale << ',' << s.dissipation << ',' << s.cumulative_dissipation << ','
           << s.energy << '\n';
}

void write_errors_csv(std::ostream& os, const std::vector<ErrorRow>& rows)
{
    os << "mesh,cells,method,delta,error,order,newton_total,newton_avg,newton_max\n" << std::setprecision(17);
    for (const auto& r : rows)
        os << r.mesh.tag() << ',' << r.cells << ',' << to_string(r.method) << ',' << r.delta << ',' << r.error << ','
           << r.order << ',' << r.newton.total << ',' << r.newton.average() << ',' << r.newton.max << '\n';
}

RunReport run_case(const CaseConfig& config, const RunHooks& hooks)
{
    const Problem problem = make_problem(config);
    const State initial = initial_state(problem, config);
    RunReport report;
    report.config = config;
    const std::filesystem::path dir(config.out_dir);

    EnergyAuditor auditor(problem);
    auto on_step = [&](const State& prev, const State& next, double dt) {
        if (hooks.energy)
            auditor.observe(prev, next, dt);
        const MassBalance mb = mass_balance(problem, prev, next, dt);
        report.max_mass_defect = std::max(report.max_mass_defect, std::abs(mb.defect) / mb.water);
        if (hooks.on_step)
            hooks.on_step(prev, next, dt);
    };
    auto on_output = [&](const State& s) {
        if (!hooks.write_files)
            return;
        std::ostringstream os;
        const CellField fields[] = {{"saturation", s.saturation}, {"pressure", s.pressure}};
        write_vtk(os, problem.mesh(), fields);
        const auto path = (dir / snapshot_name(s.time)).string();
        write_file_atomic(path, os.str());
        report.files.push_back(path);
    };

    RunOptions opts;
    opts.dt = config.dt;
    opts.t_end = config.t_end;
    opts.output_times = config.output_times;
    opts.verbose = hooks.log != nullptr;
    RunResult rr = run(problem, initial, opts, on_step, on_output, hooks.log);
    report.newton = rr.newton;
    report.iterations = std::move(rr.iterations);
    report.times = std::move(rr.times);
    report.final_state = std::move(rr.final_state);
    report.energy = auditor.report();

    if (hooks.write_files) {
        std::ostringstream cfg, newton, energy;
        write_config(cfg, config);
        write_newton_csv(newton, report.iterations, report.times);
        write_energy_csv(energy, report.energy);
        for (const auto& [name, text] : {std::pair{"resolved_config.txt", cfg.str()},
                                         std::pair{"newton.csv", newton.str()},
                                         std::pair{"energy.csv", energy.str()}}) {
            const auto path = (dir / name).string();
            write_file_atomic(path, text);
            report.files.push_back(path);
        }
    }
    return report;
}

std::vector<MeshSize> parse_mesh_list(const std::string& text)
{
    std::vector<MeshSize> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto x = item.find('x');
        MeshSize m;
        if (x == std::string::npos || std::sscanf(item.c_str(), "%dx%d", &m.nx, &m.ny) != 2 || m.nx < 1 || m.ny < 1)
            throw std::invalid_argument("bad mesh size '" + item + "' (expected NXxNY)");
        out.push_back(m);
    }
    if (out.empty())
        throw std::invalid_argument("empty mesh list");
    return out;
}

namespace {

struct Grid {
    std::vector<double> xs, ys;
};

Grid base_grid(CaseKind kind, MeshSize m)
{
    const Mesh mesh = build_mesh(layered_domain(kind), m.nx, m.ny, Method::B, 0.0);
    return {mesh.base_x_lines, mesh.base_y_lines};
}

SampledTrajectory empty_trajectory(const Grid& g, const GridProjection& proj)
{
    return {g.xs, g.ys, proj.target_areas(), {}, {}};
}

} // namespace

StudyResult convergence_study(const CaseConfig& base, const StudyOptions& options)
{
    std::ostream* log = options.log;
    auto stamp = [] { return std::chrono::steady_clock::now(); };
    auto seconds = [](auto t0, auto t1) { return std::chrono::duration<double>(t1 - t0).count(); };

    // Every grid an error is measured on.
    std::vector<MeshSize> grids = options.meshes;
    for (const auto& m : options.delta_meshes)
        if (std::none_of(grids.begin(), grids.end(), [&](const MeshSize& g) { return g.nx == m.nx && g.ny == m.ny; }))
            grids.push_back(m);

    CaseConfig ref_cfg = base;
    ref_cfg.nx = options.reference.nx;
    ref_cfg.ny = options.reference.ny;
    ref_cfg.method = Method::A;
    ref_cfg.out_dir = (std::filesystem::path(base.out_dir) / ("reference_" + options.reference.tag())).string();

    StudyResult result;
    std::vector<SampledTrajectory> reference;
    {
        const Problem problem = make_problem(ref_cfg);
        std::vector<GridProjection> projections;
        for (const auto& g : grids) {
            const Grid grid = base_grid(base.kind, g);
            projections.emplace_back(problem.mesh(), grid.xs, grid.ys);
            reference.push_back(empty_trajectory(grid, projections.back()));
        }
        auto record = [&](const State& s) {
            for (std::size_t i = 0; i < grids.size(); ++i)
                reference[i].record(s.time, projections[i].apply(s.saturation));
        };
        record(initial_state(problem, ref_cfg));
        RunHooks hooks;
        hooks.write_files = options.write_files;
        hooks.energy = options.energy;
        hooks.on_step = [&](const State&, const State& next, double) { record(next); };
        const auto t0 = stamp();
        const RunReport rr = run_case(ref_cfg, hooks);
        result.reference.mesh = options.reference;
        result.reference.cells = problem.size();
        result.reference.delta = ref_cfg.delta;
        result.reference.newton = rr.newton;
        result.reference.max_energy_identity = rr.energy.max_relative_identity();
        result.reference.max_mass_defect = rr.max_mass_defect;
        if (!rr.energy.steps.empty())
            result.reference.dissipation = rr.energy.steps.back().cumulative_dissipation;
        if (log)
            *log << "reference " << options.reference.tag() << " A: " << rr.newton.steps << " steps, "
                 << rr.newton.total << " Newton, " << seconds(t0, stamp()) << " s" << std::endl;
    }

    struct Job {
        MeshSize mesh;
        Method method;
        double delta;
    };
    std::vector<Job> jobs;
    for (const auto method : options.methods)
        for (const auto& m : options.meshes)
            jobs.push_back({m, method, method == Method::A ? base.delta : 0.0});
    for (const double d : options.extra_deltas)
        for (const auto& m : options.delta_meshes)
            jobs.push_back({m, Method::A, d});

    std::vector<ErrorRow>& rows = result.rows;
    for (const auto& job : jobs) {
        std::size_t gi = 0;
        while (grids[gi].nx != job.mesh.nx || grids[gi].ny != job.mesh.ny)
            ++gi;
        CaseConfig cfg = base;
        cfg.nx = job.mesh.nx;
        cfg.ny = job.mesh.ny;
        cfg.method = job.method;
        if (job.method == Method::A)
            cfg.delta = job.delta;
        std::ostringstream sub;
        sub << job.mesh.tag() << '_' << to_string(job.method);
        if (job.method == Method::A)
            sub << "_delta" << job.delta;
        cfg.out_dir = (std::filesystem::path(base.out_dir) / sub.str()).string();

        const Problem problem = make_problem(cfg);
        const Grid grid = base_grid(base.kind, job.mesh);
        const GridProjection proj(problem.mesh(), grid.xs, grid.ys);
        SampledTrajectory traj = empty_trajectory(grid, proj);
        traj.record(0.0, proj.apply(initial_state(problem, cfg).saturation));
        RunHooks hooks;
        hooks.write_files = options.write_files;
        hooks.energy = options.energy;
        hooks.on_step = [&](const State&, const State& next, double) { traj.record(next.time, proj.apply(next.saturation)); };
        const auto t0 = stamp();
        const RunReport rr = run_case(cfg, hooks);

        ErrorRow row;
        row.mesh = job.mesh;
        row.cells = problem.size();
        row.method = job.method;
        row.delta = job.method == Method::A ? job.delta : 0.0;
        row.error = l2_error(traj, reference[gi]);
        row.newton = rr.newton;
        row.max_energy_identity = rr.energy.max_relative_identity();
        row.max_mass_defect = rr.max_mass_defect;
        if (!rr.energy.steps.empty())
            row.dissipation = rr.energy.steps.back().cumulative_dissipation;
        rows.push_back(row);
        if (log)
            *log << sub.str() << ": error " << row.error << ", Newton avg " << row.newton.average() << " max "
                 << row.newton.max << ", " << seconds(t0, stamp()) << " s" << std::endl;
    }

    std::map<std::pair<int, double>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < rows.size(); ++i)
        groups[{static_cast<int>(rows[i].method), rows[i].delta}].push_back(i);
    for (const auto& [key, members] : groups) {
        std::vector<std::pair<double, double>> pts;
        for (auto i : members)
            pts.emplace_back(static_cast<double>(rows[i].mesh.nx) * rows[i].mesh.ny, rows[i].error);
        double order = std::nan("");
        if (pts.size() >= 2)
            order = fit_order(pts);
        for (auto i : members)
            rows[i].order = order;
    }

    if (options.write_files) {
        std::ostringstream os;
        write_errors_csv(os, rows);
        write_file_atomic((std::filesystem::path(base.out_dir) / "errors.csv").string(), os.str());
    }
    return result;
}

} // namespace richards
