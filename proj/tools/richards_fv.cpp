// richards-fv: run one case or a mesh convergence study.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "richards/cases.hpp"

namespace {

struct CommonFlags {
    std::string config;
    std::optional<std::string> kind, model, method, out;
    std::vector<int> mesh;
    std::optional<double> delta, dt, t_end;
};

void add_common(CLI::App* app, CommonFlags& f)
{
    app->add_option("--config", f.config, "key = value configuration file");
    app->add_option("--case", f.kind, "filling | drainage");
    app->add_option("--model", f.model, "brooks-corey (bc) | van-genuchten (vg)");
    app->add_option("--method", f.method, "A (thin interface cells) | B");
    app->add_option("--delta", f.delta, "thin cell width [m]");
    app->add_option("--dt", f.dt, "time step [s]");
    app->add_option("--t-end", f.t_end, "final time [s]");
    app->add_option("--out", f.out, "output directory");
}

richards::CaseConfig resolve(const CommonFlags& f)
{
    richards::ConfigValues v;
    if (!f.config.empty())
        v = richards::read_config_file(f.config);
    auto put = [&](const char* key, const auto& opt) {
        if (opt) {
            std::ostringstream os;
            os.precision(17);
            os << *opt;
            v[key] = os.str();
        }
    };
    put("case", f.kind);
    put("model", f.model);
    put("method", f.method);
    put("delta", f.delta);
    put("dt", f.dt);
    put("t_end", f.t_end);
    put("out", f.out);
    if (!f.mesh.empty()) {
        v["nx"] = std::to_string(f.mesh[0]);
        v["ny"] = std::to_string(f.mesh[1]);
    }
    return richards::resolve_config(v);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Finite-volume Richards equation solver for layered porous media"};
    app.require_subcommand(1);

    CommonFlags run_flags;
    bool verbose = false;
    auto* run = app.add_subcommand("run", "run one case");
    add_common(run, run_flags);
    run->add_option("--mesh", run_flags.mesh, "NX NY")->expected(2);
    run->add_flag("-v,--verbose", verbose, "print one line per time step");

    CommonFlags study_flags;
    std::string meshes = "50x30,100x60,200x120";
    std::string reference = "400x240";
    std::vector<double> deltas;
    auto* study = app.add_subcommand("study", "mesh convergence study against a fine method-A reference");
    add_common(study, study_flags);
    study->add_option("--meshes", meshes, "ladder, e.g. 50x30,100x60,200x120");
    study->add_option("--with-reference", reference, "reference mesh NXxNY");
    study->add_option("--delta-sweep", deltas, "extra method-A delta values run on the finest ladder mesh")
        ->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            const richards::CaseConfig cfg = resolve(run_flags);
            const richards::RunReport r = run_case(cfg, {{}, true, true, verbose ? &std::cout : nullptr});
            std::cout << "steps " << r.newton.steps << ", Newton total " << r.newton.total << ", avg "
                      << r.newton.average() << ", max " << r.newton.max << '\n'
                      << "max energy identity defect " << r.energy.max_relative_identity()
                      << ", max mass defect " << r.max_mass_defect << '\n'
                      << "output in " << cfg.out_dir << '\n';
        } else {
            const richards::CaseConfig cfg = resolve(study_flags);
            richards::StudyOptions opts;
            opts.meshes = richards::parse_mesh_list(meshes);
            opts.reference = richards::parse_mesh_list(reference).front();
            if (!deltas.empty()) {
                opts.extra_deltas = deltas;
                opts.delta_meshes = {opts.meshes.back()};
            }
            opts.log = &std::cout;
            const auto study = richards::convergence_study(cfg, opts);
            richards::write_errors_csv(std::cout, study.rows);
        }
    } catch (const std::exception& e) {
        std::cerr << "richards-fv: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
