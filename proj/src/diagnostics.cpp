#include "richards/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace richards {

double EnergyReport::max_relative_identity() const
{
    double r = 0.0;
    for (const auto& s : steps)
        r = std::max(r, std::abs(s.identity) / s.scale);
    return r;
}

EnergyAuditor::EnergyAuditor(const Problem& problem, bool with_energy) : problem_(&problem), with_energy_(with_energy) {}

void EnergyAuditor::observe(const State& previous, const State& next, double dt)
{
    const Problem& pb = *problem_;
    const Mesh& mesh = pb.mesh();
    const auto& bd = pb.boundary();
    const auto& pd = bd.cell_reference_pressure;
    EnergyStep st;
    st.level = next.level;
    st.time = next.time;
    st.dt = dt;

    for (std::size_t k = 0; k < mesh.cell_count(); ++k) {
        const RockType& rock = pb.law(static_cast<int>(k)).rock;
        st.a += mesh.cells[k].measure() * rock.porosity * (next.saturation[k] - previous.saturation[k]) *
                (next.pressure[k] - pd[k]);
        if (with_energy_)
            st.energy += mesh.cells[k].measure() * energy_density(rock, next.saturation[k], pd[k]);
    }

    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const Face& face = mesh.faces[f];
        const auto k = static_cast<std::size_t>(face.owner);
        const double flux = face.measure * face_flux(pb, static_cast<int>(f), next);
        if (face.type == FaceType::Neumann) {
            if (bd.prescribed_flux[f])
                st.work += dt * face.measure * bd.face_value[f] * (next.pressure[k] - pd[k]);
            continue;
        }
        double jump, jump_d;
        if (face.type == FaceType::Dirichlet) {
            jump = next.pressure[k] - bd.face_value[f];
            jump_d = pd[k] - bd.face_value[f];
        } else {
            const auto l = static_cast<std::size_t>(face.neighbour);
            jump = next.pressure[k] - next.pressure[l];
            jump_d = pd[k] - pd[l];
        }
        st.b += dt * flux * (jump - jump_d);
        // a lambda eta = m F / (theta_K - theta_Ksigma); recompute the mobility to avoid 0/0.
        const double theta_k = next.pressure[k] + pb.cell_gravity(face.owner);
        double theta_s, s_s;
        const RockType* rock_s;
        if (face.type == FaceType::Dirichlet) {
            theta_s = bd.face_value[f] + pb.face_gravity(static_cast<int>(f));
            s_s = pb.dirichlet_saturation(static_cast<int>(f));
            rock_s = &pb.law(face.owner).rock;
        } else {
            theta_s = next.pressure[static_cast<std::size_t>(face.neighbour)] + pb.cell_gravity(face.neighbour);
            s_s = next.saturation[static_cast<std::size_t>(face.neighbour)];
            rock_s = &pb.law(face.neighbour).rock;
        }
        const double eta = upwind_mobility(pb.law(face.owner).rock, *rock_s, next.saturation[k], s_s, theta_k, theta_s);
        st.dissipation += dt * pb.face_coefficient(static_cast<int>(f)) * eta * jump * jump;
    }
    st.identity = st.a + st.b - st.work;
    st.scale = std::abs(st.a) + std::abs(st.b) + std::abs(st.work) + 1.0;
    st.cumulative_dissipation =
        (report_.steps.empty() ? 0.0 : report_.steps.back().cumulative_dissipation) + st.dissipation;
    report_.steps.push_back(st);
}

EnergyReport energy_audit(const Problem& problem, const std::vector<State>& trajectory, bool with_energy)
{
    EnergyAuditor auditor(problem, with_energy);
    for (std::size_t n = 1; n < trajectory.size(); ++n)
        auditor.observe(trajectory[n - 1], trajectory[n], trajectory[n].time - trajectory[n - 1].time);
    return auditor.report();
}

MassBalance mass_balance(const Problem& problem, const State& previous, const State& next, double dt)
{
    const Mesh& mesh = problem.mesh();
    MassBalance mb;
    for (std::size_t k = 0; k < mesh.cell_count(); ++k) {
        const double w = mesh.cells[k].measure() * problem.law(static_cast<int>(k)).rock.porosity;
        mb.storage += w * (next.saturation[k] - previous.saturation[k]);
        mb.water += w * next.saturation[k];
    }
    for (std::size_t f = 0; f < mesh.faces.size(); ++f)
        if (mesh.faces[f].type != FaceType::Interior)
            mb.inflow -= dt * mesh.faces[f].measure * face_flux(problem, static_cast<int>(f), next);
    mb.defect = mb.storage - mb.inflow;
    return mb;
}

namespace {

/// Index of the grid interval containing [a, b]; -1 if it straddles a line.
int locate(std::span<const double> lines, double a, double b)
{
    const double tol = 1e-9 * (lines.back() - lines.front());
    const double c = 0.5 * (a + b);
    auto it = std::upper_bound(lines.begin(), lines.end(), c);
    if (it == lines.begin() || it == lines.end())
        return -1;
    const auto i = static_cast<int>(it - lines.begin()) - 1;
    if (a < lines[static_cast<std::size_t>(i)] - tol || b > lines[static_cast<std::size_t>(i) + 1] + tol)
        return -1;
    return i;
}

} // namespace

GridProjection::GridProjection(const Mesh& source, std::span<const double> x_lines, std::span<const double> y_lines)
{
    if (x_lines.size() < 2 || y_lines.size() < 2)
        throw std::invalid_argument("GridProjection: empty target grid");
    const std::size_t nx = x_lines.size() - 1;
    const std::size_t ny = y_lines.size() - 1;
    areas_.assign(nx * ny, 0.0);
    target_.resize(source.cell_count());
    for (std::size_t k = 0; k < source.cell_count(); ++k) {
        const Cell& c = source.cells[k];
        const int i = locate(x_lines, c.cx - 0.5 * c.dx, c.cx + 0.5 * c.dx);
        const int j = locate(y_lines, c.cy - 0.5 * c.dy, c.cy + 0.5 * c.dy);
        if (i < 0 || j < 0)
            throw std::invalid_argument("GridProjection: meshes are not nested (cell at x=" + std::to_string(c.cx) +
                                        ", y=" + std::to_string(c.cy) + ")");
        target_[k] = j * static_cast<int>(nx) + i;
        areas_[static_cast<std::size_t>(target_[k])] += c.measure();
    }
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) {
            const double expect = (x_lines[i + 1] - x_lines[i]) * (y_lines[j + 1] - y_lines[j]);
            if (std::abs(areas_[j * nx + i] - expect) > 1e-9 * expect)
                throw std::invalid_argument("GridProjection: source mesh does not cover the target grid");
        }
    weight_.resize(source.cell_count());
    for (std::size_t k = 0; k < source.cell_count(); ++k)
        weight_[k] = source.cells[k].measure() / areas_[static_cast<std::size_t>(target_[k])];
}

std::vector<double> GridProjection::apply(std::span<const double> values) const
{
    if (values.size() != target_.size())
        throw std::invalid_argument("GridProjection::apply: wrong field size");
    std::vector<double> out(areas_.size(), 0.0);
    for (std::size_t k = 0; k < values.size(); ++k)
        out[static_cast<std::size_t>(target_[k])] += weight_[k] * values[k];
    return out;
}

void SampledTrajectory::record(double time, std::vector<double> field)
{
    if (field.size() != areas.size())
        throw std::invalid_argument("SampledTrajectory::record: wrong field size");
    if (!times.empty() && time <= times.back())
        throw std::invalid_argument("SampledTrajectory::record: times must increase");
    times.push_back(time);
    values.push_back(std::move(field));
}

double l2_error(const SampledTrajectory& run, const SampledTrajectory& reference)
{
    auto same = [](const std::vector<double>& a, const std::vector<double>& b) {
        if (a.size() != b.size())
            return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (std::abs(a[i] - b[i]) > 1e-9 * std::max(1.0, std::abs(a[i])))
                return false;
        return true;
    };
    if (!same(run.x_lines, reference.x_lines) || !same(run.y_lines, reference.y_lines))
        throw std::invalid_argument("l2_error: trajectories are sampled on different grids");
    if (run.times.size() < 2 || reference.times.empty())
        throw std::invalid_argument("l2_error: need at least one time step");
    const double t_tol = 1e-9 * std::max(1.0, std::abs(run.times.back()));
    if (std::abs(run.times.back() - reference.times.back()) > t_tol)
        throw std::invalid_argument("l2_error: final times differ");

    double num = 0.0, den = 0.0;
    std::size_t r = 0;
    for (std::size_t n = 1; n < run.times.size(); ++n) {
        const double dt = run.times[n] - run.times[n - 1];
        while (r + 1 < reference.times.size() && reference.times[r] < run.times[n] - t_tol)
            ++r;
        const auto& s = run.values[n];
        const auto& q = reference.values[r];
        double a = 0.0, b = 0.0;
        for (std::size_t k = 0; k < s.size(); ++k) {
            a += run.areas[k] * (s[k] - q[k]) * (s[k] - q[k]);
            b += run.areas[k] * q[k] * q[k];
        }
        num += dt * a;
        den += dt * b;
    }
    if (!(den > 0.0))
        throw std::invalid_argument("l2_error: reference has zero norm");
    return std::sqrt(num / den);
}

double l2_error(const Mesh& run_mesh, const std::vector<State>& run, const Mesh& reference_mesh,
                const std::vector<State>& reference)
{
    const auto& xs = run_mesh.base_x_lines;
    const auto& ys = run_mesh.base_y_lines;
    GridProjection prun(run_mesh, xs, ys);
    GridProjection pref(reference_mesh, xs, ys);
    SampledTrajectory a{xs, ys, prun.target_areas(), {}, {}};
    SampledTrajectory b{xs, ys, pref.target_areas(), {}, {}};
    for (const auto& s : run)
        a.record(s.time, prun.apply(s.saturation));
    for (const auto& s : reference)
        b.record(s.time, pref.apply(s.saturation));
    return l2_error(a, b);
}

double fit_order(const std::vector<std::pair<double, double>>& cells_and_errors)
{
    if (cells_and_errors.size() < 2)
        throw std::invalid_argument("fit_order: need at least two points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const auto n = static_cast<double>(cells_and_errors.size());
    for (const auto& [cells, err] : cells_and_errors) {
        if (!(cells > 0.0) || !(err > 0.0))
            throw std::invalid_argument("fit_order: cell counts and errors must be positive");
        const double x = -0.5 * std::log(cells); // log h
        const double y = std::log(err);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double den = n * sxx - sx * sx;
    if (!(std::abs(den) > 0.0))
        throw std::invalid_argument("fit_order: cell counts must differ");
    return (n * sxy - sx * sy) / den;
}

} // namespace richards
