#include "richards/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace richards {

namespace {

struct CellEval {
    double p, s, dp, ds;
    double theta;
    double head_size; ///< |p| + |psi| + |tau dp/dtau|, the rounding scale of theta
    double eta, deta; ///< homotopy mobility and d eta / ds
};

/// Position of entry (row, col) in the value array of a compressed column-major matrix.
int slot_of(const Eigen::SparseMatrix<double>& m, int row, int col)
{
    const int* inner = m.innerIndexPtr();
    const int begin = m.outerIndexPtr()[col];
    const int end = m.outerIndexPtr()[col + 1];
    const int* it = std::lower_bound(inner + begin, inner + end, row);
    if (it == inner + end || *it != row)
        throw std::logic_error("jacobian pattern is missing an entry");
    return static_cast<int>(it - inner);
}

} // namespace

BoundaryData make_boundary_data(const Mesh& mesh, double reference_pressure)
{
    BoundaryData bd;
    bd.face_value.assign(mesh.faces.size(), 0.0);
    bd.prescribed_flux.assign(mesh.faces.size(), 0);
    bd.cell_reference_pressure.assign(mesh.cell_count(), reference_pressure);
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const Face& face = mesh.faces[f];
        if (face.type == FaceType::Interior || face.segment < 0)
            continue;
        const auto& seg = mesh.boundary[static_cast<std::size_t>(face.segment)];
        if (seg.kind == BoundaryKind::Dirichlet) {
            bd.face_value[f] = seg.value;
            bd.has_dirichlet = true;
        } else if (seg.kind == BoundaryKind::Flux) {
            bd.face_value[f] = seg.value;
            bd.prescribed_flux[f] = 1;
        }
    }
    return bd;
}

Problem::Problem(Mesh mesh, std::vector<RockType> rocks, double reference_pressure)
    : mesh_(std::move(mesh))
{
    for (const auto& c : mesh_.cells)
        if (c.rock < 0 || static_cast<std::size_t>(c.rock) >= rocks.size())
            throw std::invalid_argument("Problem: cell refers to a missing rock type");
    for (auto& r : rocks)
        rocks_.push_back({r, parametrize(r)});
    boundary_ = make_boundary_data(mesh_, reference_pressure);

    const std::size_t nf = mesh_.faces.size();
    const std::size_t nc = mesh_.cell_count();
    face_coefficient_.resize(nf);
    face_permeability_.resize(nf);
    face_gravity_.resize(nf);
    dirichlet_saturation_.assign(nf, 0.0);
    cell_gravity_.resize(nc);
    for (std::size_t k = 0; k < nc; ++k)
        cell_gravity_[k] = kWaterDensity * kGravity * mesh_.cells[k].cy;

    std::vector<Eigen::Triplet<double, int>> triplets;
    triplets.reserve(nc + 2 * nf);
    for (std::size_t k = 0; k < nc; ++k)
        triplets.emplace_back(static_cast<int>(k), static_cast<int>(k), 1.0);

    for (std::size_t f = 0; f < nf; ++f) {
        const Face& face = mesh_.faces[f];
        const RockType& rk = law(face.owner).rock;
        face_gravity_[f] = kWaterDensity * kGravity * face.cy;
        if (face.type == FaceType::Interior) {
            const RockType& rl = law(face.neighbour).rock;
            face_permeability_[f] = edge_permeability(rk.permeability, rl.permeability, face.owner_distance,
                                                      face.neighbour_distance, face.distance);
            triplets.emplace_back(face.owner, face.neighbour, 1.0);
            triplets.emplace_back(face.neighbour, face.owner, 1.0);
        } else {
            face_permeability_[f] = edge_permeability_boundary(rk.permeability);
            if (face.type == FaceType::Dirichlet)
                dirichlet_saturation_[f] = saturation(rk, boundary_.face_value[f]);
        }
        face_coefficient_[f] = face_permeability_[f] * transmissivity(face);
    }

    pattern_.resize(static_cast<int>(nc), static_cast<int>(nc));
    pattern_.setFromTriplets(triplets.begin(), triplets.end());
    pattern_.makeCompressed();
    diagonal_slot_.resize(nc);
    for (std::size_t k = 0; k < nc; ++k)
        diagonal_slot_[k] = slot_of(pattern_, static_cast<int>(k), static_cast<int>(k));
    face_slots_.assign(nf, {-1, -1, -1, -1});
    for (std::size_t f = 0; f < nf; ++f) {
        const Face& face = mesh_.faces[f];
        const int k = face.owner;
        auto& s = face_slots_[f];
        s[0] = diagonal_slot_[static_cast<std::size_t>(k)];
        if (face.type == FaceType::Interior) {
            const int l = face.neighbour;
            s[1] = slot_of(pattern_, k, l);
            s[2] = slot_of(pattern_, l, k);
            s[3] = diagonal_slot_[static_cast<std::size_t>(l)];
        }
    }
    std::fill(pattern_.valuePtr(), pattern_.valuePtr() + pattern_.nonZeros(), 0.0);
}

State make_state(const Problem& problem, std::vector<double> tau, int level, double time)
{
    if (tau.size() != problem.size())
        throw std::invalid_argument("make_state: tau has the wrong size");
    State st;
    st.level = level;
    st.time = time;
    st.pressure.resize(tau.size());
    st.saturation.resize(tau.size());
    for (std::size_t k = 0; k < tau.size(); ++k) {
        const RockLaw& law = problem.law(static_cast<int>(k));
        const ParamPoint pt = eval_param(law.rock, law.param, tau[k]);
        st.pressure[k] = pt.pressure;
        st.saturation[k] = pt.saturation;
    }
    st.tau = std::move(tau);
    return st;
}

State state_from_pressure(const Problem& problem, const std::vector<double>& pressure, int level, double time)
{
    if (pressure.size() != problem.size())
        throw std::invalid_argument("state_from_pressure: wrong size");
    std::vector<double> tau(pressure.size());
    for (std::size_t k = 0; k < tau.size(); ++k) {
        const RockLaw& law = problem.law(static_cast<int>(k));
        tau[k] = tau_from_pressure(law.rock, law.param, pressure[k]);
    }
    return make_state(problem, std::move(tau), level, time);
}

std::vector<double> hydraulic_head(const Problem& problem, const State& state)
{
    std::vector<double> theta(state.pressure.size());
    for (std::size_t k = 0; k < theta.size(); ++k)
        theta[k] = state.pressure[k] + problem.cell_gravity(static_cast<int>(k));
    return theta;
}

double edge_permeability(double lambda_k, double lambda_l, double d_k, double d_l, double d)
{
    return lambda_k * lambda_l * d / (lambda_k * d_l + lambda_l * d_k);
}

double upwind_mobility(const RockType& rock_k, const RockType& rock_ks, double s_k, double s_ks, double theta_k,
                       double theta_ks)
{
    if (theta_k > theta_ks)
        return mobility(rock_k, s_k);
    if (theta_k < theta_ks)
        return mobility(rock_ks, s_ks);
    return 0.5 * (mobility(rock_k, s_k) + mobility(rock_ks, s_ks));
}

double face_flux(const Problem& problem, int f, const State& state)
{
    const Face& face = problem.mesh().faces[static_cast<std::size_t>(f)];
    const auto uf = static_cast<std::size_t>(f);
    const int k = face.owner;
    const auto uk = static_cast<std::size_t>(k);
    const RockType& rk = problem.law(k).rock;
    const double theta_k = state.pressure[uk] + problem.cell_gravity(k);
    switch (face.type) {
    case FaceType::Neumann:
        return problem.boundary().prescribed_flux[uf] ? -problem.boundary().face_value[uf] : 0.0;
    case FaceType::Dirichlet: {
        const double theta_s = problem.boundary().face_value[uf] + problem.face_gravity(f);
        const double eta = upwind_mobility(rk, rk, state.saturation[uk], problem.dirichlet_saturation(f), theta_k, theta_s);
        return problem.face_permeability(f) * eta * (theta_k - theta_s) / face.distance;
    }
    case FaceType::Interior: {
        const int l = face.neighbour;
        const auto ul = static_cast<std::size_t>(l);
        const double theta_l = state.pressure[ul] + problem.cell_gravity(l);
        const double eta = upwind_mobility(rk, problem.law(l).rock, state.saturation[uk], state.saturation[ul],
                                           theta_k, theta_l);
        return problem.face_permeability(f) * eta * (theta_k - theta_l) / face.distance;
    }
    }
    return 0.0;
}

void assemble(const Problem& problem, const State& state, const std::vector<double>& previous_saturation, double dt,
              const Homotopy& homotopy, bool with_jacobian, Assembly& out)
{
    if (!(dt > 0.0))
        throw std::invalid_argument("assemble: dt must be positive");
    const Mesh& mesh = problem.mesh();
    const std::size_t nc = mesh.cell_count();
    const double gamma = homotopy.gamma;

    std::vector<CellEval> ev(nc);
    for (std::size_t k = 0; k < nc; ++k) {
        const RockLaw& law = problem.law(static_cast<int>(k));
        const ParamPoint pt = eval_param(law.rock, law.param, state.tau[k]);
        CellEval& e = ev[k];
        e.p = pt.pressure;
        e.s = pt.saturation;
        e.dp = pt.dpressure;
        e.ds = pt.dsaturation;
        e.theta = e.p + problem.cell_gravity(static_cast<int>(k));
        // p = p(tau) inherits the rounding of tau, amplified on the steep dry branch.
        e.head_size = std::abs(e.p) + std::abs(problem.cell_gravity(static_cast<int>(k))) + std::abs(state.tau[k] * e.dp);
        e.eta = (1.0 - gamma) / law.rock.viscosity + gamma * mobility(law.rock, e.s);
        e.deta = gamma * dmobility_ds(law.rock, e.s);
    }

    out.residual.setZero(static_cast<Eigen::Index>(nc));
    out.row_scale.setZero(static_cast<Eigen::Index>(nc));
    double* jac = nullptr;
    if (with_jacobian) {
        out.jacobian = problem.jacobian_pattern();
        jac = out.jacobian.valuePtr();
    }

    for (std::size_t k = 0; k < nc; ++k) {
        const double w = homotopy.time_weight * mesh.cells[k].measure() *
                         problem.law(static_cast<int>(k)).rock.porosity / dt;
        out.residual[static_cast<Eigen::Index>(k)] += w * (ev[k].s - previous_saturation[k]);
        out.row_scale[static_cast<Eigen::Index>(k)] += w;
        if (jac)
            jac[problem.diagonal_slot(static_cast<int>(k))] += w * ev[k].ds;
    }

    const auto& bd = problem.boundary();
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const Face& face = mesh.faces[f];
        const auto k = static_cast<std::size_t>(face.owner);
        const auto ik = static_cast<Eigen::Index>(k);
        const CellEval& ek = ev[k];
        const double c = problem.face_coefficient(static_cast<int>(f));
        const auto& slots = problem.face_slots(static_cast<int>(f));

        if (face.type == FaceType::Neumann) {
            if (bd.prescribed_flux[f]) {
                const double g = -face.measure * bd.face_value[f];
                out.residual[ik] += g;
                out.row_scale[ik] += std::abs(g);
            }
            continue;
        }

        if (face.type == FaceType::Dirichlet) {
            const RockType& rk = problem.law(face.owner).rock;
            const double theta_s = bd.face_value[f] + problem.face_gravity(static_cast<int>(f));
            const double eta_s = (1.0 - gamma) / rk.viscosity + gamma * mobility(rk, problem.dirichlet_saturation(static_cast<int>(f)));
            const double dtheta = ek.theta - theta_s;
            double eta, deta_dk;
            if (dtheta > 0.0) {
                eta = ek.eta;
                deta_dk = ek.deta * ek.ds;
            } else if (dtheta < 0.0) {
                eta = eta_s;
                deta_dk = 0.0;
            } else {
                eta = 0.5 * (ek.eta + eta_s);
                deta_dk = 0.5 * ek.deta * ek.ds;
            }
            const double g = c * eta * dtheta;
            out.residual[ik] += g;
            out.row_scale[ik] += c * eta * (ek.head_size + std::abs(bd.face_value[f]) +
                                            std::abs(problem.face_gravity(static_cast<int>(f))));
            if (jac)
                jac[slots[0]] += c * (deta_dk * dtheta + eta * ek.dp);
            continue;
        }

        const auto l = static_cast<std::size_t>(face.neighbour);
        const auto il = static_cast<Eigen::Index>(l);
        const CellEval& el = ev[l];
        const double dtheta = ek.theta - el.theta;
        double eta, deta_dk, deta_dl;
        if (dtheta > 0.0) {
            eta = ek.eta;
            deta_dk = ek.deta * ek.ds;
            deta_dl = 0.0;
        } else if (dtheta < 0.0) {
            eta = el.eta;
            deta_dk = 0.0;
            deta_dl = el.deta * el.ds;
        } else {
            eta = 0.5 * (ek.eta + el.eta);
            deta_dk = 0.5 * ek.deta * ek.ds;
            deta_dl = 0.5 * el.deta * el.ds;
        }
        const double g = c * eta * dtheta;
        out.residual[ik] += g;
        out.residual[il] -= g;
        const double mag = c * eta * (ek.head_size + el.head_size);
        out.row_scale[ik] += mag;
        out.row_scale[il] += mag;
        if (jac) {
            const double dg_dk = c * (deta_dk * dtheta + eta * ek.dp);
            const double dg_dl = c * (deta_dl * dtheta - eta * el.dp);
            jac[slots[0]] += dg_dk;
            jac[slots[1]] += dg_dl;
            jac[slots[2]] -= dg_dk;
            jac[slots[3]] -= dg_dl;
        }
    }
}

Eigen::VectorXd residual(const Problem& problem, const State& state, const State& previous, double dt)
{
    Assembly a;
    assemble(problem, state, previous.saturation, dt, Homotopy{}, false, a);
    return a.residual;
}

Eigen::SparseMatrix<double> jacobian(const Problem& problem, const State& state, const State& previous, double dt)
{
    Assembly a;
    assemble(problem, state, previous.saturation, dt, Homotopy{}, true, a);
    return a.jacobian;
}

State initialize(const Problem& problem, const InitialCondition& initial)
{
    std::vector<double> p(problem.size());
    for (std::size_t k = 0; k < p.size(); ++k)
        p[k] = initial.kind == InitialKind::UniformPressure
                   ? initial.value
                   : initial.value - problem.cell_gravity(static_cast<int>(k));
    return state_from_pressure(problem, p, 0, 0.0);
}

} // namespace richards
