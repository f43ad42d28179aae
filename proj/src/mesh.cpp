#include "richards/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace richards {

namespace {

std::string fmt(double v)
{
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

/// Index of the grid line matching coordinate c; throws if none does.
std::size_t snap(std::vector<double>& lines, double c, double tol, const std::string& what)
{
    auto it = std::min_element(lines.begin(), lines.end(),
                               [c](double a, double b) { return std::abs(a - c) < std::abs(b - c); });
    if (std::abs(*it - c) > tol)
        throw std::invalid_argument("mesh incompatible with domain: " + what + " = " + fmt(c) +
                                    " does not lie on a grid line");
    *it = c;
    return static_cast<std::size_t>(it - lines.begin());
}

std::vector<double> uniform_lines(double a, double b, int n)
{
    std::vector<double> lines(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k)
        lines[static_cast<std::size_t>(k)] = a + (b - a) * static_cast<double>(k) / static_cast<double>(n);
    lines.back() = b;
    return lines;
}

double side_extent_lo(const Rect& box, Side side)
{
    return (side == Side::Bottom || side == Side::Top) ? box.x0 : box.y0;
}
double side_extent_hi(const Rect& box, Side side)
{
    return (side == Side::Bottom || side == Side::Top) ? box.x1 : box.y1;
}

int find_segment(const std::vector<BoundarySegment>& segments, Side side, double t)
{
    for (std::size_t k = 0; k < segments.size(); ++k) {
        const auto& seg = segments[k];
        if (seg.side == side && t > seg.lo && t < seg.hi)
            return static_cast<int>(k);
    }
    return -1;
}

} // namespace

std::string to_string(Side side)
{
    switch (side) {
    case Side::Bottom: return "bottom";
    case Side::Right: return "right";
    case Side::Top: return "top";
    case Side::Left: return "left";
    }
    return "?";
}

Side side_from_string(const std::string& tag)
{
    if (tag == "bottom") return Side::Bottom;
    if (tag == "right") return Side::Right;
    if (tag == "top") return Side::Top;
    if (tag == "left") return Side::Left;
    throw std::invalid_argument("unknown boundary side '" + tag + "'");
}

std::string to_string(Method method) { return method == Method::A ? "A" : "B"; }

Method method_from_string(const std::string& tag)
{
    if (tag == "A" || tag == "a") return Method::A;
    if (tag == "B" || tag == "b") return Method::B;
    throw std::invalid_argument("unknown method '" + tag + "' (expected A or B)");
}

int Domain::rock_count() const
{
    int n = 0;
    for (const auto& sd : subdomains)
        n = std::max(n, sd.rock + 1);
    return n;
}

std::optional<int> Domain::rock_at(double x, double y) const
{
    for (const auto& sd : subdomains)
        if (sd.rect.contains(x, y))
            return sd.rock;
    return std::nullopt;
}

void Domain::validate() const
{
    if (!(box.x1 > box.x0 && box.y1 > box.y0))
        throw std::invalid_argument("domain: empty bounding box");
    if (subdomains.empty())
        throw std::invalid_argument("domain: no subdomains");
    double covered = 0.0;
    for (std::size_t a = 0; a < subdomains.size(); ++a) {
        const Rect& r = subdomains[a].rect;
        if (subdomains[a].rock < 0)
            throw std::invalid_argument("domain: negative rock index");
        if (!(r.x1 > r.x0 && r.y1 > r.y0))
            throw std::invalid_argument("domain: degenerate subdomain");
        if (r.x0 < box.x0 || r.x1 > box.x1 || r.y0 < box.y0 || r.y1 > box.y1)
            throw std::invalid_argument("domain: subdomain leaves the bounding box");
        for (std::size_t b = a + 1; b < subdomains.size(); ++b) {
            const Rect& q = subdomains[b].rect;
            const double ox = std::min(r.x1, q.x1) - std::max(r.x0, q.x0);
            const double oy = std::min(r.y1, q.y1) - std::max(r.y0, q.y0);
            if (ox > 0.0 && oy > 0.0)
                throw std::invalid_argument("domain: overlapping subdomains");
        }
        covered += r.area();
    }
    if (std::abs(covered - box.area()) > 1e-12 * box.area())
        throw std::invalid_argument("domain: subdomains do not cover the bounding box");
    for (std::size_t a = 0; a < boundary.size(); ++a) {
        const auto& s = boundary[a];
        if (!(s.hi > s.lo) || s.lo < side_extent_lo(box, s.side) || s.hi > side_extent_hi(box, s.side))
            throw std::invalid_argument("domain: boundary segment outside its side");
        if (!std::isfinite(s.value))
            throw std::invalid_argument("domain: boundary value must be finite");
        for (std::size_t b = a + 1; b < boundary.size(); ++b) {
            const auto& t = boundary[b];
            if (t.side == s.side && std::min(s.hi, t.hi) > std::max(s.lo, t.lo))
                throw std::invalid_argument("domain: overlapping boundary segments on side " +
                                            to_string(s.side));
        }
    }
}

double Cell::diameter() const { return std::hypot(dx, dy); }

double Mesh::total_area() const
{
    double a = 0.0;
    for (const auto& c : cells)
        a += c.measure();
    return a;
}

double Mesh::max_diameter() const
{
    double h = 0.0;
    for (const auto& c : cells)
        h = std::max(h, c.diameter());
    return h;
}

std::size_t Mesh::count(FaceType type) const
{
    return static_cast<std::size_t>(
        std::count_if(faces.begin(), faces.end(), [type](const Face& f) { return f.type == type; }));
}

std::size_t Mesh::interface_count() const
{
    return static_cast<std::size_t>(
        std::count_if(faces.begin(), faces.end(), [](const Face& f) { return f.interface; }));
}

std::vector<int> Mesh::neighbours(int cell) const
{
    std::vector<int> out;
    for (int f : cell_faces[static_cast<std::size_t>(cell)]) {
        const Face& face = faces[static_cast<std::size_t>(f)];
        if (face.type != FaceType::Interior)
            continue;
        out.push_back(face.owner == cell ? face.neighbour : face.owner);
    }
    return out;
}

Mesh build_mesh(const Domain& domain, int nx, int ny, Method method, double delta)
{
    if (nx < 1 || ny < 1)
        throw std::invalid_argument("build_mesh: nx and ny must be at least 1");
    domain.validate();
    const Rect& box = domain.box;

    std::vector<double> xs = uniform_lines(box.x0, box.x1, nx);
    std::vector<double> ys = uniform_lines(box.y0, box.y1, ny);
    const double tol_x = 1e-9 * (box.x1 - box.x0);
    const double tol_y = 1e-9 * (box.y1 - box.y0);
    for (const auto& sd : domain.subdomains) {
        snap(xs, sd.rect.x0, tol_x, "subdomain x");
        snap(xs, sd.rect.x1, tol_x, "subdomain x");
        snap(ys, sd.rect.y0, tol_y, "subdomain y");
        snap(ys, sd.rect.y1, tol_y, "subdomain y");
    }
    for (const auto& seg : domain.boundary) {
        const bool horizontal = seg.side == Side::Bottom || seg.side == Side::Top;
        auto& lines = horizontal ? xs : ys;
        const double tol = horizontal ? tol_x : tol_y;
        snap(lines, seg.lo, tol, "boundary segment end");
        snap(lines, seg.hi, tol, "boundary segment end");
    }

    auto base_rock = [&](std::size_t i, std::size_t j) {
        const double cx = 0.5 * (xs[i] + xs[i + 1]);
        const double cy = 0.5 * (ys[j] + ys[j + 1]);
        auto r = domain.rock_at(cx, cy);
        if (!r)
            throw std::invalid_argument("build_mesh: cell centre (" + fmt(cx) + ", " + fmt(cy) +
                                        ") is not inside any subdomain");
        return *r;
    };

    Mesh mesh;
    mesh.method = method;
    mesh.delta = method == Method::A ? delta : 0.0;
    mesh.base_x_lines = xs;
    mesh.base_y_lines = ys;
    mesh.boundary = domain.boundary;

    std::vector<double> x_lines = xs;
    std::vector<double> y_lines = ys;
    if (method == Method::A) {
        if (!(delta > 0.0))
            throw std::invalid_argument("build_mesh: method A requires delta > 0");
        const std::size_t bx = xs.size() - 1;
        const std::size_t by = ys.size() - 1;
        std::vector<int> rocks(bx * by);
        for (std::size_t j = 0; j < by; ++j)
            for (std::size_t i = 0; i < bx; ++i)
                rocks[j * bx + i] = base_rock(i, j);
        auto check_delta = [&](double spacing_lo, double spacing_hi, double c) {
            if (delta >= 0.5 * std::min(spacing_lo, spacing_hi))
                throw std::invalid_argument("build_mesh: delta = " + fmt(delta) +
                                            " is not below half the local spacing at interface line " +
                                            fmt(c));
        };
        for (std::size_t i = 1; i < bx; ++i) {
            bool carries = false;
            for (std::size_t j = 0; j < by && !carries; ++j)
                carries = rocks[j * bx + i - 1] != rocks[j * bx + i];
            if (!carries)
                continue;
            check_delta(xs[i] - xs[i - 1], xs[i + 1] - xs[i], xs[i]);
            x_lines.push_back(xs[i] - delta);
            x_lines.push_back(xs[i] + delta);
        }
        for (std::size_t j = 1; j < by; ++j) {
            bool carries = false;
            for (std::size_t i = 0; i < bx && !carries; ++i)
                carries = rocks[(j - 1) * bx + i] != rocks[j * bx + i];
            if (!carries)
                continue;
            check_delta(ys[j] - ys[j - 1], ys[j + 1] - ys[j], ys[j]);
            y_lines.push_back(ys[j] - delta);
            y_lines.push_back(ys[j] + delta);
        }
        std::sort(x_lines.begin(), x_lines.end());
        std::sort(y_lines.begin(), y_lines.end());
    }
    mesh.x_lines = std::move(x_lines);
    mesh.y_lines = std::move(y_lines);

    const int mx = mesh.nx();
    const int my = mesh.ny();
    mesh.cells.resize(static_cast<std::size_t>(mx) * static_cast<std::size_t>(my));
    for (int j = 0; j < my; ++j) {
        for (int i = 0; i < mx; ++i) {
            Cell& c = mesh.cells[static_cast<std::size_t>(mesh.cell_index(i, j))];
            const auto ui = static_cast<std::size_t>(i);
            const auto uj = static_cast<std::size_t>(j);
            c.i = i;
            c.j = j;
            c.dx = mesh.x_lines[ui + 1] - mesh.x_lines[ui];
            c.dy = mesh.y_lines[uj + 1] - mesh.y_lines[uj];
            c.cx = 0.5 * (mesh.x_lines[ui] + mesh.x_lines[ui + 1]);
            c.cy = 0.5 * (mesh.y_lines[uj] + mesh.y_lines[uj + 1]);
            auto r = domain.rock_at(c.cx, c.cy);
            if (!r)
                throw std::invalid_argument("build_mesh: cell centre (" + fmt(c.cx) + ", " + fmt(c.cy) +
                                            ") is not inside any subdomain");
            c.rock = *r;
        }
    }

    mesh.cell_faces.assign(mesh.cells.size(), {});
    auto add_face = [&mesh](Face f) {
        const int id = static_cast<int>(mesh.faces.size());
        mesh.cell_faces[static_cast<std::size_t>(f.owner)].push_back(id);
        if (f.neighbour >= 0)
            mesh.cell_faces[static_cast<std::size_t>(f.neighbour)].push_back(id);
        mesh.faces.push_back(f);
    };
    auto tag_boundary = [&](Face& f, Side side, double t) {
        f.segment = find_segment(domain.boundary, side, t);
        f.type = FaceType::Neumann;
        if (f.segment >= 0 && domain.boundary[static_cast<std::size_t>(f.segment)].kind == BoundaryKind::Dirichlet)
            f.type = FaceType::Dirichlet;
    };

    // Faces normal to x.
    for (int j = 0; j < my; ++j) {
        for (int l = 0; l <= mx; ++l) {
            Face f;
            f.vertical = true;
            f.measure = mesh.y_lines[static_cast<std::size_t>(j) + 1] - mesh.y_lines[static_cast<std::size_t>(j)];
            f.cx = mesh.x_lines[static_cast<std::size_t>(l)];
            f.cy = 0.5 * (mesh.y_lines[static_cast<std::size_t>(j)] + mesh.y_lines[static_cast<std::size_t>(j) + 1]);
            if (l == 0 || l == mx) {
                f.owner = mesh.cell_index(l == 0 ? 0 : mx - 1, j);
                f.owner_distance = 0.5 * mesh.cells[static_cast<std::size_t>(f.owner)].dx;
                f.distance = f.owner_distance;
                tag_boundary(f, l == 0 ? Side::Left : Side::Right, f.cy);
            } else {
                f.owner = mesh.cell_index(l - 1, j);
                f.neighbour = mesh.cell_index(l, j);
                const Cell& k = mesh.cells[static_cast<std::size_t>(f.owner)];
                const Cell& n = mesh.cells[static_cast<std::size_t>(f.neighbour)];
                f.owner_distance = 0.5 * k.dx;
                f.neighbour_distance = 0.5 * n.dx;
                f.distance = n.cx - k.cx;
                f.interface = k.rock != n.rock;
            }
            add_face(f);
        }
    }
    // Faces normal to y.
    for (int l = 0; l <= my; ++l) {
        for (int i = 0; i < mx; ++i) {
            Face f;
            f.vertical = false;
            f.measure = mesh.x_lines[static_cast<std::size_t>(i) + 1] - mesh.x_lines[static_cast<std::size_t>(i)];
            f.cx = 0.5 * (mesh.x_lines[static_cast<std::size_t>(i)] + mesh.x_lines[static_cast<std::size_t>(i) + 1]);
            f.cy = mesh.y_lines[static_cast<std::size_t>(l)];
            if (l == 0 || l == my) {
                f.owner = mesh.cell_index(i, l == 0 ? 0 : my - 1);
                f.owner_distance = 0.5 * mesh.cells[static_cast<std::size_t>(f.owner)].dy;
                f.distance = f.owner_distance;
                tag_boundary(f, l == 0 ? Side::Bottom : Side::Top, f.cx);
            } else {
                f.owner = mesh.cell_index(i, l - 1);
                f.neighbour = mesh.cell_index(i, l);
                const Cell& k = mesh.cells[static_cast<std::size_t>(f.owner)];
                const Cell& n = mesh.cells[static_cast<std::size_t>(f.neighbour)];
                f.owner_distance = 0.5 * k.dy;
                f.neighbour_distance = 0.5 * n.dy;
                f.distance = n.cy - k.cy;
                f.interface = k.rock != n.rock;
            }
            add_face(f);
        }
    }
    return mesh;
}

double transmissivity(const Face& face)
{
    if (!(face.distance > 0.0))
        throw std::invalid_argument("transmissivity: face with zero distance (malformed mesh)");
    return face.measure / face.distance;
}

double diamond_measure(const Face& face)
{
    // Two triangles with base sigma and heights d_{K,sigma}, d_{L,sigma} (d = 2).
    return 0.5 * face.measure * face.distance;
}

double mesh_regularity(const Mesh& mesh)
{
    double zeta = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < mesh.cells.size(); ++k) {
        const Cell& c = mesh.cells[k];
        const auto& fs = mesh.cell_faces[k];
        double dmin = std::numeric_limits<double>::infinity();
        for (int f : fs) {
            const Face& face = mesh.faces[static_cast<std::size_t>(f)];
            dmin = std::min(dmin, face.owner == static_cast<int>(k) ? face.owner_distance : face.neighbour_distance);
        }
        zeta = std::min(zeta, dmin / c.diameter() / static_cast<double>(fs.size()));
    }
    return zeta;
}

void write_mesh_summary(std::ostream& os, const Mesh& mesh)
{
    os << "grid " << mesh.nx() << " x " << mesh.ny() << " (base " << mesh.base_x_lines.size() - 1 << " x "
       << mesh.base_y_lines.size() - 1 << "), method " << to_string(mesh.method);
    if (mesh.method == Method::A)
        os << ", delta " << mesh.delta;
    os << '\n'
       << "cells " << mesh.cell_count() << '\n'
       << "faces " << mesh.faces.size() << " (interior " << mesh.count(FaceType::Interior) << ", interface "
       << mesh.interface_count() << ", dirichlet " << mesh.count(FaceType::Dirichlet) << ", neumann "
       << mesh.count(FaceType::Neumann) << ")\n"
       << std::setprecision(10) << "h_T " << mesh.max_diameter() << '\n'
       << "zeta_T " << mesh_regularity(mesh) << '\n';
}

void write_vtk(std::ostream& os, const Mesh& mesh, std::span<const CellField> fields, const std::string& title)
{
    for (const auto& f : fields)
        if (f.values.size() != mesh.cell_count())
            throw std::invalid_argument("write_vtk: field '" + f.name + "' has the wrong size");
    os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET RECTILINEAR_GRID\n";
    os << "DIMENSIONS " << mesh.x_lines.size() << ' ' << mesh.y_lines.size() << " 1\n";
    os << std::setprecision(17);
    auto coords = [&os](const char* tag, const std::vector<double>& v) {
        os << tag << ' ' << v.size() << " double\n";
        for (std::size_t k = 0; k < v.size(); ++k)
            os << v[k] << (k + 1 == v.size() ? '\n' : ' ');
    };
    coords("X_COORDINATES", mesh.x_lines);
    coords("Y_COORDINATES", mesh.y_lines);
    coords("Z_COORDINATES", std::vector<double>{0.0});
    os << "CELL_DATA " << mesh.cell_count() << '\n';
    for (const auto& f : fields) {
        os << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
        for (double v : f.values)
            os << v << '\n';
    }
}

} // namespace richards
