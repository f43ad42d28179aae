#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "richards/cases.hpp"
#include "richards/mesh.hpp"

using namespace richards;

namespace {

Domain unit_domain()
{
    Domain d;
    d.box = {0.0, 1.0, 0.0, 1.0};
    d.subdomains = {{d.box, 0}};
    return d;
}

} // namespace

TEST(Mesh, MethodBCounts)
{
    const Mesh m = build_mesh(layered_domain(CaseKind::Drainage), 50, 30, Method::B, 0.0);
    EXPECT_EQ(m.cell_count(), 1500u);
    for (const auto& c : m.cells) {
        EXPECT_NEAR(c.dx, 0.1, 1e-12);
        EXPECT_NEAR(c.dy, 0.1, 1e-12);
    }
    EXPECT_EQ(m.count(FaceType::Interior), 49u * 30u + 50u * 29u);
    EXPECT_EQ(m.count(FaceType::Dirichlet), 50u);
    EXPECT_EQ(m.count(FaceType::Neumann), 2u * 30u + 50u);
}

TEST(Mesh, MethodAInsertsThinLines)
{
    const double delta = 1e-6;
    const Mesh m = build_mesh(layered_domain(CaseKind::Drainage), 50, 30, Method::A, delta);
    EXPECT_EQ(m.nx(), 54);
    EXPECT_EQ(m.ny(), 34);
    EXPECT_EQ(m.cell_count(), 1836u);
    // Oracle: base lines plus c +- delta for every interface coordinate.
    std::set<double> xs, ys;
    for (int i = 0; i <= 50; ++i)
        xs.insert(5.0 * i / 50.0);
    for (int j = 0; j <= 30; ++j)
        ys.insert(-3.0 + 3.0 * j / 30.0);
    for (double c : {1.0, 4.0})
        xs.insert({c - delta, c + delta});
    for (double c : {-1.0, -2.0})
        ys.insert({c - delta, c + delta});
    ASSERT_EQ(m.x_lines.size(), xs.size());
    ASSERT_EQ(m.y_lines.size(), ys.size());
    auto xi = xs.begin();
    for (double x : m.x_lines)
        EXPECT_NEAR(x, *xi++, 1e-12);
    auto yi = ys.begin();
    for (double y : m.y_lines)
        EXPECT_NEAR(y, *yi++, 1e-12);
    // Two thin layers per interface coordinate.
    const auto thin_cols = std::count_if(m.x_lines.begin() + 1, m.x_lines.end(),
                                         [&, k = 0](double x) mutable { return x - m.x_lines[k++] < 2 * delta; });
    const auto thin_rows = std::count_if(m.y_lines.begin() + 1, m.y_lines.end(),
                                         [&, k = 0](double y) mutable { return y - m.y_lines[k++] < 2 * delta; });
    EXPECT_EQ(thin_cols, 4);
    EXPECT_EQ(thin_rows, 4);
}

TEST(Mesh, SingleCell)
{
    const Mesh m = build_mesh(unit_domain(), 1, 1, Method::B, 0.0);
    EXPECT_EQ(m.cell_count(), 1u);
    EXPECT_EQ(m.faces.size(), 4u);
    EXPECT_EQ(m.count(FaceType::Interior), 0u);
    EXPECT_NEAR(mesh_regularity(m), 0.25 / (2.0 * std::sqrt(2.0)), 1e-15);
}

TEST(Mesh, GeometricInvariants)
{
    for (const Method method : {Method::A, Method::B})
        for (const auto kind : {CaseKind::Filling, CaseKind::Drainage}) {
            const Domain d = layered_domain(kind);
            const Mesh m = build_mesh(d, 50, 30, method, 1e-6);
            double area = 0.0;
            for (const auto& c : m.cells) {
                area += c.measure();
                const double x0 = c.cx - 0.5 * c.dx, x1 = c.cx + 0.5 * c.dx;
                const double y0 = c.cy - 0.5 * c.dy, y1 = c.cy + 0.5 * c.dy;
                const auto r = d.rock_at(c.cx, c.cy);
                ASSERT_TRUE(r.has_value());
                // The cell lies inside one subdomain.
                bool inside = false;
                for (const auto& sd : d.subdomains)
                    inside = inside || (sd.rock == c.rock && x0 >= sd.rect.x0 - 1e-12 && x1 <= sd.rect.x1 + 1e-12 &&
                                        y0 >= sd.rect.y0 - 1e-12 && y1 <= sd.rect.y1 + 1e-12);
                EXPECT_TRUE(inside);
            }
            EXPECT_NEAR(area, 15.0, 15.0 * 1e-12);
            for (const auto& f : m.faces) {
                if (f.type != FaceType::Interior) {
                    EXPECT_NEAR(f.distance, f.owner_distance, 1e-15);
                    continue;
                }
                const Cell& k = m.cells[static_cast<std::size_t>(f.owner)];
                const Cell& l = m.cells[static_cast<std::size_t>(f.neighbour)];
                EXPECT_NEAR(f.owner_distance + f.neighbour_distance, f.distance, 1e-15);
                EXPECT_NEAR(std::hypot(l.cx - k.cx, l.cy - k.cy), f.distance, 1e-13);
                // x_L - x_K is orthogonal to the face.
                if (f.vertical)
                    EXPECT_NEAR(l.cy, k.cy, 1e-13);
                else
                    EXPECT_NEAR(l.cx, k.cx, 1e-13);
                EXPECT_NEAR(diamond_measure(f), 0.5 * f.measure * f.distance, 0.0);
                EXPECT_EQ(f.interface, k.rock != l.rock);
            }
        }
}

TEST(Mesh, InterfacesAreThinCellPairsInMethodA)
{
    const double delta = 1e-6;
    const Mesh m = build_mesh(layered_domain(CaseKind::Drainage), 50, 30, Method::A, delta);
    for (const auto& f : m.faces) {
        if (!f.interface)
            continue;
        const Cell& k = m.cells[static_cast<std::size_t>(f.owner)];
        const Cell& l = m.cells[static_cast<std::size_t>(f.neighbour)];
        const double wk = f.vertical ? k.dx : k.dy;
        const double wl = f.vertical ? l.dx : l.dy;
        EXPECT_NEAR(wk, delta, 1e-12);
        EXPECT_NEAR(wl, delta, 1e-12);
    }
    EXPECT_GT(m.interface_count(), 0u);
}

TEST(Mesh, RejectsIncompatibleLayouts)
{
    const Domain d = layered_domain(CaseKind::Drainage);
    try {
        build_mesh(d, 7, 30, Method::B, 0.0);
        FAIL() << "expected rejection";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("1"), std::string::npos);
    }
    EXPECT_THROW(build_mesh(d, 50, 30, Method::A, 0.05), std::invalid_argument);
    EXPECT_THROW(build_mesh(d, 50, 30, Method::A, 0.0), std::invalid_argument);
    EXPECT_THROW(build_mesh(d, 0, 30, Method::B, 0.0), std::invalid_argument);
}

TEST(Mesh, Transmissivity)
{
    const Mesh m = build_mesh(layered_domain(CaseKind::Drainage), 50, 30, Method::A, 1e-6);
    bool saw_interior = false, saw_boundary = false, saw_thin = false;
    for (const auto& f : m.faces) {
        if (f.type != FaceType::Interior && std::abs(f.measure - 0.1) < 1e-12 && std::abs(f.distance - 0.05) < 1e-12) {
            EXPECT_NEAR(transmissivity(f), 2.0, 1e-10);
            saw_boundary = true;
        }
        if (f.type == FaceType::Interior && std::abs(f.measure - 0.1) < 1e-12) {
            if (std::abs(f.distance - 0.1) < 1e-12) {
                EXPECT_NEAR(transmissivity(f), 1.0, 1e-10);
                saw_interior = true;
            }
            // Between the two thin cells of an interface.
            if (f.interface) {
                EXPECT_NEAR(f.distance, 1e-6, 1e-15);
                EXPECT_NEAR(transmissivity(f), 1e5, 1e-4);
                saw_thin = true;
            }
        }
    }
    EXPECT_TRUE(saw_interior);
    EXPECT_TRUE(saw_boundary);
    EXPECT_TRUE(saw_thin);
    Face bad;
    bad.measure = 1.0;
    EXPECT_THROW(transmissivity(bad), std::invalid_argument);
}

TEST(Mesh, RegularityShrinksWithDelta)
{
    const Mesh b = build_mesh(layered_domain(CaseKind::Drainage), 50, 30, Method::B, 0.0);
    EXPECT_NEAR(mesh_regularity(b), 0.25 / (2.0 * std::sqrt(2.0)), 1e-12);
    const double z4 = mesh_regularity(build_mesh(layered_domain(CaseKind::Drainage), 50, 30, Method::A, 1e-4));
    const double z6 = mesh_regularity(build_mesh(layered_domain(CaseKind::Drainage), 50, 30, Method::A, 1e-6));
    EXPECT_GT(z4, 0.0);
    EXPECT_NEAR(z4 / z6, 100.0, 1.0);
}

TEST(Mesh, SummaryAndVtk)
{
    const Mesh m = build_mesh(unit_domain(), 2, 3, Method::B, 0.0);
    std::ostringstream s;
    write_mesh_summary(s, m);
    EXPECT_NE(s.str().find("cells"), std::string::npos);
    std::vector<double> v(m.cell_count(), 0.5);
    const CellField f[] = {{"saturation", v}};
    std::ostringstream os;
    write_vtk(os, m, f);
    const std::string t = os.str();
    EXPECT_EQ(t.rfind("# vtk DataFile Version", 0), 0u);
    EXPECT_NE(t.find("RECTILINEAR_GRID"), std::string::npos);
    EXPECT_NE(t.find("DIMENSIONS 3 4 1"), std::string::npos);
    EXPECT_NE(t.find("CELL_DATA 6"), std::string::npos);
    EXPECT_NE(t.find("SCALARS saturation double"), std::string::npos);
}
