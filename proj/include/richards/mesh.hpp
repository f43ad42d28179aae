/**
 * @file mesh.hpp
 * @brief Admissible orthogonal tensor-product meshes of a layered rectangle.
 *
 * Cells are numbered row-major from the bottom-left corner (k = j * nx + i).
 * Every face stores its owning cell and a mirror entity: the neighbouring
 * cell for interior faces, or the boundary face point x_sigma (midpoint) for
 * boundary faces. Interior faces are oriented so that the owner is the cell
 * with the smaller coordinate.
 *
 * With method A ("thin interface cells") two extra grid lines are inserted at
 * distance delta on either side of every grid line carrying a rock-type
 * interface, giving thin cell rows/columns that bracket the interface.
 */
#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace richards {

struct Rect {
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;

    double area() const { return (x1 - x0) * (y1 - y0); }
    bool contains(double x, double y) const { return x > x0 && x < x1 && y > y0 && y < y1; }
    bool operator==(const Rect&) const = default;
};

enum class Side { Bottom, Right, Top, Left };
enum class BoundaryKind { NoFlux, Dirichlet, Flux };

std::string to_string(Side side);
Side side_from_string(const std::string& tag);

/// A tagged stretch [lo, hi] of one side of the bounding box.
struct BoundarySegment {
    Side side = Side::Bottom;
    double lo = 0.0;
    double hi = 0.0;
    BoundaryKind kind = BoundaryKind::NoFlux;
    /// Dirichlet pressure [Pa] or inward volumetric flux [m/s].
    double value = 0.0;
};

struct Subdomain {
    Rect rect;
    int rock = 0; ///< index into the rock-type list
};

/// Layered rectangle. Boundary stretches not covered by a segment are no-flux.
struct Domain {
    Rect box;
    std::vector<Subdomain> subdomains;
    std::vector<BoundarySegment> boundary;

    int rock_count() const;
    /// Rock index at a point strictly inside some subdomain; nullopt otherwise.
    std::optional<int> rock_at(double x, double y) const;
    /// Throws std::invalid_argument if the partition or the boundary tags are inconsistent.
    void validate() const;
};

enum class Method { A, B };
std::string to_string(Method method);
Method method_from_string(const std::string& tag);

enum class FaceType { Interior, Dirichlet, Neumann };

struct Face {
    int owner = -1;
    int neighbour = -1; ///< -1 on the boundary
    FaceType type = FaceType::Interior;
    bool interface = false; ///< interior face separating two rock types
    bool vertical = true;   ///< normal along x
    double measure = 0.0;   ///< m_sigma
    double distance = 0.0;  ///< d_sigma
    double owner_distance = 0.0;     ///< d_{K,sigma}
    double neighbour_distance = 0.0; ///< d_{L,sigma}, 0 on the boundary
    double cx = 0.0, cy = 0.0;       ///< face midpoint x_sigma
    int segment = -1; ///< boundary segment index, -1 for untagged boundary
};

struct Cell {
    double cx = 0.0, cy = 0.0;
    double dx = 0.0, dy = 0.0;
    int rock = 0;
    int i = 0, j = 0;

    double measure() const { return dx * dy; }
    double diameter() const;
};

class Mesh {
public:
    std::vector<double> x_lines; ///< nx + 1 sorted grid coordinates
    std::vector<double> y_lines;
    std::vector<Cell> cells;
    std::vector<Face> faces;
    /// Face indices per cell (up to 4).
    std::vector<std::vector<int>> cell_faces;
    /// Grid lines of the base mesh, before thin-cell insertion.
    std::vector<double> base_x_lines;
    std::vector<double> base_y_lines;
    Method method = Method::B;
    double delta = 0.0;
    std::vector<BoundarySegment> boundary;

    int nx() const { return static_cast<int>(x_lines.size()) - 1; }
    int ny() const { return static_cast<int>(y_lines.size()) - 1; }
    std::size_t cell_count() const { return cells.size(); }
    int cell_index(int i, int j) const { return j * nx() + i; }

    double total_area() const;
    double max_diameter() const;
    std::size_t count(FaceType type) const;
    std::size_t interface_count() const;
    std::vector<int> neighbours(int cell) const;
};

Mesh build_mesh(const Domain& domain, int nx, int ny, Method method, double delta);

/// a_sigma = m_sigma / d_sigma; throws on a zero distance.
double transmissivity(const Face& face);
/// Measure of the diamond cell spanned by x_K, x_{K sigma} and sigma.
double diamond_measure(const Face& face);
/// zeta_T = min_K (1 / card E_K) min_sigma d_{K,sigma} / diam(K).
double mesh_regularity(const Mesh& mesh);

/// Plain-text report: cell/face counts, h_T and zeta_T.
void write_mesh_summary(std::ostream& os, const Mesh& mesh);

/// Legacy-ASCII VTK rectilinear grid with one cell-data scalar per named field.
struct CellField {
    std::string name;
    std::span<const double> values;
};
void write_vtk(std::ostream& os, const Mesh& mesh, std::span<const CellField> fields,
               const std::string& title = "richards-fv");

} // namespace richards
