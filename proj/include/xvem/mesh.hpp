#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "xvem/geometry.hpp"

namespace xvem {

struct Vertex {
    int id = -1;
    Point2 position = Point2::Zero();
    bool on_boundary = false;
};

struct Edge {
    int id = -1;
    std::array<int, 2> vertex_ids{-1, -1};
    std::vector<int> elements; // one (boundary) or two (interior)
    bool on_boundary = false;
    double length = 0.0;
    Point2 midpoint = Point2::Zero();
};

struct Element {
    int id = -1;
    std::vector<int> vertex_ids; // counterclockwise
    std::vector<int> edge_ids;   // edge_ids[i] joins vertex_ids[i] and vertex_ids[i+1]
    double area = 0.0;
    Point2 centroid = Point2::Zero();
    double diameter = 0.0;
    /// A point of the polygon's kernel; used as the fan centre for quadrature
    /// and to select the side of a slit when evaluating branched fields.
    Point2 interior_point = Point2::Zero();
};

/// Polygonal mesh with explicit vertex/edge/element incidence. A slit is
/// represented by duplicated vertices and edges at identical coordinates.
/// Immutable once built.
class Mesh {
public:
    /// Builds edges from the element vertex cycles. Distinct vertex ids at
    /// equal coordinates give distinct edges, which is how slits are encoded.
    /// Clockwise cells are reversed unless fix_orientation is false.
    static Mesh from_polygons(std::vector<Point2> points, std::vector<std::vector<int>> cells,
                              bool fix_orientation = true);

    /// Builds from explicitly numbered edges (file format). Every consecutive
    /// vertex pair of every element must be a listed edge.
    static Mesh from_explicit(std::vector<Point2> points, std::vector<std::array<int, 2>> edges,
                              std::vector<std::vector<int>> cells);

    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<Element>& elements() const { return elements_; }
    const Vertex& vertex(int i) const { return vertices_[i]; }
    const Edge& edge(int i) const { return edges_[i]; }
    const Element& element(int i) const { return elements_[i]; }

    int n_vertices() const { return static_cast<int>(vertices_.size()); }
    int n_edges() const { return static_cast<int>(edges_.size()); }
    int n_elements() const { return static_cast<int>(elements_.size()); }

    /// max over elements of the element diameter
    double h() const { return h_; }
    double total_area() const;

    /// Elements incident to a vertex.
    const std::vector<int>& vertex_elements(int v) const { return vertex_elements_[v]; }

    std::vector<Point2> element_polygon(int p) const;

    /// Outward unit normal of the i-th edge of element p.
    Vec2 element_edge_normal(int p, int local_edge) const;

    /// True when edge e is traversed v0 -> v1 by element p.
    bool edge_aligned(int p, int local_edge) const;

private:
    Mesh() = default;
    void finalize(); // geometry, boundary flags, incidence, h

    std::vector<Vertex> vertices_;
    std::vector<Edge> edges_;
    std::vector<Element> elements_;
    std::vector<std::vector<int>> vertex_elements_;
    double h_ = 0.0;
};

struct MeshQuality {
    std::vector<double> star_ratio;       // per element, kernel ball radius / diameter
    std::vector<double> edge_ratio;       // per element, min edge length / diameter
    double min_star_ratio = 0.0;
    double min_edge_ratio = 0.0;
    double area = 0.0;
};

/// Checks every mesh invariant and estimates the star-shapedness constant.
/// Throws MeshError naming the first offending entity.
MeshQuality validate_mesh(const Mesh& mesh);

// Generators. All meshes live on subsets of (-1,1)^2.

/// Uniform n x n Cartesian mesh of (-1,1)^2 slit along {y = 0, x > 0}.
Mesh build_cartesian_fractured_mesh(int n);

enum class RemovedQuadrant { TopRight, BottomRight };

/// Uniform Cartesian mesh of (-1,1)^2 minus one closed quadrant.
Mesh build_cartesian_lshape_mesh(int n, RemovedQuadrant removed = RemovedQuadrant::BottomRight);

/// Hexagonal lattice with 2^level cells per unit length, clipped to the
/// L-shaped domain.
Mesh build_hexagonal_lshape_mesh(int level, RemovedQuadrant removed = RemovedQuadrant::TopRight);

// Plain text format:
//   vertices N        then N lines "id x y"
//   edges M           then M lines "id v0 v1"
//   elements K        then K lines "id v0 v1 ... vm"
// Lines starting with '#' are ignored. Element orientation is made
// counterclockwise on load.
Mesh read_mesh(std::istream& in);
Mesh read_mesh_file(const std::string& path);
void write_mesh(std::ostream& out, const Mesh& mesh);
void write_mesh_file(const std::string& path, const Mesh& mesh);

} // namespace xvem
