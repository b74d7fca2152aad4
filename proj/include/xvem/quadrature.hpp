#pragma once

#include <optional>
#include <span>
#include <vector>

#include "xvem/geometry.hpp"

namespace xvem {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Newton iteration on the Legendre recurrence; cached per n.
const GaussLegendre& gauss_legendre(int n);

/// Quadrature on a straight edge a->b. params[i] is the node position in the
/// reference coordinate s in [-1, 1] (s = -1 at a).
struct EdgeRule {
    std::vector<Point2> nodes;
    std::vector<double> params;
    std::vector<double> weights;
};

/// Gauss-Legendre with n points mapped affinely to a->b.
EdgeRule gauss_edge(const Point2& a, const Point2& b, int n_points);

struct Grading {
    Point2 point;
    int levels = 14;
};

/// As gauss_edge, but subdivided geometrically toward the grading point when
/// it lies on the closed edge, and bisected until each piece is no longer
/// than its distance to the point otherwise.
EdgeRule graded_edge_rule(const Point2& a, const Point2& b, int n_points, const std::optional<Grading>& grading);

struct PolygonRule {
    std::vector<Point2> nodes;
    std::vector<double> weights;
};

/// Collapsed Gauss rule exact for P_degree on the triangle (a, b, c); the
/// degenerate side of the map is at a.
void append_triangle_rule(PolygonRule& rule, const Point2& a, const Point2& b, const Point2& c, int degree);

/// Fan sub-triangulation of a counterclockwise polygon from a kernel point.
/// Fan triangles whose closure contains the grading point are split at it and
/// refined geometrically toward it; other triangles are refined until each
/// piece is no wider than its distance to it. Throws QuadratureError for a
/// polygon without kernel.
PolygonRule polygon_rule(std::span<const Point2> poly, int degree, const std::optional<Grading>& grading = std::nullopt,
                         const std::optional<Point2>& fan_centre = std::nullopt);

} // namespace xvem
