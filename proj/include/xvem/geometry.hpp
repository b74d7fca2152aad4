#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace xvem {

using Point2 = Eigen::Vector2d;
using Vec2 = Eigen::Vector2d;

struct PolygonGeometry {
    double area = 0.0;
    Point2 centroid = Point2::Zero();
    double diameter = 0.0;
};

/// Shoelace signed area; positive for counterclockwise vertex order.
double signed_area(std::span<const Point2> poly);

/// Area, area-weighted centroid and max pairwise vertex distance.
/// Throws MeshError for a degenerate (zero-area) polygon.
PolygonGeometry element_geometry(std::span<const Point2> poly);

double polygon_diameter(std::span<const Point2> poly);

bool point_in_polygon(const Point2& p, std::span<const Point2> poly);

double distance_to_segment(const Point2& p, const Point2& a, const Point2& b);

/// Zero for points inside the closed polygon.
double distance_to_polygon(const Point2& p, std::span<const Point2> poly);

/// True when no two non-adjacent edges intersect.
bool is_simple_polygon(std::span<const Point2> poly);

/// Minimum signed distance from c to the supporting lines of the edges of a
/// counterclockwise polygon. Positive iff the polygon is star-shaped with
/// respect to c, and then the ball of that radius lies in the kernel.
double kernel_radius(const Point2& c, std::span<const Point2> poly);

struct KernelPoint {
    Point2 point;
    double radius;     // kernel_radius at point
    double max_radius; // best radius found by the search
};

/// Centroid first, then a grid seeded pattern search maximising kernel_radius.
/// Returns nullopt when no point with positive radius is found.
std::optional<KernelPoint> find_kernel_point(std::span<const Point2> poly);

/// Outward unit normal of the edge a->b of a counterclockwise polygon.
inline Vec2 outward_normal(const Point2& a, const Point2& b)
{
    const Vec2 d = b - a;
    return Vec2(d.y(), -d.x()).normalized();
}

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

} // namespace xvem
