#include "xvem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "xvem/errors.hpp"

namespace xvem {

double signed_area(std::span<const Point2> poly)
{
    const std::size_t n = poly.size();
    double twice = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        twice += cross(poly[i], poly[(i + 1) % n]);
    return 0.5 * twice;
}

double polygon_diameter(std::span<const Point2> poly)
{
    double d = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i)
        for (std::size_t j = i + 1; j < poly.size(); ++j)
            d = std::max(d, (poly[i] - poly[j]).norm());
    return d;
}

PolygonGeometry element_geometry(std::span<const Point2> poly)
{
    if (poly.size() < 3)
        throw MeshError("polygon with fewer than 3 vertices");

    PolygonGeometry g;
    g.diameter = polygon_diameter(poly);
    const double a = signed_area(poly);
    if (!(std::abs(a) > 1e-14 * g.diameter * g.diameter))
        throw MeshError("degenerate polygon (zero area)");

    // centroid relative to the first vertex limits cancellation
    const Point2 o = poly[0];
    Point2 c = Point2::Zero();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 p = poly[i] - o;
        const Vec2 q = poly[(i + 1) % n] - o;
        c += cross(p, q) * (p + q);
    }
    g.area = std::abs(a);
    g.centroid = o + c / (6.0 * a);
    return g;
}

bool point_in_polygon(const Point2& p, std::span<const Point2> poly)
{
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point2& a = poly[i];
        const Point2& b = poly[j];
        if ((a.y() > p.y()) != (b.y() > p.y())) {
            const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
            if (p.x() < x)
                inside = !inside;
        }
    }
    return inside;
}

double distance_to_segment(const Point2& p, const Point2& a, const Point2& b)
{
    const Vec2 d = b - a;
    const double len2 = d.squaredNorm();
    if (len2 == 0.0)
        return (p - a).norm();
    const double t = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
    return (p - (a + t * d)).norm();
}

double distance_to_polygon(const Point2& p, std::span<const Point2> poly)
{
    double d = std::numeric_limits<double>::infinity();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i)
        d = std::min(d, distance_to_segment(p, poly[i], poly[(i + 1) % n]));
    if (point_in_polygon(p, poly))
        return 0.0;
    return d;
}

namespace {

bool segments_intersect(const Point2& p1, const Point2& p2, const Point2& q1, const Point2& q2)
{
    const double scale = std::max((p2 - p1).norm(), (q2 - q1).norm());
    const double eps = 1e-12 * scale * scale;
    const double d1 = cross(q2 - q1, p1 - q1);
    const double d2 = cross(q2 - q1, p2 - q1);
    const double d3 = cross(p2 - p1, q1 - p1);
    const double d4 = cross(p2 - p1, q2 - p1);
    if (((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps))
        && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps)))
        return true;
    auto on_segment = [&](const Point2& a, const Point2& b, const Point2& c, double d) {
        if (std::abs(d) > eps)
            return false;
        return c.x() >= std::min(a.x(), b.x()) - 1e-14 && c.x() <= std::max(a.x(), b.x()) + 1e-14
            && c.y() >= std::min(a.y(), b.y()) - 1e-14 && c.y() <= std::max(a.y(), b.y()) + 1e-14;
    };
    return on_segment(q1, q2, p1, d1) || on_segment(q1, q2, p2, d2) || on_segment(p1, p2, q1, d3)
        || on_segment(p1, p2, q2, d4);
}

} // namespace

bool is_simple_polygon(std::span<const Point2> poly)
{
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i + 1 || (i == 0 && j == n - 1))
                continue;
            if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]))
                return false;
        }
    }
    return true;
}

double kernel_radius(const Point2& c, std::span<const Point2> poly)
{
    double r = std::numeric_limits<double>::infinity();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& a = poly[i];
        const Point2& b = poly[(i + 1) % n];
        const double len = (b - a).norm();
        if (len == 0.0)
            continue;
        r = std::min(r, cross(b - a, c - a) / len);
    }
    return r;
}

std::optional<KernelPoint> find_kernel_point(std::span<const Point2> poly)
{
    const PolygonGeometry g = element_geometry(poly);
    Point2 best = g.centroid;
    double best_r = kernel_radius(best, poly);

    Point2 lo = poly[0];
    Point2 hi = poly[0];
    for (const auto& p : poly) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    constexpr int grid = 16;
    for (int i = 1; i < grid; ++i) {
        for (int j = 1; j < grid; ++j) {
            const Point2 c(lo.x() + (hi.x() - lo.x()) * i / grid, lo.y() + (hi.y() - lo.y()) * j / grid);
            const double r = kernel_radius(c, poly);
            if (r > best_r) {
                best_r = r;
                best = c;
            }
        }
    }

    // compass search
    double step = g.diameter / 8.0;
    const Vec2 dirs[8] = {Vec2(1, 0), Vec2(-1, 0), Vec2(0, 1), Vec2(0, -1),
                          Vec2(1, 1).normalized(), Vec2(1, -1).normalized(),
                          Vec2(-1, 1).normalized(), Vec2(-1, -1).normalized()};
    for (int it = 0; it < 400 && step > 1e-10 * g.diameter; ++it) {
        bool moved = false;
        for (const auto& d : dirs) {
            const Point2 c = best + step * d;
            const double r = kernel_radius(c, poly);
            if (r > best_r) {
                best_r = r;
                best = c;
                moved = true;
            }
        }
        if (!moved)
            step *= 0.5;
    }

    if (!(best_r > 1e-12 * g.diameter))
        return std::nullopt;

    // prefer the centroid for fan triangulations when it is comfortably inside
    const double rc = kernel_radius(g.centroid, poly);
    if (rc > 0.25 * best_r)
        return KernelPoint{g.centroid, rc, best_r};
    return KernelPoint{best, best_r, best_r};
}

} // namespace xvem
