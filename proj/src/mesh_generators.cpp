#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "xvem/errors.hpp"
#include "xvem/mesh.hpp"

namespace xvem {

namespace {

void require_even(int n, const char* what)
{
    if (n < 2 || n % 2 != 0)
        throw MeshError(std::string(what) + ": subdivisions must be even and >= 2, got " + std::to_string(n));
}

double grid_coord(int i, int n) { return -1.0 + 2.0 * i / n; }

// Merges points closer than a fixed tolerance into one id.
class PointPool {
public:
    explicit PointPool(double tol) : tol_(tol) {}

    int insert(const Point2& p)
    {
        const long long kx = std::llround(p.x() / tol_);
        const long long ky = std::llround(p.y() / tol_);
        for (long long dx = -1; dx <= 1; ++dx)
            for (long long dy = -1; dy <= 1; ++dy) {
                auto it = index_.find({kx + dx, ky + dy});
                if (it != index_.end() && (points_[it->second] - p).norm() <= 2.0 * tol_)
                    return it->second;
            }
        const int id = static_cast<int>(points_.size());
        points_.push_back(p);
        index_.emplace(std::make_pair(kx, ky), id);
        return id;
    }

    std::vector<Point2> take() { return std::move(points_); }

private:
    double tol_;
    std::vector<Point2> points_;
    std::map<std::pair<long long, long long>, int> index_;
};

// Keep the half plane sign * (coordinate axis of p - c) <= 0.
std::vector<Point2> clip_half_plane(const std::vector<Point2>& poly, int axis, double c, double sign)
{
    constexpr double eps = 1e-13;
    auto inside = [&](const Point2& p) { return sign * (p[axis] - c) <= eps; };
    std::vector<Point2> out;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& cur = poly[i];
        const Point2& nxt = poly[(i + 1) % n];
        const bool in_cur = inside(cur);
        const bool in_nxt = inside(nxt);
        if (in_cur)
            out.push_back(cur);
        if (in_cur != in_nxt) {
            const double t = (c - cur[axis]) / (nxt[axis] - cur[axis]);
            Point2 q = cur + t * (nxt - cur);
            q[axis] = c;
            out.push_back(q);
        }
    }
    // drop consecutive duplicates
    std::vector<Point2> clean;
    for (const auto& p : out)
        if (clean.empty() || (p - clean.back()).norm() > 1e-12)
            clean.push_back(p);
    while (clean.size() > 1 && (clean.front() - clean.back()).norm() <= 1e-12)
        clean.pop_back();
    return clean;
}

std::vector<Point2> clip_box(std::vector<Point2> poly, double x0, double x1, double y0, double y1)
{
    poly = clip_half_plane(poly, 0, x1, 1.0);
    if (poly.size() >= 3)
        poly = clip_half_plane(poly, 0, x0, -1.0);
    if (poly.size() >= 3)
        poly = clip_half_plane(poly, 1, y1, 1.0);
    if (poly.size() >= 3)
        poly = clip_half_plane(poly, 1, y0, -1.0);
    return poly;
}

double area_or_zero(const std::vector<Point2>& poly)
{
    return poly.size() < 3 ? 0.0 : signed_area(poly);
}

// Joins a piece left of x = 0 with a piece right of it sharing a segment of
// x = 0, both counterclockwise.
std::vector<Point2> merge_across_axis(const std::vector<Point2>& left, const std::vector<Point2>& right)
{
    constexpr double eps = 1e-12;
    auto on_axis = [](const Point2& p) { return std::abs(p.x()) <= eps; };

    const std::size_t nl = left.size();
    std::size_t il = nl;
    for (std::size_t i = 0; i < nl; ++i)
        if (on_axis(left[i]) && on_axis(left[(i + 1) % nl]) && left[(i + 1) % nl].y() > left[i].y())
            il = i;
    const std::size_t nr = right.size();
    std::size_t ir = nr;
    for (std::size_t j = 0; j < nr; ++j)
        if (on_axis(right[j]) && on_axis(right[(j + 1) % nr]) && right[(j + 1) % nr].y() < right[j].y())
            ir = j;
    if (il == nl || ir == nr)
        throw MeshError("hexagonal generator: clipped pieces do not share a segment of x = 0");

    std::vector<Point2> merged;
    // left piece from the top of its axis edge round to the bottom
    for (std::size_t s = 0; s < nl; ++s)
        merged.push_back(left[(il + 1 + s) % nl]);
    // right piece from the bottom of its axis edge round to the top
    for (std::size_t s = 0; s < nr; ++s) {
        const Point2& p = right[(ir + 1 + s) % nr];
        if ((p - merged.back()).norm() > eps && (p - merged.front()).norm() > eps)
            merged.push_back(p);
    }
    return merged;
}

} // namespace

Mesh build_cartesian_fractured_mesh(int n)
{
    require_even(n, "fractured mesh");
    const int m = n + 1;
    const int mid = n / 2;
    std::vector<Point2> points;
    points.reserve(m * m + mid);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i)
            points.emplace_back(grid_coord(i, n), grid_coord(j, n));

    // lower copies of slit vertices (y = 0, x > 0)
    std::vector<int> lower(m, -1);
    for (int i = mid + 1; i < m; ++i) {
        lower[i] = static_cast<int>(points.size());
        points.push_back(points[mid * m + i]);
    }

    std::vector<std::vector<int>> cells;
    cells.reserve(n * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            auto id = [&](int ii, int jj) {
                if (jj == mid && j == mid - 1 && lower[ii] >= 0)
                    return lower[ii];
                return jj * m + ii;
            };
            cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    return Mesh::from_polygons(std::move(points), std::move(cells));
}

Mesh build_cartesian_lshape_mesh(int n, RemovedQuadrant removed)
{
    require_even(n, "L-shaped mesh");
    const int m = n + 1;
    const int mid = n / 2;
    std::vector<int> renumber(m * m, -1);
    std::vector<Point2> points;
    std::vector<std::vector<int>> cells;
    auto vid = [&](int i, int j) {
        int& r = renumber[j * m + i];
        if (r < 0) {
            r = static_cast<int>(points.size());
            points.emplace_back(grid_coord(i, n), grid_coord(j, n));
        }
        return r;
    };
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const bool right = i >= mid;
            const bool upper = j >= mid;
            if (right && (removed == RemovedQuadrant::TopRight ? upper : !upper))
                continue;
            cells.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
    }
    return Mesh::from_polygons(std::move(points), std::move(cells));
}

Mesh build_hexagonal_lshape_mesh(int level, RemovedQuadrant removed)
{
    if (level < 1 || level > 12)
        throw MeshError("hexagonal mesh: level must be in [1, 12], got " + std::to_string(level));
    const int n = 1 << level;
    const double w = 1.0 / n;            // hexagon width
    const double ry = 2.0 / (3.0 * n);   // vertical circumradius; rows are 1.5 ry = 1/n apart
    const double domain_area = 3.0;

    // Built for the top right quadrant removed; the other variant is a reflection.
    PointPool pool(1e-10 * w);
    std::vector<std::vector<int>> cells;
    for (int j = -n; j <= n; ++j) {
        const double cy = static_cast<double>(j) / n;
        const double shift = (j % 2 == 0) ? 0.0 : 0.5 * w;
        for (int i = -n - 1; i <= n + 1; ++i) {
            const double cx = i * w + shift;
            const std::vector<Point2> hex = {
                {cx, cy + ry},           {cx - 0.5 * w, cy + 0.5 * ry}, {cx - 0.5 * w, cy - 0.5 * ry},
                {cx, cy - ry},           {cx + 0.5 * w, cy - 0.5 * ry}, {cx + 0.5 * w, cy + 0.5 * ry}};
            auto left = clip_box(hex, -1.0, 0.0, -1.0, 1.0);
            auto right = clip_box(hex, 0.0, 1.0, -1.0, 0.0);
            const bool has_left = area_or_zero(left) > 1e-12 * domain_area;
            const bool has_right = area_or_zero(right) > 1e-12 * domain_area;
            std::vector<Point2> piece;
            if (has_left && has_right)
                piece = merge_across_axis(left, right);
            else if (has_left)
                piece = std::move(left);
            else if (has_right)
                piece = std::move(right);
            else
                continue;

            std::vector<int> ids;
            for (auto p : piece) {
                if (removed == RemovedQuadrant::BottomRight)
                    p.y() = -p.y();
                const int id = pool.insert(p);
                if (ids.empty() || ids.back() != id)
                    ids.push_back(id);
            }
            while (ids.size() > 1 && ids.front() == ids.back())
                ids.pop_back();
            if (removed == RemovedQuadrant::BottomRight)
                std::reverse(ids.begin(), ids.end());
            if (ids.size() >= 3)
                cells.push_back(std::move(ids));
        }
    }
    return Mesh::from_polygons(pool.take(), std::move(cells));
}

} // namespace xvem
