#include "xvem/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "xvem/errors.hpp"

namespace xvem {

namespace {

// Legendre P_n and P_{n-1} at x by the three-term recurrence.
std::pair<double, double> legendre_pair(int n, double x)
{
    double p0 = 1.0;
    double p1 = x;
    for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
    }
    return {p1, p0};
}

GaussLegendre compute_gauss_legendre(int n)
{
    GaussLegendre gl;
    gl.nodes.resize(n);
    gl.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto [pn, pnm1] = legendre_pair(n, x);
            const double dp = n * (x * pn - pnm1) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15)
                break;
        }
        const auto [pn, pnm1] = legendre_pair(n, x);
        const double dp = n * (x * pn - pnm1) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        gl.nodes[i] = -x;
        gl.nodes[n - 1 - i] = x;
        gl.weights[i] = w;
        gl.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1)
        gl.nodes[n / 2] = 0.0;
    return gl;
}

// Points added to each graded layer next to a singular point.
constexpr int extra_singular_points = 6;
// Cap on bisection depth for pieces close to (but not touching) a singular point.
constexpr int max_near_depth = 12;
// Pieces within this many diameters of a singular point get extra points.
constexpr double near_zone = 4.0;

// Appends the rule for the sub-interval [t0, t1] of [0, 1] (edge parameter),
// optionally with the substitution t = t0 + (t1 - t0) u^6 which absorbs the
// r^{j/6} behaviour of singular fields at t0.
void append_interval(EdgeRule& rule, const Point2& a, const Point2& b, double t0, double t1, int n, bool power)
{
    const double len = (b - a).norm();
    const auto& gl = gauss_legendre(power ? 6 * n + extra_singular_points : n);
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        const double u = 0.5 * (gl.nodes[i] + 1.0);
        double t;
        double jac;
        if (power) {
            const double u5 = std::pow(u, 5);
            t = t0 + (t1 - t0) * u5 * u;
            jac = (t1 - t0) * 6.0 * u5;
        } else {
            t = t0 + (t1 - t0) * u;
            jac = t1 - t0;
        }
        const double w = 0.5 * gl.weights[i] * jac * len;
        if (w == 0.0)
            continue;
        rule.nodes.push_back(a + t * (b - a));
        rule.params.push_back(2.0 * t - 1.0);
        rule.weights.push_back(w);
    }
}

// Graded subdivision of [0, 1] toward 0 (or toward 1 when reversed).
void append_graded(EdgeRule& rule, const Point2& a, const Point2& b, double t0, double t1, int n, int levels)
{
    // from the singular end t0 outward
    double inner = std::ldexp(1.0, -levels);
    append_interval(rule, a, b, t0, t0 + inner * (t1 - t0), n, true);
    for (int l = levels; l > 0; --l) {
        const double lo = std::ldexp(1.0, -l);
        const double hi = std::ldexp(1.0, -l + 1);
        append_interval(rule, a, b, t0 + lo * (t1 - t0), t0 + hi * (t1 - t0), n + extra_singular_points, false);
    }
}

// Bisects until every piece is no longer than its distance to g.
void append_near(EdgeRule& rule, const Point2& a, const Point2& b, double t0, double t1, const Point2& g, int n,
                 int depth)
{
    const Point2 p0 = a + t0 * (b - a);
    const Point2 p1 = a + t1 * (b - a);
    const double dist = distance_to_segment(g, p0, p1);
    const double len = (p1 - p0).norm();
    if (depth >= max_near_depth || dist >= len) {
        append_interval(rule, a, b, t0, t1, dist < near_zone * len ? n + extra_singular_points : n, false);
        return;
    }
    const double tm = 0.5 * (t0 + t1);
    append_near(rule, a, b, t0, tm, g, n, depth + 1);
    append_near(rule, a, b, tm, t1, g, n, depth + 1);
}

struct Triangle {
    Point2 a, b, c;
};

double tri_area(const Point2& a, const Point2& b, const Point2& c) { return 0.5 * std::abs(cross(b - a, c - a)); }

// Collapsed product rule on (apex, b, c): x = apex + u (b - apex + v (c - b)).
// When singular, u is graded toward the apex and the innermost layer uses
// u = s t^6.
void append_collapsed(PolygonRule& rule, const Point2& apex, const Point2& b, const Point2& c, int degree, bool singular,
                      int levels)
{
    const double area2 = 2.0 * tri_area(apex, b, c);
    if (area2 == 0.0)
        return;
    // Singular pieces get extra points: the layer integrands are smooth but
    // not polynomial (fractional powers of the distance to the apex).
    const int n = std::max(1, (degree + 3) / 2);
    const auto& glv = gauss_legendre(singular ? n + extra_singular_points : n);
    const int n_layer = singular ? n + extra_singular_points + 2 : n;

    auto add_layer = [&](double u0, double u1, bool power) {
        const auto& glu = gauss_legendre(power ? std::max(3 * degree + 6, n_layer) : n_layer);
        for (std::size_t i = 0; i < glu.nodes.size(); ++i) {
            const double s = 0.5 * (glu.nodes[i] + 1.0);
            double u;
            double ju;
            if (power) {
                const double s5 = std::pow(s, 5);
                u = u0 + (u1 - u0) * s5 * s;
                ju = (u1 - u0) * 6.0 * s5;
            } else {
                u = u0 + (u1 - u0) * s;
                ju = u1 - u0;
            }
            const double wu = 0.5 * glu.weights[i] * ju;
            if (wu == 0.0 || u == 0.0)
                continue;
            for (std::size_t j = 0; j < glv.nodes.size(); ++j) {
                const double v = 0.5 * (glv.nodes[j] + 1.0);
                const double wv = 0.5 * glv.weights[j];
                rule.nodes.push_back(apex + u * ((b - apex) + v * (c - b)));
                rule.weights.push_back(area2 * u * wu * wv);
            }
        }
    };

    if (!singular) {
        add_layer(0.0, 1.0, false);
        return;
    }
    add_layer(0.0, std::ldexp(1.0, -levels), true);
    for (int l = levels; l > 0; --l)
        add_layer(std::ldexp(1.0, -l), std::ldexp(1.0, -l + 1), false);
}

double tri_diameter(const Triangle& t)
{
    return std::max({(t.a - t.b).norm(), (t.b - t.c).norm(), (t.c - t.a).norm()});
}

double tri_distance(const Point2& g, const Triangle& t)
{
    return std::min({distance_to_segment(g, t.a, t.b), distance_to_segment(g, t.b, t.c), distance_to_segment(g, t.c, t.a)});
}

// Red refinement until every piece is no wider than its distance to g.
void append_refined(PolygonRule& rule, const Triangle& t, int degree, const Point2& g, int depth)
{
    const double dist = tri_distance(g, t);
    const double diam = tri_diameter(t);
    if (depth >= max_near_depth / 2 || dist >= diam) {
        // the integrand is analytic here but may vary on the scale of dist
        const int boost = dist < near_zone * diam ? 2 * extra_singular_points : 0;
        append_collapsed(rule, t.a, t.b, t.c, degree + boost, false, 0);
        return;
    }
    const Point2 ab = 0.5 * (t.a + t.b);
    const Point2 bc = 0.5 * (t.b + t.c);
    const Point2 ca = 0.5 * (t.c + t.a);
    append_refined(rule, {t.a, ab, ca}, degree, g, depth + 1);
    append_refined(rule, {ab, t.b, bc}, degree, g, depth + 1);
    append_refined(rule, {ca, bc, t.c}, degree, g, depth + 1);
    append_refined(rule, {ab, bc, ca}, degree, g, depth + 1);
}

// Triangle (g, b, c) collapsed at g. The far side is bisected until each
// piece is no longer than its distance to g, so that the angular direction
// stays smooth when that side passes close to g.
void append_singular_fan(PolygonRule& rule, const Point2& g, const Point2& b, const Point2& c, int degree,
                         int levels, int depth)
{
    if (depth < max_near_depth && (c - b).norm() > distance_to_segment(g, b, c)) {
        const Point2 m = 0.5 * (b + c);
        append_singular_fan(rule, g, b, m, degree, levels, depth + 1);
        append_singular_fan(rule, g, m, c, degree, levels, depth + 1);
        return;
    }
    append_collapsed(rule, g, b, c, degree, true, levels);
}

bool in_closed_triangle(const Point2& p, const Triangle& t, double tol)
{
    const double d1 = cross(t.b - t.a, p - t.a);
    const double d2 = cross(t.c - t.b, p - t.b);
    const double d3 = cross(t.a - t.c, p - t.c);
    return d1 >= -tol && d2 >= -tol && d3 >= -tol;
}

} // namespace

const GaussLegendre& gauss_legendre(int n)
{
    if (n < 1)
        throw QuadratureError("Gauss-Legendre rule needs at least one point");
    static std::mutex mutex;
    static std::map<int, GaussLegendre> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, compute_gauss_legendre(n)).first;
    return it->second;
}

EdgeRule gauss_edge(const Point2& a, const Point2& b, int n_points)
{
    EdgeRule rule;
    append_interval(rule, a, b, 0.0, 1.0, n_points, false);
    return rule;
}

EdgeRule graded_edge_rule(const Point2& a, const Point2& b, int n_points, const std::optional<Grading>& grading)
{
    if (!grading)
        return gauss_edge(a, b, n_points);
    const Vec2 d = b - a;
    const double len = d.norm();
    const Point2& g = grading->point;
    const double t = std::clamp((g - a).dot(d) / (len * len), 0.0, 1.0);
    const double dist = (a + t * d - g).norm();
    EdgeRule rule;
    if (dist <= 1e-12 * len) {
        const double tol = 1e-12;
        if (t <= tol) {
            append_graded(rule, a, b, 0.0, 1.0, n_points, grading->levels);
        } else if (t >= 1.0 - tol) {
            append_graded(rule, b, a, 0.0, 1.0, n_points, grading->levels);
            // parameters were measured from b; flip to the a->b convention
            for (auto& s : rule.params)
                s = -s;
        } else {
            const Point2 m = a + t * d;
            EdgeRule left;
            append_graded(left, m, a, 0.0, 1.0, n_points, grading->levels);
            for (std::size_t i = 0; i < left.nodes.size(); ++i) {
                rule.nodes.push_back(left.nodes[i]);
                rule.params.push_back(2.0 * (left.nodes[i] - a).dot(d) / (len * len) - 1.0);
                rule.weights.push_back(left.weights[i]);
            }
            EdgeRule right;
            append_graded(right, m, b, 0.0, 1.0, n_points, grading->levels);
            for (std::size_t i = 0; i < right.nodes.size(); ++i) {
                rule.nodes.push_back(right.nodes[i]);
                rule.params.push_back(2.0 * (right.nodes[i] - a).dot(d) / (len * len) - 1.0);
                rule.weights.push_back(right.weights[i]);
            }
        }
        return rule;
    }
    append_near(rule, a, b, 0.0, 1.0, g, n_points, 0);
    return rule;
}

void append_triangle_rule(PolygonRule& rule, const Point2& a, const Point2& b, const Point2& c, int degree)
{
    append_collapsed(rule, a, b, c, degree, false, 0);
}

PolygonRule polygon_rule(std::span<const Point2> poly, int degree, const std::optional<Grading>& grading,
                         const std::optional<Point2>& fan_centre)
{
    if (degree < 0)
        throw QuadratureError("negative quadrature degree");
    Point2 centre;
    if (fan_centre) {
        centre = *fan_centre;
    } else {
        const auto kp = find_kernel_point(poly);
        if (!kp)
            throw QuadratureError("polygon is not star-shaped; no fan centre found");
        centre = kp->point;
    }

    PolygonRule rule;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Triangle t{centre, poly[i], poly[(i + 1) % n]};
        const double area = tri_area(t.a, t.b, t.c);
        if (area == 0.0)
            continue;
        if (!grading) {
            append_collapsed(rule, t.a, t.b, t.c, degree, false, 0);
            continue;
        }
        const Point2& g = grading->point;
        const double diam = std::max({(t.a - t.b).norm(), (t.b - t.c).norm(), (t.c - t.a).norm()});
        if (in_closed_triangle(g, t, 1e-12 * diam * diam)) {
            const Triangle pieces[3] = {{g, t.a, t.b}, {g, t.b, t.c}, {g, t.c, t.a}};
            for (const auto& p : pieces) {
                if (tri_area(p.a, p.b, p.c) <= 1e-14 * area)
                    continue;
                append_singular_fan(rule, g, p.b, p.c, degree, grading->levels, 0);
            }
            continue;
        }
        append_refined(rule, t, degree, g, 0);
    }
    return rule;
}

} // namespace xvem
