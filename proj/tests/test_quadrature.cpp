#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "xvem/errors.hpp"
#include "xvem/quadrature.hpp"

using namespace xvem;

namespace {

template <class F>
double integrate(const PolygonRule& r, F&& f)
{
    double s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
        s += r.weights[i] * f(r.nodes[i]);
    return s;
}

template <class F>
double integrate(const EdgeRule& r, F&& f)
{
    double s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
        s += r.weights[i] * f(r.nodes[i]);
    return s;
}

std::vector<Point2> unit_square() { return {{0, 0}, {1, 0}, {1, 1}, {0, 1}}; }

double weight_sum(const PolygonRule& r)
{
    double s = 0.0;
    for (double w : r.weights)
        s += w;
    return s;
}

// Monomial moment over the axis-aligned box [x0,x1]x[y0,y1].
double box_moment(int a, int b, double x0, double x1, double y0, double y1)
{
    auto m = [](int p, double lo, double hi) { return (std::pow(hi, p + 1) - std::pow(lo, p + 1)) / (p + 1); };
    return m(a, x0, x1) * m(b, y0, y1);
}

} // namespace

TEST_CASE("Gauss-Legendre basics")
{
    const auto& g1 = gauss_legendre(1);
    CHECK(g1.nodes[0] == doctest::Approx(0.0));
    CHECK(g1.weights[0] == doctest::Approx(2.0));
    const auto& g2 = gauss_legendre(2);
    CHECK(g2.nodes[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-15));
    CHECK(g2.nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
    CHECK(g2.weights[0] == doctest::Approx(1.0));
    const auto& g3 = gauss_legendre(3);
    double odd = 0.0;
    for (int i = 0; i < 3; ++i)
        odd += g3.weights[i] * std::pow(g3.nodes[i], 5);
    CHECK(std::abs(odd) < 1e-14);
    for (int n = 1; n <= 40; ++n) {
        const auto& g = gauss_legendre(n);
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            CHECK(g.weights[i] > 0.0);
            s += g.weights[i];
        }
        CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
        // exact for x^{2n-2}
        double m = 0.0;
        for (int i = 0; i < n; ++i)
            m += g.weights[i] * std::pow(g.nodes[i], 2 * n - 2);
        CHECK(m == doctest::Approx(2.0 / (2 * n - 1)).epsilon(1e-13));
    }
}

TEST_CASE("edge midpoint rule")
{
    const EdgeRule r = gauss_edge({0, 0}, {2, 0}, 1);
    REQUIRE(r.nodes.size() == 1);
    CHECK(r.nodes[0].x() == doctest::Approx(1.0));
    CHECK(r.nodes[0].y() == doctest::Approx(0.0));
    CHECK(r.weights[0] == doctest::Approx(2.0));
    CHECK(r.params[0] == doctest::Approx(0.0));
}

TEST_CASE("graded edge rules integrate singular traces")
{
    // |x|^{-1/2} along [0,1] with the singular point at either end or inside
    const Grading g{{0.0, 0.0}, 14};
    const auto f = [](const Point2& p) { return 1.0 / std::sqrt(p.norm()); };
    CHECK(integrate(graded_edge_rule({0, 0}, {1, 0}, 4, g), f) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(integrate(graded_edge_rule({1, 0}, {0, 0}, 4, g), f) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(integrate(graded_edge_rule({-1, 0}, {3, 0}, 4, g), f) == doctest::Approx(2.0 + 2.0 * std::sqrt(3.0)).epsilon(1e-13));
    // r^{1/3} and r^{-1/3}
    const auto f3 = [](const Point2& p) { return std::cbrt(p.norm()) + 1.0 / std::cbrt(p.norm()); };
    CHECK(integrate(graded_edge_rule({0, 0}, {0, 2}, 3, g), f3)
          == doctest::Approx(0.75 * std::pow(2.0, 4.0 / 3.0) + 1.5 * std::pow(2.0, 2.0 / 3.0)).epsilon(1e-13));

    for (const auto& [rule, len] : {std::pair{graded_edge_rule({0, 0}, {1, 0}, 4, g), 1.0},
                                    std::pair{graded_edge_rule({-1, 0}, {3, 0}, 4, g), 4.0},
                                    std::pair{graded_edge_rule({-1, 0.5}, {3, 0.5}, 4, g), 4.0}}) {
        double s = 0.0;
        for (std::size_t i = 0; i < rule.weights.size(); ++i) {
            CHECK(rule.weights[i] > 0.0);
            s += rule.weights[i];
        }
        CHECK(s == doctest::Approx(len).epsilon(1e-14));
    }
    // reference parameters follow the a->b convention
    const EdgeRule r = graded_edge_rule({1, 0}, {0, 0}, 2, g);
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
        CHECK(r.params[i] == doctest::Approx(1.0 - 2.0 * r.nodes[i].x()).epsilon(1e-12));
}

TEST_CASE("unit square monomials")
{
    const PolygonRule r = polygon_rule(unit_square(), 4);
    CHECK(integrate(r, [](const Point2& p) { return p.x() * p.x() * p.y() * p.y(); })
          == doctest::Approx(1.0 / 9.0).epsilon(1e-13));
    CHECK(weight_sum(r) == doctest::Approx(1.0).epsilon(1e-14));
    const PolygonRule r2 = polygon_rule(unit_square(), 2);
    CHECK(weight_sum(r2) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("exactness for random polynomials on random star-shaped polygons")
{
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        // box with random size so the reference is closed form, plus graded variant
        const double x0 = unif(rng), y0 = unif(rng);
        const double x1 = x0 + 0.1 + std::abs(unif(rng));
        const double y1 = y0 + 0.1 + std::abs(unif(rng));
        const std::vector<Point2> box = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
        const int d = 1 + trial % 10;
        std::vector<std::array<int, 2>> exps;
        for (int a = 0; a <= d; ++a)
            for (int b = 0; a + b <= d; ++b)
                exps.push_back({a, b});
        std::vector<double> coef(exps.size());
        for (auto& c : coef)
            c = unif(rng);
        auto poly = [&](const Point2& p) {
            double s = 0.0;
            for (std::size_t i = 0; i < exps.size(); ++i)
                s += coef[i] * std::pow(p.x(), exps[i][0]) * std::pow(p.y(), exps[i][1]);
            return s;
        };
        double exact = 0.0;
        double scale = 0.0;
        for (std::size_t i = 0; i < exps.size(); ++i) {
            exact += coef[i] * box_moment(exps[i][0], exps[i][1], x0, x1, y0, y1);
            scale += std::abs(coef[i] * box_moment(exps[i][0], exps[i][1], x0, x1, y0, y1));
        }
        const Point2 corner(x0, y0);
        const Point2 inside(0.3 * x0 + 0.7 * x1, 0.6 * y0 + 0.4 * y1);
        for (const auto& grading : {std::optional<Grading>{}, std::optional<Grading>{Grading{corner, 6}},
                                    std::optional<Grading>{Grading{inside, 6}},
                                    std::optional<Grading>{Grading{Point2(x1 + 0.05, y1), 6}}}) {
            const PolygonRule r = polygon_rule(box, d, grading);
            for (double w : r.weights)
                CHECK(w > 0.0);
            CHECK(std::abs(integrate(r, poly) - exact) < 1e-12 * scale);
        }
    }
}

TEST_CASE("graded square integral of r^{-1/2} against an adaptive reference")
{
    // polar form: 2 * int_0^{pi/4} (2/3) cos(t)^{-3/2} dt
    const double ref = 2.0 * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                                 [](double t) { return (2.0 / 3.0) * std::pow(std::cos(t), -1.5); }, 0.0,
                                 std::numbers::pi / 4, 15, 1e-15);
    const PolygonRule r = polygon_rule(unit_square(), 4, Grading{{0.0, 0.0}, 12});
    const double val = integrate(r, [](const Point2& p) { return std::pow(p.norm(), -0.5); });
    CHECK(std::abs(val - ref) < 1e-8 * ref);
}

TEST_CASE("grading self-convergence for the crack-tip energy density")
{
    // |grad(r^{1/2} sin(theta/2))|^2 = 1 / (4 r), element touching the tip
    const std::vector<Point2> cell = {{0, 0}, {0.25, 0}, {0.25, 0.25}, {0, 0.25}};
    const auto f = [](const Point2& p) { return 0.25 / p.norm(); };
    for (int levels : {12, 14, 16}) {
        const double a = integrate(polygon_rule(cell, 6, Grading{{0, 0}, levels}), f);
        const double b = integrate(polygon_rule(cell, 6, Grading{{0, 0}, 2 * levels}), f);
        CHECK(std::abs(a - b) < 1e-8);
    }
    // closed form: (1/4) * 2 * int_0^{pi/4} 0.25 / cos(t) dt
    const double exact = 0.25 * 2.0 * 0.25 * std::log(std::tan(3.0 * std::numbers::pi / 8.0));
    CHECK(integrate(polygon_rule(cell, 6, Grading{{0, 0}, 14}), f) == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("weights are positive and sum to the area on a hexagon with grading at a vertex")
{
    std::vector<Point2> hex;
    for (int i = 0; i < 6; ++i)
        hex.emplace_back(std::cos(i * std::numbers::pi / 3), std::sin(i * std::numbers::pi / 3));
    const PolygonRule r = polygon_rule(hex, 8, Grading{hex[2], 14});
    for (double w : r.weights)
        CHECK(w > 0.0);
    CHECK(weight_sum(r) == doctest::Approx(3.0 * std::sqrt(3.0) / 2.0).epsilon(1e-13));
}

TEST_CASE("non-star-shaped polygon without a fan centre")
{
    const std::vector<Point2> comb = {{0, 0}, {5, 0}, {5, 3}, {4, 3}, {4, 0.2}, {3, 0.2}, {3, 3},
                                      {2, 3}, {2, 0.2}, {1, 0.2}, {1, 3}, {0, 3}};
    CHECK_THROWS_AS(polygon_rule(comb, 2), QuadratureError);
}

TEST_CASE("reflex vertex at the singular point with a nearby fan centre")
{
    // divergence theorem: int d/dx (r^{2/3} cos(2 theta / 3)) = boundary flux, with the
    // fan centre close to the singular point so fan sides pass near it
    const std::vector<Point2> poly = {{0, 1.0 / 3}, {-0.25, 1.0 / 6}, {-0.25, -1.0 / 6}, {0, -1.0 / 3},
                                      {0.25, -1.0 / 6}, {0.25, 0}, {0, 0}};
    const Point2 centre(-0.037, -0.043);
    auto angle = [](const Point2& x) {
        double t = std::atan2(x.y(), x.x());
        return t < 0.5 * std::numbers::pi ? t + 2 * std::numbers::pi : t;
    };
    auto value = [&](const Point2& x) { return std::pow(x.norm(), 2.0 / 3) * std::cos(2.0 / 3 * angle(x)); };
    auto dx = [&](const Point2& x) { return 2.0 / 3 * std::pow(x.norm(), -1.0 / 3) * std::cos(angle(x) / 3); };
    double flux = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point2 a = poly[i];
        const Point2 b = poly[(i + 1) % poly.size()];
        const double nx = (b - a).y() / (b - a).norm();
        const auto r = graded_edge_rule(a, b, 20, Grading{Point2::Zero(), 30});
        for (std::size_t q = 0; q < r.nodes.size(); ++q)
            flux += r.weights[q] * value(r.nodes[q]) * nx;
    }
    for (int degree : {2, 4, 8}) {
        const auto rule = polygon_rule(poly, degree, Grading{Point2::Zero(), 14}, centre);
        CHECK(integrate(rule, dx) == doctest::Approx(flux).epsilon(1e-11));
    }
}
