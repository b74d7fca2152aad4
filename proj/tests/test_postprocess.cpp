#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "xvem/assembly.hpp"
#include "xvem/errors.hpp"
#include "xvem/postprocess.hpp"

using namespace xvem;

namespace {

Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = u(rng);
    return v;
}

FunctionField constant_field(double c)
{
    return FunctionField([c](const Point2&) { return c; }, [](const Point2&) { return Vec2::Zero().eval(); });
}

} // namespace

TEST_CASE("discrete seminorm kernel")
{
    Discretization disc(build_cartesian_fractured_mesh(4), fracture_singularity(), EnrichmentPlan::local(0.3),
                        {.k = 2});
    const auto ops = build_all_operators(disc);
    CHECK(discrete_seminorm(disc, ops, Eigen::VectorXd::Zero(disc.layout().size())) == 0.0);
    const Eigen::VectorXd c = evaluate_dofs(disc, constant_field(-4.0));
    CHECK(discrete_seminorm(disc, ops, c) < 1e-12);
}

TEST_CASE("energy equals the stiffness quadratic form")
{
    std::mt19937_64 rng(31);
    struct Case {
        Mesh mesh;
        EnrichmentSpace space;
        EnrichmentPlan plan;
    };
    std::vector<Case> cases;
    cases.push_back({build_cartesian_fractured_mesh(4), fracture_singularity(), EnrichmentPlan::global()});
    cases.push_back({build_cartesian_fractured_mesh(8), fracture_singularity(), EnrichmentPlan::local(0.15)});
    cases.push_back({build_hexagonal_lshape_mesh(2), lshape_singularity_topright(), EnrichmentPlan::local(0.15)});
    for (const auto& c : cases)
        for (int k : {1, 2, 3}) {
            Discretization disc(c.mesh, c.space, c.plan, {.k = k});
            const auto ops = build_all_operators(disc);
            const auto sys = assemble(disc, ops, {});
            for (int t = 0; t < 50; ++t) {
                const Eigen::VectorXd v = random_vector(rng, disc.layout().size());
                const double norm = discrete_seminorm(disc, ops, v);
                CHECK(std::abs(v.dot(sys.matrix * v) - norm * norm) < 1e-9 * norm * norm);
            }
        }
}

TEST_CASE("errors vanish for reproduced polynomials")
{
    std::mt19937_64 rng(4);
    for (int k : {1, 2, 3}) {
        Discretization disc(build_cartesian_fractured_mesh(8), fracture_singularity(), EnrichmentPlan::none(),
                            {.k = k});
        const auto ops = build_all_operators(disc);
        const auto q = std::make_shared<PolynomialField>(k, random_vector(rng, ScaledMonomials::dimension(k)));
        const auto problem = manufactured_problem(q);
        const auto sol = solve_problem(disc, ops, problem.source, *q);
        const auto e = compute_errors(disc, ops, sol.dofs, *q);
        CHECK(e.l2 < 1e-8);
        CHECK(e.h1 < 1e-8);
        CHECK(e.l2_denominator > 0.0);
        CHECK(e.h1_denominator > 0.0);
    }
}

TEST_CASE("error norms of a perturbation")
{
    Discretization disc(build_cartesian_fractured_mesh(8), fracture_singularity(), EnrichmentPlan::local(0.15),
                        {.k = 2});
    const auto ops = build_all_operators(disc);
    const auto problem = singular_benchmark(disc.space());
    const Eigen::VectorXd iu = evaluate_dofs(disc, *problem.exact);
    const auto zero = compute_errors(disc, ops, iu, *problem.exact);
    CHECK(zero.l2 == 0.0);
    CHECK(zero.h1 == 0.0);
    CHECK(zero.energy == 0.0);

    // adding a constant changes only the L2 part; the relative value is |c| |Omega|^1/2 / ||Pi I u||
    const Eigen::VectorXd shifted = iu + evaluate_dofs(disc, constant_field(0.1));
    const auto e = compute_errors(disc, ops, shifted, *problem.exact);
    CHECK(e.h1 < 1e-12);
    CHECK(e.energy < 1e-12);
    CHECK(e.l2 == doctest::Approx(0.1 * std::sqrt(disc.mesh().total_area()) / zero.l2_denominator).epsilon(1e-10));

    // the energy error is the seminorm of the difference
    std::mt19937_64 rng(2);
    const Eigen::VectorXd d = 1e-3 * random_vector(rng, iu.size());
    const auto ed = compute_errors(disc, ops, iu + d, *problem.exact);
    CHECK(ed.energy == doctest::Approx(discrete_seminorm(disc, ops, d)).epsilon(1e-12));
}

namespace {

// ||grad(Pi I u - u)|| / ||grad u|| by element quadrature.
double projection_error(const Discretization& disc, const std::vector<ElementOperators>& ops, const ScalarField& u)
{
    const Eigen::VectorXd iu = evaluate_dofs(disc, u);
    double num = 0.0, den = 0.0;
    for (int p = 0; p < disc.mesh().n_elements(); ++p) {
        const ElementSpace& s = disc.element_space(p);
        const Projection proj = elliptic_projector(ops[p], gather(disc, p, iu));
        const Eigen::Matrix2Xd g = project_gradients(disc, proj, s.rule.nodes);
        for (std::size_t q = 0; q < s.rule.nodes.size(); ++q) {
            const Vec2 gu = u.gradient(s.rule.nodes[q], s.hint);
            num += s.rule.weights[q] * (g.col(q) - gu).squaredNorm();
            den += s.rule.weights[q] * gu.squaredNorm();
        }
    }
    return std::sqrt(num / den);
}

} // namespace

TEST_CASE("projected interpolant converges at the optimal rate")
{
    const auto space = fracture_singularity();
    const auto problem = singular_benchmark(space);
    for (int k : {1, 2}) {
        std::vector<double> h, dofs, e1, denominators;
        for (int n : {8, 16, 32}) {
            Discretization disc(build_cartesian_fractured_mesh(n), space, EnrichmentPlan::local(0.15), {.k = k});
            const auto ops = build_all_operators(disc);
            h.push_back(disc.mesh().h());
            dofs.push_back(static_cast<double>(disc.layout().size()));
            e1.push_back(projection_error(disc, ops, *problem.exact));
            const Eigen::VectorXd iu = evaluate_dofs(disc, *problem.exact);
            denominators.push_back(compute_errors(disc, ops, iu, *problem.exact).h1_denominator);
        }
        CHECK(fit_rates(h, dofs, e1).asymptotic_h >= k - 0.15);
        CHECK(std::abs(denominators[2] - denominators[1]) < 0.02 * denominators[2]);
    }
}

TEST_CASE("rate fitting")
{
    SUBCASE("synthetic powers of h")
    {
        const std::vector<double> h = {0.5, 0.25, 0.125, 0.0625};
        std::vector<double> dofs, err;
        for (double x : h) {
            dofs.push_back(1.0 / (x * x));
            err.push_back(3.0 * x * x);
        }
        const RateFit fit = fit_rates(h, dofs, err);
        REQUIRE(fit.pairwise_h.size() == 3);
        for (double s : fit.pairwise_h)
            CHECK(s == doctest::Approx(2.0).epsilon(1e-12));
        for (double s : fit.pairwise_dofs)
            CHECK(s == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(fit.asymptotic_h == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(fit.asymptotic_dofs == doctest::Approx(-1.0).epsilon(1e-12));
    }
    SUBCASE("least squares uses the last three points")
    {
        const std::vector<double> h = {1.0, 0.5, 0.25, 0.125};
        const std::vector<double> dofs = {1, 4, 16, 64};
        const std::vector<double> err = {7.0, 0.5, 0.25, 0.125};
        const RateFit fit = fit_rates(h, dofs, err);
        CHECK(fit.asymptotic_h == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(fit.asymptotic_dofs == doctest::Approx(-0.5).epsilon(1e-12));
        CHECK(fit.pairwise_h[0] == doctest::Approx(std::log2(14.0)).epsilon(1e-12));
    }
    SUBCASE("two points")
    {
        const RateFit fit = fit_rates({0.2, 0.1}, {10, 40}, {1e-2, 1e-3});
        CHECK(fit.asymptotic_h == doctest::Approx(std::log2(10.0)).epsilon(1e-12));
    }
    SUBCASE("invalid input")
    {
        CHECK_THROWS_AS(fit_rates({0.1}, {10}, {1.0}), Error);
        CHECK_THROWS_AS(fit_rates({0.1, 0.2}, {10, 40}, {1.0, 0.5}), Error);
        CHECK_THROWS_AS(fit_rates({0.2, 0.1}, {10, 40}, {1.0, 0.0}), Error);
        CHECK_THROWS_AS(fit_rates({0.2, 0.1}, {10}, {1.0, 0.5}), Error);
    }
    SUBCASE("reports skip failed rows")
    {
        std::vector<ErrorReport> rows;
        for (double x : {0.4, 0.2, 0.1, 0.05}) {
            ErrorReport r;
            r.mesh_size = x;
            r.dofs = static_cast<int>(1.0 / (x * x));
            r.l2 = x * x * x;
            r.h1 = x * x;
            r.energy = x * x;
            rows.push_back(r);
        }
        rows.back().solved = false;
        rows.back().h1 = 1.0;
        const RateFit fit = fit_rates(rows, ErrorKind::H1);
        CHECK(fit.pairwise_h.size() == 2);
        CHECK(fit.asymptotic_h == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(fit_rates(rows, ErrorKind::L2).asymptotic_h == doctest::Approx(3.0).epsilon(1e-9));
    }
}
