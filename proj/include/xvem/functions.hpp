#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "xvem/enrichment.hpp"
#include "xvem/polynomials.hpp"

namespace xvem {

using SourceFunction = std::function<double(const Point2&)>;

/// sin(pi x) sin(pi y).
class SineProductField : public ScalarField {
public:
    double value(const Point2& x, const std::optional<Point2>& side_hint = std::nullopt) const override;
    Vec2 gradient(const Point2& x, const std::optional<Point2>& side_hint = std::nullopt) const override;
    double laplacian(const Point2& x, const std::optional<Point2>& side_hint = std::nullopt) const override;
};

/// Sum of monomials x^a y^b with the given coefficients, in the ordering of
/// ScaledMonomials centred at the origin with unit scale.
class PolynomialField : public ScalarField {
public:
    PolynomialField(int degree, Eigen::VectorXd coefficients);
    double value(const Point2& x, const std::optional<Point2>& side_hint = std::nullopt) const override;
    Vec2 gradient(const Point2& x, const std::optional<Point2>& side_hint = std::nullopt) const override;
    double laplacian(const Point2& x, const std::optional<Point2>& side_hint = std::nullopt) const override;
    bool harmonic() const override { return degree_ < 2; }

private:
    int degree_;
    ScaledMonomials basis_;
    Eigen::VectorXd coef_;
};

class SumField : public ScalarField {
public:
    explicit SumField(std::vector<std::shared_ptr<const ScalarField>> terms) : terms_(std::move(terms)) {}
    double value(const Point2& x, const std::optional<Point2>& side_hint = std::nullopt) const override;
    Vec2 gradient(const Point2& x, const std::optional<Point2>& side_hint = std::nullopt) const override;
    double laplacian(const Point2& x, const std::optional<Point2>& side_hint = std::nullopt) const override;
    bool harmonic() const override;

private:
    std::vector<std::shared_ptr<const ScalarField>> terms_;
};

/// Exact solution u and source f = -lap u. Dirichlet data is u itself.
struct ManufacturedProblem {
    std::shared_ptr<const ScalarField> exact;
    SourceFunction source;
};

ManufacturedProblem manufactured_problem(std::shared_ptr<const ScalarField> exact);

/// sin(pi x) sin(pi y) plus the first field of the space.
ManufacturedProblem singular_benchmark(const EnrichmentSpace& space);

} // namespace xvem
