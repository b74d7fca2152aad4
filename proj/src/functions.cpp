#include "xvem/functions.hpp"

#include <cmath>
#include <numbers>

#include "xvem/errors.hpp"

namespace xvem {

namespace {
constexpr double pi = std::numbers::pi;
}

double SineProductField::value(const Point2& x, const std::optional<Point2>&) const
{
    return std::sin(pi * x.x()) * std::sin(pi * x.y());
}

Vec2 SineProductField::gradient(const Point2& x, const std::optional<Point2>&) const
{
    return pi * Vec2(std::cos(pi * x.x()) * std::sin(pi * x.y()), std::sin(pi * x.x()) * std::cos(pi * x.y()));
}

double SineProductField::laplacian(const Point2& x, const std::optional<Point2>&) const
{
    return -2.0 * pi * pi * value(x);
}

PolynomialField::PolynomialField(int degree, Eigen::VectorXd coefficients)
    : degree_(degree), basis_(Point2::Zero(), 1.0, degree), coef_(std::move(coefficients))
{
    if (coef_.size() != basis_.size())
        throw ConfigError("polynomial coefficient count does not match the degree");
}

double PolynomialField::value(const Point2& x, const std::optional<Point2>&) const
{
    double v = 0.0;
    for (int i = 0; i < basis_.size(); ++i)
        v += coef_[i] * basis_.value(i, x);
    return v;
}

Vec2 PolynomialField::gradient(const Point2& x, const std::optional<Point2>&) const
{
    Vec2 g = Vec2::Zero();
    for (int i = 0; i < basis_.size(); ++i)
        g += coef_[i] * basis_.gradient(i, x);
    return g;
}

double PolynomialField::laplacian(const Point2& x, const std::optional<Point2>&) const
{
    double v = 0.0;
    for (int i = 0; i < basis_.size(); ++i)
        v += coef_[i] * basis_.laplacian(i, x);
    return v;
}

double SumField::value(const Point2& x, const std::optional<Point2>& side_hint) const
{
    double v = 0.0;
    for (const auto& t : terms_)
        v += t->value(x, side_hint);
    return v;
}

Vec2 SumField::gradient(const Point2& x, const std::optional<Point2>& side_hint) const
{
    Vec2 g = Vec2::Zero();
    for (const auto& t : terms_)
        g += t->gradient(x, side_hint);
    return g;
}

double SumField::laplacian(const Point2& x, const std::optional<Point2>& side_hint) const
{
    double v = 0.0;
    for (const auto& t : terms_)
        if (!t->harmonic())
            v += t->laplacian(x, side_hint);
    return v;
}

bool SumField::harmonic() const
{
    for (const auto& t : terms_)
        if (!t->harmonic())
            return false;
    return true;
}

ManufacturedProblem manufactured_problem(std::shared_ptr<const ScalarField> exact)
{
    ManufacturedProblem p;
    p.exact = exact;
    p.source = [u = std::move(exact)](const Point2& x) { return -u->laplacian(x); };
    return p;
}

ManufacturedProblem singular_benchmark(const EnrichmentSpace& space)
{
    if (space.fields.empty())
        throw ConfigError("enrichment space has no fields");
    return manufactured_problem(std::make_shared<SumField>(
        std::vector<std::shared_ptr<const ScalarField>>{std::make_shared<SineProductField>(), space.fields.front()}));
}

} // namespace xvem
