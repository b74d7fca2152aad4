#include "xvem/enrichment.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "xvem/errors.hpp"
#include "xvem/mesh.hpp"

namespace xvem {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double cut_tolerance = 1e-10;

double wrap(double theta, double cut)
{
    double t = std::fmod(theta - cut, two_pi);
    if (t < 0.0)
        t += two_pi;
    return cut + t;
}

} // namespace

PolarSingularField::PolarSingularField(Point2 centre, double alpha, double beta, double theta_s, double cut)
    : centre_(std::move(centre)), alpha_(alpha), beta_(beta), theta_s_(theta_s), cut_(cut)
{
    if (!(alpha > 0.0))
        throw ConfigError("singular field exponent must be positive");
}

double PolarSingularField::angle(const Point2& x, const std::optional<Point2>& side_hint) const
{
    const Vec2 d = x - centre_;
    double theta = wrap(std::atan2(d.y(), d.x()), cut_);
    const bool on_cut = theta - cut_ < cut_tolerance || cut_ + two_pi - theta < cut_tolerance;
    if (on_cut && side_hint) {
        const Vec2 h = *side_hint - centre_;
        const double hint_theta = wrap(std::atan2(h.y(), h.x()), cut_);
        theta = hint_theta < cut_ + std::numbers::pi ? cut_ : cut_ + two_pi;
    }
    return theta;
}

double PolarSingularField::value(const Point2& x, const std::optional<Point2>& side_hint) const
{
    const double r = (x - centre_).norm();
    if (r == 0.0)
        return 0.0;
    return std::pow(r, alpha_) * std::sin(beta_ * (angle(x, side_hint) - theta_s_));
}

Vec2 PolarSingularField::gradient(const Point2& x, const std::optional<Point2>& side_hint) const
{
    const double r = (x - centre_).norm();
    if (r == 0.0) {
        const double inf = std::numeric_limits<double>::infinity();
        return Vec2(inf, inf);
    }
    const double theta = angle(x, side_hint);
    const double phase = beta_ * (theta - theta_s_);
    const double ra = std::pow(r, alpha_ - 1.0);
    const double dr = alpha_ * ra * std::sin(phase);
    const double dt = beta_ * ra * std::cos(phase);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return Vec2(dr * c - dt * s, dr * s + dt * c);
}

double PolarSingularField::laplacian(const Point2& x, const std::optional<Point2>& side_hint) const
{
    if (alpha_ == beta_)
        return 0.0;
    const double r = (x - centre_).norm();
    if (r == 0.0)
        return std::numeric_limits<double>::infinity();
    return (alpha_ * alpha_ - beta_ * beta_) * std::pow(r, alpha_ - 2.0)
        * std::sin(beta_ * (angle(x, side_hint) - theta_s_));
}

FunctionField::FunctionField(ValueFn value, GradFn gradient, ValueFn laplacian)
    : value_(std::move(value)), gradient_(std::move(gradient)), laplacian_(std::move(laplacian))
{
    if (!value_ || !gradient_)
        throw ConfigError("field needs a value and a gradient");
}

double FunctionField::value(const Point2& x, const std::optional<Point2>&) const { return value_(x); }
Vec2 FunctionField::gradient(const Point2& x, const std::optional<Point2>&) const { return gradient_(x); }
double FunctionField::laplacian(const Point2& x, const std::optional<Point2>&) const
{
    return laplacian_ ? laplacian_(x) : 0.0;
}

EnrichmentSpace fracture_singularity()
{
    EnrichmentSpace s;
    s.name = "fracture";
    s.fields.push_back(std::make_shared<PolarSingularField>(Point2::Zero(), 0.5, 0.5, 0.0, 0.0));
    s.singular_point = Point2::Zero();
    return s;
}

EnrichmentSpace lshape_singularity_topright()
{
    constexpr double pi = std::numbers::pi;
    EnrichmentSpace s;
    s.name = "lshape-tr";
    s.fields.push_back(std::make_shared<PolarSingularField>(Point2::Zero(), 2.0 / 3.0, 2.0 / 3.0, pi / 2, pi / 4));
    s.singular_point = Point2::Zero();
    return s;
}

EnrichmentSpace lshape_singularity_bottomright()
{
    constexpr double pi = std::numbers::pi;
    EnrichmentSpace s;
    s.name = "lshape-br";
    s.fields.push_back(std::make_shared<PolarSingularField>(Point2::Zero(), 2.0 / 3.0, 2.0 / 3.0, 0.0, -pi / 4));
    s.singular_point = Point2::Zero();
    return s;
}

EnrichmentSpace singularity_by_name(const std::string& name)
{
    if (name == "fracture")
        return fracture_singularity();
    if (name == "lshape-tr")
        return lshape_singularity_topright();
    if (name == "lshape-br")
        return lshape_singularity_bottomright();
    throw ConfigError("unknown domain '" + name + "' (expected fracture, lshape-tr or lshape-br)");
}

EnrichmentPlan EnrichmentPlan::local(double gamma)
{
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw ConfigError("local enrichment radius must be a finite non-negative number");
    return {EnrichmentMode::Local, gamma};
}

EnrichmentMode parse_enrichment_mode(const std::string& s)
{
    if (s == "none")
        return EnrichmentMode::None;
    if (s == "global")
        return EnrichmentMode::Global;
    if (s == "local")
        return EnrichmentMode::Local;
    throw ConfigError("unknown enrichment mode '" + s + "' (expected none, global or local)");
}

std::string to_string(EnrichmentMode m)
{
    switch (m) {
    case EnrichmentMode::None:
        return "none";
    case EnrichmentMode::Global:
        return "global";
    case EnrichmentMode::Local:
        return "local";
    }
    return "none";
}

bool is_enriched(const std::vector<Point2>& element_polygon, const EnrichmentPlan& plan, const EnrichmentSpace& space)
{
    if (space.fields.empty())
        return false;
    switch (plan.mode) {
    case EnrichmentMode::None:
        return false;
    case EnrichmentMode::Global:
        return true;
    case EnrichmentMode::Local:
        if (!space.singular_point)
            throw ConfigError("local enrichment needs a singular point");
        if (plan.gamma <= 0.0)
            return false;
        return distance_to_polygon(*space.singular_point, element_polygon) <= plan.gamma;
    }
    return false;
}

int EnrichmentMarking::enriched_elements() const
{
    int n = 0;
    for (bool b : element)
        n += b ? 1 : 0;
    return n;
}

EnrichmentMarking mark_enrichment(const Mesh& mesh, const EnrichmentPlan& plan, const EnrichmentSpace& space)
{
    EnrichmentMarking m;
    m.element.assign(mesh.n_elements(), false);
    m.edge.assign(mesh.n_edges(), false);
    for (const auto& el : mesh.elements()) {
        if (!is_enriched(mesh.element_polygon(el.id), plan, space))
            continue;
        m.element[el.id] = true;
        for (int e : el.edge_ids)
            m.edge[e] = true;
    }
    return m;
}

} // namespace xvem
