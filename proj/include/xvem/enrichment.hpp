#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "xvem/geometry.hpp"

namespace xvem {

class Mesh;

/// Scalar field with value, gradient and Laplacian. side_hint is any point in
/// the interior of the element the evaluation belongs to; fields with a
/// branch cut use it to pick the side for points lying on the cut.
class ScalarField {
public:
    virtual ~ScalarField() = default;
    virtual double value(const Point2& x, const std::optional<Point2>& side_hint = std::nullopt) const = 0;
    virtual Vec2 gradient(const Point2& x, const std::optional<Point2>& side_hint = std::nullopt) const = 0;
    virtual double laplacian(const Point2& x, const std::optional<Point2>& side_hint = std::nullopt) const = 0;
    /// True when the Laplacian vanishes identically.
    virtual bool harmonic() const { return false; }
};

/// r^alpha sin(beta (theta - theta_s)) about a centre, with theta taken in
/// [cut, cut + 2 pi). Harmonic when alpha = beta.
class PolarSingularField : public ScalarField {
public:
    PolarSingularField(Point2 centre, double alpha, double beta, double theta_s, double cut);

    double value(const Point2& x, const std::optional<Point2>& side_hint = std::nullopt) const override;
    Vec2 gradient(const Point2& x, const std::optional<Point2>& side_hint = std::nullopt) const override;
    double laplacian(const Point2& x, const std::optional<Point2>& side_hint = std::nullopt) const override;
    bool harmonic() const override { return alpha_ == beta_; }

    /// Polar angle of x in [cut, cut + 2 pi), using side_hint on the cut.
    double angle(const Point2& x, const std::optional<Point2>& side_hint) const;

private:
    Point2 centre_;
    double alpha_, beta_, theta_s_, cut_;
};

/// Field from user callables; the Laplacian defaults to zero.
class FunctionField : public ScalarField {
public:
    using ValueFn = std::function<double(const Point2&)>;
    using GradFn = std::function<Vec2(const Point2&)>;

    FunctionField(ValueFn value, GradFn gradient, ValueFn laplacian = {});

    double value(const Point2& x, const std::optional<Point2>& side_hint = std::nullopt) const override;
    Vec2 gradient(const Point2& x, const std::optional<Point2>& side_hint = std::nullopt) const override;
    double laplacian(const Point2& x, const std::optional<Point2>& side_hint = std::nullopt) const override;
    bool harmonic() const override { return !laplacian_; }

private:
    ValueFn value_;
    GradFn gradient_;
    ValueFn laplacian_;
};

/// Finite set of enrichment fields sharing one singular point.
struct EnrichmentSpace {
    std::string name;
    std::vector<std::shared_ptr<const ScalarField>> fields;
    std::optional<Point2> singular_point;

    std::size_t size() const { return fields.size(); }
};

/// r^{1/2} sin(theta/2), theta in [0, 2 pi), cut along the positive x-axis.
EnrichmentSpace fracture_singularity();
/// r^{2/3} sin(2/3 (theta - pi/2)), theta in [pi/2, 2 pi] on (-1,1)^2 \ [0,1)^2.
EnrichmentSpace lshape_singularity_topright();
/// r^{2/3} sin(2/3 theta), theta in [0, 3 pi/2] on (-1,1)^2 \ [0,1) x (-1,0].
EnrichmentSpace lshape_singularity_bottomright();

/// Looks up "fracture", "lshape-tr" or "lshape-br"; throws ConfigError otherwise.
EnrichmentSpace singularity_by_name(const std::string& name);

enum class EnrichmentMode { None, Global, Local };

struct EnrichmentPlan {
    EnrichmentMode mode = EnrichmentMode::None;
    double gamma = 0.15;

    static EnrichmentPlan none() { return {EnrichmentMode::None, 0.0}; }
    static EnrichmentPlan global() { return {EnrichmentMode::Global, 0.0}; }
    static EnrichmentPlan local(double gamma);
};

EnrichmentMode parse_enrichment_mode(const std::string& s);
std::string to_string(EnrichmentMode m);

/// none: false; global: true; local: distance from the singular point to the
/// closed element is at most gamma (gamma = 0 selects nothing).
bool is_enriched(const std::vector<Point2>& element_polygon, const EnrichmentPlan& plan, const EnrichmentSpace& space);

/// Per-element and per-edge enrichment flags. An edge is enriched when any
/// adjacent element is.
struct EnrichmentMarking {
    std::vector<bool> element;
    std::vector<bool> edge;

    int enriched_elements() const;
};

EnrichmentMarking mark_enrichment(const Mesh& mesh, const EnrichmentPlan& plan, const EnrichmentSpace& space);

} // namespace xvem
