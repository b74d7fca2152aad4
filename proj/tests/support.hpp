#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "xvem/enrichment.hpp"
#include "xvem/local_spaces.hpp"
#include "xvem/mesh.hpp"

namespace xvem::testing {

// Uniform n x n Cartesian mesh of [x0, x0 + size]^2.
inline Mesh square_mesh(int n, double x0 = -1.0, double size = 2.0)
{
    std::vector<Point2> pts;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            pts.emplace_back(x0 + size * i / n, x0 + size * j / n);
    std::vector<std::vector<int>> cells;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const int a = j * (n + 1) + i;
            cells.push_back({a, a + 1, a + n + 2, a + n + 1});
        }
    return Mesh::from_polygons(std::move(pts), std::move(cells));
}

inline Mesh single_polygon(std::vector<Point2> poly)
{
    std::vector<int> cell(poly.size());
    for (std::size_t i = 0; i < poly.size(); ++i)
        cell[i] = static_cast<int>(i);
    return Mesh::from_polygons(std::move(poly), {cell});
}

inline EnrichmentSpace single_field_space(std::shared_ptr<const ScalarField> f, std::optional<Point2> singular = {})
{
    EnrichmentSpace s;
    s.name = "custom";
    s.fields.push_back(std::move(f));
    s.singular_point = singular;
    return s;
}

// Member of the extended space of one element, sum of a_i phi_i. Always
// evaluated on the element's side of a slit.
class ExtendedMember : public ScalarField {
public:
    ExtendedMember(const Discretization& disc, int p, Eigen::VectorXd a) : disc_(disc), p_(p), a_(std::move(a)) {}
    double value(const Point2& x, const std::optional<Point2>& = std::nullopt) const override
    {
        return disc_.phi_values(p_, x).dot(a_);
    }
    Vec2 gradient(const Point2& x, const std::optional<Point2>& = std::nullopt) const override
    {
        return disc_.phi_gradients(p_, x) * a_;
    }
    double laplacian(const Point2&, const std::optional<Point2>& = std::nullopt) const override { return 0.0; }

private:
    const Discretization& disc_;
    int p_;
    Eigen::VectorXd a_;
};

// Relative L2 distance between two coefficient vectors over the extended basis.
inline double relative_l2(const ElementSpace& s, const Eigen::VectorXd& a, const Eigen::VectorXd& b)
{
    const Eigen::VectorXd va = s.phi * a;
    const Eigen::VectorXd vb = s.phi * b;
    double num = 0.0, den = 0.0;
    for (Eigen::Index q = 0; q < va.size(); ++q) {
        num += s.rule.weights[q] * (va[q] - vb[q]) * (va[q] - vb[q]);
        den += s.rule.weights[q] * va[q] * va[q];
    }
    return std::sqrt(num / den);
}

} // namespace xvem::testing
