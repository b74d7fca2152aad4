#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "xvem/geometry.hpp"

namespace xvem {

/// Scaled monomials ((x - c_x)/h)^a ((y - c_y)/h)^b with a + b <= degree,
/// ordered by total degree, then by decreasing a.
class ScaledMonomials {
public:
    ScaledMonomials() = default;
    ScaledMonomials(Point2 centre, double h, int degree) : centre_(std::move(centre)), h_(h), degree_(degree)
    {
        for (int d = 0; d <= degree; ++d)
            for (int a = d; a >= 0; --a)
                exponents_.push_back({a, d - a});
    }

    static int dimension(int degree) { return degree < 0 ? 0 : (degree + 1) * (degree + 2) / 2; }

    int size() const { return static_cast<int>(exponents_.size()); }
    int degree() const { return degree_; }
    const std::array<int, 2>& exponent(int i) const { return exponents_[i]; }
    const Point2& centre() const { return centre_; }
    double scale() const { return h_; }

    double value(int i, const Point2& x) const
    {
        const auto [a, b] = exponents_[i];
        const Vec2 s = (x - centre_) / h_;
        return ipow(s.x(), a) * ipow(s.y(), b);
    }

    Vec2 gradient(int i, const Point2& x) const
    {
        const auto [a, b] = exponents_[i];
        const Vec2 s = (x - centre_) / h_;
        const double gx = a == 0 ? 0.0 : a * ipow(s.x(), a - 1) * ipow(s.y(), b);
        const double gy = b == 0 ? 0.0 : b * ipow(s.x(), a) * ipow(s.y(), b - 1);
        return Vec2(gx, gy) / h_;
    }

    double laplacian(int i, const Point2& x) const
    {
        const auto [a, b] = exponents_[i];
        const Vec2 s = (x - centre_) / h_;
        double l = 0.0;
        if (a >= 2)
            l += a * (a - 1) * ipow(s.x(), a - 2) * ipow(s.y(), b);
        if (b >= 2)
            l += b * (b - 1) * ipow(s.x(), a) * ipow(s.y(), b - 2);
        return l / (h_ * h_);
    }

private:
    static double ipow(double x, int n)
    {
        double r = 1.0;
        for (int i = 0; i < n; ++i)
            r *= x;
        return r;
    }

    Point2 centre_ = Point2::Zero();
    double h_ = 1.0;
    int degree_ = 0;
    std::vector<std::array<int, 2>> exponents_;
};

/// Legendre polynomials P_0..P_n at s, by recurrence.
inline std::vector<double> legendre_values(int n, double s)
{
    std::vector<double> p(n + 1);
    p[0] = 1.0;
    if (n >= 1)
        p[1] = s;
    for (int j = 2; j <= n; ++j)
        p[j] = ((2.0 * j - 1.0) * s * p[j - 1] - (j - 1.0) * p[j - 2]) / j;
    return p;
}

/// Legendre polynomial normalised in L^2 of an edge of length len, where s in
/// [-1, 1] is the affine edge parameter.
inline double edge_legendre(int j, double s, double len)
{
    return std::sqrt((2.0 * j + 1.0) / len) * legendre_values(j, s)[j];
}

} // namespace xvem
