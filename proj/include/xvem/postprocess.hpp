#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "xvem/local_spaces.hpp"
#include "xvem/projector.hpp"

namespace xvem {

/// Relative errors measured through the elliptic projection:
///   l2 = ||Pi(u_h - I u)|| / ||Pi I u||,  h1 the same with gradients,
/// summed over elements; energy = |||u_h - I u||| (absolute).
struct ErrorNorms {
    double l2 = 0.0;
    double h1 = 0.0;
    double energy = 0.0;
    double l2_denominator = 0.0;
    double h1_denominator = 0.0;
};

ErrorNorms compute_errors(const Discretization& disc, const std::vector<ElementOperators>& ops,
                          const Eigen::VectorXd& uh, const ScalarField& u);

/// |||v|||^2 = sum over elements of |grad Pi v|^2 + h^-2 |moment projection of (v - Pi v)|^2
///           + h^-1 |trace of v - Pi v|^2 on the element boundary,
/// evaluated pointwise from the projection and the reconstructed traces.
double discrete_seminorm(const Discretization& disc, const std::vector<ElementOperators>& ops,
                         const Eigen::VectorXd& v);

/// One row of a convergence study.
struct ErrorReport {
    double mesh_size = 0.0;
    int cells = 0;
    int edges = 0;
    int vertices = 0;
    int dofs = 0;                 // unknowns after condensation and elimination
    double l2 = 0.0;
    double h1 = 0.0;
    double condition = 0.0;
    double energy = 0.0;
    double projector_condition = 0.0; // largest element projector condition number
    bool solved = true;
    std::string status = "ok";
};

struct RateFit {
    std::vector<double> pairwise_h;     // slope of log error against log h
    std::vector<double> pairwise_dofs;  // slope of log error against log DOFs
    double asymptotic_h = 0.0;          // least squares over the last three points
    double asymptotic_dofs = 0.0;
};

/// Throws Error with fewer than two points, non-positive data, or h not
/// strictly decreasing.
RateFit fit_rates(const std::vector<double>& h, const std::vector<double>& dofs, const std::vector<double>& errors);

enum class ErrorKind { L2, H1, Energy };

/// Fit over the solved rows only.
RateFit fit_rates(const std::vector<ErrorReport>& reports, ErrorKind kind);

} // namespace xvem
