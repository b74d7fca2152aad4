#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "xvem/local_spaces.hpp"

namespace xvem {

/// Boundary trace of a local virtual function: for each edge of the element
/// (in element order), coefficients over the full edge basis [L_0..L_k, complement].
struct TraceFunction {
    int element = -1;
    std::vector<Eigen::VectorXd> edges;
};

/// Coefficients over the extended basis of one element.
struct Projection {
    int element = -1;
    Eigen::VectorXd coefficients;
};

/// Everything needed to apply the projector and the stabilisation on one
/// element, as matrices acting on local DOF vectors.
struct ElementOperators {
    int element = -1;
    int n_local = 0;
    double h = 0.0;
    /// Per local edge: local DOFs -> coefficients of the trace (dim_full x n_local).
    std::vector<Eigen::MatrixXd> trace_maps;
    /// Per local edge: extended basis at the edge rule nodes (nodes x n_phi).
    std::vector<Eigen::MatrixXd> edge_phi;
    Eigen::MatrixXd G;       // int grad phi_i . grad phi_j
    Eigen::MatrixXd C;       // int beta_j phi_m  (n_beta x n_phi)
    Eigen::MatrixXd B;       // right-hand side of the projector system, constraint row included
    Eigen::MatrixXd pi;      // local DOFs -> projection coefficients (n_phi x n_local)
    double condition = 0.0;  // 2-norm condition number of the scaled projector system
};

/// Local DOFs -> trace coefficients on local edge i. Vertex values are
/// matched exactly and the moments of the edge moment basis are reproduced.
Eigen::MatrixXd trace_map(const Discretization& disc, int p, int local_edge);

TraceFunction reconstruct_trace(const Discretization& disc, int p, const Eigen::VectorXd& local_dofs);

/// Throws Error when the projector system is numerically singular.
ElementOperators build_element_operators(const Discretization& disc, int p);

/// Operators for every element, built once.
std::vector<ElementOperators> build_all_operators(const Discretization& disc);

Projection elliptic_projector(const ElementOperators& ops, const Eigen::VectorXd& local_dofs);
Projection elliptic_projector(const Discretization& disc, int p, const Eigen::VectorXd& local_dofs);

Eigen::VectorXd project_evaluate(const Discretization& disc, const Projection& proj, std::span<const Point2> points);
/// Gradients, one column per point.
Eigen::Matrix2Xd project_gradients(const Discretization& disc, const Projection& proj,
                                   std::span<const Point2> points);

} // namespace xvem
