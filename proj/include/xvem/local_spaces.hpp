#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "xvem/enrichment.hpp"
#include "xvem/mesh.hpp"
#include "xvem/polynomials.hpp"
#include "xvem/quadrature.hpp"

namespace xvem {

struct DiscretizationOptions {
    int k = 1;
    double tau_rank = 1e-8;   // relative residual below which an enrichment contribution is dropped
    int grading_levels = 14;  // geometric layers toward the singular point
};

/// Basis of the trace space on one edge: the Legendre polynomials
/// L_0..L_k (orthonormal on the edge) followed by the complement members,
/// orthonormal and orthogonal to P_k. The moment space is
/// L_0..L_{k-2} plus the complement.
struct EdgeSpace {
    int edge = -1;
    int k = 1;
    Point2 a = Point2::Zero(); // edge vertex 0, parameter s = -1
    Point2 b = Point2::Zero(); // edge vertex 1, parameter s = +1
    double length = 0.0;
    bool enriched = false;
    std::optional<Point2> side_hint;
    EdgeRule rule;

    /// complement_coef(q, j): member q over [L_0..L_k, psi_1..psi_F].
    Eigen::MatrixXd complement_coef;
    /// Values of the full basis [L_0..L_k, complement] at the rule nodes.
    Eigen::MatrixXd values;
    /// Complement members at a (column 0) and b (column 1).
    Eigen::MatrixXd complement_ends;

    int dim_complement() const { return static_cast<int>(complement_coef.rows()); }
    int dim_full() const { return k + 1 + dim_complement(); }
    int n_moment_legendre() const { return k >= 2 ? k - 1 : 0; }
    int dim_moments() const { return n_moment_legendre() + dim_complement(); }
    /// Column of the full basis holding moment basis member i.
    int moment_column(int i) const { return i < n_moment_legendre() ? i : k + 1 + (i - n_moment_legendre()); }

    double param(const Point2& x) const { return 2.0 * (x - a).dot(b - a) / (length * length) - 1.0; }
};

/// Local spaces of one element: the extended basis (scaled monomials of
/// degree <= k plus the retained enrichment fields) and the orthonormal
/// moment basis of P_l + Laplacians of the fields, l = max(0, k - 2).
struct ElementSpace {
    int element = -1;
    int k = 1;
    int l = 0;
    bool enriched = false;
    Point2 centroid = Point2::Zero();
    double h = 0.0;
    double area = 0.0;
    Point2 hint = Point2::Zero();
    PolygonRule rule;

    ScaledMonomials monomials;     // degree k
    std::vector<int> fields;       // enrichment fields kept in the extended basis
    std::vector<int> moment_fields; // fields whose Laplacian enters the moment space

    // extended basis at the rule nodes (rows: nodes)
    Eigen::MatrixXd phi, phi_dx, phi_dy, phi_lap;
    // moment basis at the rule nodes and its coefficients over
    // [monomials of degree <= l, laplacians of moment_fields]
    Eigen::MatrixXd beta;
    Eigen::MatrixXd beta_coef;

    int n_phi() const { return static_cast<int>(phi.cols()); }
    int n_beta() const { return static_cast<int>(beta.cols()); }
};

/// Global numbering: all vertex values, then edge moment blocks, then
/// element moment blocks. Skeleton (vertex and edge) unknowns come first.
class DofLayout {
public:
    DofLayout() = default;
    DofLayout(const Mesh& mesh, const std::vector<int>& edge_dims, const std::vector<int>& element_dims);

    int size() const { return size_; }
    int skeleton_size() const { return skeleton_size_; }
    int n_elements() const { return static_cast<int>(local_to_global_.size()); }
    int vertex_dof(int v) const { return v; }
    int edge_offset(int e) const { return edge_offset_[e]; }
    int edge_dim(int e) const { return edge_offset_[e + 1] - edge_offset_[e]; }
    int element_offset(int p) const { return element_offset_[p]; }
    int element_dim(int p) const { return element_offset_[p + 1] - element_offset_[p]; }

    /// Local order: [vertex values][edge blocks in element edge order][element block].
    const std::vector<int>& local_to_global(int p) const { return local_to_global_[p]; }
    int local_size(int p) const { return static_cast<int>(local_to_global_[p].size()); }
    /// Offset of the block of local edge i within the local vector.
    int local_edge_offset(int p, int i) const { return local_edge_offset_[p][i]; }
    int local_element_offset(int p) const { return local_edge_offset_[p].back(); }

private:
    int size_ = 0;
    int skeleton_size_ = 0;
    std::vector<int> edge_offset_;
    std::vector<int> element_offset_;
    std::vector<std::vector<int>> local_to_global_;
    std::vector<std::vector<int>> local_edge_offset_; // per element: n_edges + 1 entries
};

/// Mesh, enrichment and all local spaces for one polynomial degree.
class Discretization {
public:
    Discretization(Mesh mesh, EnrichmentSpace space, EnrichmentPlan plan, DiscretizationOptions options = {});

    const Mesh& mesh() const { return mesh_; }
    const EnrichmentSpace& space() const { return space_; }
    const EnrichmentPlan& plan() const { return plan_; }
    const DiscretizationOptions& options() const { return options_; }
    const EnrichmentMarking& marking() const { return marking_; }
    const DofLayout& layout() const { return layout_; }
    const EdgeSpace& edge_space(int e) const { return edges_[e]; }
    const ElementSpace& element_space(int p) const { return elements_[p]; }
    int k() const { return options_.k; }
    std::optional<Grading> grading() const;

    /// Values and gradients of the extended basis of element p at x.
    Eigen::VectorXd phi_values(int p, const Point2& x) const;
    Eigen::Matrix2Xd phi_gradients(int p, const Point2& x) const;
    /// Moment basis of element p at x.
    Eigen::VectorXd beta_values(int p, const Point2& x) const;
    /// Full trace basis of edge e at a point x on the edge.
    Eigen::VectorXd edge_basis_values(int e, const Point2& x) const;

private:
    EdgeSpace build_edge_space(int e) const;
    ElementSpace build_element_space(int p) const;

    Mesh mesh_;
    EnrichmentSpace space_;
    EnrichmentPlan plan_;
    DiscretizationOptions options_;
    EnrichmentMarking marking_;
    std::vector<EdgeSpace> edges_;
    std::vector<ElementSpace> elements_;
    DofLayout layout_;
};

/// Interpolation: vertex values, edge moments against the edge moment basis
/// and element moments against the element moment basis, by quadrature.
/// Throws Error when u is not finite at a vertex.
Eigen::VectorXd evaluate_dofs(const Discretization& disc, const ScalarField& u);

/// The same restricted to one element, in local order.
Eigen::VectorXd evaluate_local_dofs(const Discretization& disc, int p, const ScalarField& u);

/// Local part of a global vector.
Eigen::VectorXd gather(const Discretization& disc, int p, const Eigen::VectorXd& global);

} // namespace xvem
