#include "xvem/projector.hpp"

#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "xvem/errors.hpp"
#include "xvem/parallel.hpp"

namespace xvem {

namespace {

constexpr double max_condition = 1e15;

} // namespace

Eigen::MatrixXd trace_map(const Discretization& disc, int p, int i)
{
    const Mesh& mesh = disc.mesh();
    const DofLayout& layout = disc.layout();
    const Element& el = mesh.element(p);
    const int nv = static_cast<int>(el.vertex_ids.size());
    const EdgeSpace& es = disc.edge_space(el.edge_ids[i]);
    const int k = es.k;
    const int nloc = layout.local_size(p);
    const int off = layout.local_edge_offset(p, i);
    const int nml = es.n_moment_legendre();
    const int nz = es.dim_complement();

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(es.dim_full(), nloc);
    for (int j = 0; j < nml; ++j)
        T(j, off + j) = 1.0;
    for (int q = 0; q < nz; ++q)
        T(k + 1 + q, off + nml + q) = 1.0;

    // endpoint values fix the two highest Legendre coefficients
    const bool aligned = mesh.edge_aligned(p, i);
    const int va = aligned ? i : (i + 1) % nv;
    const int vb = aligned ? (i + 1) % nv : i;
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(2, nloc);
    rhs(0, va) = 1.0;
    rhs(1, vb) = 1.0;
    for (int end = 0; end < 2; ++end) {
        const double s = end == 0 ? -1.0 : 1.0;
        for (int j = 0; j < nml; ++j)
            rhs(end, off + j) -= edge_legendre(j, s, es.length);
        for (int q = 0; q < nz; ++q)
            rhs(end, off + nml + q) -= es.complement_ends(q, end);
    }
    Eigen::Matrix2d M;
    M << edge_legendre(k - 1, -1.0, es.length), edge_legendre(k, -1.0, es.length),
        edge_legendre(k - 1, 1.0, es.length), edge_legendre(k, 1.0, es.length);
    const double det = M.determinant();
    if (!(std::abs(det) > 0.0))
        throw Error("singular endpoint system on edge " + std::to_string(es.edge));
    T.middleRows(k - 1, 2) = M.inverse() * rhs;
    return T;
}

TraceFunction reconstruct_trace(const Discretization& disc, int p, const Eigen::VectorXd& local_dofs)
{
    const Element& el = disc.mesh().element(p);
    if (local_dofs.size() != disc.layout().local_size(p))
        throw Error("local DOF vector has the wrong size for element " + std::to_string(p));
    TraceFunction t;
    t.element = p;
    for (std::size_t i = 0; i < el.edge_ids.size(); ++i)
        t.edges.push_back(trace_map(disc, p, static_cast<int>(i)) * local_dofs);
    return t;
}

ElementOperators build_element_operators(const Discretization& disc, int p)
{
    const Mesh& mesh = disc.mesh();
    const DofLayout& layout = disc.layout();
    const Element& el = mesh.element(p);
    const ElementSpace& s = disc.element_space(p);
    const int nphi = s.n_phi();
    const int nbeta = s.n_beta();
    const int nloc = layout.local_size(p);
    const int off3 = layout.local_element_offset(p);

    ElementOperators ops;
    ops.element = p;
    ops.n_local = nloc;
    ops.h = s.h;

    const Eigen::Map<const Eigen::VectorXd> w(s.rule.weights.data(), static_cast<Eigen::Index>(s.rule.weights.size()));
    ops.G = s.phi_dx.transpose() * w.asDiagonal() * s.phi_dx + s.phi_dy.transpose() * w.asDiagonal() * s.phi_dy;
    ops.C = s.beta.transpose() * w.asDiagonal() * s.phi;

    // volume term: - int (moment projection of v) lap phi_i
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(nphi, nloc);
    const Eigen::MatrixXd V = s.phi_lap.transpose() * w.asDiagonal() * s.beta; // n_phi x n_beta
    B.middleCols(off3, nbeta) -= V;

    // boundary term: int_E (grad phi_i . n) trace
    for (std::size_t i = 0; i < el.edge_ids.size(); ++i) {
        const EdgeSpace& es = disc.edge_space(el.edge_ids[i]);
        const Vec2 n = mesh.element_edge_normal(p, static_cast<int>(i));
        const int nq = static_cast<int>(es.rule.nodes.size());
        Eigen::MatrixXd phi_e(nq, nphi);
        Eigen::MatrixXd dn(nq, nphi);
        for (int q = 0; q < nq; ++q) {
            phi_e.row(q) = disc.phi_values(p, es.rule.nodes[q]).transpose();
            dn.row(q) = (n.transpose() * disc.phi_gradients(p, es.rule.nodes[q]));
        }
        const Eigen::Map<const Eigen::VectorXd> we(es.rule.weights.data(), nq);
        const Eigen::MatrixXd N = dn.transpose() * we.asDiagonal() * es.values; // n_phi x dim_full
        Eigen::MatrixXd T = trace_map(disc, p, static_cast<int>(i));
        B += N * T;
        ops.trace_maps.push_back(std::move(T));
        ops.edge_phi.push_back(std::move(phi_e));
    }

    // constant mode: int Pi v = int (moment projection of v)
    Eigen::MatrixXd A = ops.G;
    A.row(0) = (w.transpose() * s.phi);
    B.row(0).setZero();
    B.block(0, off3, 1, nbeta) = w.transpose() * s.beta;

    Eigen::VectorXd d(nphi);
    d[0] = 1.0 / std::sqrt(s.area);
    for (int j = 1; j < nphi; ++j)
        d[j] = ops.G(j, j) > 0.0 ? 1.0 / std::sqrt(ops.G(j, j)) : 1.0;
    const Eigen::MatrixXd As = d.asDiagonal() * A * d.asDiagonal();
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(As);
    const auto& sv = svd.singularValues();
    ops.condition = sv[0] / sv[sv.size() - 1];
    if (!(ops.condition < max_condition))
        throw Error("projector system of element " + std::to_string(p) + " is singular (condition "
                    + std::to_string(ops.condition) + ")");
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(As);
    ops.pi = d.asDiagonal() * qr.solve(d.asDiagonal() * B);
    ops.B = std::move(B);
    return ops;
}

std::vector<ElementOperators> build_all_operators(const Discretization& disc)
{
    std::vector<ElementOperators> ops(disc.mesh().n_elements());
    parallel_for(disc.mesh().n_elements(), [&](int p) { ops[p] = build_element_operators(disc, p); });
    return ops;
}

Projection elliptic_projector(const ElementOperators& ops, const Eigen::VectorXd& local_dofs)
{
    if (local_dofs.size() != ops.n_local)
        throw Error("local DOF vector has the wrong size for element " + std::to_string(ops.element));
    return {ops.element, ops.pi * local_dofs};
}

Projection elliptic_projector(const Discretization& disc, int p, const Eigen::VectorXd& local_dofs)
{
    return elliptic_projector(build_element_operators(disc, p), local_dofs);
}

Eigen::VectorXd project_evaluate(const Discretization& disc, const Projection& proj, std::span<const Point2> points)
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i)
        v[i] = disc.phi_values(proj.element, points[i]).dot(proj.coefficients);
    return v;
}

Eigen::Matrix2Xd project_gradients(const Discretization& disc, const Projection& proj,
                                   std::span<const Point2> points)
{
    Eigen::Matrix2Xd g(2, static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i)
        g.col(i) = disc.phi_gradients(proj.element, points[i]) * proj.coefficients;
    return g;
}

} // namespace xvem
