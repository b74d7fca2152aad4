#include "xvem/postprocess.hpp"

#include <cmath>
#include <limits>

#include "xvem/errors.hpp"

namespace xvem {

ErrorNorms compute_errors(const Discretization& disc, const std::vector<ElementOperators>& ops,
                          const Eigen::VectorXd& uh, const ScalarField& u)
{
    const Eigen::VectorXd iu = evaluate_dofs(disc, u);
    const Eigen::VectorXd diff = uh - iu;
    double l2 = 0.0, h1 = 0.0, l2d = 0.0, h1d = 0.0;
    for (int p = 0; p < disc.mesh().n_elements(); ++p) {
        const ElementSpace& s = disc.element_space(p);
        const Eigen::Map<const Eigen::VectorXd> w(s.rule.weights.data(),
                                                  static_cast<Eigen::Index>(s.rule.weights.size()));
        const Eigen::VectorXd ce = ops[p].pi * gather(disc, p, diff);
        const Eigen::VectorXd cu = ops[p].pi * gather(disc, p, iu);
        l2 += w.dot((s.phi * ce).cwiseAbs2());
        l2d += w.dot((s.phi * cu).cwiseAbs2());
        h1 += ce.dot(ops[p].G * ce);
        h1d += cu.dot(ops[p].G * cu);
    }
    ErrorNorms e;
    e.l2_denominator = std::sqrt(l2d);
    e.h1_denominator = std::sqrt(h1d);
    e.l2 = l2d > 0.0 ? std::sqrt(l2 / l2d) : std::sqrt(l2);
    e.h1 = h1d > 0.0 ? std::sqrt(std::max(h1, 0.0) / h1d) : std::sqrt(std::max(h1, 0.0));
    e.energy = discrete_seminorm(disc, ops, diff);
    return e;
}

double discrete_seminorm(const Discretization& disc, const std::vector<ElementOperators>& ops,
                         const Eigen::VectorXd& v)
{
    const Mesh& mesh = disc.mesh();
    double total = 0.0;
    for (int p = 0; p < mesh.n_elements(); ++p) {
        const ElementSpace& s = disc.element_space(p);
        const Element& el = mesh.element(p);
        const Eigen::VectorXd local = gather(disc, p, v);
        const Projection proj = elliptic_projector(ops[p], local);
        const double h = s.h;

        const Eigen::VectorXd pv = project_evaluate(disc, proj, s.rule.nodes);
        const Eigen::Matrix2Xd gpv = project_gradients(disc, proj, s.rule.nodes);
        double grad = 0.0;
        Eigen::VectorXd moments = local.segment(disc.layout().local_element_offset(p), s.n_beta());
        for (std::size_t q = 0; q < s.rule.nodes.size(); ++q) {
            grad += s.rule.weights[q] * gpv.col(q).squaredNorm();
            moments -= s.rule.weights[q] * pv[q] * disc.beta_values(p, s.rule.nodes[q]);
        }

        const TraceFunction trace = reconstruct_trace(disc, p, local);
        double boundary = 0.0;
        for (std::size_t i = 0; i < el.edge_ids.size(); ++i) {
            const EdgeSpace& es = disc.edge_space(el.edge_ids[i]);
            const Eigen::VectorXd pe = project_evaluate(disc, proj, es.rule.nodes);
            for (std::size_t q = 0; q < es.rule.nodes.size(); ++q) {
                const double t = es.values.row(q).dot(trace.edges[i]);
                boundary += es.rule.weights[q] * (t - pe[q]) * (t - pe[q]);
            }
        }
        total += grad + moments.squaredNorm() / (h * h) + boundary / h;
    }
    return std::sqrt(total);
}

namespace {

double slope(const std::vector<double>& x, const std::vector<double>& y, std::size_t first)
{
    const std::size_t n = x.size() - first;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = first; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = first; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

} // namespace

RateFit fit_rates(const std::vector<double>& h, const std::vector<double>& dofs, const std::vector<double>& errors)
{
    const std::size_t n = h.size();
    if (n < 2)
        throw Error("rate fitting needs at least two meshes");
    if (dofs.size() != n || errors.size() != n)
        throw Error("rate fitting inputs differ in length");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(h[i] > 0.0) || !(dofs[i] > 0.0) || !(errors[i] > 0.0))
            throw Error("rate fitting needs positive mesh sizes, DOF counts and errors");
        if (i > 0 && !(h[i] < h[i - 1]))
            throw Error("mesh sizes must be strictly decreasing");
    }
    RateFit fit;
    for (std::size_t i = 1; i < n; ++i) {
        const double de = std::log(errors[i] / errors[i - 1]);
        fit.pairwise_h.push_back(de / std::log(h[i] / h[i - 1]));
        fit.pairwise_dofs.push_back(dofs[i] != dofs[i - 1] ? de / std::log(dofs[i] / dofs[i - 1])
                                                           : std::numeric_limits<double>::quiet_NaN());
    }
    const std::size_t first = n > 3 ? n - 3 : 0;
    fit.asymptotic_h = slope(h, errors, first);
    fit.asymptotic_dofs = slope(dofs, errors, first);
    return fit;
}

RateFit fit_rates(const std::vector<ErrorReport>& reports, ErrorKind kind)
{
    std::vector<double> h, dofs, err;
    for (const auto& r : reports) {
        if (!r.solved)
            continue;
        h.push_back(r.mesh_size);
        dofs.push_back(r.dofs);
        err.push_back(kind == ErrorKind::L2 ? r.l2 : kind == ErrorKind::H1 ? r.h1 : r.energy);
    }
    return fit_rates(h, dofs, err);
}

} // namespace xvem
