#include "xvem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "xvem/errors.hpp"
#include "xvem/parallel.hpp"

namespace xvem {

LocalMatrices local_stiffness(const Discretization& disc, const ElementOperators& ops)
{
    const int p = ops.element;
    const Element& el = disc.mesh().element(p);
    const ElementSpace& s = disc.element_space(p);
    const int off3 = disc.layout().local_element_offset(p);
    const Eigen::MatrixXd& pi = ops.pi;

    LocalMatrices m;
    m.consistency = pi.transpose() * ops.G * pi;

    Eigen::MatrixXd moment = -ops.C * pi;
    moment.middleCols(off3, s.n_beta()).diagonal().array() += 1.0;
    m.stabilisation = moment.transpose() * moment / (ops.h * ops.h);

    for (std::size_t i = 0; i < el.edge_ids.size(); ++i) {
        const EdgeSpace& es = disc.edge_space(el.edge_ids[i]);
        const Eigen::MatrixXd r = es.values * ops.trace_maps[i] - ops.edge_phi[i] * pi;
        const Eigen::Map<const Eigen::VectorXd> w(es.rule.weights.data(),
                                                  static_cast<Eigen::Index>(es.rule.weights.size()));
        m.stabilisation += r.transpose() * w.asDiagonal() * r / ops.h;
    }
    m.consistency = 0.5 * (m.consistency + m.consistency.transpose()).eval();
    m.stabilisation = 0.5 * (m.stabilisation + m.stabilisation.transpose()).eval();
    m.stiffness = m.consistency + m.stabilisation;
    return m;
}

Eigen::VectorXd local_load(const Discretization& disc, int p, const SourceFunction& f)
{
    const ElementSpace& s = disc.element_space(p);
    const DofLayout& layout = disc.layout();
    Eigen::VectorXd F = Eigen::VectorXd::Zero(layout.local_size(p));
    if (!f)
        return F;
    const int off3 = layout.local_element_offset(p);
    for (std::size_t q = 0; q < s.rule.nodes.size(); ++q)
        F.segment(off3, s.n_beta()) += s.rule.weights[q] * f(s.rule.nodes[q]) * s.beta.row(q).transpose();
    return F;
}

GlobalSystem assemble(const Discretization& disc, const std::vector<ElementOperators>& ops, const SourceFunction& f)
{
    const int n_el = disc.mesh().n_elements();
    const DofLayout& layout = disc.layout();
    if (static_cast<int>(ops.size()) != n_el)
        throw Error("operator count does not match the mesh");
    std::vector<Eigen::MatrixXd> K(n_el);
    std::vector<Eigen::VectorXd> F(n_el);
    parallel_for(n_el, [&](int p) {
        K[p] = local_stiffness(disc, ops[p]).stiffness;
        F[p] = local_load(disc, p, f);
    });

    const int n = layout.size();
    std::vector<Eigen::Triplet<double>> triplets;
    GlobalSystem sys;
    sys.rhs = Eigen::VectorXd::Zero(n);
    for (int p = 0; p < n_el; ++p) {
        const auto& map = layout.local_to_global(p);
        const int m = static_cast<int>(map.size());
        for (int i = 0; i < m; ++i) {
            if (map[i] < 0 || map[i] >= n)
                throw Error("DOF index out of range in element " + std::to_string(p));
            sys.rhs[map[i]] += F[p][i];
            for (int j = 0; j < m; ++j)
                triplets.emplace_back(map[i], map[j], K[p](i, j));
        }
    }
    sys.matrix.resize(n, n);
    sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
    return sys;
}

std::vector<int> boundary_dofs(const Discretization& disc)
{
    const Mesh& mesh = disc.mesh();
    const DofLayout& layout = disc.layout();
    std::vector<int> dofs;
    for (const auto& v : mesh.vertices())
        if (v.on_boundary)
            dofs.push_back(layout.vertex_dof(v.id));
    for (const auto& e : mesh.edges())
        if (e.on_boundary)
            for (int i = 0; i < layout.edge_dim(e.id); ++i)
                dofs.push_back(layout.edge_offset(e.id) + i);
    std::sort(dofs.begin(), dofs.end());
    return dofs;
}

DirichletData dirichlet_data(const Discretization& disc, const ScalarField& g)
{
    const Mesh& mesh = disc.mesh();
    const DofLayout& layout = disc.layout();
    DirichletData data;
    data.dofs = boundary_dofs(disc);
    Eigen::VectorXd full = Eigen::VectorXd::Zero(layout.skeleton_size());
    for (const auto& v : mesh.vertices()) {
        if (!v.on_boundary)
            continue;
        const auto& adj = mesh.vertex_elements(v.id);
        std::optional<Point2> hint;
        if (!adj.empty())
            hint = mesh.element(adj.front()).interior_point;
        const double val = g.value(v.position, hint);
        if (!std::isfinite(val))
            throw Error("boundary data is not finite at vertex " + std::to_string(v.id));
        full[layout.vertex_dof(v.id)] = val;
    }
    for (const auto& e : mesh.edges()) {
        if (!e.on_boundary)
            continue;
        const EdgeSpace& es = disc.edge_space(e.id);
        for (std::size_t q = 0; q < es.rule.nodes.size(); ++q) {
            const double wg = es.rule.weights[q] * g.value(es.rule.nodes[q], es.side_hint);
            for (int i = 0; i < es.dim_moments(); ++i)
                full[layout.edge_offset(e.id) + i] += wg * es.values(q, es.moment_column(i));
        }
    }
    data.values.resize(static_cast<Eigen::Index>(data.dofs.size()));
    for (std::size_t i = 0; i < data.dofs.size(); ++i)
        data.values[i] = full[data.dofs[i]];
    return data;
}

Eigen::VectorXd ReducedSystem::expand(const Eigen::VectorXd& reduced) const
{
    Eigen::VectorXd x = Eigen::VectorXd::Zero(full_size);
    for (std::size_t i = 0; i < free_dofs.size(); ++i)
        x[free_dofs[i]] = reduced[i];
    for (std::size_t i = 0; i < fixed.dofs.size(); ++i)
        x[fixed.dofs[i]] = fixed.values[i];
    return x;
}

ReducedSystem apply_dirichlet(const GlobalSystem& system, const DirichletData& data)
{
    const int n = static_cast<int>(system.matrix.rows());
    ReducedSystem r;
    r.full_size = n;
    r.fixed = data;
    std::vector<int> to_reduced(n, -1);
    Eigen::VectorXd fixed_value = Eigen::VectorXd::Zero(n);
    std::vector<char> is_fixed(n, 0);
    for (std::size_t i = 0; i < data.dofs.size(); ++i) {
        if (data.dofs[i] < 0 || data.dofs[i] >= n)
            throw Error("fixed DOF index out of range");
        is_fixed[data.dofs[i]] = 1;
        fixed_value[data.dofs[i]] = data.values[i];
    }
    for (int i = 0; i < n; ++i)
        if (!is_fixed[i]) {
            to_reduced[i] = static_cast<int>(r.free_dofs.size());
            r.free_dofs.push_back(i);
        }
    const int nf = static_cast<int>(r.free_dofs.size());
    r.rhs.resize(nf);
    for (int i = 0; i < nf; ++i)
        r.rhs[i] = system.rhs[r.free_dofs[i]];
    std::vector<Eigen::Triplet<double>> triplets;
    for (int c = 0; c < system.matrix.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(system.matrix, c); it; ++it) {
            const int row = static_cast<int>(it.row());
            const int col = static_cast<int>(it.col());
            if (is_fixed[row])
                continue;
            if (is_fixed[col])
                r.rhs[to_reduced[row]] -= it.value() * fixed_value[col];
            else
                triplets.emplace_back(to_reduced[row], to_reduced[col], it.value());
        }
    r.matrix.resize(nf, nf);
    r.matrix.setFromTriplets(triplets.begin(), triplets.end());
    return r;
}

Eigen::VectorXd CondensedSystem::recover(const Eigen::VectorXd& skeleton_values) const
{
    Eigen::VectorXd x(skeleton_size + element_rhs.size());
    x.head(skeleton_size) = skeleton_values;
    x.tail(element_rhs.size()) = element_rhs - recovery * skeleton_values;
    return x;
}

CondensedSystem static_condense(const GlobalSystem& system, const DofLayout& layout)
{
    const int n = layout.size();
    const int ns = layout.skeleton_size();
    const int ni = n - ns;
    if (system.matrix.rows() != n)
        throw Error("system size does not match the layout");
    const SparseMatrix a_ss = system.matrix.topLeftCorner(ns, ns);
    const SparseMatrix a_si = system.matrix.topRightCorner(ns, ni);
    const SparseMatrix a_is = system.matrix.bottomLeftCorner(ni, ns);
    const SparseMatrix a_ii = system.matrix.bottomRightCorner(ni, ni);

    std::vector<Eigen::Triplet<double>> inv;
    const int n_el = layout.n_elements();
    for (int p = 0; p < n_el; ++p) {
        const int off = layout.element_offset(p) - ns;
        const int m = layout.element_dim(p);
        if (m == 0)
            continue;
        const Eigen::MatrixXd block = Eigen::MatrixXd(a_ii.block(off, off, m, m));
        const Eigen::LLT<Eigen::MatrixXd> llt(block);
        if (llt.info() != Eigen::Success)
            throw SolverError("element block " + std::to_string(p) + " is not positive definite",
                              std::numeric_limits<double>::quiet_NaN());
        const Eigen::MatrixXd binv = llt.solve(Eigen::MatrixXd::Identity(m, m));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                inv.emplace_back(off + i, off + j, binv(i, j));
    }
    SparseMatrix a_ii_inv(ni, ni);
    a_ii_inv.setFromTriplets(inv.begin(), inv.end());

    CondensedSystem c;
    c.skeleton_size = ns;
    c.recovery = a_ii_inv * a_is;
    c.element_rhs = a_ii_inv * system.rhs.tail(ni);
    c.skeleton.matrix = a_ss - a_si * c.recovery;
    c.skeleton.matrix = 0.5 * (c.skeleton.matrix + SparseMatrix(c.skeleton.matrix.transpose()));
    c.skeleton.rhs = system.rhs.head(ns) - a_si * c.element_rhs;
    return c;
}

SolverKind parse_solver_kind(const std::string& s)
{
    if (s == "direct")
        return SolverKind::Direct;
    if (s == "krylov")
        return SolverKind::Krylov;
    throw ConfigError("unknown solver '" + s + "' (expected direct or krylov)");
}

std::string to_string(SolverKind kind)
{
    return kind == SolverKind::Direct ? "direct" : "krylov";
}

namespace {

double relative_residual(const SparseMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b)
{
    const double nb = b.norm();
    const double nr = (b - a * x).norm();
    return nb > 0.0 ? nr / nb : nr;
}

} // namespace

SolveResult solve_spd(const SparseMatrix& a, const Eigen::VectorXd& b, const SolveOptions& options)
{
    SolveResult res;
    const Eigen::Index n = a.rows();
    if (n == 0) {
        res.x.resize(0);
        return res;
    }
    if (b.norm() == 0.0) {
        res.x = Eigen::VectorXd::Zero(n);
        return res;
    }
    if (options.kind == SolverKind::Direct) {
        Eigen::SimplicialLDLT<SparseMatrix> ldlt(a);
        if (ldlt.info() != Eigen::Success)
            throw SolverError("sparse factorisation failed", std::numeric_limits<double>::infinity());
        res.x = ldlt.solve(b);
        res.residual = relative_residual(a, res.x, b);
        for (int step = 0; step < 3 && res.residual > options.tol; ++step) {
            const Eigen::VectorXd x = res.x + ldlt.solve(b - a * res.x);
            const double r = relative_residual(a, x, b);
            if (!(r < res.residual))
                break;
            res.x = x;
            res.residual = r;
            res.iterations = step + 1;
        }
    } else {
        Eigen::BiCGSTAB<SparseMatrix, Eigen::DiagonalPreconditioner<double>> solver(a);
        solver.setTolerance(options.tol);
        solver.setMaxIterations(options.max_iterations > 0 ? options.max_iterations : static_cast<int>(10 * n));
        res.x = solver.solve(b);
        res.iterations = static_cast<int>(solver.iterations());
        res.residual = relative_residual(a, res.x, b);
    }
    if (!(res.residual <= options.tol))
        throw SolverError("linear solve did not reach the tolerance (relative residual "
                              + std::to_string(res.residual) + ")",
                          res.residual);
    return res;
}

namespace {

// Largest Ritz value of `steps` Lanczos iterations for the operator apply.
template <class Apply>
double lanczos_max(Eigen::Index n, int steps, std::uint64_t seed, Apply&& apply)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::VectorXd q(n);
    for (Eigen::Index i = 0; i < n; ++i)
        q[i] = normal(rng);
    q.normalize();
    Eigen::VectorXd q_prev = Eigen::VectorXd::Zero(n);
    std::vector<double> alpha, beta;
    double b_prev = 0.0;
    const int m = static_cast<int>(std::min<Eigen::Index>(steps, n));
    for (int j = 0; j < m; ++j) {
        Eigen::VectorXd w = apply(q);
        const double a = q.dot(w);
        alpha.push_back(a);
        w -= a * q + b_prev * q_prev;
        const double b = w.norm();
        if (j + 1 == m || !(b > 1e-14 * std::abs(a)))
            break;
        beta.push_back(b);
        q_prev = q;
        q = w / b;
        b_prev = b;
    }
    const int k = static_cast<int>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
        t(i, i) = alpha[i];
        if (i + 1 < k) {
            t(i, i + 1) = beta[i];
            t(i + 1, i) = beta[i];
        }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().maxCoeff();
}

} // namespace

double estimate_condition(const SparseMatrix& a, int steps, std::uint64_t seed)
{
    const Eigen::Index n = a.rows();
    if (n == 0)
        return std::numeric_limits<double>::quiet_NaN();
    const double lmax = lanczos_max(n, steps, seed, [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(a * v); });
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(a);
    if (ldlt.info() != Eigen::Success)
        return std::numeric_limits<double>::infinity();
    const double inv_max
        = lanczos_max(n, steps, seed + 1, [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(ldlt.solve(v)); });
    if (!(inv_max > 0.0))
        return std::numeric_limits<double>::infinity();
    return lmax * inv_max;
}

CondensedProblem condensed_problem(const Discretization& disc, const std::vector<ElementOperators>& ops,
                                   const SourceFunction& f, const ScalarField& g)
{
    CondensedProblem prob;
    prob.condensed = static_condense(assemble(disc, ops, f), disc.layout());
    prob.reduced = apply_dirichlet(prob.condensed.skeleton, dirichlet_data(disc, g));
    return prob;
}

DiscreteSolution solve_condensed(const CondensedProblem& problem, const SolveOptions& options)
{
    const SolveResult r = solve_spd(problem.reduced.matrix, problem.reduced.rhs, options);
    DiscreteSolution sol;
    sol.dofs = problem.condensed.recover(problem.reduced.expand(r.x));
    sol.free_dofs = static_cast<int>(problem.reduced.free_dofs.size());
    sol.residual = r.residual;
    sol.iterations = r.iterations;
    return sol;
}

DiscreteSolution solve_problem(const Discretization& disc, const std::vector<ElementOperators>& ops,
                               const SourceFunction& f, const ScalarField& g, const SolveOptions& options)
{
    return solve_condensed(condensed_problem(disc, ops, f, g), options);
}

} // namespace xvem
