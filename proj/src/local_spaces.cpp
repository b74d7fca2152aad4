#include "xvem/local_spaces.hpp"

#include <cmath>
#include <string>

#include "xvem/errors.hpp"
#include "xvem/parallel.hpp"

namespace xvem {

namespace {

// Orthonormal columns built incrementally by modified Gram-Schmidt with one
// reorthogonalisation pass. Each column carries its coefficients over the
// raw candidate set.
class GramSchmidt {
public:
    GramSchmidt(Eigen::Index rows, Eigen::Index n_raw) : rows_(rows), n_raw_(n_raw) {}

    // Returns true when the candidate (raw index `raw`) is kept, that is when
    // its residual exceeds tau times max(|v|, scale).
    bool add(Eigen::VectorXd v, int raw, double tau, double scale = 0.0)
    {
        Eigen::VectorXd coef = Eigen::VectorXd::Zero(n_raw_);
        coef[raw] = 1.0;
        const double norm0 = std::max(v.norm(), scale);
        if (!(norm0 > 0.0) || !std::isfinite(norm0))
            return false;
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t i = 0; i < q_.size(); ++i) {
                const double alpha = q_[i].dot(v);
                v -= alpha * q_[i];
                coef -= alpha * c_[i];
            }
        }
        const double norm = v.norm();
        if (!(norm > tau * norm0))
            return false;
        q_.push_back(v / norm);
        c_.push_back(coef / norm);
        return true;
    }

    std::size_t size() const { return q_.size(); }
    const Eigen::VectorXd& vector(std::size_t i) const { return q_[i]; }
    const Eigen::VectorXd& coefficients(std::size_t i) const { return c_[i]; }

private:
    Eigen::Index rows_;
    Eigen::Index n_raw_;
    std::vector<Eigen::VectorXd> q_;
    std::vector<Eigen::VectorXd> c_;
};

std::optional<Point2> edge_hint(const Mesh& mesh, int e)
{
    const auto& adj = mesh.edge(e).elements;
    if (adj.empty())
        return std::nullopt;
    return mesh.element(adj.front()).interior_point;
}

} // namespace

// ---------------------------------------------------------------------------

DofLayout::DofLayout(const Mesh& mesh, const std::vector<int>& edge_dims, const std::vector<int>& element_dims)
{
    int offset = mesh.n_vertices();
    edge_offset_.resize(mesh.n_edges() + 1);
    for (int e = 0; e < mesh.n_edges(); ++e) {
        edge_offset_[e] = offset;
        offset += edge_dims[e];
    }
    edge_offset_[mesh.n_edges()] = offset;
    skeleton_size_ = offset;
    element_offset_.resize(mesh.n_elements() + 1);
    for (int p = 0; p < mesh.n_elements(); ++p) {
        element_offset_[p] = offset;
        offset += element_dims[p];
    }
    element_offset_[mesh.n_elements()] = offset;
    size_ = offset;

    local_to_global_.resize(mesh.n_elements());
    local_edge_offset_.resize(mesh.n_elements());
    for (const auto& el : mesh.elements()) {
        auto& map = local_to_global_[el.id];
        auto& offs = local_edge_offset_[el.id];
        for (int v : el.vertex_ids)
            map.push_back(vertex_dof(v));
        for (int e : el.edge_ids) {
            offs.push_back(static_cast<int>(map.size()));
            for (int i = 0; i < edge_dim(e); ++i)
                map.push_back(edge_offset(e) + i);
        }
        offs.push_back(static_cast<int>(map.size()));
        for (int i = 0; i < element_dim(el.id); ++i)
            map.push_back(element_offset(el.id) + i);
    }
}

// ---------------------------------------------------------------------------

Discretization::Discretization(Mesh mesh, EnrichmentSpace space, EnrichmentPlan plan, DiscretizationOptions options)
    : mesh_(std::move(mesh)), space_(std::move(space)), plan_(plan), options_(options)
{
    if (options_.k < 1)
        throw ConfigError("polynomial degree k must be at least 1");
    if (!(options_.tau_rank > 0.0 && options_.tau_rank < 1.0))
        throw ConfigError("rank threshold must lie in (0, 1)");
    if (options_.grading_levels < 0)
        throw ConfigError("grading levels must be non-negative");
    marking_ = mark_enrichment(mesh_, plan_, space_);

    edges_.resize(mesh_.n_edges());
    parallel_for(mesh_.n_edges(), [&](int e) { edges_[e] = build_edge_space(e); });
    elements_.resize(mesh_.n_elements());
    parallel_for(mesh_.n_elements(), [&](int p) { elements_[p] = build_element_space(p); });

    std::vector<int> edge_dims(mesh_.n_edges());
    for (int e = 0; e < mesh_.n_edges(); ++e)
        edge_dims[e] = edges_[e].dim_moments();
    std::vector<int> element_dims(mesh_.n_elements());
    for (int p = 0; p < mesh_.n_elements(); ++p)
        element_dims[p] = elements_[p].n_beta();
    layout_ = DofLayout(mesh_, edge_dims, element_dims);
}

std::optional<Grading> Discretization::grading() const
{
    if (!space_.singular_point)
        return std::nullopt;
    return Grading{*space_.singular_point, options_.grading_levels};
}

EdgeSpace Discretization::build_edge_space(int e) const
{
    const Edge& edge = mesh_.edge(e);
    const int k = options_.k;
    EdgeSpace es;
    es.edge = e;
    es.k = k;
    es.a = mesh_.vertex(edge.vertex_ids[0]).position;
    es.b = mesh_.vertex(edge.vertex_ids[1]).position;
    es.length = edge.length;
    es.enriched = marking_.edge[e];
    es.side_hint = edge_hint(mesh_, e);
    es.rule = graded_edge_rule(es.a, es.b, k + (es.enriched ? 4 : 3), grading());

    const int nq = static_cast<int>(es.rule.nodes.size());
    const int n_fields = es.enriched ? static_cast<int>(space_.size()) : 0;
    const int n_raw = k + 1 + n_fields;
    Eigen::MatrixXd raw(nq, n_raw);
    for (int q = 0; q < nq; ++q) {
        const auto leg = legendre_values(k, es.rule.params[q]);
        for (int j = 0; j <= k; ++j)
            raw(q, j) = std::sqrt((2.0 * j + 1.0) / es.length) * leg[j];
        for (int f = 0; f < n_fields; ++f)
            raw(q, k + 1 + f) = space_.fields[f]->value(es.rule.nodes[q], es.side_hint);
    }
    const Eigen::VectorXd sw = Eigen::Map<const Eigen::VectorXd>(es.rule.weights.data(), nq).cwiseSqrt();

    GramSchmidt gs(nq, n_raw);
    for (int j = 0; j <= k; ++j)
        gs.add(sw.cwiseProduct(raw.col(j)), j, 0.0);
    // A trace that vanishes up to rounding (a field along its own cut) is
    // measured against length * |grad psi| rather than its own size.
    std::vector<Eigen::VectorXd> kept;
    std::vector<Eigen::VectorXd> kept_nodes;
    for (int f = 0; f < n_fields; ++f) {
        double grad2 = 0.0;
        for (int q = 0; q < nq; ++q)
            grad2 += es.rule.weights[q] * space_.fields[f]->gradient(es.rule.nodes[q], es.side_hint).squaredNorm();
        const double scale = std::isfinite(grad2) ? es.length * std::sqrt(grad2) : 0.0;
        if (gs.add(sw.cwiseProduct(raw.col(k + 1 + f)), k + 1 + f, options_.tau_rank, scale)) {
            kept.push_back(gs.coefficients(gs.size() - 1));
            kept_nodes.push_back(gs.vector(gs.size() - 1).cwiseQuotient(sw));
        }
    }
    es.complement_coef.resize(static_cast<Eigen::Index>(kept.size()), n_raw);
    for (std::size_t q = 0; q < kept.size(); ++q)
        es.complement_coef.row(q) = kept[q].transpose();

    es.values.resize(nq, es.dim_full());
    es.values.leftCols(k + 1) = raw.leftCols(k + 1);
    // node values come from the orthonormalised vectors, which keeps the
    // discrete orthogonality at rounding level
    for (std::size_t q = 0; q < kept_nodes.size(); ++q)
        es.values.col(k + 1 + q) = kept_nodes[q];

    es.complement_ends.resize(es.dim_complement(), 2);
    for (int end = 0; end < 2; ++end) {
        const double s = end == 0 ? -1.0 : 1.0;
        const Point2& x = end == 0 ? es.a : es.b;
        Eigen::VectorXd r(n_raw);
        const auto leg = legendre_values(k, s);
        for (int j = 0; j <= k; ++j)
            r[j] = std::sqrt((2.0 * j + 1.0) / es.length) * leg[j];
        for (int f = 0; f < n_fields; ++f)
            r[k + 1 + f] = space_.fields[f]->value(x, es.side_hint);
        if (es.dim_complement() > 0)
            es.complement_ends.col(end) = es.complement_coef * r;
    }
    return es;
}

ElementSpace Discretization::build_element_space(int p) const
{
    const Element& el = mesh_.element(p);
    const int k = options_.k;
    ElementSpace s;
    s.element = p;
    s.k = k;
    s.l = std::max(0, k - 2);
    s.enriched = marking_.element[p];
    s.centroid = el.centroid;
    s.h = el.diameter;
    s.area = el.area;
    s.hint = el.interior_point;
    const auto poly = mesh_.element_polygon(p);
    s.rule = polygon_rule(poly, s.enriched ? 2 * k + 4 : 2 * k + 2, grading(), s.hint);
    s.monomials = ScaledMonomials(s.centroid, s.h, k);

    const int nq = static_cast<int>(s.rule.nodes.size());
    const int nm = s.monomials.size();
    const Eigen::VectorXd sw = Eigen::Map<const Eigen::VectorXd>(s.rule.weights.data(), nq).cwiseSqrt();

    Eigen::MatrixXd mv(nq, nm), mdx(nq, nm), mdy(nq, nm), mlap(nq, nm);
    for (int q = 0; q < nq; ++q) {
        const Point2& x = s.rule.nodes[q];
        for (int i = 0; i < nm; ++i) {
            mv(q, i) = s.monomials.value(i, x);
            const Vec2 g = s.monomials.gradient(i, x);
            mdx(q, i) = g.x();
            mdy(q, i) = g.y();
            mlap(q, i) = s.monomials.laplacian(i, x);
        }
    }

    // enrichment fields, filtered by their H^1-seminorm residual against
    // the non-constant monomials and the fields already kept
    const int n_fields = s.enriched ? static_cast<int>(space_.size()) : 0;
    Eigen::MatrixXd fv(nq, n_fields), fdx(nq, n_fields), fdy(nq, n_fields), flap(nq, n_fields);
    for (int q = 0; q < nq; ++q) {
        const Point2& x = s.rule.nodes[q];
        for (int f = 0; f < n_fields; ++f) {
            const auto& field = *space_.fields[f];
            fv(q, f) = field.value(x, s.hint);
            const Vec2 g = field.gradient(x, s.hint);
            fdx(q, f) = g.x();
            fdy(q, f) = g.y();
            flap(q, f) = field.harmonic() ? 0.0 : field.laplacian(x, s.hint);
        }
    }
    if (n_fields > 0) {
        GramSchmidt gs(2 * nq, nm + n_fields);
        auto stacked = [&](const Eigen::VectorXd& dx, const Eigen::VectorXd& dy) {
            Eigen::VectorXd v(2 * nq);
            v << sw.cwiseProduct(dx), sw.cwiseProduct(dy);
            return v;
        };
        for (int i = 1; i < nm; ++i)
            gs.add(stacked(mdx.col(i), mdy.col(i)), i, 0.0);
        for (int f = 0; f < n_fields; ++f)
            if (gs.add(stacked(fdx.col(f), fdy.col(f)), nm + f, options_.tau_rank))
                s.fields.push_back(f);
    }

    const int nphi = nm + static_cast<int>(s.fields.size());
    s.phi.resize(nq, nphi);
    s.phi_dx.resize(nq, nphi);
    s.phi_dy.resize(nq, nphi);
    s.phi_lap.resize(nq, nphi);
    s.phi.leftCols(nm) = mv;
    s.phi_dx.leftCols(nm) = mdx;
    s.phi_dy.leftCols(nm) = mdy;
    s.phi_lap.leftCols(nm) = mlap;
    for (std::size_t i = 0; i < s.fields.size(); ++i) {
        const int f = s.fields[i];
        s.phi.col(nm + i) = fv.col(f);
        s.phi_dx.col(nm + i) = fdx.col(f);
        s.phi_dy.col(nm + i) = fdy.col(f);
        s.phi_lap.col(nm + i) = flap.col(f);
    }

    // moment space: monomials of degree <= l, then Laplacians of the fields
    const int nml = ScaledMonomials::dimension(s.l);
    std::vector<int> lap_candidates;
    for (int f = 0; f < n_fields; ++f)
        if (!space_.fields[f]->harmonic())
            lap_candidates.push_back(f);
    const int n_raw = nml + static_cast<int>(lap_candidates.size());
    Eigen::MatrixXd raw(nq, n_raw);
    raw.leftCols(nml) = mv.leftCols(nml);
    for (std::size_t i = 0; i < lap_candidates.size(); ++i)
        raw.col(nml + i) = flap.col(lap_candidates[i]);

    GramSchmidt gs(nq, n_raw);
    std::vector<int> kept_raw;
    for (int i = 0; i < n_raw; ++i)
        if (gs.add(sw.cwiseProduct(raw.col(i)), i, options_.tau_rank))
            kept_raw.push_back(i);
    // keep only the raw columns actually referenced
    std::vector<int> used;
    for (int i = 0; i < nml; ++i)
        used.push_back(i);
    for (std::size_t i = 0; i < lap_candidates.size(); ++i) {
        bool referenced = false;
        for (std::size_t j = 0; j < gs.size(); ++j)
            referenced = referenced || gs.coefficients(j)[nml + i] != 0.0;
        if (referenced) {
            s.moment_fields.push_back(lap_candidates[i]);
            used.push_back(nml + static_cast<int>(i));
        }
    }
    s.beta_coef.resize(static_cast<Eigen::Index>(gs.size()), static_cast<Eigen::Index>(used.size()));
    for (std::size_t j = 0; j < gs.size(); ++j)
        for (std::size_t c = 0; c < used.size(); ++c)
            s.beta_coef(j, c) = gs.coefficients(j)[used[c]];
    s.beta.resize(nq, static_cast<Eigen::Index>(gs.size()));
    for (std::size_t j = 0; j < gs.size(); ++j)
        s.beta.col(j) = gs.vector(j).cwiseQuotient(sw);
    return s;
}

Eigen::VectorXd Discretization::phi_values(int p, const Point2& x) const
{
    const ElementSpace& s = elements_[p];
    const int nm = s.monomials.size();
    Eigen::VectorXd v(s.n_phi());
    for (int i = 0; i < nm; ++i)
        v[i] = s.monomials.value(i, x);
    for (std::size_t i = 0; i < s.fields.size(); ++i)
        v[nm + i] = space_.fields[s.fields[i]]->value(x, s.hint);
    return v;
}

Eigen::Matrix2Xd Discretization::phi_gradients(int p, const Point2& x) const
{
    const ElementSpace& s = elements_[p];
    const int nm = s.monomials.size();
    Eigen::Matrix2Xd g(2, s.n_phi());
    for (int i = 0; i < nm; ++i)
        g.col(i) = s.monomials.gradient(i, x);
    for (std::size_t i = 0; i < s.fields.size(); ++i)
        g.col(nm + i) = space_.fields[s.fields[i]]->gradient(x, s.hint);
    return g;
}

Eigen::VectorXd Discretization::beta_values(int p, const Point2& x) const
{
    const ElementSpace& s = elements_[p];
    const int nml = ScaledMonomials::dimension(s.l);
    Eigen::VectorXd raw(nml + static_cast<Eigen::Index>(s.moment_fields.size()));
    for (int i = 0; i < nml; ++i)
        raw[i] = s.monomials.value(i, x);
    for (std::size_t i = 0; i < s.moment_fields.size(); ++i)
        raw[nml + i] = space_.fields[s.moment_fields[i]]->laplacian(x, s.hint);
    return s.beta_coef * raw;
}

Eigen::VectorXd Discretization::edge_basis_values(int e, const Point2& x) const
{
    const EdgeSpace& es = edges_[e];
    const int k = es.k;
    const double s = es.param(x);
    const auto leg = legendre_values(k, s);
    const int n_fields = static_cast<int>(es.complement_coef.cols()) - (k + 1);
    Eigen::VectorXd raw(k + 1 + std::max(n_fields, 0));
    for (int j = 0; j <= k; ++j)
        raw[j] = std::sqrt((2.0 * j + 1.0) / es.length) * leg[j];
    for (int f = 0; f < n_fields; ++f)
        raw[k + 1 + f] = space_.fields[f]->value(x, es.side_hint);
    Eigen::VectorXd v(es.dim_full());
    v.head(k + 1) = raw.head(k + 1);
    if (es.dim_complement() > 0)
        v.tail(es.dim_complement()) = es.complement_coef * raw;
    return v;
}

// ---------------------------------------------------------------------------

namespace {

double vertex_value(const ScalarField& u, const Point2& x, const std::optional<Point2>& hint, int v)
{
    const double val = u.value(x, hint);
    if (!std::isfinite(val))
        throw Error("function is not finite at vertex " + std::to_string(v));
    return val;
}

void edge_moments(const Discretization& disc, int e, const ScalarField& u, double* out)
{
    const EdgeSpace& es = disc.edge_space(e);
    const int nq = static_cast<int>(es.rule.nodes.size());
    const int m = es.dim_moments();
    for (int i = 0; i < m; ++i)
        out[i] = 0.0;
    for (int q = 0; q < nq; ++q) {
        const double wu = es.rule.weights[q] * u.value(es.rule.nodes[q], es.side_hint);
        for (int i = 0; i < m; ++i)
            out[i] += wu * es.values(q, es.moment_column(i));
    }
}

void element_moments(const Discretization& disc, int p, const ScalarField& u, double* out)
{
    const ElementSpace& s = disc.element_space(p);
    const int nq = static_cast<int>(s.rule.nodes.size());
    for (int j = 0; j < s.n_beta(); ++j)
        out[j] = 0.0;
    for (int q = 0; q < nq; ++q) {
        const double wu = s.rule.weights[q] * u.value(s.rule.nodes[q], s.hint);
        for (int j = 0; j < s.n_beta(); ++j)
            out[j] += wu * s.beta(q, j);
    }
}

} // namespace

Eigen::VectorXd evaluate_dofs(const Discretization& disc, const ScalarField& u)
{
    const Mesh& mesh = disc.mesh();
    const DofLayout& layout = disc.layout();
    Eigen::VectorXd d(layout.size());
    for (const auto& v : mesh.vertices()) {
        const auto& adj = mesh.vertex_elements(v.id);
        std::optional<Point2> hint;
        if (!adj.empty())
            hint = mesh.element(adj.front()).interior_point;
        d[layout.vertex_dof(v.id)] = vertex_value(u, v.position, hint, v.id);
    }
    for (int e = 0; e < mesh.n_edges(); ++e)
        edge_moments(disc, e, u, d.data() + layout.edge_offset(e));
    for (int p = 0; p < mesh.n_elements(); ++p)
        element_moments(disc, p, u, d.data() + layout.element_offset(p));
    return d;
}

Eigen::VectorXd evaluate_local_dofs(const Discretization& disc, int p, const ScalarField& u)
{
    const Mesh& mesh = disc.mesh();
    const DofLayout& layout = disc.layout();
    const Element& el = mesh.element(p);
    Eigen::VectorXd d(layout.local_size(p));
    for (std::size_t i = 0; i < el.vertex_ids.size(); ++i)
        d[i] = vertex_value(u, mesh.vertex(el.vertex_ids[i]).position, el.interior_point, el.vertex_ids[i]);
    for (std::size_t i = 0; i < el.edge_ids.size(); ++i)
        edge_moments(disc, el.edge_ids[i], u, d.data() + layout.local_edge_offset(p, static_cast<int>(i)));
    element_moments(disc, p, u, d.data() + layout.local_element_offset(p));
    return d;
}

Eigen::VectorXd gather(const Discretization& disc, int p, const Eigen::VectorXd& global)
{
    const auto& map = disc.layout().local_to_global(p);
    Eigen::VectorXd local(map.size());
    for (std::size_t i = 0; i < map.size(); ++i)
        local[i] = global[map[i]];
    return local;
}

} // namespace xvem
