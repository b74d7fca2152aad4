#include "xvem/study.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "xvem/errors.hpp"
#include "xvem/functions.hpp"
#include "xvem/projector.hpp"

namespace xvem {

MeshFamily parse_mesh_family(const std::string& s)
{
    if (s == "cartesian")
        return MeshFamily::Cartesian;
    if (s == "hexagonal")
        return MeshFamily::Hexagonal;
    if (s == "file")
        return MeshFamily::File;
    throw ConfigError("unknown mesh family '" + s + "' (expected cartesian, hexagonal or file)");
}

std::string to_string(MeshFamily f)
{
    switch (f) {
    case MeshFamily::Cartesian:
        return "cartesian";
    case MeshFamily::Hexagonal:
        return "hexagonal";
    case MeshFamily::File:
        return "file";
    }
    return "?";
}

void validate(const RunConfig& c)
{
    singularity_by_name(c.domain);
    if (c.k < 1)
        throw ConfigError("k must be at least 1");
    if (c.mode == EnrichmentMode::Local && !c.gamma)
        throw ConfigError("local enrichment requires gamma");
    if (c.mode != EnrichmentMode::Local && c.gamma)
        throw ConfigError("gamma is only meaningful for local enrichment");
    if (c.gamma && !(*c.gamma >= 0.0))
        throw ConfigError("gamma must be non-negative");
    if (c.mesh_family == MeshFamily::Hexagonal && c.domain == "fracture")
        throw ConfigError("the hexagonal family is only defined on the L-shaped domains");
    if (c.mesh_family == MeshFamily::File && c.mesh_files.empty())
        throw ConfigError("the file family needs at least one mesh file");
    if (c.mesh_family != MeshFamily::File && !c.mesh_files.empty())
        throw ConfigError("mesh files are only used by the file family");
    for (int r : c.refine)
        if (c.mesh_family == MeshFamily::Cartesian ? r < 1 : r < 0)
            throw ConfigError("invalid refinement parameter " + std::to_string(r));
    if (!(c.solver.tol > 0.0))
        throw ConfigError("solver tolerance must be positive");
    if (c.grading_levels < 0)
        throw ConfigError("grading levels must be non-negative");
    if (!(c.tau_rank > 0.0 && c.tau_rank < 1.0))
        throw ConfigError("tau_rank must lie in (0, 1)");
}

EnrichmentPlan enrichment_plan(const RunConfig& c)
{
    switch (c.mode) {
    case EnrichmentMode::None:
        return EnrichmentPlan::none();
    case EnrichmentMode::Global:
        return EnrichmentPlan::global();
    case EnrichmentMode::Local:
        if (!c.gamma)
            throw ConfigError("local enrichment requires gamma");
        return EnrichmentPlan::local(*c.gamma);
    }
    return EnrichmentPlan::none();
}

std::vector<int> refinement_list(const RunConfig& c)
{
    if (c.mesh_family == MeshFamily::File) {
        std::vector<int> idx(c.mesh_files.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            idx[i] = static_cast<int>(i);
        return idx;
    }
    if (!c.refine.empty())
        return c.refine;
    if (c.mesh_family == MeshFamily::Hexagonal)
        return {1, 2, 3, 4};
    return {8, 16, 32, 64};
}

Mesh build_study_mesh(const RunConfig& c, int r)
{
    const RemovedQuadrant removed = c.domain == "lshape-tr" ? RemovedQuadrant::TopRight : RemovedQuadrant::BottomRight;
    switch (c.mesh_family) {
    case MeshFamily::Cartesian:
        if (c.domain == "fracture")
            return build_cartesian_fractured_mesh(r);
        return build_cartesian_lshape_mesh(r, removed);
    case MeshFamily::Hexagonal:
        if (c.domain == "fracture")
            throw ConfigError("the hexagonal family is only defined on the L-shaped domains");
        return build_hexagonal_lshape_mesh(r, removed);
    case MeshFamily::File:
        if (r < 0 || r >= static_cast<int>(c.mesh_files.size()))
            throw ConfigError("mesh file index out of range");
        return read_mesh_file(c.mesh_files[r]);
    }
    throw ConfigError("unknown mesh family");
}

namespace {

// Single-line status text without CSV separators.
std::string status_text(const std::string& what, const std::string& message)
{
    std::string s = what + ": " + message;
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

} // namespace

ErrorReport run_single(const RunConfig& config, const Mesh& mesh)
{
    const EnrichmentSpace space = singularity_by_name(config.domain);
    const ManufacturedProblem problem = singular_benchmark(space);
    ErrorReport r;
    r.mesh_size = mesh.h();
    r.cells = mesh.n_elements();
    r.edges = mesh.n_edges();
    r.vertices = mesh.n_vertices();
    r.condition = std::numeric_limits<double>::quiet_NaN();

    const Discretization disc(mesh, space, enrichment_plan(config),
                              {.k = config.k, .tau_rank = config.tau_rank, .grading_levels = config.grading_levels});
    std::vector<ElementOperators> ops;
    try {
        ops = build_all_operators(disc);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        r.solved = false;
        r.status = status_text("projector failed", e.what());
        return r;
    }
    for (const auto& o : ops)
        r.projector_condition = std::max(r.projector_condition, o.condition);

    try {
        const CondensedProblem cp = condensed_problem(disc, ops, problem.source, *problem.exact);
        r.dofs = static_cast<int>(cp.reduced.free_dofs.size());
        r.condition = estimate_condition(cp.reduced.matrix);
        const DiscreteSolution sol = solve_condensed(cp, config.solver);
        const ErrorNorms e = compute_errors(disc, ops, sol.dofs, *problem.exact);
        r.l2 = e.l2;
        r.h1 = e.h1;
        r.energy = e.energy;
    } catch (const SolverError& e) {
        r.solved = false;
        r.status = status_text("solver failed", e.what());
    }
    return r;
}

std::vector<ErrorReport> run_convergence_study(const RunConfig& config)
{
    validate(config);
    if (!config.export_mesh.empty())
        std::filesystem::create_directories(config.export_mesh);
    std::vector<ErrorReport> reports;
    for (int r : refinement_list(config)) {
        const Mesh mesh = build_study_mesh(config, r);
        if (!config.export_mesh.empty() && config.mesh_family != MeshFamily::File) {
            const std::string name = config.domain + "_" + to_string(config.mesh_family) + "_" + std::to_string(r) + ".mesh";
            write_mesh_file((std::filesystem::path(config.export_mesh) / name).string(), mesh);
        }
        reports.push_back(run_single(config, mesh));
    }
    if (!config.out.empty()) {
        std::ofstream out(config.out);
        if (!out)
            throw ConfigError("cannot open output file '" + config.out + "'");
        write_csv(out, reports);
        if (!out)
            throw Error("failed writing '" + config.out + "'");
    }
    return reports;
}

namespace {

std::string sci(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.11e", x);
    return buf;
}

} // namespace

void write_csv(std::ostream& out, const std::vector<ErrorReport>& reports)
{
    out << "MeshSize,NbCells,NbEdges,NbVertices,DOFs,L2Error,H1Error,CondEst,EnergyError,ProjCondMax,Status\n";
    for (const auto& r : reports) {
        out << sci(r.mesh_size) << ',' << r.cells << ',' << r.edges << ',' << r.vertices << ',' << r.dofs << ',';
        if (r.solved)
            out << sci(r.l2) << ',' << sci(r.h1) << ',';
        else
            out << ",,";
        out << sci(r.condition) << ',';
        if (r.solved)
            out << sci(r.energy);
        out << ',' << sci(r.projector_condition) << ',' << r.status << '\n';
    }
}

namespace {

std::string fixed2(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

void report_line(std::ostream& os, const std::vector<ErrorReport>& reports, ErrorKind kind, const std::string& name,
                 const std::string& expected)
{
    os << name << ": ";
    int solved = 0;
    for (const auto& r : reports)
        solved += r.solved ? 1 : 0;
    if (solved < 2) {
        os << "insufficient data / expected " << expected << '\n';
        return;
    }
    RateFit fit;
    try {
        fit = fit_rates(reports, kind);
    } catch (const Error& e) {
        os << "not fitted (" << e.what() << ") / expected " << expected << '\n';
        return;
    }
    os << "observed " << fixed2(fit.asymptotic_h) << " / expected " << expected << " (slope in h); DOF slope "
       << fixed2(fit.asymptotic_dofs) << "; pairwise in h:";
    for (double s : fit.pairwise_h)
        os << ' ' << fixed2(s);
    os << '\n';
}

} // namespace

std::string emit_report(const std::vector<ErrorReport>& reports, int k)
{
    if (reports.empty())
        throw Error("no reports to summarise");
    std::ostringstream os;
    os << "k = " << k << ", " << reports.size() << " meshes";
    int failed = 0;
    for (const auto& r : reports)
        failed += r.solved ? 0 : 1;
    if (failed > 0)
        os << " (" << failed << " failed)";
    os << '\n';
    report_line(os, reports, ErrorKind::H1, "H1 error", std::to_string(k));
    report_line(os, reports, ErrorKind::L2, "L2 error",
                k == 2 ? "≥ k (suboptimality documented)" : std::to_string(k + 1));
    report_line(os, reports, ErrorKind::Energy, "energy error", std::to_string(k));
    return os.str();
}

} // namespace xvem
