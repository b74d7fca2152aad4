#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xvem/errors.hpp"
#include "xvem/study.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Convergence study for the enriched virtual element solver"};
    app.set_config("--config", "", "Key = value configuration file; command-line flags take precedence");

    std::string domain = "fracture";
    std::string family = "cartesian";
    int k = 1;
    std::string mode = "local";
    double gamma = 0.15;
    std::vector<int> refine;
    std::vector<std::string> mesh_files;
    std::string solver = "direct";
    double tol = 1e-10;
    int max_iterations = 0;
    int grading_levels = 14;
    double tau_rank = 1e-8;
    std::string out;
    std::string export_mesh;
    bool quiet = false;

    app.add_option("--domain", domain, "fracture, lshape-tr or lshape-br")->capture_default_str();
    app.add_option("--mesh-family", family, "cartesian, hexagonal or file")->capture_default_str();
    app.add_option("--k", k, "Polynomial degree")->capture_default_str();
    app.add_option("--enrichment", mode, "none, global or local")->capture_default_str();
    auto* gamma_opt = app.add_option("--gamma", gamma, "Enrichment radius for local mode");
    app.add_option("--refine", refine, "Comma-separated cells per direction (cartesian) or levels (hexagonal)")
        ->delimiter(',');
    app.add_option("--mesh-file", mesh_files, "Mesh files for the file family, coarse to fine")->delimiter(',');
    app.add_option("--solver", solver, "direct or krylov")->capture_default_str();
    app.add_option("--tol", tol, "Relative residual tolerance")->capture_default_str();
    app.add_option("--max-iterations", max_iterations, "Krylov iteration cap (0: 10 n)")->capture_default_str();
    app.add_option("--grading-levels", grading_levels, "Geometric quadrature layers at the singular point")
        ->capture_default_str();
    app.add_option("--tau-rank", tau_rank, "Relative rank threshold for enrichment contributions")
        ->capture_default_str();
    app.add_option("--out", out, "CSV output path (standard output when empty)");
    app.add_option("--export-mesh", export_mesh, "Directory receiving the generated meshes");
    app.add_flag("--quiet", quiet, "Do not print the rate summary");

    CLI11_PARSE(app, argc, argv);

    try {
        xvem::RunConfig config;
        config.domain = domain;
        config.mesh_family = xvem::parse_mesh_family(family);
        config.k = k;
        config.mode = xvem::parse_enrichment_mode(mode);
        if (gamma_opt->count() > 0)
            config.gamma = gamma;
        else if (config.mode == xvem::EnrichmentMode::Local)
            config.gamma = std::nullopt;
        config.refine = refine;
        config.mesh_files = mesh_files;
        config.solver.kind = xvem::parse_solver_kind(solver);
        config.solver.tol = tol;
        config.solver.max_iterations = max_iterations;
        config.grading_levels = grading_levels;
        config.tau_rank = tau_rank;
        config.out = out;
        config.export_mesh = export_mesh;

        const auto reports = xvem::run_convergence_study(config);
        if (out.empty())
            xvem::write_csv(std::cout, reports);
        if (!quiet)
            std::cerr << xvem::emit_report(reports, config.k);
    } catch (const xvem::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
