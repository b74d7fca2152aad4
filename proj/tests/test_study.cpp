#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "xvem/errors.hpp"
#include "xvem/study.hpp"

using namespace xvem;

namespace {

RunConfig fracture_config(int k, std::vector<int> refine)
{
    RunConfig c;
    c.domain = "fracture";
    c.k = k;
    c.mode = EnrichmentMode::Local;
    c.gamma = 0.15;
    c.refine = std::move(refine);
    return c;
}

std::string csv(const std::vector<ErrorReport>& reports)
{
    std::ostringstream os;
    write_csv(os, reports);
    return os.str();
}

std::vector<std::string> lines(const std::string& s)
{
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string line; std::getline(is, line);)
        out.push_back(line);
    return out;
}

} // namespace

TEST_CASE("configuration validation")
{
    RunConfig c = fracture_config(1, {4});
    CHECK_NOTHROW(validate(c));
    c.gamma.reset();
    CHECK_THROWS_AS(validate(c), ConfigError);
    c.mode = EnrichmentMode::None;
    CHECK_NOTHROW(validate(c));
    c.gamma = 0.1;
    CHECK_THROWS_AS(validate(c), ConfigError);

    RunConfig d = fracture_config(0, {4});
    CHECK_THROWS_AS(validate(d), ConfigError);
    d = fracture_config(1, {4});
    d.mesh_family = MeshFamily::Hexagonal;
    CHECK_THROWS_AS(validate(d), ConfigError);
    d = fracture_config(1, {4});
    d.domain = "square";
    CHECK_THROWS_AS(validate(d), ConfigError);
    d = fracture_config(1, {0});
    CHECK_THROWS_AS(validate(d), ConfigError);
    d = fracture_config(1, {4});
    d.mesh_family = MeshFamily::File;
    CHECK_THROWS_AS(validate(d), ConfigError);
    d = fracture_config(1, {4});
    d.gamma = -1.0;
    CHECK_THROWS_AS(validate(d), ConfigError);

    CHECK(parse_mesh_family("hexagonal") == MeshFamily::Hexagonal);
    CHECK(to_string(MeshFamily::File) == "file");
    CHECK_THROWS_AS(parse_mesh_family("voronoi"), ConfigError);
}

TEST_CASE("default refinement lists")
{
    RunConfig c = fracture_config(1, {});
    CHECK(refinement_list(c) == std::vector<int>{8, 16, 32, 64});
    c.domain = "lshape-tr";
    c.mesh_family = MeshFamily::Hexagonal;
    CHECK(refinement_list(c) == std::vector<int>{1, 2, 3, 4});
}

TEST_CASE("fracture study at k = 1")
{
    const auto reports = run_convergence_study(fracture_config(1, {8, 16, 32}));
    REQUIRE(reports.size() == 3);
    for (std::size_t i = 0; i < reports.size(); ++i) {
        CHECK(reports[i].solved);
        CHECK(reports[i].status == "ok");
        CHECK(std::isfinite(reports[i].condition));
        if (i > 0) {
            CHECK(reports[i].mesh_size < reports[i - 1].mesh_size);
            CHECK(reports[i].l2 < reports[i - 1].l2);
            CHECK(reports[i].h1 < reports[i - 1].h1);
            CHECK(reports[i].energy < reports[i - 1].energy);
            CHECK(reports[i].dofs > reports[i - 1].dofs);
        }
    }
    CHECK(reports[0].cells == 64);
    CHECK(reports[0].vertices == 81 + 4);
}

TEST_CASE("no enrichment equals local enrichment with zero radius")
{
    RunConfig none = fracture_config(2, {8});
    none.mode = EnrichmentMode::None;
    none.gamma.reset();
    RunConfig zero = fracture_config(2, {8});
    zero.gamma = 0.0;
    const auto a = run_convergence_study(none);
    const auto b = run_convergence_study(zero);
    CHECK(csv(a) == csv(b));
}

TEST_CASE("CSV format and determinism")
{
    const RunConfig c = fracture_config(2, {4, 8});
    const std::string first = csv(run_convergence_study(c));
    const std::string second = csv(run_convergence_study(c));
    CHECK(first == second);
    const auto rows = lines(first);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "MeshSize,NbCells,NbEdges,NbVertices,DOFs,L2Error,H1Error,CondEst,EnergyError,ProjCondMax,Status");
    const std::regex sci("-?[0-9]\\.[0-9]{11}e[+-][0-9]{2}");
    const std::regex integer("[0-9]+");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        std::vector<std::string> f;
        std::istringstream is(rows[i]);
        for (std::string x; std::getline(is, x, ',');)
            f.push_back(x);
        REQUIRE(f.size() == 11);
        for (int j : {0, 5, 6, 7, 8, 9})
            CHECK(std::regex_match(f[j], sci));
        for (int j : {1, 2, 3, 4})
            CHECK(std::regex_match(f[j], integer));
        CHECK(f[10] == "ok");
    }
}

TEST_CASE("written file matches the in-memory CSV")
{
    const auto dir = std::filesystem::temp_directory_path() / "xvem_study_test";
    std::filesystem::create_directories(dir);
    RunConfig c = fracture_config(1, {4});
    c.out = (dir / "out.csv").string();
    c.export_mesh = (dir / "meshes").string();
    const auto reports = run_convergence_study(c);
    std::ifstream in(c.out);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str() == csv(reports));
    const auto mesh_path = dir / "meshes" / "fracture_cartesian_4.mesh";
    CHECK(std::filesystem::exists(mesh_path));

    // the exported mesh runs through the file family with the same result
    RunConfig f = fracture_config(1, {});
    f.mesh_family = MeshFamily::File;
    f.mesh_files = {mesh_path.string()};
    const auto from_file = run_convergence_study(f);
    CHECK(csv(from_file) == csv(reports));
    std::filesystem::remove_all(dir);
}

TEST_CASE("solver failure is recorded as a row")
{
    RunConfig c = fracture_config(3, {8});
    c.solver.kind = SolverKind::Krylov;
    c.solver.max_iterations = 1;
    c.solver.tol = 1e-14;
    const auto reports = run_convergence_study(c);
    REQUIRE(reports.size() == 1);
    CHECK_FALSE(reports[0].solved);
    CHECK(reports[0].status.rfind("solver failed", 0) == 0);
    CHECK(std::isfinite(reports[0].condition));
    const auto rows = lines(csv(reports));
    std::vector<std::string> f;
    std::istringstream is(rows[1]);
    for (std::string x; std::getline(is, x, ',');)
        f.push_back(x);
    REQUIRE(f.size() == 11);
    CHECK(f[5].empty());
    CHECK(f[6].empty());
    CHECK_FALSE(f[7].empty());
    CHECK(f[8].empty());
    CHECK(emit_report(reports, 3).find("insufficient data") != std::string::npos);
}

TEST_CASE("rate report")
{
    std::vector<ErrorReport> rows;
    for (double h : {0.4, 0.2, 0.1}) {
        ErrorReport r;
        r.mesh_size = h;
        r.dofs = static_cast<int>(std::lround(1 / (h * h)));
        r.h1 = h * h;
        r.l2 = h * h * h;
        r.energy = h * h;
        rows.push_back(r);
    }
    const std::string two = emit_report(rows, 2);
    CHECK(two.find("H1 error: observed 2.00 / expected 2") != std::string::npos);
    CHECK(two.find("L2 error: observed 3.00 / expected ≥ k (suboptimality documented)") != std::string::npos);
    const std::string three = emit_report(rows, 3);
    CHECK(three.find("L2 error: observed 3.00 / expected 4") != std::string::npos);
    CHECK_THROWS_AS(emit_report({}, 1), Error);
}
