#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "xvem/assembly.hpp"
#include "xvem/enrichment.hpp"
#include "xvem/mesh.hpp"
#include "xvem/postprocess.hpp"

namespace xvem {

enum class MeshFamily { Cartesian, Hexagonal, File };

MeshFamily parse_mesh_family(const std::string& s);
std::string to_string(MeshFamily f);

struct RunConfig {
    std::string domain = "fracture";          // fracture, lshape-tr, lshape-br
    MeshFamily mesh_family = MeshFamily::Cartesian;
    int k = 1;
    EnrichmentMode mode = EnrichmentMode::Local;
    std::optional<double> gamma;              // required iff mode is local
    /// Cartesian: cells per direction; hexagonal: lattice level. Empty selects
    /// the family default.
    std::vector<int> refine;
    std::vector<std::string> mesh_files;      // file family, coarse to fine
    SolveOptions solver;
    int grading_levels = 14;
    double tau_rank = 1e-8;
    std::string out;                          // CSV path; empty writes nothing
    std::string export_mesh;                  // directory for generated meshes; empty disables
};

/// Throws ConfigError for an inconsistent configuration.
void validate(const RunConfig& config);

EnrichmentPlan enrichment_plan(const RunConfig& config);

/// Refinement parameters after applying the family default.
std::vector<int> refinement_list(const RunConfig& config);

/// Mesh of the configured domain and family for one refinement parameter
/// (or the index into mesh_files for the file family).
Mesh build_study_mesh(const RunConfig& config, int refinement);

/// Full run on one mesh. Solver and projector failures give a row with
/// solved = false; the condition estimate is kept when it was computed.
ErrorReport run_single(const RunConfig& config, const Mesh& mesh);

/// One report per mesh, coarse to fine. Writes the CSV when config.out is set.
std::vector<ErrorReport> run_convergence_study(const RunConfig& config);

/// Header and one line per report; scientific notation with 12 significant
/// digits. Error fields are empty on failed rows.
void write_csv(std::ostream& out, const std::vector<ErrorReport>& reports);

/// Observed slopes next to the expected ones. Throws Error for an empty list.
std::string emit_report(const std::vector<ErrorReport>& reports, int k);

} // namespace xvem
