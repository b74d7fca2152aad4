#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "xvem/functions.hpp"
#include "xvem/local_spaces.hpp"
#include "xvem/projector.hpp"

namespace xvem {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Local stiffness split into its consistency and stabilisation parts;
/// stiffness = consistency + stabilisation, symmetric.
struct LocalMatrices {
    Eigen::MatrixXd consistency;
    Eigen::MatrixXd stabilisation;
    Eigen::MatrixXd stiffness;
};

/// consistency = int grad Pi e_i . grad Pi e_j
/// stabilisation = h^-2 (moment projection of e - Pi e) in L2(P)
///               + h^-1 (trace of e - Pi e) in L2(boundary of P)
LocalMatrices local_stiffness(const Discretization& disc, const ElementOperators& ops);

/// Moments of f against the element moment basis, placed on the element
/// DOFs; zero on vertex and edge DOFs.
Eigen::VectorXd local_load(const Discretization& disc, int p, const SourceFunction& f);

struct GlobalSystem {
    SparseMatrix matrix;
    Eigen::VectorXd rhs;
};

/// Scatter-adds local stiffness and load through the DOF layout. An empty f
/// gives a zero right-hand side.
GlobalSystem assemble(const Discretization& disc, const std::vector<ElementOperators>& ops,
                      const SourceFunction& f);

/// Values of the fixed boundary DOFs: vertex values of g on boundary
/// vertices and the edge moments of g on boundary edges.
struct DirichletData {
    std::vector<int> dofs;      // sorted global indices
    Eigen::VectorXd values;
};

DirichletData dirichlet_data(const Discretization& disc, const ScalarField& g);

/// Global indices of the DOFs of boundary vertices and boundary edges, sorted.
std::vector<int> boundary_dofs(const Discretization& disc);

/// System restricted to the free unknowns, with the fixed values moved to
/// the right-hand side.
struct ReducedSystem {
    SparseMatrix matrix;
    Eigen::VectorXd rhs;
    std::vector<int> free_dofs;    // reduced index -> index in the input system
    DirichletData fixed;
    int full_size = 0;

    /// Full vector from a reduced solution.
    Eigen::VectorXd expand(const Eigen::VectorXd& reduced) const;
};

ReducedSystem apply_dirichlet(const GlobalSystem& system, const DirichletData& data);

/// Schur complement on the skeleton (vertex and edge) unknowns after
/// eliminating every element block.
struct CondensedSystem {
    GlobalSystem skeleton;
    /// Element unknowns = element_rhs - recovery * skeleton unknowns.
    SparseMatrix recovery;
    Eigen::VectorXd element_rhs;
    int skeleton_size = 0;

    Eigen::VectorXd recover(const Eigen::VectorXd& skeleton_values) const;
};

/// Throws SolverError when an element block is not positive definite.
CondensedSystem static_condense(const GlobalSystem& system, const DofLayout& layout);

enum class SolverKind { Direct, Krylov };

SolverKind parse_solver_kind(const std::string& s);
std::string to_string(SolverKind kind);

struct SolveOptions {
    SolverKind kind = SolverKind::Direct;
    double tol = 1e-10;
    int max_iterations = 0;   // Krylov only; 0 selects 10 * n
};

struct SolveResult {
    Eigen::VectorXd x;
    double residual = 0.0;    // ||A x - b|| / ||b||
    int iterations = 0;
};

/// Symmetric sparse solve. Direct: LDL^T factorisation with up to three
/// steps of iterative refinement. Krylov: BiCGSTAB with Jacobi
/// preconditioning. Throws SolverError with the best residual when the
/// tolerance is not reached.
SolveResult solve_spd(const SparseMatrix& a, const Eigen::VectorXd& b, const SolveOptions& options = {});

/// Ratio of extreme Ritz values from short Lanczos runs on A and on A^-1.
/// NaN for an empty matrix.
double estimate_condition(const SparseMatrix& a, int steps = 30, std::uint64_t seed = 12345);

/// Full pipeline for -lap u = f with u = g on the boundary: assembly, static
/// condensation, Dirichlet elimination, solve and recovery.
struct DiscreteSolution {
    Eigen::VectorXd dofs;
    int free_dofs = 0;        // unknowns left after condensation and elimination
    double residual = 0.0;
    int iterations = 0;
};

struct CondensedProblem {
    CondensedSystem condensed;
    ReducedSystem reduced;
};

CondensedProblem condensed_problem(const Discretization& disc, const std::vector<ElementOperators>& ops,
                                   const SourceFunction& f, const ScalarField& g);

DiscreteSolution solve_condensed(const CondensedProblem& problem, const SolveOptions& options = {});

DiscreteSolution solve_problem(const Discretization& disc, const std::vector<ElementOperators>& ops,
                               const SourceFunction& f, const ScalarField& g, const SolveOptions& options = {});

} // namespace xvem
