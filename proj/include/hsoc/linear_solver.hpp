#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <memory>
#include <string_view>

namespace hsoc {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class SolverKind {
  Direct, // sparse Cholesky / LU
  Krylov, // CG or BiCGSTAB with incomplete factorization, tolerance 1e-12
};

SolverKind parse_solver_kind(std::string_view name);

/// Factorizes once, solves many times. Throws SolverError on failure.
class LinearSolver {
public:
  virtual ~LinearSolver() = default;
  virtual Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const = 0;
};

/// For symmetric positive definite matrices.
std::unique_ptr<LinearSolver> make_spd_solver(const SparseMatrix& matrix, SolverKind kind);

/// For general square matrices.
std::unique_ptr<LinearSolver> make_general_solver(const SparseMatrix& matrix, SolverKind kind);

} // namespace hsoc
