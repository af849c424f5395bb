#include "hsoc/linear_solver.hpp"

#include "hsoc/errors.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <string>

namespace hsoc {
namespace {

constexpr double kKrylovTol = 1e-12;

template <typename Factorization>
class FactorizedSolver final : public LinearSolver {
public:
  FactorizedSolver(const SparseMatrix& matrix, const char* label) : label_(label) {
    factor_.compute(matrix);
    if (factor_.info() != Eigen::Success)
      throw SolverError(std::string(label_) + " factorization failed");
  }
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const override {
    Eigen::VectorXd x = factor_.solve(rhs);
    if (factor_.info() != Eigen::Success) throw SolverError(std::string(label_) + " solve failed");
    return x;
  }

private:
  // Eigen's solve() is logically const but some backends keep scratch state.
  mutable Factorization factor_;
  const char* label_;
};

template <typename Krylov>
class KrylovSolver final : public LinearSolver {
public:
  KrylovSolver(const SparseMatrix& matrix, const char* label) : label_(label) {
    krylov_.setTolerance(kKrylovTol);
    krylov_.setMaxIterations(std::max<Eigen::Index>(1000, 4 * matrix.rows()));
    krylov_.compute(matrix);
    if (krylov_.info() != Eigen::Success)
      throw SolverError(std::string(label_) + " preconditioner setup failed");
  }
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const override {
    if (rhs.norm() == 0.0) return Eigen::VectorXd::Zero(rhs.size());
    Eigen::VectorXd x = krylov_.solve(rhs);
    if (krylov_.info() != Eigen::Success)
      throw SolverError(std::string(label_) + " did not converge (residual " +
                        std::to_string(krylov_.error()) + ")");
    return x;
  }

private:
  mutable Krylov krylov_;
  const char* label_;
};

} // namespace

SolverKind parse_solver_kind(std::string_view name) {
  if (name == "direct") return SolverKind::Direct;
  if (name == "krylov") return SolverKind::Krylov;
  throw InvalidArgument("unknown solver '" + std::string(name) + "'");
}

std::unique_ptr<LinearSolver> make_spd_solver(const SparseMatrix& matrix, SolverKind kind) {
  if (kind == SolverKind::Krylov)
    return std::make_unique<KrylovSolver<
        Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                                 Eigen::IncompleteCholesky<double>>>>(matrix, "conjugate gradient");
  return std::make_unique<FactorizedSolver<Eigen::SimplicialLLT<SparseMatrix>>>(matrix, "Cholesky");
}

std::unique_ptr<LinearSolver> make_general_solver(const SparseMatrix& matrix, SolverKind kind) {
  if (kind == SolverKind::Krylov)
    return std::make_unique<KrylovSolver<Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>>>>(
        matrix, "BiCGSTAB");
  return std::make_unique<FactorizedSolver<Eigen::SparseLU<SparseMatrix>>>(matrix, "LU");
}

} // namespace hsoc
