#pragma once

#include "hsoc/fem.hpp"
#include "hsoc/fidelity.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <utility>

namespace hsoc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Clamp v to [a, b]; a and b may be infinite. Throws InvalidArgument if a >= b.
double project_box(double v, double a, double b);

/// Quadrature order used for every integral involving the control
/// (state right-hand side, Newton matrix, control cost, gradient).
inline constexpr int kControlQuadratureOrder = 4;

/// L2 inner product of two control fields with the control quadrature.
double control_inner(const Mesh2D& mesh, const ElementField& f, const ElementField& g);

struct ControlProblem {
  EllipticCoefficients coeffs = EllipticCoefficients::laplace();
  FidelityTerm fidelity;
  double nu = 1.0;
  double lower = -kInf;
  double upper = kInf;

  /// Throws InvalidArgument unless nu > 0 and lower < upper.
  void validate() const;
  bool constrained() const { return std::isfinite(lower) || std::isfinite(upper); }
};

/// Control recovered from the adjoint: u(x) = P_[a,b](-p_h(x) / nu).
/// Never interpolated into the finite element space.
class ProjectedControl {
public:
  ProjectedControl(const FeFunction& adjoint, double nu, double lower, double upper);

  double evaluate(int triangle, const std::array<double, 3>& bary) const;
  /// `hint` is updated to speed up sequences of nearby points.
  double evaluate(const Vec2& x, int* hint = nullptr) const;
  ElementField as_field() const;
  const FeFunction& adjoint() const { return adjoint_; }

private:
  FeFunction adjoint_;
  double nu_, lower_, upper_;
};

enum class StoppingNorm {
  Riesz,     // discrete H^1_0 norm of the Riesz representative
  Euclidean, // plain vector norm
};

struct NewtonOptions {
  double tol = 1e-8;
  int max_iter = 50;
  StoppingNorm norm = StoppingNorm::Riesz;
  SolverKind solver = SolverKind::Direct;
};

struct SolveResult {
  FeFunction y;
  FeFunction p;
  ProjectedControl u;
  int iterations = 0;
  std::vector<double> residual_history; // one entry per iterate, starting at (0, 0)
  std::vector<int> active_lower;        // vertices where -p/nu <= a
  std::vector<int> active_upper;        // vertices where -p/nu >= b
};

/// Discrete optimality system of one problem on one mesh. Holds the
/// assembled operators; the problem and mesh must outlive it.
class ControlSystem {
public:
  ControlSystem(const Mesh2D& mesh, const ControlProblem& problem,
                SolverKind solver = SolverKind::Direct);

  const Mesh2D& mesh() const { return *mesh_; }
  const ControlProblem& problem() const { return *problem_; }

  /// (A y - rhs(u(p)), A p - (M y - G)) over interior dofs.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> residual(const FeFunction& y,
                                                      const FeFunction& p) const;

  /// Norm of a residual block (Riesz-lifted or Euclidean).
  double block_norm(const Eigen::VectorXd& block, StoppingNorm norm) const;

  /// Right-hand side (u, phi_z) of the state equation for a control field.
  Eigen::VectorXd control_rhs(const ElementField& control) const;

  FeFunction state(const ElementField& control) const;
  /// Solves A p = M y - G.
  FeFunction adjoint(const FeFunction& y) const;

  /// fidelity(S_h u) + nu/2 ||u||^2.
  double objective(const ElementField& control) const;
  /// (p_h + nu u, d) with p_h the adjoint of S_h u.
  double gradient_residual(const ElementField& control, const ElementField& direction) const;

  SolveResult semismooth_newton(const NewtonOptions& options = {}) const;

private:
  const Mesh2D* mesh_;
  const ControlProblem* problem_;
  SolverKind solver_kind_;
  SparseMatrix op_;
  SparseMatrix fid_matrix_;
  Eigen::VectorXd fid_vector_;
  std::unique_ptr<LinearSolver> state_solver_;
  std::unique_ptr<LinearSolver> laplace_solver_;
  SparseMatrix laplace_;
};

/// Convenience wrapper around ControlSystem::semismooth_newton.
SolveResult semismooth_newton(const ControlProblem& problem, const Mesh2D& mesh,
                              const NewtonOptions& options = {});

} // namespace hsoc
