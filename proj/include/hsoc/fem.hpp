#pragma once

#include "hsoc/linear_solver.hpp"
#include "hsoc/mesh.hpp"

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace hsoc {

using ScalarField = std::function<double(const Vec2&)>;

/// Field evaluable per element: (triangle, barycentric coordinates, point).
using ElementField = std::function<double(int, const std::array<double, 3>&, const Vec2&)>;

/// Coefficients of A y = -div(K grad y) + a0 y with K = [[a11, a12], [a12, a22]].
struct EllipticCoefficients {
  ScalarField a11, a12, a22, a0;
  /// Constant coefficients are integrated in closed form.
  bool constant = false;

  static EllipticCoefficients laplace();
  static EllipticCoefficients constant_coefficients(double a11, double a12, double a22, double a0);

  /// Samples `samples` uniform points in the unit square (seeded) and throws
  /// ValidationError if a0 < 0 or the smallest eigenvalue of K is below
  /// `alpha_check`.
  void validate(double alpha_check = 1e-12, int samples = 1000, unsigned seed = 0) const;
};

/// Element of V_h: continuous piecewise linear, zero on the boundary.
/// Coefficients are stored for every vertex; boundary entries are exactly 0.
class FeFunction {
public:
  /// Zero function.
  explicit FeFunction(const Mesh2D& mesh);
  /// From interior degrees of freedom.
  FeFunction(const Mesh2D& mesh, const Eigen::VectorXd& interior);

  const Mesh2D& mesh() const { return *mesh_; }
  const Eigen::VectorXd& coefficients() const { return coeffs_; }
  Eigen::VectorXd interior() const;

  double evaluate(int triangle, const std::array<double, 3>& bary) const;
  /// Throws LocateError outside the mesh.
  double evaluate(const Vec2& x) const;
  ElementField as_field() const;

private:
  const Mesh2D* mesh_;
  Eigen::VectorXd coeffs_;
};

/// Vertex values of the P1 interpolant of f (boundary values kept).
Eigen::VectorXd interpolate_nodal(const Mesh2D& mesh, const ScalarField& f);

/// Field of the P1 function with the given vertex values.
ElementField nodal_field(const Mesh2D& mesh, const Eigen::VectorXd& values);

/// Element stiffness matrix for the triangle with the given corners.
Eigen::Matrix3d local_stiffness(const std::array<Vec2, 3>& corners,
                                const EllipticCoefficients& coeffs);

/// Stiffness matrix over all vertices.
SparseMatrix assemble_stiffness_full(const Mesh2D& mesh, const EllipticCoefficients& coeffs);

/// Stiffness restricted to interior degrees of freedom (boundary eliminated).
SparseMatrix assemble_operator(const Mesh2D& mesh, const EllipticCoefficients& coeffs);

/// Mass matrix over all vertices; element block (area / 12) [[2,1,1],[1,2,1],[1,1,2]].
SparseMatrix assemble_mass(const Mesh2D& mesh);

/// Rows and columns of interior vertices.
SparseMatrix restrict_to_interior(const Mesh2D& mesh, const SparseMatrix& full);

/// Weighted mass matrix (c phi_i, phi_j) over interior dofs, evaluated with a
/// triangle rule; `weight(t, q)` is c at quadrature point q of triangle t.
SparseMatrix assemble_weighted_mass(const Mesh2D& mesh, int order,
                                    const std::function<double(int, int)>& weight);

/// (f, phi_z) for interior z, with a triangle rule of the given order.
Eigen::VectorXd load_vector(const Mesh2D& mesh, const ElementField& f, int order = 4);

struct PointSource {
  Vec2 position;
  double weight = 1.0;
};

/// sum_i w_i phi_z(x_i) for interior z. Throws LocateError for points outside.
Eigen::VectorXd point_load_vector(const Mesh2D& mesh, std::span<const PointSource> sources);

using Source = std::variant<ScalarField, FeFunction, std::vector<PointSource>>;

/// Discrete solution operator S_h with the factorization kept for reuse.
class StateSolver {
public:
  StateSolver(const Mesh2D& mesh, const EllipticCoefficients& coeffs,
              SolverKind kind = SolverKind::Direct);

  const Mesh2D& mesh() const { return *mesh_; }
  const SparseMatrix& op() const { return operator_; }
  const SparseMatrix& mass() const { return mass_interior_; }

  /// y_h with a(y_h, v) = (source, v) for all v in V_h.
  FeFunction solve(const Source& source) const;
  /// Solve with an explicit right-hand side over interior dofs.
  FeFunction solve_rhs(const Eigen::VectorXd& rhs) const;
  /// Right-hand side vector for a source.
  Eigen::VectorXd rhs(const Source& source) const;

private:
  const Mesh2D* mesh_;
  SparseMatrix operator_;
  SparseMatrix mass_interior_;
  std::unique_ptr<LinearSolver> solver_;
};

FeFunction solve_state(const Mesh2D& mesh, const EllipticCoefficients& coeffs, const Source& source,
                       SolverKind kind = SolverKind::Direct);

/// L2(Omega) norm with the 12-point degree-6 rule.
double l2_norm(const Mesh2D& mesh, const ElementField& f);
double l2_norm(const Mesh2D& mesh, const ScalarField& f);
double l2_norm(const FeFunction& f);
/// L2 distance between an exact function and a discrete field.
double l2_error(const Mesh2D& mesh, const ScalarField& exact, const ElementField& approx);

/// Observed orders log(e_k / e_{k+1}) / log(ratio).
std::vector<double> eoc(std::span<const double> errors, double ratio = 2.0);

/// Legacy ASCII VTK unstructured grid with point data.
void write_vtk(std::ostream& out, const Mesh2D& mesh,
               const std::vector<std::pair<std::string, Eigen::VectorXd>>& point_data);

/// CSV with columns vertex,x,y,value.
void write_vertex_csv(std::ostream& out, const Mesh2D& mesh, const Eigen::VectorXd& values);

} // namespace hsoc
