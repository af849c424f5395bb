#include "hsoc/optimizer.hpp"

#include "hsoc/errors.hpp"
#include "hsoc/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace hsoc {
namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void append_block(Triplets& trip, const SparseMatrix& m, Eigen::Index row0, Eigen::Index col0,
                  double scale) {
  for (Eigen::Index col = 0; col < m.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(m, col); it; ++it)
      trip.emplace_back(row0 + it.row(), col0 + col, scale * it.value());
}

} // namespace

double project_box(double v, double a, double b) {
  if (!(a < b)) throw InvalidArgument("box projection needs a < b");
  return std::clamp(v, a, b);
}

void ControlProblem::validate() const {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw InvalidArgument("nu must be a positive number");
  if (!(lower < upper)) throw InvalidArgument("control bounds need a < b");
}

ProjectedControl::ProjectedControl(const FeFunction& adjoint, double nu, double lower, double upper)
    : adjoint_(adjoint), nu_(nu), lower_(lower), upper_(upper) {}

double ProjectedControl::evaluate(int triangle, const std::array<double, 3>& bary) const {
  return std::clamp(-adjoint_.evaluate(triangle, bary) / nu_, lower_, upper_);
}

double ProjectedControl::evaluate(const Vec2& x, int* hint) const {
  const auto loc = adjoint_.mesh().locate(x, hint ? *hint : -1);
  if (!loc) throw LocateError("point outside the mesh");
  if (hint) *hint = loc->triangle;
  return evaluate(loc->triangle, loc->bary);
}

ElementField ProjectedControl::as_field() const {
  return [self = *this](int t, const std::array<double, 3>& b, const Vec2&) {
    return self.evaluate(t, b);
  };
}

ControlSystem::ControlSystem(const Mesh2D& mesh, const ControlProblem& problem, SolverKind solver)
    : mesh_(&mesh), problem_(&problem), solver_kind_(solver) {
  problem.validate();
  if (problem.fidelity.G.size() != static_cast<Eigen::Index>(mesh.num_vertices()))
    throw InvalidArgument("fidelity term was assembled on a different mesh");
  op_ = assemble_operator(mesh, problem.coeffs);
  fid_matrix_ = restrict_to_interior(mesh, problem.fidelity.M);
  fid_vector_.resize(static_cast<Eigen::Index>(mesh.num_interior()));
  for (std::size_t k = 0; k < mesh.num_interior(); ++k)
    fid_vector_[static_cast<Eigen::Index>(k)] = problem.fidelity.G[mesh.interior_vertices()[k]];
  state_solver_ = make_spd_solver(op_, solver);
  laplace_ = assemble_operator(mesh, EllipticCoefficients::laplace());
  laplace_solver_ = make_spd_solver(laplace_, solver);
}

Eigen::VectorXd ControlSystem::control_rhs(const ElementField& control) const {
  return load_vector(*mesh_, control, kControlQuadratureOrder);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> ControlSystem::residual(const FeFunction& y,
                                                                   const FeFunction& p) const {
  const ProjectedControl u(p, problem_->nu, problem_->lower, problem_->upper);
  const Eigen::VectorXd yi = y.interior(), pi = p.interior();
  Eigen::VectorXd first = op_ * yi - control_rhs(u.as_field());
  Eigen::VectorXd second = op_.transpose() * pi - (fid_matrix_ * yi - fid_vector_);
  return {std::move(first), std::move(second)};
}

double ControlSystem::block_norm(const Eigen::VectorXd& block, StoppingNorm norm) const {
  if (norm == StoppingNorm::Euclidean) return block.norm();
  const Eigen::VectorXd w = laplace_solver_->solve(block);
  return std::sqrt(std::max(0.0, block.dot(w)));
}

FeFunction ControlSystem::state(const ElementField& control) const {
  return FeFunction(*mesh_, state_solver_->solve(control_rhs(control)));
}

FeFunction ControlSystem::adjoint(const FeFunction& y) const {
  return FeFunction(*mesh_, state_solver_->solve(fid_matrix_ * y.interior() - fid_vector_));
}

double control_inner(const Mesh2D& mesh, const ElementField& f, const ElementField& g) {
  const auto rule = triangle_rule(kControlQuadratureOrder);
  double sum = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
    const auto c = mesh.corners(t);
    const double area = mesh.area(t);
    for (const auto& q : rule) {
      const Vec2 x = q.bary[0] * c[0] + q.bary[1] * c[1] + q.bary[2] * c[2];
      sum += q.weight * area * f(t, q.bary, x) * g(t, q.bary, x);
    }
  }
  return sum;
}

double ControlSystem::objective(const ElementField& control) const {
  const FeFunction y = state(control);
  return fidelity_value(problem_->fidelity, y) +
         0.5 * problem_->nu * control_inner(*mesh_, control, control);
}

double ControlSystem::gradient_residual(const ElementField& control,
                                        const ElementField& direction) const {
  const FeFunction p = adjoint(state(control));
  const double nu = problem_->nu;
  return control_inner(
      *mesh_,
      [&](int t, const std::array<double, 3>& b, const Vec2& x) {
        return p.evaluate(t, b) + nu * control(t, b, x);
      },
      direction);
}

SolveResult ControlSystem::semismooth_newton(const NewtonOptions& options) const {
  const Mesh2D& mesh = *mesh_;
  const auto n = static_cast<Eigen::Index>(mesh.num_interior());
  const double nu = problem_->nu, a = problem_->lower, b = problem_->upper;
  const auto rule = triangle_rule(kControlQuadratureOrder);

  FeFunction y(mesh), p(mesh);
  auto residual_norm = [&](const std::pair<Eigen::VectorXd, Eigen::VectorXd>& r) {
    return std::hypot(block_norm(r.first, options.norm), block_norm(r.second, options.norm));
  };
  auto r = residual(y, p);
  std::vector<double> history{residual_norm(r)};
  int iterations = 0;

  while (history.back() > options.tol) {
    if (iterations >= options.max_iter)
      throw NonconvergenceError("semismooth Newton did not reach tolerance in " +
                                    std::to_string(options.max_iter) + " iterations",
                                history);
    // Inactive-set indicator at quadrature points; max'(0, 0) = 1 counts as active.
    const SparseMatrix inactive_mass = assemble_weighted_mass(mesh, kControlQuadratureOrder, [&](int t, int q) {
      const double v = -p.evaluate(t, rule[q].bary) / nu;
      return (a < v && v < b) ? 1.0 : 0.0;
    });
    Triplets trip;
    trip.reserve(static_cast<std::size_t>(2 * op_.nonZeros() + inactive_mass.nonZeros() +
                                          fid_matrix_.nonZeros()));
    append_block(trip, op_, 0, 0, 1.0);
    append_block(trip, inactive_mass, 0, n, 1.0 / nu);
    append_block(trip, fid_matrix_, n, 0, -1.0);
    append_block(trip, op_, n, n, 1.0);
    SparseMatrix jacobian(2 * n, 2 * n);
    jacobian.setFromTriplets(trip.begin(), trip.end());

    Eigen::VectorXd rhs(2 * n);
    rhs << -r.first, -r.second;
    const Eigen::VectorXd step = make_general_solver(jacobian, solver_kind_)->solve(rhs);

    y = FeFunction(mesh, y.interior() + step.head(n));
    p = FeFunction(mesh, p.interior() + step.tail(n));
    ++iterations;
    r = residual(y, p);
    history.push_back(residual_norm(r));
  }

  SolveResult result{y, p, ProjectedControl(p, nu, a, b), iterations, std::move(history), {}, {}};
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const double value = -p.coefficients()[static_cast<Eigen::Index>(v)] / nu;
    if (mesh.is_boundary(static_cast<int>(v))) continue;
    if (value <= a) result.active_lower.push_back(static_cast<int>(v));
    if (value >= b) result.active_upper.push_back(static_cast<int>(v));
  }
  return result;
}

SolveResult semismooth_newton(const ControlProblem& problem, const Mesh2D& mesh,
                              const NewtonOptions& options) {
  return ControlSystem(mesh, problem, options.solver).semismooth_newton(options);
}

} // namespace hsoc
