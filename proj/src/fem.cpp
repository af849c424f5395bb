#include "hsoc/fem.hpp"

#include "hsoc/errors.hpp"
#include "hsoc/quadrature.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

namespace hsoc {
namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

std::array<Vec2, 3> bary_gradients(const std::array<Vec2, 3>& c, double twice_area) {
  return {rotate90(c[2] - c[1]) / twice_area, rotate90(c[0] - c[2]) / twice_area,
          rotate90(c[1] - c[0]) / twice_area};
}

} // namespace

EllipticCoefficients EllipticCoefficients::laplace() {
  return constant_coefficients(1.0, 0.0, 1.0, 0.0);
}

EllipticCoefficients EllipticCoefficients::constant_coefficients(double a11, double a12, double a22,
                                                                 double a0) {
  EllipticCoefficients c;
  c.a11 = [a11](const Vec2&) { return a11; };
  c.a12 = [a12](const Vec2&) { return a12; };
  c.a22 = [a22](const Vec2&) { return a22; };
  c.a0 = [a0](const Vec2&) { return a0; };
  c.constant = true;
  return c;
}

void EllipticCoefficients::validate(double alpha_check, int samples, unsigned seed) const {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < samples; ++k) {
    const Vec2 x(unit(rng), unit(rng));
    const double k11 = a11(x), k12 = a12(x), k22 = a22(x);
    const double half_trace = 0.5 * (k11 + k22);
    const double radius = std::hypot(0.5 * (k11 - k22), k12);
    if (half_trace - radius < alpha_check)
      throw ValidationError("diffusion coefficient is not uniformly elliptic");
    if (a0(x) < 0.0) throw ValidationError("reaction coefficient a0 is negative");
  }
}

FeFunction::FeFunction(const Mesh2D& mesh)
    : mesh_(&mesh), coeffs_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_vertices()))) {}

FeFunction::FeFunction(const Mesh2D& mesh, const Eigen::VectorXd& interior) : FeFunction(mesh) {
  if (interior.size() != static_cast<Eigen::Index>(mesh.num_interior()))
    throw InvalidArgument("interior vector length does not match the mesh");
  const auto& iv = mesh.interior_vertices();
  for (std::size_t k = 0; k < iv.size(); ++k) coeffs_[iv[k]] = interior[static_cast<Eigen::Index>(k)];
}

Eigen::VectorXd FeFunction::interior() const {
  const auto& iv = mesh_->interior_vertices();
  Eigen::VectorXd out(static_cast<Eigen::Index>(iv.size()));
  for (std::size_t k = 0; k < iv.size(); ++k) out[static_cast<Eigen::Index>(k)] = coeffs_[iv[k]];
  return out;
}

double FeFunction::evaluate(int triangle, const std::array<double, 3>& bary) const {
  const auto& tri = mesh_->triangles()[triangle];
  return bary[0] * coeffs_[tri[0]] + bary[1] * coeffs_[tri[1]] + bary[2] * coeffs_[tri[2]];
}

double FeFunction::evaluate(const Vec2& x) const {
  const auto loc = mesh_->locate(x);
  if (!loc) throw LocateError("point outside the mesh");
  return evaluate(loc->triangle, loc->bary);
}

ElementField FeFunction::as_field() const {
  return [this](int t, const std::array<double, 3>& b, const Vec2&) { return evaluate(t, b); };
}

Eigen::VectorXd interpolate_nodal(const Mesh2D& mesh, const ScalarField& f) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(mesh.num_vertices()));
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) out[static_cast<Eigen::Index>(v)] = f(mesh.vertices()[v]);
  return out;
}

ElementField nodal_field(const Mesh2D& mesh, const Eigen::VectorXd& values) {
  return [&mesh, values](int t, const std::array<double, 3>& b, const Vec2&) {
    const auto& tri = mesh.triangles()[t];
    return b[0] * values[tri[0]] + b[1] * values[tri[1]] + b[2] * values[tri[2]];
  };
}

Eigen::Matrix3d local_stiffness(const std::array<Vec2, 3>& c, const EllipticCoefficients& coeffs) {
  const double twice_area = cross(c[1] - c[0], c[2] - c[0]);
  const double area = 0.5 * twice_area;
  const auto grad = bary_gradients(c, twice_area);
  Eigen::Matrix3d local = Eigen::Matrix3d::Zero();
  auto add_point = [&](const Vec2& x, const std::array<double, 3>& lam, double weight) {
    Eigen::Matrix2d k;
    k << coeffs.a11(x), coeffs.a12(x), coeffs.a12(x), coeffs.a22(x);
    const double a0 = coeffs.a0(x);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        local(i, j) += weight * (grad[i].dot(k * grad[j]) + a0 * lam[i] * lam[j]);
  };
  if (coeffs.constant) {
    const Vec2 centroid = (c[0] + c[1] + c[2]) / 3.0;
    Eigen::Matrix2d k;
    k << coeffs.a11(centroid), coeffs.a12(centroid), coeffs.a12(centroid), coeffs.a22(centroid);
    const double a0 = coeffs.a0(centroid);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        local(i, j) = area * grad[i].dot(k * grad[j]) + a0 * area / 12.0 * (i == j ? 2.0 : 1.0);
    return local;
  }
  for (const auto& q : triangle_rule(2)) {
    const Vec2 x = q.bary[0] * c[0] + q.bary[1] * c[1] + q.bary[2] * c[2];
    add_point(x, q.bary, q.weight * area);
  }
  return local;
}

SparseMatrix assemble_stiffness_full(const Mesh2D& mesh, const EllipticCoefficients& coeffs) {
  const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
  Triplets trip;
  trip.reserve(9 * mesh.num_triangles());
  for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
    const auto& tri = mesh.triangles()[t];
    const Eigen::Matrix3d local = local_stiffness(mesh.corners(t), coeffs);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trip.emplace_back(tri[i], tri[j], local(i, j));
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SparseMatrix restrict_to_interior(const Mesh2D& mesh, const SparseMatrix& full) {
  const auto n = static_cast<Eigen::Index>(mesh.num_interior());
  Triplets trip;
  trip.reserve(static_cast<std::size_t>(full.nonZeros()));
  for (Eigen::Index col = 0; col < full.outerSize(); ++col) {
    const int dc = mesh.dof(static_cast<int>(col));
    if (dc < 0) continue;
    for (SparseMatrix::InnerIterator it(full, col); it; ++it) {
      const int dr = mesh.dof(static_cast<int>(it.row()));
      if (dr >= 0) trip.emplace_back(dr, dc, it.value());
    }
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SparseMatrix assemble_operator(const Mesh2D& mesh, const EllipticCoefficients& coeffs) {
  if (!coeffs.constant) {
    for (const auto& x : mesh.vertices())
      if (coeffs.a0(x) < 0.0) throw ValidationError("reaction coefficient a0 is negative");
  } else if (coeffs.a0(Vec2(0.5, 0.5)) < 0.0) {
    throw ValidationError("reaction coefficient a0 is negative");
  }
  return restrict_to_interior(mesh, assemble_stiffness_full(mesh, coeffs));
}

SparseMatrix assemble_mass(const Mesh2D& mesh) {
  const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
  Triplets trip;
  trip.reserve(9 * mesh.num_triangles());
  for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
    const auto& tri = mesh.triangles()[t];
    const double a12 = mesh.area(t) / 12.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trip.emplace_back(tri[i], tri[j], (i == j ? 2.0 : 1.0) * a12);
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SparseMatrix assemble_weighted_mass(const Mesh2D& mesh, int order,
                                    const std::function<double(int, int)>& weight) {
  const auto rule = triangle_rule(order);
  const auto n = static_cast<Eigen::Index>(mesh.num_interior());
  Triplets trip;
  trip.reserve(9 * mesh.num_triangles());
  for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
    const auto& tri = mesh.triangles()[t];
    const double area = mesh.area(t);
    Eigen::Matrix3d local = Eigen::Matrix3d::Zero();
    bool any = false;
    for (int q = 0; q < static_cast<int>(rule.size()); ++q) {
      const double c = weight(t, q);
      if (c == 0.0) continue;
      any = true;
      const auto& b = rule[q].bary;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) local(i, j) += rule[q].weight * area * c * b[i] * b[j];
    }
    if (!any) continue;
    for (int i = 0; i < 3; ++i) {
      const int di = mesh.dof(tri[i]);
      if (di < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int dj = mesh.dof(tri[j]);
        if (dj >= 0) trip.emplace_back(di, dj, local(i, j));
      }
    }
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

Eigen::VectorXd load_vector(const Mesh2D& mesh, const ElementField& f, int order) {
  const auto rule = triangle_rule(order);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_interior()));
  for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
    const auto& tri = mesh.triangles()[t];
    const auto c = mesh.corners(t);
    const double area = mesh.area(t);
    for (const auto& q : rule) {
      const Vec2 x = q.bary[0] * c[0] + q.bary[1] * c[1] + q.bary[2] * c[2];
      const double fx = q.weight * area * f(t, q.bary, x);
      for (int i = 0; i < 3; ++i) {
        const int d = mesh.dof(tri[i]);
        if (d >= 0) b[d] += fx * q.bary[i];
      }
    }
  }
  return b;
}

Eigen::VectorXd point_load_vector(const Mesh2D& mesh, std::span<const PointSource> sources) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_interior()));
  int hint = -1;
  for (const auto& src : sources) {
    const auto loc = mesh.locate(src.position, hint);
    if (!loc) throw LocateError("point source outside the mesh");
    hint = loc->triangle;
    const auto& tri = mesh.triangles()[loc->triangle];
    for (int i = 0; i < 3; ++i) {
      const int d = mesh.dof(tri[i]);
      if (d >= 0) b[d] += src.weight * loc->bary[i];
    }
  }
  return b;
}

StateSolver::StateSolver(const Mesh2D& mesh, const EllipticCoefficients& coeffs, SolverKind kind)
    : mesh_(&mesh),
      operator_(assemble_operator(mesh, coeffs)),
      mass_interior_(restrict_to_interior(mesh, assemble_mass(mesh))),
      solver_(make_spd_solver(operator_, kind)) {}

Eigen::VectorXd StateSolver::rhs(const Source& source) const {
  struct Visitor {
    const StateSolver& self;
    Eigen::VectorXd operator()(const ScalarField& f) const {
      return load_vector(*self.mesh_, [&f](int, const std::array<double, 3>&, const Vec2& x) { return f(x); });
    }
    Eigen::VectorXd operator()(const FeFunction& f) const {
      if (&f.mesh() != self.mesh_) throw InvalidArgument("source lives on a different mesh");
      return self.mass_interior_ * f.interior();
    }
    Eigen::VectorXd operator()(const std::vector<PointSource>& pts) const {
      return point_load_vector(*self.mesh_, pts);
    }
  };
  return std::visit(Visitor{*this}, source);
}

FeFunction StateSolver::solve_rhs(const Eigen::VectorXd& rhs) const {
  return FeFunction(*mesh_, solver_->solve(rhs));
}

FeFunction StateSolver::solve(const Source& source) const { return solve_rhs(rhs(source)); }

FeFunction solve_state(const Mesh2D& mesh, const EllipticCoefficients& coeffs, const Source& source,
                       SolverKind kind) {
  return StateSolver(mesh, coeffs, kind).solve(source);
}

double l2_norm(const Mesh2D& mesh, const ElementField& f) {
  const auto rule = triangle_rule(6);
  double sum = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
    const auto c = mesh.corners(t);
    const double area = mesh.area(t);
    for (const auto& q : rule) {
      const Vec2 x = q.bary[0] * c[0] + q.bary[1] * c[1] + q.bary[2] * c[2];
      const double v = f(t, q.bary, x);
      sum += q.weight * area * v * v;
    }
  }
  return std::sqrt(sum);
}

double l2_norm(const Mesh2D& mesh, const ScalarField& f) {
  return l2_norm(mesh, [&f](int, const std::array<double, 3>&, const Vec2& x) { return f(x); });
}

double l2_norm(const FeFunction& f) { return l2_norm(f.mesh(), f.as_field()); }

double l2_error(const Mesh2D& mesh, const ScalarField& exact, const ElementField& approx) {
  return l2_norm(mesh, [&](int t, const std::array<double, 3>& b, const Vec2& x) {
    return exact(x) - approx(t, b, x);
  });
}

std::vector<double> eoc(std::span<const double> errors, double ratio) {
  if (errors.size() < 2) throw InvalidArgument("eoc needs at least two errors");
  if (!(ratio > 1.0)) throw InvalidArgument("eoc ratio must exceed 1");
  for (double e : errors)
    if (!(e > 0.0)) throw InvalidArgument("eoc needs positive errors");
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < errors.size(); ++k)
    out.push_back(std::log(errors[k] / errors[k + 1]) / std::log(ratio));
  return out;
}

void write_vtk(std::ostream& out, const Mesh2D& mesh,
               const std::vector<std::pair<std::string, Eigen::VectorXd>>& point_data) {
  char buf[128];
  out << "# vtk DataFile Version 3.0\nhsoc\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const auto& p : mesh.vertices()) {
    std::snprintf(buf, sizeof buf, "%.9g %.9g 0\n", p.x(), p.y());
    out << buf;
  }
  out << "CELLS " << mesh.num_triangles() << ' ' << 4 * mesh.num_triangles() << '\n';
  for (const auto& tri : mesh.triangles()) out << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  out << "CELL_TYPES " << mesh.num_triangles() << '\n';
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) out << "5\n";
  out << "POINT_DATA " << mesh.num_vertices() << '\n';
  for (const auto& [name, values] : point_data) {
    if (values.size() != static_cast<Eigen::Index>(mesh.num_vertices()))
      throw InvalidArgument("point data '" + name + "' has the wrong length");
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (Eigen::Index v = 0; v < values.size(); ++v) {
      std::snprintf(buf, sizeof buf, "%.9g\n", values[v]);
      out << buf;
    }
  }
}

void write_vertex_csv(std::ostream& out, const Mesh2D& mesh, const Eigen::VectorXd& values) {
  char buf[160];
  out << "vertex,x,y,value\n";
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const Vec2& p = mesh.vertices()[v];
    std::snprintf(buf, sizeof buf, "%zu,%.9g,%.9g,%.9g\n", v, p.x(), p.y(),
                  values[static_cast<Eigen::Index>(v)]);
    out << buf;
  }
}

} // namespace hsoc
