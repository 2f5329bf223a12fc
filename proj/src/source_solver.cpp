#include "wgstokes/source_solver.hpp"

#include <algorithm>
#include <cmath>

#include "wgstokes/eigensolver.hpp"

namespace wgs {

namespace {

// psi = X(x) Y(y) with X(t) = t^2 (1-t)^2.
double q0(double t) { return t * t * (1.0 - t) * (1.0 - t); }
double q1(double t) { return 2.0 * t * (1.0 - t) * (1.0 - 2.0 * t); }
double q2(double t) { return 2.0 * (1.0 - 6.0 * t + 6.0 * t * t); }
double q3(double t) { return 12.0 * (2.0 * t - 1.0); }

// Calls fn(le, qp, v0 - vb) over all edge quadrature points of a cell.
template <class Fn>
void for_each_edge_jump(const WgSpace& space, const Eigen::VectorXd& v, const Cell& cell, Fn&& fn) {
  const Mesh& mesh = space.mesh();
  const int k = space.k();
  const int nk = space.cell_scalar_dim();
  const int ne = space.edge_scalar_dim();
  const CellBasis basis(k, cell);
  const Eigen::VectorXd local = gather_local(space, v, cell.id);
  const auto rule = edge_quadrature(2 * data_quadrature_degree(k));
  for (int le = 0; le < 3; ++le) {
    const Edge& e = mesh.edges[static_cast<std::size_t>(cell.edges[le])];
    const Vec2 a = mesh.point(e.vertices[0]), b = mesh.point(e.vertices[1]);
    const EdgeBasis ebasis(k - 1, a, b);
    const int eoff = 2 * nk + le * 2 * ne;
    for (const auto& qp : map_to_segment(rule, a, b)) {
      const Eigen::VectorXd psi = basis.values(qp.x);
      const Eigen::VectorXd chi = ebasis.values(qp.x);
      const Vec2 v0(psi.dot(local.segment(0, nk)), psi.dot(local.segment(nk, nk)));
      const Vec2 vb(chi.dot(local.segment(eoff, ne)), chi.dot(local.segment(eoff + ne, ne)));
      fn(le, qp, Vec2(v0 - vb));
    }
  }
}

}  // namespace

ManufacturedCase ManufacturedCase::stream_function() {
  ManufacturedCase c;
  c.name = "stream-function";
  c.u = [](const Vec2& x) { return Vec2(q0(x.x()) * q1(x.y()), -q1(x.x()) * q0(x.y())); };
  c.grad_u = [](const Vec2& x) {
    Eigen::Matrix2d g;
    g << q1(x.x()) * q1(x.y()), q0(x.x()) * q2(x.y()), -q2(x.x()) * q0(x.y()), -q1(x.x()) * q1(x.y());
    return g;
  };
  c.p = [](const Vec2& x) { return x.x() * x.y() - 0.25; };
  c.f = [](const Vec2& x) {
    const double s = x.x(), t = x.y();
    const double lap1 = q2(s) * q1(t) + q0(s) * q3(t);
    const double lap2 = -q3(s) * q0(t) - q1(s) * q2(t);
    return Vec2(-lap1 + t, -lap2 + s);
  };
  return c;
}

Eigen::VectorXd load_vector(const WgSpace& space, const VectorField& f) {
  const Mesh& mesh = space.mesh();
  const int nk = space.cell_scalar_dim();
  const auto rule = cell_quadrature(data_quadrature_degree(space.k()));
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.num_velocity());
  for (const auto& cell : mesh.cells) {
    const CellBasis basis(space.k(), cell);
    const int off = space.interior_offset(cell.id);
    for (const auto& qp : map_to_cell(rule, mesh, cell)) {
      const Eigen::VectorXd psi = basis.values(qp.x);
      const Vec2 val = f(qp.x);
      out.segment(off, nk) += qp.w * val.x() * psi;
      out.segment(off + nk, nk) += qp.w * val.y() * psi;
    }
  }
  return out;
}

SourceSolution solve_source(const AssembledSystem& system, const ManufacturedCase& mcase) {
  const WgSpace& space = system.space;
  const Eigen::VectorXd rhs = load_vector(space, mcase.f);
  const SaddleSolver saddle(system);

  // The solver works with +B^T; the pressure of the source problem is its negative.
  SourceSolution out;
  Eigen::VectorXd u, p;
  saddle.solve(rhs, Eigen::VectorXd(), u, p);
  p = -p;

  const double scale = std::max(rhs.norm(), 1e-300);
  const Eigen::VectorXd r1 = system.A * u - system.B.transpose() * p - rhs;
  const Eigen::VectorXd r2 = system.B * u;
  out.residual = rhs.norm() == 0.0 ? std::hypot(r1.norm(), r2.norm())
                                   : std::hypot(r1.norm(), r2.norm()) / scale;

  remove_pressure_mean(space, p);
  out.solution.velocity = std::move(u);
  out.solution.pressure = std::move(p);
  out.errors = error_functionals(space, out.solution, mcase);
  return out;
}

SourceSolution solve_source(const WgSpace& space, const GammaSchedule& gamma, const Stabilizer& stab,
                            const ManufacturedCase& mcase) {
  return solve_source(assemble(space, gamma, stab), mcase);
}

SourceErrors error_functionals(const WgSpace& space, const WeakFunction& uh, const ManufacturedCase& mcase) {
  const Mesh& mesh = space.mesh();
  const int k = space.k();
  SourceErrors err;

  WeakFunction diff = project_Qh(space, mcase.u);
  diff.velocity -= uh.velocity;
  err.e_V = v_norm(diff, space);

  const int n0 = space.num_interior();
  const int nk = space.cell_scalar_dim();
  const int np = space.pressure_dofs_per_cell();
  const Eigen::VectorXd ph = uh.pressure.size() == space.num_pressure()
                                 ? uh.pressure
                                 : Eigen::VectorXd(Eigen::VectorXd::Zero(space.num_pressure()));
  const Eigen::VectorXd dp = project_pressure(space, mcase.p) - ph;
  const Eigen::VectorXd d0 = diff.velocity.head(n0);

  const auto rule = cell_quadrature(2 * k + 2);
  double e0 = 0.0, ep = 0.0;
  for (const auto& cell : mesh.cells) {
    const CellBasis vb(k, cell), pb(k - 1, cell);
    const int off = space.interior_offset(cell.id);
    const int poff = space.pressure_offset(cell.id);
    for (const auto& qp : map_to_cell(rule, mesh, cell)) {
      const Eigen::VectorXd psi = vb.values(qp.x);
      const double ux = psi.dot(d0.segment(off, nk)), uy = psi.dot(d0.segment(off + nk, nk));
      const double pv = pb.values(qp.x).dot(dp.segment(poff, np));
      e0 += qp.w * (ux * ux + uy * uy);
      ep += qp.w * pv * pv;
    }
  }
  err.e_0 = std::sqrt(e0);
  err.e_p = std::sqrt(ep);
  return err;
}

double consistency_functional(const WgSpace& space, const Eigen::VectorXd& v, const TensorField& grad_u) {
  const Mesh& mesh = space.mesh();
  const int nr = space.grad_scalar_dim();
  double total = 0.0;
  for (const auto& cell : mesh.cells) {
    const Eigen::VectorXd proj = project_tensor(mesh, cell, space.k() - 1, grad_u);
    const CellBasis gbasis(space.k() - 1, cell);
    for_each_edge_jump(space, v, cell, [&](int le, const QuadPoint& qp, const Vec2& jump) {
      const Eigen::VectorXd phi = gbasis.values(qp.x);
      Eigen::Matrix2d g = grad_u(qp.x);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) g(i, j) -= phi.dot(proj.segment((2 * i + j) * nr, nr));
      total += qp.w * jump.dot(g * cell.normals[static_cast<std::size_t>(le)]);
    });
  }
  return total;
}

double pressure_functional(const WgSpace& space, const Eigen::VectorXd& v, const ScalarField& p) {
  const Mesh& mesh = space.mesh();
  double total = 0.0;
  for (const auto& cell : mesh.cells) {
    const Eigen::VectorXd proj = project_scalar(mesh, cell, space.k() - 1, p);
    const CellBasis pbasis(space.k() - 1, cell);
    for_each_edge_jump(space, v, cell, [&](int le, const QuadPoint& qp, const Vec2& jump) {
      const double d = p(qp.x) - pbasis.values(qp.x).dot(proj);
      total += qp.w * d * jump.dot(cell.normals[static_cast<std::size_t>(le)]);
    });
  }
  return total;
}

}  // namespace wgs
