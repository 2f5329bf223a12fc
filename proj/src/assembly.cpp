#include "wgstokes/assembly.hpp"

#include <numeric>
#include <ostream>
#include <sstream>
#include <vector>

namespace wgs {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void scatter(Triplets& out, const Eigen::MatrixXd& local, const std::vector<int>& rows,
             const std::vector<int>& cols) {
  for (Eigen::Index i = 0; i < local.rows(); ++i) {
    const int r = rows[static_cast<std::size_t>(i)];
    if (r < 0) continue;
    for (Eigen::Index j = 0; j < local.cols(); ++j) {
      const int c = cols[static_cast<std::size_t>(j)];
      if (c < 0 || local(i, j) == 0.0) continue;
      out.emplace_back(r, c, local(i, j));
    }
  }
}

SparseMatrix from_triplets(Eigen::Index rows, Eigen::Index cols, const Triplets& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

// Explicit symmetrization removes rounding asymmetry from the local products.
Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

double gamma_mesh_size(const Mesh& mesh) { return mesh.h_max; }

AssembledSystem assemble(const WgSpace& space, const GammaSchedule& gamma, const Stabilizer& stab,
                         std::span<const int> cell_order) {
  const Mesh& mesh = space.mesh();
  AssembledSystem sys{space, gamma, stab, gamma(gamma_mesh_size(mesh)), {}, {}, {}, {}};

  std::vector<int> order;
  if (cell_order.empty()) {
    order.resize(mesh.cells.size());
    std::iota(order.begin(), order.end(), 0);
  } else {
    order.assign(cell_order.begin(), cell_order.end());
  }

  Triplets ta, tm, tb, ts;
  const int nv = space.num_velocity();
  for (const int c : order) {
    const Cell& cell = mesh.cells[static_cast<std::size_t>(c)];
    const LocalElement el = build_local_element(mesh, cell, space.k());
    const std::vector<int> vdofs = space.local_velocity_dofs(c);
    const std::vector<int> pdofs = space.local_pressure_dofs(c);

    const Eigen::MatrixXd stab_local = symmetrized(el.edge_penalty(stabilizer_weights(el, stab, sys.gamma)));
    const Eigen::MatrixXd a_local = symmetrized(el.gradient_stiffness()) + stab_local;
    scatter(ta, a_local, vdofs, vdofs);
    scatter(ts, stab_local, vdofs, vdofs);

    Eigen::MatrixXd m_local = Eigen::MatrixXd::Zero(space.local_size(), space.local_size());
    m_local.topLeftCorner(el.mass.rows(), el.mass.cols()) = symmetrized(el.mass);
    scatter(tm, m_local, vdofs, vdofs);
    scatter(tb, el.div_rhs, pdofs, vdofs);
  }
  sys.A = from_triplets(nv, nv, ta);
  sys.M = from_triplets(nv, nv, tm);
  sys.B = from_triplets(space.num_pressure(), nv, tb);
  sys.S = from_triplets(nv, nv, ts);
  return sys;
}

WeakFunction project_Qh(const WgSpace& space, const VectorField& u) {
  WeakFunction w = WeakFunction::zero(space);
  const Mesh& mesh = space.mesh();
  for (const auto& cell : mesh.cells) {
    const Eigen::VectorXd local = project_local(mesh, cell, space.k(), u);
    const std::vector<int> dofs = space.local_velocity_dofs(cell.id);
    // Edge projections are single-valued, so writing them from either side agrees.
    for (std::size_t i = 0; i < dofs.size(); ++i)
      if (dofs[i] >= 0) w.velocity[dofs[i]] = local[static_cast<Eigen::Index>(i)];
  }
  return w;
}

Eigen::VectorXd project_pressure(const WgSpace& space, const ScalarField& p) {
  Eigen::VectorXd out(space.num_pressure());
  const int np = space.pressure_dofs_per_cell();
  for (const auto& cell : space.mesh().cells)
    out.segment(space.pressure_offset(cell.id), np) = project_scalar(space.mesh(), cell, space.k() - 1, p);
  return out;
}

Eigen::VectorXd gather_local(const WgSpace& space, const Eigen::VectorXd& velocity, int cell) {
  const std::vector<int> dofs = space.local_velocity_dofs(cell);
  Eigen::VectorXd local(static_cast<Eigen::Index>(dofs.size()));
  for (std::size_t i = 0; i < dofs.size(); ++i)
    local[static_cast<Eigen::Index>(i)] = dofs[i] < 0 ? 0.0 : velocity[dofs[i]];
  return local;
}

double stabilizer_energy(const WeakFunction& v, const AssembledSystem& system) {
  return v.velocity.dot(system.S * v.velocity);
}

SparseMatrix v_norm_matrix(const WgSpace& space) {
  const Mesh& mesh = space.mesh();
  const int k = space.k();
  const int nk = space.cell_scalar_dim();
  const auto rule = cell_quadrature(2 * k);
  Triplets t;
  for (const auto& cell : mesh.cells) {
    const LocalElement el = build_local_element(mesh, cell, k);
    const CellBasis basis(k, cell);
    Eigen::MatrixXd stiff = Eigen::MatrixXd::Zero(nk, nk);
    for (const auto& qp : map_to_cell(rule, mesh, cell)) {
      const Eigen::MatrixX2d g = basis.gradients(qp.x);
      stiff.noalias() += qp.w * g * g.transpose();
    }
    const double w = 1.0 / el.diameter;
    Eigen::MatrixXd local = el.edge_penalty({w, w, w});
    local.block(0, 0, nk, nk) += stiff;
    local.block(nk, nk, nk, nk) += stiff;
    const std::vector<int> dofs = space.local_velocity_dofs(cell.id);
    scatter(t, symmetrized(local), dofs, dofs);
  }
  return from_triplets(space.num_velocity(), space.num_velocity(), t);
}

double v_norm(const WeakFunction& v, const WgSpace& space) {
  const double sq = v.velocity.dot(v_norm_matrix(space) * v.velocity);
  return std::sqrt(std::max(0.0, sq));
}

Vec2 evaluate_interior(const WgSpace& space, const Eigen::VectorXd& velocity, int cell, const Vec2& x) {
  const Cell& c = space.mesh().cells[static_cast<std::size_t>(cell)];
  const CellBasis basis(space.k(), c);
  const Eigen::VectorXd phi = basis.values(x);
  const int nk = basis.size();
  const int off = space.interior_offset(cell);
  return {phi.dot(velocity.segment(off, nk)), phi.dot(velocity.segment(off + nk, nk))};
}

double evaluate_pressure(const WgSpace& space, const Eigen::VectorXd& pressure, int cell, const Vec2& x) {
  const Cell& c = space.mesh().cells[static_cast<std::size_t>(cell)];
  const CellBasis basis(space.k() - 1, c);
  return basis.values(x).dot(pressure.segment(space.pressure_offset(cell), basis.size()));
}

double pressure_integral(const WgSpace& space, const Eigen::VectorXd& pressure) {
  const Mesh& mesh = space.mesh();
  const auto rule = cell_quadrature(std::max(0, space.k() - 1));
  double total = 0.0;
  for (const auto& cell : mesh.cells)
    for (const auto& qp : map_to_cell(rule, mesh, cell))
      total += qp.w * evaluate_pressure(space, pressure, cell.id, qp.x);
  return total;
}

void remove_pressure_mean(const WgSpace& space, Eigen::VectorXd& pressure) {
  const double mean = pressure_integral(space, pressure) / space.mesh().total_area();
  // The first scaled monomial of every cell is the constant 1.
  for (const auto& cell : space.mesh().cells) pressure[space.pressure_offset(cell.id)] -= mean;
}

void write_triplets(std::ostream& out, const SparseMatrix& m) {
  std::ostringstream buf;
  buf.precision(17);
  for (int col = 0; col < m.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(m, col); it; ++it)
      buf << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
  out << buf.str();
}

}  // namespace wgs
