#include "wgstokes/local_ops.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Cholesky>

#include "wgstokes/errors.hpp"

namespace wgs {

namespace {

struct EdgeGeometry {
  Vec2 a, b;   // global orientation
  Vec2 normal;  // outward for this cell
  double length;
};

EdgeGeometry local_edge(const Mesh& mesh, const Cell& cell, int le) {
  const Edge& e = mesh.edges[static_cast<std::size_t>(cell.edges[le])];
  return {mesh.point(e.vertices[0]), mesh.point(e.vertices[1]), cell.normals[le], e.length};
}

Eigen::MatrixXd spd_solve(const Eigen::MatrixXd& gram, const Eigen::MatrixXd& rhs) {
  return gram.llt().solve(rhs);
}

}  // namespace

int data_quadrature_degree(int k) { return std::min(kMaxCellQuadratureDegree, 2 * k + 6); }

Eigen::MatrixXd LocalElement::gradient_stiffness() const { return grad_rhs.transpose() * weak_gradient; }

Eigen::MatrixXd LocalElement::edge_penalty(const std::array<double, 3>& weights) const {
  const auto n = jump[0].cols();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (int le = 0; le < 3; ++le)
    s.noalias() += weights[static_cast<std::size_t>(le)] * jump[le].transpose() * edge_gram[le] * jump[le];
  return s;
}

LocalElement build_local_element(const Mesh& mesh, const Cell& cell, int k) {
  if (!(cell.area > 0.0))
    throw AssemblyError("degenerate or inverted cell " + std::to_string(cell.id) +
                        " (area " + std::to_string(cell.area) + ")");
  LocalElement el;
  el.k = k;
  el.area = cell.area;
  el.diameter = cell.diameter;

  const CellBasis vbasis(k, cell);      // P_k for v0
  const CellBasis gbasis(k - 1, cell);  // P_{k-1} for weak operators
  const int nk = vbasis.size();
  const int nr = gbasis.size();
  const int ne = k;  // dim P_{k-1}(e)
  const int off_edge = 2 * nk;
  const int nloc = 2 * nk + 6 * ne;

  const auto cell_rule = cell_quadrature(2 * k + 2);
  const auto edge_rule = edge_quadrature(2 * k + 1);
  const auto cell_pts = map_to_cell(cell_rule, mesh, cell);

  el.mass = Eigen::MatrixXd::Zero(2 * nk, 2 * nk);
  el.div_gram = Eigen::MatrixXd::Zero(nr, nr);
  el.grad_rhs = Eigen::MatrixXd::Zero(4 * nr, nloc);
  el.div_rhs = Eigen::MatrixXd::Zero(nr, nloc);

  for (const auto& qp : cell_pts) {
    const Eigen::VectorXd psi = vbasis.values(qp.x);
    const Eigen::VectorXd phi = gbasis.values(qp.x);
    const Eigen::MatrixX2d dphi = gbasis.gradients(qp.x);
    const Eigen::MatrixXd pp = qp.w * psi * psi.transpose();
    el.mass.topLeftCorner(nk, nk) += pp;
    el.mass.bottomRightCorner(nk, nk) += pp;
    el.div_gram.noalias() += qp.w * phi * phi.transpose();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        // test q = phi_m E_ij, (div q)_i = d_j phi_m
        el.grad_rhs.block(static_cast<Eigen::Index>((2 * i + j) * nr), static_cast<Eigen::Index>(i * nk), nr, nk)
            .noalias() -= qp.w * dphi.col(j) * psi.transpose();
      }
    for (int i = 0; i < 2; ++i)
      el.div_rhs.block(0, static_cast<Eigen::Index>(i * nk), nr, nk).noalias() -=
          qp.w * dphi.col(i) * psi.transpose();
  }

  for (int le = 0; le < 3; ++le) {
    const EdgeGeometry g = local_edge(mesh, cell, le);
    el.edge_lengths[static_cast<std::size_t>(le)] = g.length;
    const EdgeBasis ebasis(k - 1, g.a, g.b);
    const int eoff = off_edge + le * 2 * ne;
    Eigen::MatrixXd egram = Eigen::MatrixXd::Zero(ne, ne);
    Eigen::MatrixXd trace = Eigen::MatrixXd::Zero(ne, nk);  // int_e psi^e_b psi_a
    for (const auto& qp : map_to_segment(edge_rule, g.a, g.b)) {
      const Eigen::VectorXd chi = ebasis.values(qp.x);
      const Eigen::VectorXd phi = gbasis.values(qp.x);
      const Eigen::VectorXd psi = vbasis.values(qp.x);
      egram.noalias() += qp.w * chi * chi.transpose();
      trace.noalias() += qp.w * chi * psi.transpose();
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j)
          el.grad_rhs.block(static_cast<Eigen::Index>((2 * i + j) * nr), eoff + i * ne, nr, ne).noalias() +=
              qp.w * g.normal[j] * phi * chi.transpose();
        el.div_rhs.block(0, eoff + i * ne, nr, ne).noalias() += qp.w * g.normal[i] * phi * chi.transpose();
      }
    }
    const Eigen::MatrixXd proj = spd_solve(egram, trace);  // Q_b of the v0 trace
    el.edge_gram[le] = Eigen::MatrixXd::Zero(2 * ne, 2 * ne);
    el.jump[le] = Eigen::MatrixXd::Zero(2 * ne, nloc);
    for (int i = 0; i < 2; ++i) {
      el.edge_gram[le].block(i * ne, i * ne, ne, ne) = egram;
      el.jump[le].block(i * ne, i * nk, ne, nk) = proj;
      el.jump[le].block(i * ne, eoff + i * ne, ne, ne) = -Eigen::MatrixXd::Identity(ne, ne);
    }
  }

  el.grad_gram = Eigen::MatrixXd::Zero(4 * nr, 4 * nr);
  for (int c = 0; c < 4; ++c) el.grad_gram.block(c * nr, c * nr, nr, nr) = el.div_gram;
  el.weak_gradient = Eigen::MatrixXd::Zero(4 * nr, nloc);
  const Eigen::LLT<Eigen::MatrixXd> gram_llt(el.div_gram);
  for (int c = 0; c < 4; ++c)
    el.weak_gradient.middleRows(c * nr, nr) = gram_llt.solve(el.grad_rhs.middleRows(c * nr, nr));
  el.weak_divergence = gram_llt.solve(el.div_rhs);
  return el;
}

Eigen::MatrixXd weak_gradient_local(const Mesh& mesh, const Cell& cell, const WgSpace& space) {
  return build_local_element(mesh, cell, space.k()).weak_gradient;
}

Eigen::MatrixXd weak_divergence_local(const Mesh& mesh, const Cell& cell, const WgSpace& space) {
  return build_local_element(mesh, cell, space.k()).weak_divergence;
}

std::array<double, 3> stabilizer_weights(const LocalElement& el, const Stabilizer& stab, double gamma) {
  std::array<double, 3> w{};
  for (std::size_t le = 0; le < 3; ++le) {
    if (stab.variant == Stabilizer::Variant::Standard) {
      w[le] = gamma / el.diameter;
    } else {
      constexpr double n_dim = 2.0;
      w[le] = stab.alpha / (n_dim + 1.0) * el.area / (el.diameter * el.diameter * el.edge_lengths[le]);
    }
  }
  return w;
}

Eigen::VectorXd project_scalar(const Mesh& mesh, const Cell& cell, int r, const ScalarField& f) {
  const CellBasis basis(r, cell);
  const auto rule = cell_quadrature(data_quadrature_degree(std::max(r, 1)));
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(basis.size(), basis.size());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(basis.size());
  for (const auto& qp : map_to_cell(rule, mesh, cell)) {
    const Eigen::VectorXd v = basis.values(qp.x);
    gram.noalias() += qp.w * v * v.transpose();
    rhs.noalias() += qp.w * f(qp.x) * v;
  }
  return gram.llt().solve(rhs);
}

Eigen::VectorXd project_tensor(const Mesh& mesh, const Cell& cell, int r, const TensorField& f) {
  const CellBasis basis(r, cell);
  const int nr = basis.size();
  const auto rule = cell_quadrature(data_quadrature_degree(std::max(r, 1)));
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(nr, nr);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nr, 4);
  for (const auto& qp : map_to_cell(rule, mesh, cell)) {
    const Eigen::VectorXd v = basis.values(qp.x);
    const Eigen::Matrix2d t = f(qp.x);
    gram.noalias() += qp.w * v * v.transpose();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) rhs.col(2 * i + j) += qp.w * t(i, j) * v;
  }
  const Eigen::MatrixXd sol = gram.llt().solve(rhs);
  Eigen::VectorXd out(4 * nr);
  for (int c = 0; c < 4; ++c) out.segment(c * nr, nr) = sol.col(c);
  return out;
}

Eigen::VectorXd project_local(const Mesh& mesh, const Cell& cell, int k, const VectorField& u) {
  const int nk = poly_dim(k);
  const int ne = k;
  Eigen::VectorXd out(2 * nk + 6 * ne);

  const CellBasis basis(k, cell);
  const auto rule = cell_quadrature(data_quadrature_degree(k));
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(nk, nk);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nk, 2);
  for (const auto& qp : map_to_cell(rule, mesh, cell)) {
    const Eigen::VectorXd v = basis.values(qp.x);
    const Vec2 val = u(qp.x);
    gram.noalias() += qp.w * v * v.transpose();
    rhs.col(0) += qp.w * val.x() * v;
    rhs.col(1) += qp.w * val.y() * v;
  }
  const Eigen::MatrixXd interior = gram.llt().solve(rhs);
  out.segment(0, nk) = interior.col(0);
  out.segment(nk, nk) = interior.col(1);

  const auto erule = edge_quadrature(2 * data_quadrature_degree(k));
  for (int le = 0; le < 3; ++le) {
    const EdgeGeometry g = local_edge(mesh, cell, le);
    const EdgeBasis ebasis(k - 1, g.a, g.b);
    Eigen::MatrixXd egram = Eigen::MatrixXd::Zero(ne, ne);
    Eigen::MatrixXd erhs = Eigen::MatrixXd::Zero(ne, 2);
    for (const auto& qp : map_to_segment(erule, g.a, g.b)) {
      const Eigen::VectorXd chi = ebasis.values(qp.x);
      const Vec2 val = u(qp.x);
      egram.noalias() += qp.w * chi * chi.transpose();
      erhs.col(0) += qp.w * val.x() * chi;
      erhs.col(1) += qp.w * val.y() * chi;
    }
    const Eigen::MatrixXd sol = egram.llt().solve(erhs);
    const int eoff = 2 * nk + le * 2 * ne;
    out.segment(eoff, ne) = sol.col(0);
    out.segment(eoff + ne, ne) = sol.col(1);
  }
  return out;
}

}  // namespace wgs
