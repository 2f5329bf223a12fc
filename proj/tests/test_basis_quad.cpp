#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "wgstokes/basis.hpp"
#include "wgstokes/errors.hpp"
#include "wgstokes/quadrature.hpp"

using namespace wgs;

namespace {

Mesh reference_triangle() { return Mesh::from_cells({{0, 0}, {1, 0}, {0, 1}}, {{{0, 1, 2}}}); }

template <class F>
double integrate(const std::vector<QuadPoint>& pts, F&& f) {
  double s = 0.0;
  for (const auto& q : pts) s += q.w * f(q.x);
  return s;
}

}  // namespace

TEST_CASE("cell rules integrate monomials exactly") {
  const Mesh ref = reference_triangle();
  for (int d = 0; d <= kMaxCellQuadratureDegree; ++d) {
    const auto rule = cell_quadrature(d);
    CHECK(rule.exact_degree >= d);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    CHECK(std::abs(wsum - 1.0) < 1e-14);
    const auto pts = map_to_cell(rule, ref, ref.cells[0]);
    for (int a = 0; a <= d; ++a)
      for (int b = 0; a + b <= d; ++b) {
        const double got = integrate(pts, [&](const Vec2& x) { return std::pow(x.x(), a) * std::pow(x.y(), b); });
        CHECK(std::abs(got - oracle::ref_triangle_monomial(a, b)) < 1e-12);
      }
  }
}

TEST_CASE("unit square integrals") {
  const Mesh sq = build_unit_square_mesh(1);
  const auto rule = cell_quadrature(4);
  double x2 = 0.0, x2y2 = 0.0;
  for (const auto& c : sq.cells) {
    const auto pts = map_to_cell(rule, sq, c);
    x2 += integrate(pts, [](const Vec2& x) { return x.x() * x.x(); });
    x2y2 += integrate(pts, [](const Vec2& x) { return x.x() * x.x() * x.y() * x.y(); });
  }
  CHECK(std::abs(x2 - 1.0 / 3.0) < 1e-14);
  CHECK(std::abs(x2y2 - 1.0 / 9.0) < 1e-14);

  // Over the reference triangle.
  const Mesh ref = reference_triangle();
  const auto pts = map_to_cell(cell_quadrature(4), ref, ref.cells[0]);
  CHECK(std::abs(integrate(pts, [](const Vec2& x) { return x.x() * x.x(); }) - 1.0 / 12.0) < 1e-15);
  CHECK(std::abs(integrate(pts, [](const Vec2& x) { return x.x() * x.x() * x.y() * x.y(); }) - 1.0 / 180.0) < 1e-15);
}

TEST_CASE("cell rules on a skewed triangle") {
  // Oracle: divergence theorem, int_T x^a y^b = int_dT x^(a+1)/(a+1) y^b n_x,
  // evaluated with a 12-point Gauss rule per side.
  const Mesh m = Mesh::from_cells({{0.3, -0.2}, {1.7, 0.4}, {0.1, 1.3}}, {{{0, 1, 2}}});
  const Cell& c = m.cells[0];
  std::vector<double> gx, gw;
  gauss_legendre(12, gx, gw);
  for (int d = 0; d <= kMaxCellQuadratureDegree; ++d) {
    const auto pts = map_to_cell(cell_quadrature(d), m, c);
    for (int a = 0; a <= d; ++a) {
      const int b = d - a;
      double expected = 0.0;
      for (int i = 0; i < 3; ++i) {
        const Vec2 p = m.point(c.vertices[i]), q = m.point(c.vertices[(i + 1) % 3]);
        const double len = (q - p).norm();
        for (std::size_t g = 0; g < gx.size(); ++g) {
          const Vec2 x = p + gx[g] * (q - p);
          expected += gw[g] * len * std::pow(x.x(), a + 1) / (a + 1) * std::pow(x.y(), b) * c.normals[i].x();
        }
      }
      const double got = integrate(pts, [&](const Vec2& x) { return std::pow(x.x(), a) * std::pow(x.y(), b); });
      CHECK(std::abs(got - expected) < 1e-12 * std::max(1.0, std::abs(expected)));
    }
  }
}

TEST_CASE("edge rules integrate monomials exactly") {
  for (int d = 0; d <= kMaxEdgeQuadratureDegree; ++d) {
    const auto rule = edge_quadrature(d);
    CHECK(rule.exact_degree >= d);
    for (int j = 0; j <= d; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * std::pow(rule.points[i], j);
      CHECK(std::abs(s - 1.0 / (j + 1)) < 1e-12);
    }
  }
  // A physical segment of length 5.
  const auto pts = map_to_segment(edge_quadrature(3), Vec2(1, 1), Vec2(4, 5));
  double len = 0.0, xint = 0.0;
  for (const auto& q : pts) {
    len += q.w;
    xint += q.w * q.x.x() * q.x.x();
  }
  CHECK(std::abs(len - 5.0) < 1e-14);
  CHECK(std::abs(xint - 5.0 * (64.0 - 1.0) / 9.0) < 1e-12);
}

TEST_CASE("unsupported degrees are rejected") {
  CHECK_THROWS_AS(cell_quadrature(kMaxCellQuadratureDegree + 1), UnsupportedDegreeError);
  CHECK_THROWS_AS(cell_quadrature(-1), UnsupportedDegreeError);
  CHECK_THROWS_AS(edge_quadrature(kMaxEdgeQuadratureDegree + 1), UnsupportedDegreeError);
  CHECK_THROWS_AS(edge_quadrature(-2), UnsupportedDegreeError);
}

TEST_CASE("cell basis values at the centroid") {
  const Mesh m = build_unit_square_mesh(3);
  const Cell& c = m.cells[4];
  const CellBasis b0(0, c);
  CHECK(b0.size() == 1);
  CHECK(b0.values(c.centroid)(0) == 1.0);

  const CellBasis b1(1, c);
  CHECK(b1.size() == 3);
  const Eigen::VectorXd v = b1.values(c.centroid);
  CHECK(v(0) == 1.0);
  CHECK(std::abs(v(1)) < 1e-15);
  CHECK(std::abs(v(2)) < 1e-15);
  // Linear members have constant gradients e_x / h, e_y / h.
  const Eigen::MatrixX2d g = b1.gradients(Vec2(0.5, 0.4));
  CHECK(std::abs(g(1, 0) - 1.0 / c.diameter) < 1e-13);
  CHECK(std::abs(g(1, 1)) < 1e-13);
  CHECK(std::abs(g(2, 0)) < 1e-13);
  CHECK(std::abs(g(2, 1) - 1.0 / c.diameter) < 1e-13);
  CHECK(poly_dim(3) == 10);
  CHECK(poly_dim(-1) == 0);
}

TEST_CASE("cell basis gradients match finite differences") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const CellBasis basis(3, Vec2(0.2, 0.1), 0.7);
  const double eps = 1e-6;
  for (int t = 0; t < 10; ++t) {
    const Vec2 p(u(rng), u(rng));
    const Eigen::MatrixX2d g = basis.gradients(p);
    const Eigen::VectorXd fx = (basis.values(p + Vec2(eps, 0)) - basis.values(p - Vec2(eps, 0))) / (2 * eps);
    const Eigen::VectorXd fy = (basis.values(p + Vec2(0, eps)) - basis.values(p - Vec2(0, eps))) / (2 * eps);
    CHECK((g.col(0) - fx).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((g.col(1) - fy).cwiseAbs().maxCoeff() < 1e-6);
  }
  // Batched evaluation agrees with pointwise evaluation.
  std::vector<Vec2> pts{{0.1, 0.2}, {-0.3, 0.05}};
  const auto ev = basis.evaluate(pts);
  for (int i = 0; i < 2; ++i) {
    CHECK((ev.values.row(i).transpose() - basis.values(pts[i])).norm() < 1e-14);
    CHECK((ev.dx.row(i).transpose() - basis.gradients(pts[i]).col(0)).norm() < 1e-13);
    CHECK((ev.dy.row(i).transpose() - basis.gradients(pts[i]).col(1)).norm() < 1e-13);
  }
}

TEST_CASE("edge basis") {
  const EdgeBasis e(2, Vec2(0, 0), Vec2(2, 0));
  CHECK(e.size() == 3);
  CHECK(std::abs(e.coordinate(Vec2(1, 0))) < 1e-15);
  CHECK(std::abs(e.coordinate(Vec2(2, 0)) - 0.5) < 1e-15);
  const Eigen::VectorXd v = e.values(Vec2(1.5, 0));
  CHECK(v(0) == 1.0);
  CHECK(std::abs(v(1) - 0.25) < 1e-15);
  CHECK(std::abs(v(2) - 0.0625) < 1e-15);
}

TEST_CASE("Gram matrices are SPD and well conditioned") {
  for (int n : {2, 8, 32}) {
    const Mesh m = build_unit_square_mesh(n);
    const Cell& c = m.cells[0];
    for (int r = 0; r <= 3; ++r) {
      const CellBasis b(r, c);
      const Eigen::MatrixXd G = cell_gram(b, m, c, cell_quadrature(2 * r));
      CHECK((G - G.transpose()).norm() < 1e-14 * G.norm());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G / c.area);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
      // The scaled basis makes the conditioning independent of h.
      CHECK(es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff() < 1e6);
      CHECK(es.eigenvalues().maxCoeff() < 2.0);
    }
    const Edge& edge = m.edges[0];
    const Vec2 a = m.point(edge.vertices[0]), bpt = m.point(edge.vertices[1]);
    for (int r = 0; r <= 3; ++r) {
      const Eigen::MatrixXd G = edge_gram(EdgeBasis(r, a, bpt), a, bpt, edge_quadrature(2 * r)) / edge.length;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
      CHECK(es.eigenvalues().minCoeff() > 1e-6);
      CHECK(es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff() < 1e5);
    }
  }
}
