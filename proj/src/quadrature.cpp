#include "wgstokes/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "wgstokes/errors.hpp"

namespace wgs {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    // Newton on P_n starting from the Chebyshev-like guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    // Map [-1,1] -> [0,1]; the [0,1] weights sum to one.
    const auto idx = static_cast<std::size_t>(n - 1 - i);
    nodes[idx] = 0.5 * (x + 1.0);
    weights[idx] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

CellQuadrature cell_quadrature(int exact_degree) {
  if (exact_degree < 0 || exact_degree > kMaxCellQuadratureDegree)
    throw UnsupportedDegreeError("cell_quadrature: unsupported exactness degree " +
                                 std::to_string(exact_degree));
  // x = u, y = v (1 - u), Jacobian (1 - u): degree d+1 in u, d in v.
  const int nu = (exact_degree + 3) / 2;
  const int nv = (exact_degree + 2) / 2;
  std::vector<double> xu, wu, xv, wv;
  gauss_legendre(nu, xu, wu);
  gauss_legendre(nv, xv, wv);

  CellQuadrature rule;
  rule.exact_degree = exact_degree;
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      const double u = xu[static_cast<std::size_t>(i)];
      const double v = xv[static_cast<std::size_t>(j)];
      const double x = u, y = v * (1.0 - u);
      rule.points.push_back({1.0 - x - y, x, y});
      // Reference area is 1/2; weights are normalized to sum to one.
      rule.weights.push_back(2.0 * wu[static_cast<std::size_t>(i)] * wv[static_cast<std::size_t>(j)] * (1.0 - u));
    }
  return rule;
}

EdgeQuadrature edge_quadrature(int exact_degree) {
  if (exact_degree < 0 || exact_degree > kMaxEdgeQuadratureDegree)
    throw UnsupportedDegreeError("edge_quadrature: unsupported exactness degree " +
                                 std::to_string(exact_degree));
  EdgeQuadrature rule;
  rule.exact_degree = exact_degree;
  gauss_legendre(exact_degree / 2 + 1, rule.points, rule.weights);
  return rule;
}

std::vector<QuadPoint> map_to_cell(const CellQuadrature& rule, const Mesh& mesh, const Cell& cell) {
  const Vec2 p0 = mesh.point(cell.vertices[0]);
  const Vec2 p1 = mesh.point(cell.vertices[1]);
  const Vec2 p2 = mesh.point(cell.vertices[2]);
  const double area = std::abs(cell.area);
  std::vector<QuadPoint> out;
  out.reserve(rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto& b = rule.points[q];
    out.push_back({b[0] * p0 + b[1] * p1 + b[2] * p2, rule.weights[q] * area});
  }
  return out;
}

std::vector<QuadPoint> map_to_segment(const EdgeQuadrature& rule, const Vec2& a, const Vec2& b) {
  const double len = (b - a).norm();
  std::vector<QuadPoint> out;
  out.reserve(rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q)
    out.push_back({a + rule.points[q] * (b - a), rule.weights[q] * len});
  return out;
}

}  // namespace wgs
