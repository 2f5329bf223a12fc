#pragma once

#include <array>
#include <vector>

#include "wgstokes/mesh.hpp"

namespace wgs {

inline constexpr int kMaxCellQuadratureDegree = 10;
inline constexpr int kMaxEdgeQuadratureDegree = 21;

/// Rule on the reference triangle. Points are barycentric coordinates;
/// weights are fractions of the cell area and sum to one.
struct CellQuadrature {
  int exact_degree = 0;
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// Gauss-Legendre rule on an edge. Points are in [0, 1] along the edge;
/// weights are fractions of the edge length and sum to one.
struct EdgeQuadrature {
  int exact_degree = 0;
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

struct QuadPoint {
  Vec2 x;
  double w;
};

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Collapsed (Duffy) product rule exact for total degree <= exact_degree.
/// Throws UnsupportedDegreeError outside [0, kMaxCellQuadratureDegree].
CellQuadrature cell_quadrature(int exact_degree);

EdgeQuadrature edge_quadrature(int exact_degree);

/// Physical points and weights (summing to |T|).
std::vector<QuadPoint> map_to_cell(const CellQuadrature& rule, const Mesh& mesh, const Cell& cell);

/// Physical points and weights (summing to |F|), from vertex a to vertex b.
std::vector<QuadPoint> map_to_segment(const EdgeQuadrature& rule, const Vec2& a, const Vec2& b);

}  // namespace wgs
