#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "wgstokes/mesh.hpp"
#include "wgstokes/quadrature.hpp"

namespace wgs {

/// Number of bivariate monomials of total degree <= r.
constexpr int poly_dim(int r) { return r < 0 ? 0 : (r + 1) * (r + 2) / 2; }

/// Scaled monomials ((x - xc)/h)^a ((y - yc)/h)^b, a + b <= r, ordered by
/// total degree and then by decreasing a.
class CellBasis {
 public:
  CellBasis(int degree, Vec2 center, double scale);
  CellBasis(int degree, const Cell& cell) : CellBasis(degree, cell.centroid, cell.diameter) {}

  int degree() const { return degree_; }
  int size() const { return poly_dim(degree_); }
  const Vec2& center() const { return center_; }
  double scale() const { return scale_; }

  Eigen::VectorXd values(const Vec2& p) const;
  /// size() x 2 matrix of physical gradients.
  Eigen::MatrixX2d gradients(const Vec2& p) const;

  struct Evaluation {
    Eigen::MatrixXd values;  // points x size
    Eigen::MatrixXd dx;      // points x size
    Eigen::MatrixXd dy;      // points x size
  };
  Evaluation evaluate(std::span<const Vec2> points) const;

 private:
  int degree_;
  Vec2 center_;
  double scale_;
  std::vector<std::array<int, 2>> exponents_;
};

/// Monomials t^j, j <= r, in the arc-length coordinate t in [-1/2, 1/2]
/// measured from the edge midpoint along a -> b and scaled by |F|.
class EdgeBasis {
 public:
  EdgeBasis(int degree, Vec2 a, Vec2 b);
  EdgeBasis(int degree, const Mesh& mesh, const Edge& edge)
      : EdgeBasis(degree, mesh.point(edge.vertices[0]), mesh.point(edge.vertices[1])) {}

  int degree() const { return degree_; }
  int size() const { return degree_ + 1; }

  double coordinate(const Vec2& p) const;
  Eigen::VectorXd values(const Vec2& p) const;

 private:
  int degree_;
  Vec2 a_, b_;
};

/// Gram matrix of the cell basis on the cell, integrated with `rule`.
Eigen::MatrixXd cell_gram(const CellBasis& basis, const Mesh& mesh, const Cell& cell,
                          const CellQuadrature& rule);

Eigen::MatrixXd edge_gram(const EdgeBasis& basis, const Vec2& a, const Vec2& b,
                          const EdgeQuadrature& rule);

}  // namespace wgs
