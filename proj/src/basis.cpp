#include "wgstokes/basis.hpp"

#include <cmath>

namespace wgs {

namespace {

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

}  // namespace

CellBasis::CellBasis(int degree, Vec2 center, double scale)
    : degree_(degree), center_(std::move(center)), scale_(scale) {
  for (int d = 0; d <= degree_; ++d)
    for (int a = d; a >= 0; --a) exponents_.push_back({a, d - a});
}

Eigen::VectorXd CellBasis::values(const Vec2& p) const {
  const double sx = (p.x() - center_.x()) / scale_;
  const double sy = (p.y() - center_.y()) / scale_;
  Eigen::VectorXd out(size());
  for (int i = 0; i < size(); ++i) {
    const auto [a, b] = exponents_[static_cast<std::size_t>(i)];
    out[i] = ipow(sx, a) * ipow(sy, b);
  }
  return out;
}

Eigen::MatrixX2d CellBasis::gradients(const Vec2& p) const {
  const double sx = (p.x() - center_.x()) / scale_;
  const double sy = (p.y() - center_.y()) / scale_;
  Eigen::MatrixX2d out(size(), 2);
  for (int i = 0; i < size(); ++i) {
    const auto [a, b] = exponents_[static_cast<std::size_t>(i)];
    out(i, 0) = a == 0 ? 0.0 : a * ipow(sx, a - 1) * ipow(sy, b) / scale_;
    out(i, 1) = b == 0 ? 0.0 : b * ipow(sx, a) * ipow(sy, b - 1) / scale_;
  }
  return out;
}

CellBasis::Evaluation CellBasis::evaluate(std::span<const Vec2> points) const {
  const auto np = static_cast<Eigen::Index>(points.size());
  Evaluation ev{Eigen::MatrixXd(np, size()), Eigen::MatrixXd(np, size()), Eigen::MatrixXd(np, size())};
  for (Eigen::Index q = 0; q < np; ++q) {
    const Vec2& p = points[static_cast<std::size_t>(q)];
    ev.values.row(q) = values(p).transpose();
    const Eigen::MatrixX2d g = gradients(p);
    ev.dx.row(q) = g.col(0).transpose();
    ev.dy.row(q) = g.col(1).transpose();
  }
  return ev;
}

EdgeBasis::EdgeBasis(int degree, Vec2 a, Vec2 b) : degree_(degree), a_(std::move(a)), b_(std::move(b)) {}

double EdgeBasis::coordinate(const Vec2& p) const {
  const Vec2 d = b_ - a_;
  return (p - 0.5 * (a_ + b_)).dot(d) / d.squaredNorm();
}

Eigen::VectorXd EdgeBasis::values(const Vec2& p) const {
  const double t = coordinate(p);
  Eigen::VectorXd out(size());
  double v = 1.0;
  for (int j = 0; j <= degree_; ++j) {
    out[j] = v;
    v *= t;
  }
  return out;
}

Eigen::MatrixXd cell_gram(const CellBasis& basis, const Mesh& mesh, const Cell& cell,
                          const CellQuadrature& rule) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(basis.size(), basis.size());
  for (const auto& qp : map_to_cell(rule, mesh, cell)) {
    const Eigen::VectorXd v = basis.values(qp.x);
    g.noalias() += qp.w * v * v.transpose();
  }
  return g;
}

Eigen::MatrixXd edge_gram(const EdgeBasis& basis, const Vec2& a, const Vec2& b,
                          const EdgeQuadrature& rule) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(basis.size(), basis.size());
  for (const auto& qp : map_to_segment(rule, a, b)) {
    const Eigen::VectorXd v = basis.values(qp.x);
    g.noalias() += qp.w * v * v.transpose();
  }
  return g;
}

}  // namespace wgs
