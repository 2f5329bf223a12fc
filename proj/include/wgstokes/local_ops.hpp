#pragma once

#include <array>
#include <functional>

#include <Eigen/Core>

#include "wgstokes/basis.hpp"
#include "wgstokes/mesh.hpp"
#include "wgstokes/quadrature.hpp"
#include "wgstokes/wg_space.hpp"

namespace wgs {

using VectorField = std::function<Vec2(const Vec2&)>;
using ScalarField = std::function<double(const Vec2&)>;
/// Row i holds the gradient of component i: J(i, j) = d u_i / d x_j.
using TensorField = std::function<Eigen::Matrix2d(const Vec2&)>;

/// Element matrices of one cell, all acting on the element-local velocity
/// vector (see WgSpace for the layout).
///
/// The weak gradient lives in [P_{k-1}(T)]^{2x2}; its coefficient vector is
/// ordered by tensor slot (i, j) -> 2 i + j, each slot holding dim P_{k-1}
/// scaled-monomial coefficients. The weak divergence lives in P_{k-1}(T).
struct LocalElement {
  int k = 1;
  double area = 0.0;
  double diameter = 0.0;
  std::array<double, 3> edge_lengths{};

  Eigen::MatrixXd mass;             ///< (v0, w0)_T on the interior block
  Eigen::MatrixXd grad_gram;        ///< Gram of [P_{k-1}]^{2x2}
  Eigen::MatrixXd grad_rhs;         ///< -(v0, div q)_T + <vb, q n>_dT per test q
  Eigen::MatrixXd weak_gradient;    ///< grad_gram^{-1} grad_rhs
  Eigen::MatrixXd div_gram;         ///< Gram of P_{k-1}
  Eigen::MatrixXd div_rhs;          ///< -(v0, grad phi)_T + <vb.n, phi>_dT per test phi
  Eigen::MatrixXd weak_divergence;  ///< div_gram^{-1} div_rhs
  std::array<Eigen::MatrixXd, 3> edge_gram;  ///< Gram of [P_{k-1}(e)]^2 per local edge
  std::array<Eigen::MatrixXd, 3> jump;       ///< coefficients of Q_b v0 - vb per local edge

  /// (grad_w v, grad_w w)_T.
  Eigen::MatrixXd gradient_stiffness() const;
  /// sum_e weight[e] <Q_b v0 - vb, Q_b w0 - wb>_e.
  Eigen::MatrixXd edge_penalty(const std::array<double, 3>& weights) const;
};

/// Throws AssemblyError for a cell with non-positive area.
LocalElement build_local_element(const Mesh& mesh, const Cell& cell, int k);

/// Maps local velocity coefficients to coefficients of grad_w v.
Eigen::MatrixXd weak_gradient_local(const Mesh& mesh, const Cell& cell, const WgSpace& space);

/// Maps local velocity coefficients to coefficients of div_w v.
Eigen::MatrixXd weak_divergence_local(const Mesh& mesh, const Cell& cell, const WgSpace& space);

/// Per-edge stabilizer weights of the selected variant for one cell.
std::array<double, 3> stabilizer_weights(const LocalElement& el, const Stabilizer& stab, double gamma);

/// Element-local Q_h u = {Q_0 u, Q_b u}, including boundary edges.
Eigen::VectorXd project_local(const Mesh& mesh, const Cell& cell, int k, const VectorField& u);

/// L2 projection of a scalar onto P_r(T) in the scaled-monomial basis.
Eigen::VectorXd project_scalar(const Mesh& mesh, const Cell& cell, int r, const ScalarField& f);

/// Coefficients of the L2 projection of a tensor field onto [P_r(T)]^{2x2},
/// laid out like the weak gradient.
Eigen::VectorXd project_tensor(const Mesh& mesh, const Cell& cell, int r, const TensorField& f);

/// Exactness used for integrals of user-supplied (non-polynomial) data.
int data_quadrature_degree(int k);

}  // namespace wgs
