#pragma once

#include <iosfwd>
#include <span>

#include <Eigen/SparseCore>

#include "wgstokes/local_ops.hpp"
#include "wgstokes/wg_space.hpp"

namespace wgs {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Global WG matrices for the Stokes pencil.
///   A = (grad_w ., grad_w .) + S      velocity x velocity
///   M = (v0, w0)                      velocity x velocity, zero off the interior block
///   B = (div_w v, q)                  pressure x velocity
struct AssembledSystem {
  WgSpace space;
  GammaSchedule schedule;
  Stabilizer stabilizer;
  double gamma = 1.0;  ///< gamma(h) evaluated on this mesh
  SparseMatrix A;
  SparseMatrix M;
  SparseMatrix B;
  SparseMatrix S;  ///< stabilizer part of A
};

/// Mesh size fed to gamma(h): h = max_T h_T.
double gamma_mesh_size(const Mesh& mesh);

/// Assembles A, M, B, S. `cell_order` optionally permutes the accumulation
/// order; results agree to rounding. Throws AssemblyError on degenerate cells.
AssembledSystem assemble(const WgSpace& space, const GammaSchedule& gamma, const Stabilizer& stab,
                         std::span<const int> cell_order = {});

/// Q_h u = {Q_0 u, Q_b u}; edge values on the boundary are dropped (vb = 0).
WeakFunction project_Qh(const WgSpace& space, const VectorField& u);

/// Cellwise L2 projection of a scalar onto P_{k-1}, the pressure space.
Eigen::VectorXd project_pressure(const WgSpace& space, const ScalarField& p);

/// Gather the element-local velocity vector of one cell (zeros on boundary edges).
Eigen::VectorXd gather_local(const WgSpace& space, const Eigen::VectorXd& velocity, int cell);

/// s(v, v) with the stabilizer stored in `system`.
double stabilizer_energy(const WeakFunction& v, const AssembledSystem& system);

/// Matrix of the discrete V-norm:
///   sum_T ||grad v0||_T^2 + sum_T h_T^{-1} ||Q_b v0 - vb||_dT^2.
SparseMatrix v_norm_matrix(const WgSpace& space);
double v_norm(const WeakFunction& v, const WgSpace& space);

/// Value of the interior polynomial v0 at a point of a cell.
Vec2 evaluate_interior(const WgSpace& space, const Eigen::VectorXd& velocity, int cell, const Vec2& x);
double evaluate_pressure(const WgSpace& space, const Eigen::VectorXd& pressure, int cell, const Vec2& x);

/// Shift a pressure vector so that its integral over the domain vanishes.
void remove_pressure_mean(const WgSpace& space, Eigen::VectorXd& pressure);
double pressure_integral(const WgSpace& space, const Eigen::VectorXd& pressure);

/// Debug export: one `row col value` line per stored entry, 17 significant digits.
void write_triplets(std::ostream& out, const SparseMatrix& m);

}  // namespace wgs
