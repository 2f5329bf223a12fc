#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "wgstokes/assembly.hpp"

namespace wgs {

/// Sparse LU of the saddle matrix [[A, B^T], [B, 0]] in which the constant
/// pressure mode is removed by pinning the first pressure unknown of each
/// connected component of the mesh.
class SaddleSolver {
 public:
  /// Throws RankDeficiencyError if the pinned saddle matrix is singular.
  explicit SaddleSolver(const AssembledSystem& system);
  ~SaddleSolver();
  SaddleSolver(SaddleSolver&&) noexcept;
  SaddleSolver& operator=(SaddleSolver&&) noexcept;

  /// Solves [[A, B^T], [B, 0]] [u; p] = [f; g]. Pinned pressure entries come
  /// back as zero and their rows of g are ignored.
  void solve(const Eigen::VectorXd& f, const Eigen::VectorXd& g, Eigen::VectorXd& u, Eigen::VectorXd& p) const;

  const std::vector<int>& pinned() const { return pinned_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::vector<int> pinned_;
  int nv_ = 0;
  int np_ = 0;
};

/// First pressure unknown of every connected component of the cell graph.
std::vector<int> pinned_pressure_dofs(const WgSpace& space);

struct EigenOptions {
  int num_eigs = 6;
  double tol = 1e-9;
  int basis_size = 0;  ///< Krylov basis size; 0 selects max(2 m + 20, 40)
  int max_restarts = 200;
};

struct EigenResult {
  std::vector<double> eigenvalues;  ///< ascending
  std::vector<WeakFunction> modes;  ///< b_w-normalized velocity, mean-zero pressure
  std::vector<double> residuals;    ///< ||A u + B^T p - lambda M u||_{M^-1} / (lambda ||u||_M)
  int operator_applications = 0;
  int restarts = 0;
};

/// m smallest finite eigenpairs of ([[A, B^T], [B, 0]], [[M, 0], [0, 0]]).
///
/// The pencil is reduced onto the interior velocity block (the support of M):
/// eigenvalues are 1/theta for the largest theta of T = (K^{-1})_{00} M_00,
/// the inverse Schur complement, computed by thick-restart Lanczos in the
/// M_00 inner product. Throws ConvergenceError when the restart budget runs out.
EigenResult solve_smallest(const AssembledSystem& system, const EigenOptions& options = {});

/// Dense Schur complement S = A_00 - K_0Y K_YY^{-1} K_Y0 of the pinned saddle
/// matrix onto the interior velocity block, with the interior mass block.
struct ReducedPencil {
  Eigen::MatrixXd S;
  Eigen::MatrixXd M00;
};

/// Explicit reduction for small problems (N_0 <= 20000). Throws
/// RankDeficiencyError when the edge/pressure block K_YY is singular.
ReducedPencil reduce_pencil(const AssembledSystem& system);

}  // namespace wgs
