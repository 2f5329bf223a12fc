#include "wgstokes/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "wgstokes/errors.hpp"

namespace wgs {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;
using LU = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;

// Maps pressure index -> column in the pinned system (or -1).
std::vector<int> compress_pressure(int np, const std::vector<int>& pinned) {
  std::vector<int> map(static_cast<std::size_t>(np), 0);
  for (const int p : pinned) map[static_cast<std::size_t>(p)] = -1;
  int next = 0;
  for (auto& m : map)
    if (m == 0) m = next++;
  return map;
}

void check_factorization(const LU& lu, const SparseMatrix& K, const char* what) {
  if (lu.info() != Eigen::Success)
    throw RankDeficiencyError(std::string(what) + ": factorization failed (" + lu.lastErrorMessage() + ")");
  // Probe solve: a numerically singular matrix shows up as a large residual.
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd b(K.rows());
  for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = dist(rng);
  const Eigen::VectorXd x = lu.solve(b);
  const double res = (K * x - b).norm() / b.norm();
  if (!std::isfinite(res) || !x.allFinite() || res > 1e-6)
    throw RankDeficiencyError(std::string(what) + ": matrix is numerically singular (probe residual " +
                              std::to_string(res) + ")");
}

}  // namespace

std::vector<int> pinned_pressure_dofs(const WgSpace& space) {
  const Mesh& mesh = space.mesh();
  std::vector<int> comp(mesh.cells.size(), -1);
  std::vector<int> pinned;
  std::vector<int> stack;
  for (const auto& seed : mesh.cells) {
    if (comp[static_cast<std::size_t>(seed.id)] >= 0) continue;
    const int label = static_cast<int>(pinned.size());
    pinned.push_back(space.pressure_offset(seed.id));
    comp[static_cast<std::size_t>(seed.id)] = label;
    stack.push_back(seed.id);
    while (!stack.empty()) {
      const int c = stack.back();
      stack.pop_back();
      for (const int eid : mesh.cells[static_cast<std::size_t>(c)].edges) {
        const Edge& e = mesh.edges[static_cast<std::size_t>(eid)];
        for (const int nb : e.cells)
          if (nb >= 0 && comp[static_cast<std::size_t>(nb)] < 0) {
            comp[static_cast<std::size_t>(nb)] = label;
            stack.push_back(nb);
          }
      }
    }
  }
  return pinned;
}

struct SaddleSolver::Impl {
  SparseMatrix K;
  LU lu;
  std::vector<int> pmap;
};

SaddleSolver::SaddleSolver(const AssembledSystem& system) : impl_(std::make_unique<Impl>()) {
  nv_ = system.space.num_velocity();
  np_ = system.space.num_pressure();
  pinned_ = pinned_pressure_dofs(system.space);
  impl_->pmap = compress_pressure(np_, pinned_);
  const int n = nv_ + np_ - static_cast<int>(pinned_.size());

  Triplets t;
  t.reserve(static_cast<std::size_t>(system.A.nonZeros() + 2 * system.B.nonZeros()));
  for (int col = 0; col < system.A.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(system.A, col); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  for (int col = 0; col < system.B.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(system.B, col); it; ++it) {
      const int r = impl_->pmap[static_cast<std::size_t>(it.row())];
      if (r < 0) continue;
      t.emplace_back(nv_ + r, it.col(), it.value());
      t.emplace_back(it.col(), nv_ + r, it.value());
    }
  impl_->K.resize(n, n);
  impl_->K.setFromTriplets(t.begin(), t.end());
  impl_->K.makeCompressed();
  impl_->lu.analyzePattern(impl_->K);
  impl_->lu.factorize(impl_->K);
  check_factorization(impl_->lu, impl_->K, "saddle matrix");
}

SaddleSolver::~SaddleSolver() = default;
SaddleSolver::SaddleSolver(SaddleSolver&&) noexcept = default;
SaddleSolver& SaddleSolver::operator=(SaddleSolver&&) noexcept = default;

void SaddleSolver::solve(const Eigen::VectorXd& f, const Eigen::VectorXd& g, Eigen::VectorXd& u,
                         Eigen::VectorXd& p) const {
  const auto n = impl_->K.rows();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs.head(nv_) = f;
  if (g.size() == np_)
    for (int i = 0; i < np_; ++i) {
      const int r = impl_->pmap[static_cast<std::size_t>(i)];
      if (r >= 0) rhs[nv_ + r] = g[i];
    }
  Eigen::VectorXd x = impl_->lu.solve(rhs);
  // A couple of refinement sweeps recover the accuracy the LU loses on fine meshes.
  const double target = 1e-13 * rhs.norm();
  for (int sweep = 0; sweep < 3; ++sweep) {
    const Eigen::VectorXd r = rhs - impl_->K * x;
    if (!(r.norm() > target)) break;
    x += impl_->lu.solve(r);
  }
  u = x.head(nv_);
  p = Eigen::VectorXd::Zero(np_);
  for (int i = 0; i < np_; ++i) {
    const int r = impl_->pmap[static_cast<std::size_t>(i)];
    if (r >= 0) p[i] = x[nv_ + r];
  }
}

EigenResult solve_smallest(const AssembledSystem& system, const EigenOptions& options) {
  const WgSpace& space = system.space;
  const int n = space.num_interior();
  const int nev = options.num_eigs;
  if (nev < 1) throw std::invalid_argument("solve_smallest: need at least one eigenpair");
  if (nev > n) throw std::invalid_argument("solve_smallest: more eigenpairs requested than interior unknowns");
  if (!(options.tol > 0.0)) throw std::invalid_argument("solve_smallest: tolerance must be positive");

  const SaddleSolver saddle(system);
  const SparseMatrix M00 = system.M.topLeftCorner(n, n);
  const int nv = space.num_velocity();

  EigenResult result;
  // T x = (K^{-1} [M00 x; 0])_interior
  auto apply_T = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(nv);
    f.head(n) = M00 * x;
    Eigen::VectorXd u, p;
    saddle.solve(f, Eigen::VectorXd(), u, p);
    ++result.operator_applications;
    return Eigen::VectorXd(u.head(n));
  };

  const int ncv = std::min(n, options.basis_size > 0 ? std::max(options.basis_size, nev + 2)
                                                     : std::max(2 * nev + 20, 40));
  Eigen::MatrixXd V(n, ncv), MV(n, ncv), W(n, ncv);

  // M-orthogonalize x against the first `cols` basis vectors (twice).
  auto orthogonalize = [&](Eigen::VectorXd& x, int cols) {
    for (int pass = 0; pass < 2; ++pass)
      if (cols > 0) x.noalias() -= V.leftCols(cols) * (MV.leftCols(cols).transpose() * x);
  };
  std::mt19937 rng(20240531);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  auto random_vector = [&]() {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = dist(rng);
    return x;
  };
  // Appends x as column `col` if it has a meaningful component; returns false on breakdown.
  auto append = [&](Eigen::VectorXd x, int col) {
    const double before = std::sqrt(std::max(0.0, x.dot(M00 * x)));
    orthogonalize(x, col);
    Eigen::VectorXd mx = M00 * x;
    const double nrm = std::sqrt(std::max(0.0, x.dot(mx)));
    if (!(nrm > 1e-10 * before) || nrm == 0.0) return false;
    V.col(col) = x / nrm;
    MV.col(col) = mx / nrm;
    return true;
  };

  if (!append(random_vector(), 0)) throw std::runtime_error("solve_smallest: degenerate start vector");
  int kept = 0;
  Eigen::VectorXd theta;
  Eigen::MatrixXd ritz, tritz;
  std::vector<double> rel(static_cast<std::size_t>(nev), 0.0);
  for (int restart = 0;; ++restart) {
    int filled = ncv;
    for (int j = kept; j < ncv; ++j) {
      W.col(j) = apply_T(V.col(j));
      if (j + 1 < ncv) {
        if (!append(W.col(j), j + 1)) {
          // Invariant subspace reached: continue with a fresh direction.
          bool ok = false;
          for (int tries = 0; tries < 5 && !ok; ++tries) ok = append(random_vector(), j + 1);
          if (!ok) {
            filled = j + 1;
            break;
          }
        }
      }
    }
    Eigen::MatrixXd H = MV.leftCols(filled).transpose() * W.leftCols(filled);
    H = 0.5 * (H + H.transpose());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    // Largest theta first.
    const Eigen::MatrixXd S = es.eigenvectors().rowwise().reverse();
    theta = es.eigenvalues().reverse();
    ritz = V.leftCols(filled) * S;
    tritz = W.leftCols(filled) * S;

    bool converged = filled >= nev;
    double worst = 0.0;
    for (int i = 0; i < nev && i < filled; ++i) {
      const Eigen::VectorXd r = tritz.col(i) - theta[i] * ritz.col(i);
      rel[static_cast<std::size_t>(i)] = std::sqrt(std::max(0.0, r.dot(M00 * r))) / std::abs(theta[i]);
      worst = std::max(worst, rel[static_cast<std::size_t>(i)]);
      if (!(theta[i] > 0.0) || rel[static_cast<std::size_t>(i)] > options.tol) converged = false;
    }
    if (converged || filled == n) {
      result.restarts = restart;
      break;
    }
    if (restart >= options.max_restarts)
    {
      std::ostringstream msg;
      msg << "solve_smallest: no convergence after " << restart << " restarts, worst relative residual "
          << std::setprecision(3) << worst;
      throw ConvergenceError(msg.str(), worst);
    }

    // Thick restart: keep leading Ritz vectors, continue from the residual direction.
    Eigen::VectorXd f = W.col(filled - 1);
    orthogonalize(f, filled);
    kept = std::min(filled - 1, nev + (ncv - nev) / 2);
    V.leftCols(kept) = ritz.leftCols(kept);
    MV.leftCols(kept) = M00 * ritz.leftCols(kept);
    W.leftCols(kept) = tritz.leftCols(kept);
    if (!append(f, kept) && !append(random_vector(), kept))
      throw ConvergenceError("solve_smallest: Krylov breakdown on restart", worst);
  }

  const Eigen::SimplicialLLT<SparseMatrix> mass_llt(M00);
  for (int i = 0; i < nev; ++i) {
    const double lambda = 1.0 / theta[i];
    Eigen::VectorXd y = ritz.col(i);
    y /= std::sqrt(y.dot(M00 * y));
    Eigen::Index imax = 0;
    y.cwiseAbs().maxCoeff(&imax);
    if (y[imax] < 0.0) y = -y;

    // Edge velocity and pressure from K x = lambda [M00 y; 0].
    Eigen::VectorXd f = Eigen::VectorXd::Zero(nv);
    f.head(n) = lambda * (M00 * y);
    Eigen::VectorXd u, p;
    saddle.solve(f, Eigen::VectorXd(), u, p);
    WeakFunction mode;
    mode.velocity = u;
    mode.velocity.head(n) = y;
    mode.pressure = p;

    const Eigen::VectorXd r = (system.A * mode.velocity + system.B.transpose() * mode.pressure -
                               lambda * (system.M * mode.velocity))
                                  .head(n);
    const Eigen::VectorXd minv_r = mass_llt.solve(r);
    remove_pressure_mean(space, mode.pressure);

    result.eigenvalues.push_back(lambda);
    result.residuals.push_back(std::sqrt(std::max(0.0, r.dot(minv_r))) / lambda);
    result.modes.push_back(std::move(mode));
  }
  return result;
}

ReducedPencil reduce_pencil(const AssembledSystem& system) {
  const WgSpace& space = system.space;
  const int n0 = space.num_interior();
  if (n0 > 20000) throw std::invalid_argument("reduce_pencil: dense reduction limited to N_0 <= 20000");
  const int nb = space.num_edge();
  const std::vector<int> pinned = pinned_pressure_dofs(space);
  const std::vector<int> pmap = compress_pressure(space.num_pressure(), pinned);
  const int npk = space.num_pressure() - static_cast<int>(pinned.size());
  const int ny = nb + npk;

  // K_YY = [[A_bb, B_b^T], [B_b, 0]] and K_Y0 = [A_b0; B_0].
  Triplets tyy, ty0;
  for (int col = 0; col < system.A.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(system.A, col); it; ++it) {
      const auto r = it.row(), c = it.col();
      if (r >= n0 && c >= n0) tyy.emplace_back(r - n0, c - n0, it.value());
      if (r >= n0 && c < n0) ty0.emplace_back(r - n0, c, it.value());
    }
  for (int col = 0; col < system.B.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(system.B, col); it; ++it) {
      const int r = pmap[static_cast<std::size_t>(it.row())];
      if (r < 0) continue;
      const auto c = it.col();
      if (c >= n0) {
        tyy.emplace_back(nb + r, c - n0, it.value());
        tyy.emplace_back(c - n0, nb + r, it.value());
      } else {
        ty0.emplace_back(nb + r, c, it.value());
      }
    }
  SparseMatrix Kyy(ny, ny), Ky0(ny, n0);
  Kyy.setFromTriplets(tyy.begin(), tyy.end());
  Ky0.setFromTriplets(ty0.begin(), ty0.end());
  Kyy.makeCompressed();

  ReducedPencil out;
  out.S = Eigen::MatrixXd(system.A.topLeftCorner(n0, n0));
  out.M00 = Eigen::MatrixXd(system.M.topLeftCorner(n0, n0));
  if (ny > 0) {
    LU lu;
    lu.analyzePattern(Kyy);
    lu.factorize(Kyy);
    check_factorization(lu, Kyy, "Schur pivot block");
    const Eigen::MatrixXd ky0 = Eigen::MatrixXd(Ky0);
    const Eigen::MatrixXd x = lu.solve(ky0);
    out.S.noalias() -= ky0.transpose() * x;
  }
  out.S = 0.5 * (out.S + out.S.transpose());
  return out;
}

}  // namespace wgs
