#pragma once

#include <string>

#include <Eigen/Core>

#include "wgstokes/assembly.hpp"

namespace wgs {

/// Exact Stokes solution with its data: -lap u + grad p = f, div u = 0,
/// u = 0 on the boundary, p of zero mean.
struct ManufacturedCase {
  std::string name;
  VectorField u;
  TensorField grad_u;
  ScalarField p;
  VectorField f;

  /// psi = x^2 (1-x)^2 y^2 (1-y)^2 on the unit square, u = (psi_y, -psi_x),
  /// p = x y - 1/4.
  static ManufacturedCase stream_function();
};

struct SourceErrors {
  double e_V = 0.0;  ///< ||Q_h u - u_h||_V
  double e_p = 0.0;  ///< ||Q_h p - p_h||
  double e_0 = 0.0;  ///< ||Q_0 u - u_0||
};

struct SourceSolution {
  WeakFunction solution;  ///< u_h and mean-zero p_h
  SourceErrors errors;
  double residual = 0.0;  ///< relative residual of the linear solve
};

/// (f, v0) for every velocity unknown (zero on the edge block).
Eigen::VectorXd load_vector(const WgSpace& space, const VectorField& f);

/// Solves a_w(u_h, v) - c_w(v, p_h) = (f, v0), c_w(u_h, q) = 0.
/// Throws RankDeficiencyError when the saddle matrix is singular.
SourceSolution solve_source(const AssembledSystem& system, const ManufacturedCase& mcase);
SourceSolution solve_source(const WgSpace& space, const GammaSchedule& gamma, const Stabilizer& stab,
                            const ManufacturedCase& mcase);

SourceErrors error_functionals(const WgSpace& space, const WeakFunction& uh, const ManufacturedCase& mcase);

/// l_u(v) = sum_T <v0 - vb, (grad u - Q_h grad u) n>_dT.
double consistency_functional(const WgSpace& space, const Eigen::VectorXd& v, const TensorField& grad_u);
/// theta_p(v) = sum_T <v0 - vb, (p - Q_h p) n>_dT.
double pressure_functional(const WgSpace& space, const Eigen::VectorXd& v, const ScalarField& p);

}  // namespace wgs
