#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wgstokes/basis.hpp"
#include "wgstokes/mesh.hpp"

namespace wgs {

/// Degree-k weak Galerkin velocity/pressure layout on a triangulation.
///
/// Velocity unknowns are numbered interior block first, then edge block:
///   cell c:  [v0_x (dim P_k), v0_y (dim P_k)]
///   edge e:  [vb_x (k), vb_y (k)]   (interior edges only; vb = 0 on the boundary)
/// Pressure unknowns are dim P_{k-1} per cell.
///
/// The element-local velocity vector uses the same per-block layout with the
/// three local edges appended in cell-edge order, boundary edges included.
class WgSpace {
 public:
  WgSpace(std::shared_ptr<const Mesh> mesh, int k);

  int k() const { return k_; }
  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }

  int cell_scalar_dim() const { return poly_dim(k_); }
  int edge_scalar_dim() const { return k_; }
  int grad_scalar_dim() const { return poly_dim(k_ - 1); }

  int interior_dofs_per_cell() const { return 2 * cell_scalar_dim(); }
  int edge_dofs_per_edge() const { return 2 * edge_scalar_dim(); }
  int pressure_dofs_per_cell() const { return grad_scalar_dim(); }
  int local_size() const { return interior_dofs_per_cell() + 3 * edge_dofs_per_edge(); }

  int num_interior() const { return n_interior_; }
  int num_edge() const { return n_edge_; }
  int num_velocity() const { return n_interior_ + n_edge_; }
  int num_pressure() const { return n_pressure_; }

  int interior_offset(int cell) const { return cell * interior_dofs_per_cell(); }
  /// First global index of the edge block, or -1 for boundary edges.
  int edge_offset(int edge) const { return edge_offsets_[static_cast<std::size_t>(edge)]; }
  int pressure_offset(int cell) const { return cell * pressure_dofs_per_cell(); }

  /// Global index per local velocity slot; -1 where the slot is constrained to zero.
  std::vector<int> local_velocity_dofs(int cell) const;
  std::vector<int> local_pressure_dofs(int cell) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  int k_;
  int n_interior_ = 0;
  int n_edge_ = 0;
  int n_pressure_ = 0;
  std::vector<int> edge_offsets_;
};

/// Coefficients of a discrete velocity {v0, vb} and, optionally, a pressure.
struct WeakFunction {
  Eigen::VectorXd velocity;
  Eigen::VectorXd pressure;

  static WeakFunction zero(const WgSpace& space) {
    return {Eigen::VectorXd::Zero(space.num_velocity()), Eigen::VectorXd::Zero(space.num_pressure())};
  }
};

/// Stabilizer weight gamma(h).
struct GammaSchedule {
  enum class Kind { Constant, Power, Log };
  Kind kind = Kind::Constant;
  double parameter = 1.0;

  static GammaSchedule constant(double c = 1.0) { return {Kind::Constant, c}; }
  static GammaSchedule power(double eps) { return {Kind::Power, eps}; }
  static GammaSchedule log() { return {Kind::Log, 0.0}; }

  /// Parses `const`, `const:<c>`, `pow:<eps>` or `log`.
  static GammaSchedule parse(const std::string& text);
  std::string to_string() const;

  double operator()(double h) const;
  bool vanishes_as_h_to_zero() const { return kind != Kind::Constant; }
};

struct Stabilizer {
  enum class Variant { Standard, Skeletal };
  Variant variant = Variant::Standard;
  double alpha = 0.0;

  static Stabilizer standard() { return {Variant::Standard, 0.0}; }
  static Stabilizer skeletal(double alpha);

  /// Parses `standard` or `skeletal:<alpha>`.
  static Stabilizer parse(const std::string& text);
  std::string to_string() const;
};

}  // namespace wgs
