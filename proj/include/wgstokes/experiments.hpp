#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wgstokes/eigensolver.hpp"

namespace wgs {

/// Reference eigenvalues used to measure discretization errors.
struct ReferenceSet {
  std::vector<double> values;
  std::string provenance;
  bool low_confidence = false;
  std::vector<std::string> warnings;
};

struct ReferenceOptions {
  int k = 2;
  int n_coarse = 16;  ///< the fine level uses 2 n_coarse
  Diagonal diagonal = Diagonal::BottomLeftTopRight;
  double tol = 1e-11;
  /// Overrides the error model exponent (see convergence_rate_model).
  std::optional<double> rate;
};

/// Smallest positive root z of sin(omega z) + z sin(omega) = 0: the leading
/// Stokes corner exponent of a wedge with opening angle omega in (pi, 2 pi).
double corner_singularity_exponent(double omega);

/// Exponent r of the eigenvalue error model |lambda - lambda_h| ~ h^r for a
/// degree-k discretization: 2k on the square, capped by twice the reentrant
/// corner exponent on the L-shape.
double convergence_rate_model(DomainTag domain, int k);

/// Eliminates the h^rate term from a value on h (coarse) and h/2 (fine).
double richardson(double coarse, double fine, double rate);

/// m reference eigenvalues by Richardson extrapolation of constant-gamma WG
/// eigenvalues on two nested levels. Flagged low-confidence when the levels
/// do not increase monotonically toward the limit.
ReferenceSet reference_eigenvalues(DomainTag domain, int m, const ReferenceOptions& options = {});

struct StudyConfig {
  DomainTag domain = DomainTag::UnitSquare;
  int k = 1;
  GammaSchedule gamma = GammaSchedule::constant();
  Stabilizer stabilizer = Stabilizer::standard();
  Diagonal diagonal = Diagonal::BottomLeftTopRight;
  std::vector<int> h_seq{4, 8, 16, 32};  ///< denominators n, h = 1/n
  int num_eigs = 6;
  double tol = 1e-10;
  std::optional<ReferenceSet> reference;  ///< computed when absent
  ReferenceOptions reference_options;

  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;
};

struct StudyRow {
  int n = 0;
  double h = 0.0;
  int j = 0;  ///< 1-based eigenvalue index
  double lambda_h = 0.0;
  double lambda_ref = 0.0;
  double error = 0.0;  ///< lambda_ref - lambda_h
  std::optional<double> order;
  bool lower_bound = false;
  bool failed = false;
  std::string failure;
};

/// Eigenpairs of the finest successful level, kept for field export.
struct StudySnapshot {
  std::shared_ptr<const Mesh> mesh;
  int k = 1;
  EigenResult eigen;
};

struct StudyResult {
  StudyConfig config;
  ReferenceSet reference;
  std::vector<StudyRow> rows;  ///< ordered by level, then j
  std::optional<StudySnapshot> finest;
};

/// Builds the mesh of a study level.
std::shared_ptr<const Mesh> build_domain_mesh(DomainTag domain, int n, Diagonal diagonal);

StudyResult run_study(const StudyConfig& config);

/// Rows from per-level eigenvalues (an empty level marks a failed solve).
std::vector<StudyRow> tabulate(const std::vector<int>& h_seq, const std::vector<std::vector<double>>& eigenvalues,
                               const std::vector<double>& reference, int num_eigs,
                               const std::vector<std::string>& failures = {});

struct LowerBoundReport {
  int rows = 0;
  int failed = 0;
  int lower = 0;  ///< rows with lambda_h <= lambda_ref
  double fraction = 0.0;
  bool hypothesis = false;  ///< gamma(h) -> 0, so lower bounds are expected
  std::vector<std::pair<int, int>> violations;  ///< (n, j) with a negative error
  std::string summary() const;
};

LowerBoundReport lower_bound_report(const std::vector<StudyRow>& rows, const GammaSchedule& gamma);

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// CSV with `#` metadata lines, then
/// domain,k,gamma,h,j,lambda_h,lambda_ref,error,order,lower_bound
void write_csv(std::ostream& out, const StudyResult& result, const Metadata& metadata = {});

/// Log-log plot of |error| against h for one eigenvalue index, as SVG.
void write_error_plot(std::ostream& out, const std::vector<StudyRow>& rows, int j, const std::string& title);

enum class FieldComponent { U1, U2, Magnitude, Pressure };
std::string to_string(FieldComponent c);

/// Samples one field of a mode on a uniform samples x samples grid over the
/// bounding box of the mesh; points outside the domain are written as `nan`.
void write_raster(std::ostream& out, const WgSpace& space, const WeakFunction& mode, FieldComponent component,
                  int samples = 129);

/// Writes <prefix>.csv, <prefix>_j<j>.svg and, when a snapshot exists,
/// <prefix>_mode1_{u1,u2,umag,p}.csv. Returns the written paths.
/// Throws std::runtime_error when a file cannot be written.
std::vector<std::string> export_study(const StudyResult& result, const std::string& prefix,
                                      const Metadata& metadata = {});

}  // namespace wgs
