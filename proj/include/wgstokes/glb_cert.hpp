#pragma once

#include <iosfwd>
#include <optional>
#include <string>

namespace wgs {

/// Constants of the guaranteed-lower-bound test for the skeletal stabilizer.
///   delta  = C_apx^2 h_max^2
///   Lambda = (C_apx + 2/(n+1)) C_apx/(n+1)
struct GlbParams {
  double alpha = 0.0;
  double c_apx = 0.0;
  double h_max = 0.0;
  int n = 2;
  double delta = 0.0;
  double Lambda = 0.0;
};

/// Throws std::invalid_argument unless alpha >= 0, C_apx > 0, h_max > 0, n >= 1.
GlbParams derive_constants(double alpha, double c_apx, double h_max, int n = 2);

enum class GlbCondition { I, II, LowestOrder };
std::string to_string(GlbCondition c);

struct GlbCertificate {
  GlbCondition condition = GlbCondition::II;
  double lhs = 0.0;
  double threshold = 1.0;
  double margin = 0.0;  ///< threshold - lhs
  bool certified = false;
  /// Margins of the individual conditions; (i) only when a reference was given.
  std::optional<double> margin_i;
  std::optional<double> margin_ii;

  std::string verdict() const { return certified ? "certified-lower-bound" : "not-certified"; }
};

/// (i) delta lambda + alpha Lambda <= 1, evaluated only when lambda_ref is given;
/// (ii) delta lambda_h + alpha Lambda <= 1. Either one certifies lambda_h <= lambda.
/// The reported condition is (ii) unless only (i) holds.
GlbCertificate check_conditions(const GlbParams& params, std::optional<double> lambda_ref, double lambda_h);

/// Lowest-order test max{alpha, min(lambda, lambda_h) h_max^2} <= kappa_CR^{-2}.
/// Without a reference the minimum is bounded by lambda_h.
GlbCertificate check_lowest_order(double alpha, double h_max, double kappa_cr, std::optional<double> lambda_ref,
                                  double lambda_h);

/// Flat `key = value` block.
void write_certificate(std::ostream& out, const GlbCertificate& cert);

}  // namespace wgs
