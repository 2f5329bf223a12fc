#include "wgstokes/glb_cert.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace wgs {

GlbParams derive_constants(double alpha, double c_apx, double h_max, int n) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be >= 0");
  if (!(c_apx > 0.0) || !std::isfinite(c_apx)) throw std::invalid_argument("C_apx must be > 0");
  if (!(h_max > 0.0) || !std::isfinite(h_max)) throw std::invalid_argument("h_max must be > 0");
  if (n < 1) throw std::invalid_argument("spatial dimension must be >= 1");
  GlbParams p;
  p.alpha = alpha;
  p.c_apx = c_apx;
  p.h_max = h_max;
  p.n = n;
  p.delta = c_apx * c_apx * h_max * h_max;
  p.Lambda = (c_apx + 2.0 / (n + 1)) * c_apx / (n + 1);
  return p;
}

std::string to_string(GlbCondition c) {
  switch (c) {
    case GlbCondition::I: return "i";
    case GlbCondition::II: return "ii";
    case GlbCondition::LowestOrder: return "lowest-order";
  }
  return "?";
}

GlbCertificate check_conditions(const GlbParams& params, std::optional<double> lambda_ref, double lambda_h) {
  if (!(lambda_h > 0.0)) throw std::invalid_argument("lambda_h must be > 0");
  GlbCertificate cert;
  const double shift = params.alpha * params.Lambda;
  const double lhs_ii = params.delta * lambda_h + shift;
  cert.margin_ii = 1.0 - lhs_ii;
  cert.condition = GlbCondition::II;
  cert.lhs = lhs_ii;
  if (lambda_ref) {
    const double lhs_i = params.delta * *lambda_ref + shift;
    cert.margin_i = 1.0 - lhs_i;
    if (*cert.margin_ii < 0.0 && *cert.margin_i >= 0.0) {
      cert.condition = GlbCondition::I;
      cert.lhs = lhs_i;
    }
  }
  cert.threshold = 1.0;
  cert.margin = cert.threshold - cert.lhs;
  cert.certified = cert.margin >= 0.0;
  return cert;
}

GlbCertificate check_lowest_order(double alpha, double h_max, double kappa_cr, std::optional<double> lambda_ref,
                                  double lambda_h) {
  if (!(lambda_h > 0.0)) throw std::invalid_argument("lambda_h must be > 0");
  if (!(kappa_cr > 0.0)) throw std::invalid_argument("kappa_CR must be > 0");
  if (!(alpha >= 0.0) || !(h_max > 0.0)) throw std::invalid_argument("alpha must be >= 0 and h_max > 0");
  GlbCertificate cert;
  cert.condition = GlbCondition::LowestOrder;
  const double lam = lambda_ref ? std::min(*lambda_ref, lambda_h) : lambda_h;
  cert.lhs = std::max(alpha, lam * h_max * h_max);
  cert.threshold = std::isinf(kappa_cr) ? 0.0 : 1.0 / (kappa_cr * kappa_cr);
  cert.margin = cert.threshold - cert.lhs;
  cert.certified = cert.margin >= 0.0;
  return cert;
}

void write_certificate(std::ostream& out, const GlbCertificate& cert) {
  std::ostringstream s;
  s.precision(12);
  s << "condition = " << to_string(cert.condition) << '\n'
    << "lhs = " << cert.lhs << '\n'
    << "threshold = " << cert.threshold << '\n'
    << "margin = " << cert.margin << '\n';
  if (cert.margin_i) s << "margin_i = " << *cert.margin_i << '\n';
  if (cert.margin_ii) s << "margin_ii = " << *cert.margin_ii << '\n';
  s << "verdict = " << cert.verdict() << '\n';
  out << s.str();
}

}  // namespace wgs
