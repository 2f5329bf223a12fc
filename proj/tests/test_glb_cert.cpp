#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <sstream>

#include "wgstokes/eigensolver.hpp"
#include "wgstokes/glb_cert.hpp"

using namespace wgs;

TEST_CASE("derived constants") {
  const GlbParams p = derive_constants(0.0, 1.0, 0.5, 2);
  CHECK(p.delta == 0.25);
  CHECK(std::abs(p.Lambda - 5.0 / 9.0) < 1e-15);
  const GlbParams half = derive_constants(0.0, 1.0, 0.25, 2);
  CHECK(half.delta == p.delta / 4);
  CHECK(half.Lambda == p.Lambda);
  const GlbParams p3 = derive_constants(0.1, 2.0, 0.1, 3);
  CHECK(std::abs(p3.Lambda - (2.0 + 0.5) * 2.0 / 4.0) < 1e-15);
  CHECK(std::abs(p3.delta - 0.04) < 1e-16);

  CHECK_THROWS_AS(derive_constants(0.0, 0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(derive_constants(-0.1, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(derive_constants(0.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(derive_constants(0.0, 1.0, 0.5, 0), std::invalid_argument);
  CHECK_THROWS_AS(derive_constants(0.0, std::numeric_limits<double>::quiet_NaN(), 0.5), std::invalid_argument);
}

TEST_CASE("conditions (i) and (ii)") {
  GlbParams p = derive_constants(0.0, 1.0, 0.5);
  REQUIRE(p.delta == 0.25);

  const GlbCertificate ok = check_conditions(p, std::nullopt, 3.0);
  CHECK(ok.condition == GlbCondition::II);
  CHECK(ok.lhs == 0.75);
  CHECK(ok.margin == 0.25);
  CHECK(ok.certified);
  CHECK_FALSE(ok.margin_i.has_value());
  CHECK(ok.verdict() == "certified-lower-bound");

  const GlbCertificate bad = check_conditions(p, std::nullopt, 5.0);
  CHECK(bad.lhs == 1.25);
  CHECK(bad.margin == -0.25);
  CHECK_FALSE(bad.certified);
  CHECK(bad.verdict() == "not-certified");

  // (ii) fails but (i) holds with the reference value.
  const GlbCertificate via_ref = check_conditions(p, 3.5, 5.0);
  CHECK(via_ref.condition == GlbCondition::I);
  CHECK(via_ref.certified);
  CHECK(via_ref.lhs == 0.875);
  CHECK(*via_ref.margin_i == 0.125);
  CHECK(*via_ref.margin_ii == -0.25);

  // alpha shifts both sides by alpha Lambda.
  p = derive_constants(1.8, 1.0, 0.5);
  const GlbCertificate shifted = check_conditions(p, std::nullopt, 1.0);
  CHECK(std::abs(shifted.lhs - 1.25) < 1e-15);
  CHECK_FALSE(shifted.certified);
  p = derive_constants(0.9, 1.0, 0.5);
  CHECK(check_conditions(p, std::nullopt, 1.0).certified);

  CHECK_THROWS_AS(check_conditions(p, std::nullopt, 0.0), std::invalid_argument);
}

TEST_CASE("lowest-order criterion") {
  const double kappa = 1.0 / std::sqrt(10.0);
  const GlbCertificate c = check_lowest_order(0.0, 1.0 / 64, kappa, std::nullopt, 52.35);
  CHECK(c.condition == GlbCondition::LowestOrder);
  CHECK(std::abs(c.lhs - 52.35 / 4096) < 1e-15);
  CHECK(std::abs(c.threshold - 10.0) < 1e-12);
  CHECK(c.certified);

  // The reference lowers the minimum.
  const GlbCertificate r = check_lowest_order(0.0, 1.0 / 64, kappa, 40.0, 52.35);
  CHECK(std::abs(r.lhs - 40.0 / 4096) < 1e-15);

  // alpha above the threshold dominates.
  const GlbCertificate a = check_lowest_order(11.0, 1.0 / 64, kappa, std::nullopt, 1e-6);
  CHECK(a.lhs == 11.0);
  CHECK_FALSE(a.certified);

  const GlbCertificate inf = check_lowest_order(0.0, 1e-8, std::numeric_limits<double>::infinity(), std::nullopt, 1e-3);
  CHECK(inf.threshold == 0.0);
  CHECK_FALSE(inf.certified);

  CHECK_THROWS_AS(check_lowest_order(0.0, 0.1, 0.0, std::nullopt, 1.0), std::invalid_argument);
}

TEST_CASE("increasing alpha or h_max never creates a certificate") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const double alpha = 0.5 * u(rng), c_apx = 0.05 + 2 * u(rng), h = 0.01 + 0.5 * u(rng);
    const double lam_h = 1.0 + 100 * u(rng), lam_ref = 1.0 + 100 * u(rng), kappa = 0.2 + 3 * u(rng);
    const double grow = 1.0 + u(rng);
    const auto base = check_conditions(derive_constants(alpha, c_apx, h), lam_ref, lam_h);
    const auto more_alpha = check_conditions(derive_constants(alpha * grow + 0.01, c_apx, h), lam_ref, lam_h);
    const auto more_h = check_conditions(derive_constants(alpha, c_apx, h * grow), lam_ref, lam_h);
    if (!base.certified) {
      CHECK_FALSE(more_alpha.certified);
      CHECK_FALSE(more_h.certified);
    }
    // Each condition's own margin can only shrink.
    CHECK(*more_alpha.margin_i <= *base.margin_i + 1e-15);
    CHECK(*more_alpha.margin_ii <= *base.margin_ii + 1e-15);
    CHECK(*more_h.margin_i <= *base.margin_i + 1e-15);
    CHECK(*more_h.margin_ii <= *base.margin_ii + 1e-15);

    const auto lo = check_lowest_order(alpha, h, kappa, lam_ref, lam_h);
    const auto lo_alpha = check_lowest_order(alpha * grow + 0.01, h, kappa, lam_ref, lam_h);
    const auto lo_h = check_lowest_order(alpha, h * grow, kappa, lam_ref, lam_h);
    if (!lo.certified) {
      CHECK_FALSE(lo_alpha.certified);
      CHECK_FALSE(lo_h.certified);
    }
  }
}

TEST_CASE("certificate block") {
  std::ostringstream s;
  write_certificate(s, check_conditions(derive_constants(0.0, 1.0, 0.5), 3.5, 5.0));
  const std::string text = s.str();
  CHECK(text.find("condition = i\n") != std::string::npos);
  CHECK(text.find("margin = 0.125\n") != std::string::npos);
  CHECK(text.find("margin_ii = -0.25\n") != std::string::npos);
  CHECK(text.find("verdict = certified-lower-bound\n") != std::string::npos);
}

TEST_CASE("a passing certificate agrees with the computed eigenvalue") {
  // Skeletal stabilizer with a small alpha on the unit square.
  const double lambda_ref = 52.3446911;
  const auto mesh = std::make_shared<const Mesh>(build_unit_square_mesh(8));
  const AssembledSystem sys = assemble(WgSpace(mesh, 1), GammaSchedule::constant(), Stabilizer::skeletal(0.05));
  const EigenResult res = solve_smallest(sys);
  const GlbCertificate cert = check_conditions(derive_constants(0.05, 0.5, mesh->h_max), lambda_ref, res.eigenvalues[0]);
  REQUIRE(cert.certified);
  CHECK(res.eigenvalues[0] <= lambda_ref);
}
