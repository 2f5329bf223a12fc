#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include <Eigen/LU>

#include "oracles.hpp"
#include "wgstokes/eigensolver.hpp"
#include "wgstokes/source_solver.hpp"

using namespace wgs;
using oracle::Poly2;

namespace {

std::shared_ptr<const Mesh> square(int n) { return std::make_shared<const Mesh>(build_unit_square_mesh(n)); }

// psi = x^2 (1-x)^2 y^2 (1-y)^2, built symbolically.
Poly2 stream_poly() {
  const Poly2 x = Poly2::monomial(1, 0), y = Poly2::monomial(0, 1), one = Poly2::monomial(0, 0);
  const Poly2 X = x * x * (one - x) * (one - x), Y = y * y * (one - y) * (one - y);
  return X * Y;
}

struct Exact {
  Poly2 u1, u2, p, f1, f2, lap1, lap2;
};

Exact exact_solution() {
  const Poly2 psi = stream_poly();
  Exact e;
  e.u1 = psi.dy();
  e.u2 = -psi.dx();
  e.p = Poly2::monomial(1, 1) - Poly2::monomial(0, 0, 0.25);
  e.lap1 = e.u1.dx().dx() + e.u1.dy().dy();
  e.lap2 = e.u2.dx().dx() + e.u2.dy().dy();
  e.f1 = -e.lap1 + e.p.dx();
  e.f2 = -e.lap2 + e.p.dy();
  return e;
}

Eigen::VectorXd random_velocity(const WgSpace& space, std::mt19937& rng) {
  std::normal_distribution<double> d;
  Eigen::VectorXd v(space.num_velocity());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = d(rng);
  return v;
}

// (g, v0) by an independent degree-10 rule.
double interior_pairing(const WgSpace& space, const Eigen::VectorXd& v, const Poly2& g1, const Poly2& g2) {
  double s = 0.0;
  for (const auto& c : space.mesh().cells)
    for (const auto& qp : map_to_cell(cell_quadrature(10), space.mesh(), c)) {
      const Vec2 v0 = evaluate_interior(space, v, c.id, qp.x);
      s += qp.w * (g1(qp.x) * v0.x() + g2(qp.x) * v0.y());
    }
  return s;
}

}  // namespace

TEST_CASE("manufactured data agree with a symbolic derivation") {
  const ManufacturedCase mc = ManufacturedCase::stream_function();
  const Exact ex = exact_solution();
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const Vec2 x(d(rng), d(rng));
    CHECK((mc.u(x) - Vec2(ex.u1(x), ex.u2(x))).norm() < 1e-14);
    CHECK((mc.f(x) - Vec2(ex.f1(x), ex.f2(x))).norm() < 1e-11);
    CHECK(std::abs(mc.p(x) - ex.p(x)) < 1e-15);
    Eigen::Matrix2d g;
    g << ex.u1.dx()(x), ex.u1.dy()(x), ex.u2.dx()(x), ex.u2.dy()(x);
    CHECK((mc.grad_u(x) - g).norm() < 1e-13);
    // div u = 0 and u = 0 on the boundary.
    CHECK(std::abs(ex.u1.dx()(x) + ex.u2.dy()(x)) < 1e-14);
    CHECK(mc.u(Vec2(0.0, x.y())).norm() < 1e-15);
    CHECK(mc.u(Vec2(x.x(), 1.0)).norm() < 1e-15);
  }
  // Mean-zero pressure.
  const Mesh m = build_unit_square_mesh(2);
  double pint = 0.0;
  for (const auto& c : m.cells)
    for (const auto& qp : map_to_cell(cell_quadrature(2), m, c)) pint += qp.w * mc.p(qp.x);
  CHECK(std::abs(pint) < 1e-15);
}

TEST_CASE("discrete solution is divergence free with mean-zero pressure") {
  for (int k = 1; k <= 3; ++k) {
    const WgSpace space(square(4), k);
    const AssembledSystem sys = assemble(space, GammaSchedule::constant(), Stabilizer::standard());
    const SourceSolution sol = solve_source(sys, ManufacturedCase::stream_function());
    CHECK((sys.B * sol.solution.velocity).norm() < 1e-12);
    CHECK(std::abs(pressure_integral(space, sol.solution.pressure)) < 1e-13);
    CHECK(sol.residual < 1e-11);
  }
}

TEST_CASE("zero data gives the zero solution") {
  ManufacturedCase zero;
  zero.name = "zero";
  zero.u = [](const Vec2&) { return Vec2(0.0, 0.0); };
  zero.grad_u = [](const Vec2&) { return Eigen::Matrix2d(Eigen::Matrix2d::Zero()); };
  zero.p = [](const Vec2&) { return 0.0; };
  zero.f = zero.u;
  const WgSpace space(square(4), 2);
  const SourceSolution sol = solve_source(space, GammaSchedule::constant(), Stabilizer::standard(), zero);
  CHECK(sol.solution.velocity.norm() == 0.0);
  CHECK(sol.solution.pressure.norm() == 0.0);
  CHECK(sol.errors.e_V == 0.0);
}

TEST_CASE("matches a dense solve at h = 1/8, k = 1") {
  const WgSpace space(square(8), 1);
  const AssembledSystem sys = assemble(space, GammaSchedule::constant(), Stabilizer::standard());
  const ManufacturedCase mc = ManufacturedCase::stream_function();
  const SourceSolution sol = solve_source(sys, mc);

  // [[A, -B^T, 0], [B, 0, c], [0, c^T, 0]] with c the pressure-basis integrals.
  const int nv = space.num_velocity(), np = space.num_pressure(), n = nv + np + 1;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  K.topLeftCorner(nv, nv) = Eigen::MatrixXd(sys.A);
  K.block(0, nv, nv, np) = -Eigen::MatrixXd(sys.B).transpose();
  K.block(nv, 0, np, nv) = Eigen::MatrixXd(sys.B);
  for (const auto& c : space.mesh().cells) {
    K(nv + c.id, n - 1) = c.area;
    K(n - 1, nv + c.id) = c.area;
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs.head(nv) = load_vector(space, mc.f);
  const Eigen::VectorXd x = K.partialPivLu().solve(rhs);
  CHECK((x.head(nv) - sol.solution.velocity).norm() < 1e-10 * x.head(nv).norm());
  CHECK((x.segment(nv, np) - sol.solution.pressure).norm() < 1e-9 * x.segment(nv, np).norm());

  // Pinned values for this configuration.
  CHECK(sol.errors.e_V == doctest::Approx(0.0660735).epsilon(1e-5));
  CHECK(sol.errors.e_p == doctest::Approx(0.0176761).epsilon(1e-5));
  CHECK(sol.errors.e_0 == doctest::Approx(0.00474862).epsilon(1e-5));
}

TEST_CASE("error functionals vanish on projections of the exact solution") {
  const ManufacturedCase mc = ManufacturedCase::stream_function();
  for (int k = 1; k <= 3; ++k) {
    const WgSpace space(square(4), k);
    WeakFunction w = project_Qh(space, mc.u);
    w.pressure = project_pressure(space, mc.p);
    const SourceErrors e = error_functionals(space, w, mc);
    CHECK(e.e_V < 1e-14);
    CHECK(e.e_p < 1e-14);
    CHECK(e.e_0 < 1e-14);
  }
}

TEST_CASE("convergence rates") {
  const ManufacturedCase mc = ManufacturedCase::stream_function();
  for (const auto& [k, ns] : {std::pair{1, std::vector<int>{4, 8, 16, 32}}, std::pair{2, std::vector<int>{4, 8, 16}}}) {
    std::vector<double> hs, ev, e0;
    for (int n : ns) {
      const SourceSolution sol = solve_source(WgSpace(square(n), k), GammaSchedule::constant(), Stabilizer::standard(), mc);
      hs.push_back(1.0 / n);
      ev.push_back(sol.errors.e_V);
      e0.push_back(sol.errors.e_0);
    }
    // Last-pair rates.
    const std::size_t l = hs.size() - 1;
    const double rv = std::log(ev[l - 1] / ev[l]) / std::log(2.0);
    const double r0 = std::log(e0[l - 1] / e0[l]) / std::log(2.0);
    CHECK(rv > k - 0.1);
    CHECK(rv < k + 0.3);
    CHECK(r0 > k + 1 - 0.15);
    CHECK(r0 < k + 1 + 0.3);
  }
}

TEST_CASE("consistency identities for the projected exact solution") {
  // (grad_w Q_h u, grad_w v) = (-lap u, v0) + l_u(v)
  // (div_w v, Q_h p)        = -(grad p, v0) + theta_p(v)
  const ManufacturedCase mc = ManufacturedCase::stream_function();
  const Exact ex = exact_solution();
  std::mt19937 rng(2);
  for (int k = 1; k <= 3; ++k) {
    const WgSpace space(square(4), k);
    const AssembledSystem sys = assemble(space, GammaSchedule::constant(), Stabilizer::standard());
    const SparseMatrix G = sys.A - sys.S;
    const WeakFunction qu = project_Qh(space, mc.u);
    const Eigen::VectorXd qp = project_pressure(space, mc.p);
    double largest_l = 0.0;
    for (int t = 0; t < 20; ++t) {
      const Eigen::VectorXd v = random_velocity(space, rng);
      const double lu = consistency_functional(space, v, mc.grad_u);
      const double tp = pressure_functional(space, v, mc.p);
      largest_l = std::max(largest_l, std::abs(lu));

      const double lhs_grad = v.dot(G * qu.velocity);
      const double rhs_grad = interior_pairing(space, v, -ex.lap1, -ex.lap2) + lu;
      CHECK(std::abs(lhs_grad - rhs_grad) < 1e-9 * std::max(1.0, std::abs(lhs_grad)));

      const double lhs_div = (sys.B * v).dot(qp);
      const double rhs_div = -interior_pairing(space, v, ex.p.dx(), ex.p.dy()) + tp;
      CHECK(std::abs(lhs_div - rhs_div) < 1e-9 * std::max(1.0, std::abs(lhs_div)));

      // Combined error equation with the load vector.
      const double combined = lhs_grad - lhs_div;
      const double expected = load_vector(space, mc.f).dot(v) + lu - tp;
      CHECK(std::abs(combined - expected) < 1e-8 * std::max(1.0, std::abs(combined)));
    }
    // The functionals are not trivially zero.
    CHECK(largest_l > 1e-6);
  }
}
