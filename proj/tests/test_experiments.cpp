#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "wgstokes/experiments.hpp"

using namespace wgs;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Computed once; both reference sets are expensive.
const ReferenceSet& square_reference() {
  static const ReferenceSet r = reference_eigenvalues(DomainTag::UnitSquare, 6);
  return r;
}

}  // namespace

TEST_CASE("tabulate computes errors, orders and lower-bound flags") {
  const std::vector<int> hs{4, 8, 16};
  const std::vector<std::vector<double>> lam{{8.0, 18.0}, {10.0, 21.0}, {11.0, 22.5}};
  const std::vector<double> ref{12.0, 22.0};
  const auto rows = tabulate(hs, lam, ref, 2);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].n == 4);
  CHECK(rows[0].h == 0.25);
  CHECK(rows[0].j == 1);
  CHECK(rows[0].error == 4.0);
  CHECK_FALSE(rows[0].order.has_value());
  CHECK(rows[0].lower_bound);
  // errors 4, 2, 1 for j=1: order 1 on both refinements
  CHECK(std::abs(*rows[2].order - 1.0) < 1e-14);
  CHECK(std::abs(*rows[4].order - 1.0) < 1e-14);
  // j=2: errors 4, 1, -0.5; the sign change leaves the last order empty
  CHECK(std::abs(*rows[3].order - 2.0) < 1e-14);
  CHECK_FALSE(rows[5].order.has_value());
  CHECK_FALSE(rows[5].lower_bound);
}

TEST_CASE("failed levels stay in the table") {
  const auto rows = tabulate({4, 8, 16}, {{10.0}, {}, {11.5}}, {12.0}, 1, {"", "solver blew up", ""});
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].failed);
  CHECK(rows[1].failure == "solver blew up");
  CHECK_FALSE(rows[2].failed);
  // The order skips the failed level.
  CHECK_FALSE(rows[2].order.has_value());

  const LowerBoundReport rep = lower_bound_report(rows, GammaSchedule::power(0.1));
  CHECK(rep.rows == 3);
  CHECK(rep.failed == 1);
  CHECK(rep.lower == 2);
  CHECK(rep.fraction == 1.0);
  CHECK(rep.hypothesis);
  CHECK(rep.summary().find("1 failed") != std::string::npos);
}

TEST_CASE("lower-bound report lists violations") {
  const auto rows = tabulate({4, 8}, {{10.0, 25.0}, {11.0, 21.0}}, {12.0, 22.0}, 2);
  const LowerBoundReport rep = lower_bound_report(rows, GammaSchedule::constant());
  CHECK(rep.lower == 3);
  CHECK(rep.fraction == 0.75);
  CHECK_FALSE(rep.hypothesis);
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0] == std::pair<int, int>{4, 2});
  const std::string s = rep.summary();
  CHECK(s.find("uncertified") != std::string::npos);
  CHECK(s.find("h=1/4, j=2") != std::string::npos);
}

TEST_CASE("CSV layout") {
  StudyResult res;
  res.config.domain = DomainTag::LShape;
  res.config.k = 2;
  res.config.gamma = GammaSchedule::power(0.1);
  res.config.num_eigs = 1;
  res.reference.values = {32.1};
  res.reference.provenance = "user";
  res.rows = tabulate({4, 8, 16}, {{30.123456789012345}, {}, {32.0}}, {32.1}, 1, {"", "x", ""});
  std::ostringstream s;
  write_csv(s, res, {{"tol", "1e-10"}});
  const auto l = lines_of(s.str());
  REQUIRE(l.size() == 6);
  CHECK(l[0] == "# tol = 1e-10");
  CHECK(l[1] == "# reference = user");
  CHECK(l[2] == "domain,k,gamma,h,j,lambda_h,lambda_ref,error,order,lower_bound");
  const auto first = split(l[3]);
  REQUIRE(first.size() == 10);
  CHECK(first[0] == "l-shape");
  CHECK(first[1] == "2");
  CHECK(first[2] == "pow:0.1");
  CHECK(first[3] == "0.25");
  CHECK(first[5] == "30.123456789");
  CHECK(first[8].empty());
  CHECK(first[9] == "true");
  CHECK(l[4] == "l-shape,2,pow:0.1,0.125,1,,32.1,,,failed");
  CHECK(split(l[5])[9] == "true");
}

TEST_CASE("error plot is well-formed SVG") {
  const auto rows = tabulate({4, 8, 16}, {{8.0}, {10.0}, {11.0}}, {12.0}, 1);
  std::stringstream s;
  write_error_plot(s, rows, 1, "square & <test>");
  boost::property_tree::ptree tree;
  REQUIRE_NOTHROW(boost::property_tree::read_xml(s, tree));
  CHECK(tree.count("svg") == 1);

  std::stringstream empty;
  write_error_plot(empty, rows, 7, "nothing");
  boost::property_tree::ptree t2;
  CHECK_NOTHROW(boost::property_tree::read_xml(empty, t2));
}

TEST_CASE("Richardson extrapolation and rate model") {
  const double lam = 7.5, c = 3.0;
  for (double rate : {2.0, 4.0, 1.0889}) {
    const double h = 0.1;
    CHECK(std::abs(richardson(lam + c * std::pow(h, rate), lam + c * std::pow(h / 2, rate), rate) - lam) < 1e-13);
  }
  const double z = corner_singularity_exponent(1.5 * M_PI);
  CHECK(std::abs(z - 0.5444837) < 1e-6);
  CHECK(std::abs(std::sin(1.5 * M_PI * z) + z * std::sin(1.5 * M_PI)) < 1e-12);
  CHECK(convergence_rate_model(DomainTag::UnitSquare, 1) == 2.0);
  CHECK(convergence_rate_model(DomainTag::UnitSquare, 2) == 4.0);
  CHECK(std::abs(convergence_rate_model(DomainTag::LShape, 1) - 2 * z) < 1e-12);
  CHECK(std::abs(convergence_rate_model(DomainTag::LShape, 3) - 2 * z) < 1e-12);
}

TEST_CASE("square reference eigenvalues") {
  const ReferenceSet& r = square_reference();
  REQUIRE(r.values.size() == 6);
  CHECK(std::abs(r.values[0] - 52.344691168) < 1e-3);
  CHECK_FALSE(r.low_confidence);
  CHECK(r.provenance.find("richardson") != std::string::npos);
  for (std::size_t j = 1; j < r.values.size(); ++j) CHECK(r.values[j] >= r.values[j - 1]);

  // One level coarser agrees to within the expected extrapolation error.
  ReferenceOptions coarse;
  coarse.n_coarse = 8;
  const ReferenceSet r8 = reference_eigenvalues(DomainTag::UnitSquare, 6, coarse);
  for (std::size_t j = 0; j < 6; ++j) CHECK(std::abs(r8.values[j] - r.values[j]) < 1e-3 * r.values[j]);
}

TEST_CASE("L-shape reference eigenvalue") {
  const ReferenceSet r = reference_eigenvalues(DomainTag::LShape, 1);
  REQUIRE(r.values.size() == 1);
  CHECK(std::abs(r.values[0] - 32.13269465) < 1e-2);
}

TEST_CASE("studies are deterministic and respect gamma ordering") {
  StudyConfig cfg;
  cfg.h_seq = {4, 8};
  cfg.reference = square_reference();
  const StudyResult a = run_study(cfg);
  const StudyResult b = run_study(cfg);
  REQUIRE(a.rows.size() == 12);
  for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i].lambda_h == b.rows[i].lambda_h);
  std::ostringstream sa, sb;
  write_csv(sa, a);
  write_csv(sb, b);
  CHECK(sa.str() == sb.str());

  // gamma = h^0.1 < 1 shrinks the stabilizer, hence every eigenvalue.
  StudyConfig pow_cfg = cfg;
  pow_cfg.gamma = GammaSchedule::power(0.1);
  const StudyResult p = run_study(pow_cfg);
  for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(p.rows[i].lambda_h <= a.rows[i].lambda_h + 1e-10);

  // With gamma -> 0 every error is positive on this range.
  const LowerBoundReport rep = lower_bound_report(p.rows, pow_cfg.gamma);
  CHECK(rep.fraction == 1.0);
  CHECK(rep.violations.empty());
}

TEST_CASE("run_study records failed levels") {
  StudyConfig cfg;
  cfg.h_seq = {4, 8};
  cfg.tol = 1e-300;
  cfg.reference = ReferenceSet{{52.3, 92.1, 92.1, 128.2, 154.1, 167.0}, "user", false, {}};
  const StudyResult r = run_study(cfg);
  REQUIRE(r.rows.size() == 12);
  for (const auto& row : r.rows) {
    CHECK(row.failed);
    CHECK_FALSE(row.failure.empty());
  }
  CHECK_FALSE(r.finest.has_value());
}

TEST_CASE("config validation") {
  StudyConfig cfg;
  cfg.k = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.h_seq = {};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.h_seq = {8, 4};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.num_eigs = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.reference = ReferenceSet{{1.0}, "user", false, {}};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.domain = DomainTag::Custom;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  CHECK_NOTHROW(StudyConfig{}.validate());
}

TEST_CASE("raster export of an L-shape mode") {
  StudyConfig cfg;
  cfg.domain = DomainTag::LShape;
  cfg.h_seq = {2, 4};
  cfg.num_eigs = 1;
  cfg.reference = ReferenceSet{{32.13}, "user", false, {}};
  const StudyResult r = run_study(cfg);
  REQUIRE(r.finest.has_value());
  const WgSpace space(r.finest->mesh, r.finest->k);
  for (const auto comp : {FieldComponent::U1, FieldComponent::Magnitude, FieldComponent::Pressure}) {
    std::ostringstream s;
    write_raster(s, space, r.finest->eigen.modes[0], comp);
    std::vector<std::vector<std::string>> grid;
    for (const auto& l : lines_of(s.str()))
      if (!l.empty() && l[0] != '#') grid.push_back(split(l));
    REQUIRE(grid.size() == 129);
    for (const auto& row : grid) CHECK(row.size() == 129);
    // Grid index 96 is x = y = 0.5, inside the removed quadrant.
    CHECK(grid[96][96] == "nan");
    CHECK(grid[32][32] != "nan");
    CHECK(grid[96][32] != "nan");
    CHECK(std::isfinite(std::stod(grid[32][96])));
  }

  const auto dir = std::filesystem::temp_directory_path() / "wgstokes_export_test";
  std::filesystem::remove_all(dir);
  const auto written = export_study(r, (dir / "sub" / "run").string());
  CHECK(written.size() == 1 + 1 + 4);
  for (const auto& p : written) CHECK(std::filesystem::file_size(p) > 0);
  std::filesystem::remove_all(dir);
}
