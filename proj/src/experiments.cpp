#include "wgstokes/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>

namespace wgs {

namespace {

std::string fmt(double x, int digits = 12) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

std::string xml_escape(const std::string& text) {
  std::string out;
  for (const char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

// Bucket grid over the cells' bounding boxes for point location.
class CellLocator {
 public:
  explicit CellLocator(const Mesh& mesh) : mesh_(mesh) {
    lo_ = hi_ = mesh.point(0);
    for (const auto& v : mesh.vertices) {
      lo_ = lo_.cwiseMin(v.point());
      hi_ = hi_.cwiseMax(v.point());
    }
    nb_ = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(mesh.cells.size()))));
    buckets_.resize(static_cast<std::size_t>(nb_ * nb_));
    for (const auto& c : mesh.cells) {
      Vec2 a = mesh.point(c.vertices[0]), b = a;
      for (const int v : c.vertices) {
        a = a.cwiseMin(mesh.point(v));
        b = b.cwiseMax(mesh.point(v));
      }
      const auto [i0, j0] = bucket(a);
      const auto [i1, j1] = bucket(b);
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j * nb_ + i)].push_back(c.id);
    }
  }

  Vec2 lower() const { return lo_; }
  Vec2 upper() const { return hi_; }

  /// Cell containing x, or -1.
  int find(const Vec2& x) const {
    if ((x.array() < lo_.array() - 1e-12).any() || (x.array() > hi_.array() + 1e-12).any()) return -1;
    const auto [i, j] = bucket(x);
    for (const int c : buckets_[static_cast<std::size_t>(j * nb_ + i)])
      if (contains(mesh_.cells[static_cast<std::size_t>(c)], x)) return c;
    return -1;
  }

 private:
  std::pair<int, int> bucket(const Vec2& x) const {
    const Vec2 ext = (hi_ - lo_).cwiseMax(1e-300);
    auto idx = [&](double t, double l, double e) {
      return std::clamp(static_cast<int>((t - l) / e * nb_), 0, nb_ - 1);
    };
    return {idx(x.x(), lo_.x(), ext.x()), idx(x.y(), lo_.y(), ext.y())};
  }

  bool contains(const Cell& c, const Vec2& x) const {
    const double tol = -1e-12 * c.area;
    for (int i = 0; i < 3; ++i) {
      const Vec2 a = mesh_.point(c.vertices[static_cast<std::size_t>(i)]);
      const Vec2 b = mesh_.point(c.vertices[static_cast<std::size_t>((i + 1) % 3)]);
      const double cross = (b.x() - a.x()) * (x.y() - a.y()) - (b.y() - a.y()) * (x.x() - a.x());
      if (0.5 * cross < tol) return false;
    }
    return true;
  }

  const Mesh& mesh_;
  Vec2 lo_, hi_;
  int nb_ = 1;
  std::vector<std::vector<int>> buckets_;
};

std::ofstream open_output(const std::string& path) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace

double corner_singularity_exponent(double omega) {
  if (!(omega > std::numbers::pi && omega < 2.0 * std::numbers::pi))
    throw std::invalid_argument("corner angle must lie in (pi, 2 pi)");
  auto f = [omega](double z) { return std::sin(omega * z) + z * std::sin(omega); };
  boost::uintmax_t iters = 200;
  const auto [a, b] =
      boost::math::tools::toms748_solve(f, 0.5, 1.0, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (a + b);
}

double convergence_rate_model(DomainTag domain, int k) {
  const double smooth = 2.0 * k;
  if (domain == DomainTag::LShape)
    return std::min(smooth, 2.0 * corner_singularity_exponent(1.5 * std::numbers::pi));
  return smooth;
}

double richardson(double coarse, double fine, double rate) {
  return fine + (fine - coarse) / (std::pow(2.0, rate) - 1.0);
}

std::shared_ptr<const Mesh> build_domain_mesh(DomainTag domain, int n, Diagonal diagonal) {
  switch (domain) {
    case DomainTag::UnitSquare: return std::make_shared<const Mesh>(build_unit_square_mesh(n, diagonal));
    case DomainTag::LShape: return std::make_shared<const Mesh>(build_l_shape_mesh(n, diagonal));
    case DomainTag::Custom: break;
  }
  throw std::invalid_argument("studies need a square or l-shape domain");
}

ReferenceSet reference_eigenvalues(DomainTag domain, int m, const ReferenceOptions& options) {
  if (m < 1) throw std::invalid_argument("need at least one reference eigenvalue");
  if (options.k < 1 || options.k > 3) throw std::invalid_argument("reference degree must be 1..3");
  if (options.n_coarse < 1) throw std::invalid_argument("reference level must be >= 1");
  const double rate = options.rate.value_or(convergence_rate_model(domain, options.k));

  std::vector<std::vector<double>> levels;
  for (const int n : {options.n_coarse, 2 * options.n_coarse}) {
    const WgSpace space(build_domain_mesh(domain, n, options.diagonal), options.k);
    const AssembledSystem sys = assemble(space, GammaSchedule::constant(), Stabilizer::standard());
    levels.push_back(solve_smallest(sys, {m, options.tol}).eigenvalues);
  }

  ReferenceSet ref;
  ref.provenance = "richardson k=" + std::to_string(options.k) + " n=" + std::to_string(options.n_coarse) + "," +
                   std::to_string(2 * options.n_coarse) + " rate=" + fmt(rate, 6);
  for (int j = 0; j < m; ++j) {
    const double c = levels[0][static_cast<std::size_t>(j)], f = levels[1][static_cast<std::size_t>(j)];
    if (f < c) {
      ref.low_confidence = true;
      ref.warnings.push_back("eigenvalue " + std::to_string(j + 1) +
                             ": levels decrease under refinement, extrapolation unreliable");
    }
    ref.values.push_back(richardson(c, f, rate));
  }
  // A nearly double pair can swap order after extrapolation.
  std::sort(ref.values.begin(), ref.values.end());
  return ref;
}

void StudyConfig::validate() const {
  if (domain == DomainTag::Custom) throw std::invalid_argument("domain must be square or l-shape");
  if (k < 1 || k > 3) throw std::invalid_argument("k must satisfy 1 <= k <= 3");
  if (num_eigs < 1) throw std::invalid_argument("num-eigs must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  if (h_seq.empty()) throw std::invalid_argument("h sequence is empty");
  for (std::size_t i = 0; i < h_seq.size(); ++i) {
    if (h_seq[i] < 1) throw std::invalid_argument("h denominators must be >= 1");
    if (i > 0 && h_seq[i] <= h_seq[i - 1]) throw std::invalid_argument("h sequence must be strictly decreasing");
  }
  if (gamma.kind == GammaSchedule::Kind::Log && h_seq.front() < 2)
    throw std::invalid_argument("gamma log needs h < 1");
  if (reference && static_cast<int>(reference->values.size()) < num_eigs)
    throw std::invalid_argument("fewer reference eigenvalues than num-eigs");
}

std::vector<StudyRow> tabulate(const std::vector<int>& h_seq, const std::vector<std::vector<double>>& eigenvalues,
                               const std::vector<double>& reference, int num_eigs,
                               const std::vector<std::string>& failures) {
  std::vector<StudyRow> rows;
  for (std::size_t l = 0; l < h_seq.size(); ++l) {
    const auto& lam = eigenvalues[l];
    const bool failed = static_cast<int>(lam.size()) < num_eigs;
    for (int j = 1; j <= num_eigs; ++j) {
      StudyRow r;
      r.n = h_seq[l];
      r.h = 1.0 / r.n;
      r.j = j;
      r.lambda_ref = reference[static_cast<std::size_t>(j - 1)];
      r.failed = failed;
      if (failed) {
        r.failure = l < failures.size() ? failures[l] : "solve failed";
        r.lambda_h = r.error = std::numeric_limits<double>::quiet_NaN();
      } else {
        r.lambda_h = lam[static_cast<std::size_t>(j - 1)];
        r.error = r.lambda_ref - r.lambda_h;
        r.lower_bound = r.error >= 0.0;
      }
      if (l > 0 && !failed) {
        const StudyRow& prev = rows[rows.size() - static_cast<std::size_t>(num_eigs)];
        if (!prev.failed && prev.error * r.error > 0.0)
          r.order = std::log(prev.error / r.error) / std::log(prev.h / r.h);
      }
      rows.push_back(r);
    }
  }
  return rows;
}

StudyResult run_study(const StudyConfig& config) {
  config.validate();
  StudyResult result;
  result.config = config;
  if (config.reference) {
    result.reference = *config.reference;
  } else {
    ReferenceOptions ro = config.reference_options;
    ro.diagonal = config.diagonal;
    result.reference = reference_eigenvalues(config.domain, config.num_eigs, ro);
  }

  std::vector<std::vector<double>> eigenvalues;
  std::vector<std::string> failures;
  for (const int n : config.h_seq) {
    try {
      auto mesh = build_domain_mesh(config.domain, n, config.diagonal);
      const WgSpace space(mesh, config.k);
      const AssembledSystem sys = assemble(space, config.gamma, config.stabilizer);
      EigenResult eig = solve_smallest(sys, {config.num_eigs, config.tol});
      eigenvalues.push_back(eig.eigenvalues);
      failures.emplace_back();
      result.finest = StudySnapshot{mesh, config.k, std::move(eig)};
    } catch (const std::exception& e) {
      eigenvalues.emplace_back();
      failures.emplace_back(e.what());
    }
  }
  result.rows = tabulate(config.h_seq, eigenvalues, result.reference.values, config.num_eigs, failures);
  return result;
}

std::string LowerBoundReport::summary() const {
  std::ostringstream s;
  const int ok = rows - failed;
  s << "lower bounds: " << lower << "/" << ok << " rows";
  if (ok > 0) s << " (" << fmt(100.0 * fraction, 4) << "%)";
  if (failed > 0) s << ", " << failed << " failed";
  if (!hypothesis) s << ", uncertified: gamma(h) does not vanish as h -> 0";
  for (const auto& [n, j] : violations) s << "\n  negative error at h=1/" << n << ", j=" << j;
  return s.str();
}

LowerBoundReport lower_bound_report(const std::vector<StudyRow>& rows, const GammaSchedule& gamma) {
  LowerBoundReport rep;
  rep.hypothesis = gamma.vanishes_as_h_to_zero();
  for (const auto& r : rows) {
    ++rep.rows;
    if (r.failed) {
      ++rep.failed;
      continue;
    }
    if (r.lower_bound)
      ++rep.lower;
    else
      rep.violations.emplace_back(r.n, r.j);
  }
  const int ok = rep.rows - rep.failed;
  rep.fraction = ok > 0 ? static_cast<double>(rep.lower) / ok : 0.0;
  return rep;
}

void write_csv(std::ostream& out, const StudyResult& result, const Metadata& metadata) {
  std::ostringstream s;
  for (const auto& [key, value] : metadata) s << "# " << key << " = " << value << '\n';
  s << "# reference = " << result.reference.provenance << (result.reference.low_confidence ? " (low confidence)" : "")
    << '\n';
  s << "domain,k,gamma,h,j,lambda_h,lambda_ref,error,order,lower_bound\n";
  const std::string domain = to_string(result.config.domain);
  const std::string gamma = result.config.gamma.to_string();
  for (const auto& r : result.rows) {
    s << domain << ',' << result.config.k << ',' << gamma << ',' << fmt(r.h) << ',' << r.j << ',';
    if (r.failed) {
      s << ',' << fmt(r.lambda_ref) << ",,,failed\n";
      continue;
    }
    s << fmt(r.lambda_h) << ',' << fmt(r.lambda_ref) << ',' << fmt(r.error) << ',';
    if (r.order) s << fmt(*r.order);
    s << ',' << (r.lower_bound ? "true" : "false") << '\n';
  }
  out << s.str();
}

void write_error_plot(std::ostream& out, const std::vector<StudyRow>& rows, int j, const std::string& title) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows)
    if (r.j == j && !r.failed && r.error != 0.0) pts.emplace_back(std::log10(r.h), std::log10(std::abs(r.error)));

  constexpr double W = 480, H = 360, L = 70, R = 20, T = 40, B = 50;
  double x0 = -2, x1 = 0, y0 = -2, y1 = 0;
  if (!pts.empty()) {
    x0 = y0 = std::numeric_limits<double>::infinity();
    x1 = y1 = -x0;
    for (const auto& [x, y] : pts) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
    x0 = std::floor(x0);
    x1 = std::ceil(x1);
    y0 = std::floor(y0);
    y1 = std::ceil(y1);
    if (x1 <= x0) x1 = x0 + 1;
    if (y1 <= y0) y1 = y0 + 1;
  }
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream s;
  s.precision(6);
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\">\n"
    << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n"
    << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
    << xml_escape(title) << "</text>\n"
    << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int d = static_cast<int>(x0); d <= static_cast<int>(x1); ++d)
    s << "<text x=\"" << px(d) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"11\">1e" << d << "</text>\n";
  for (int d = static_cast<int>(y0); d <= static_cast<int>(y1); ++d)
    s << "<text x=\"" << L - 6 << "\" y=\"" << py(d) + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
      << "font-size=\"11\">1e" << d << "</text>\n";
  s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">h</text>\n"
    << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
    << "font-size=\"12\" transform=\"rotate(-90 16 " << (T + H - B) / 2 << ")\">|error|</text>\n";
  if (!pts.empty()) {
    s << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) s << (i ? " " : "") << px(pts[i].first) << ',' << py(pts[i].second);
    s << "\"/>\n";
    for (const auto& [x, y] : pts) s << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"steelblue\"/>\n";
  }
  s << "</svg>\n";
  out << s.str();
}

std::string to_string(FieldComponent c) {
  switch (c) {
    case FieldComponent::U1: return "u1";
    case FieldComponent::U2: return "u2";
    case FieldComponent::Magnitude: return "umag";
    case FieldComponent::Pressure: return "p";
  }
  return "?";
}

void write_raster(std::ostream& out, const WgSpace& space, const WeakFunction& mode, FieldComponent component,
                  int samples) {
  if (samples < 2) throw std::invalid_argument("raster needs at least 2 samples per direction");
  const CellLocator locator(space.mesh());
  const Vec2 lo = locator.lower(), hi = locator.upper();
  std::ostringstream s;
  s.precision(12);
  s << "# field = " << to_string(component) << '\n'
    << "# x = " << lo.x() << ".." << hi.x() << ", y = " << lo.y() << ".." << hi.y() << ", " << samples << "x"
    << samples << " samples, rows by increasing y\n";
  for (int j = 0; j < samples; ++j) {
    const double y = lo.y() + (hi.y() - lo.y()) * j / (samples - 1);
    for (int i = 0; i < samples; ++i) {
      const double x = lo.x() + (hi.x() - lo.x()) * i / (samples - 1);
      const Vec2 p(x, y);
      const int c = locator.find(p);
      if (i) s << ',';
      if (c < 0) {
        s << "nan";
        continue;
      }
      double v = 0.0;
      if (component == FieldComponent::Pressure) {
        v = evaluate_pressure(space, mode.pressure, c, p);
      } else {
        const Vec2 u = evaluate_interior(space, mode.velocity, c, p);
        v = component == FieldComponent::U1 ? u.x() : component == FieldComponent::U2 ? u.y() : u.norm();
      }
      s << v;
    }
    s << '\n';
  }
  out << s.str();
}

std::vector<std::string> export_study(const StudyResult& result, const std::string& prefix, const Metadata& metadata) {
  std::vector<std::string> written;
  {
    const std::string path = prefix + ".csv";
    auto out = open_output(path);
    write_csv(out, result, metadata);
    if (!out) throw std::runtime_error("cannot write " + path);
    written.push_back(path);
  }
  for (int j = 1; j <= result.config.num_eigs; ++j) {
    const std::string path = prefix + "_j" + std::to_string(j) + ".svg";
    auto out = open_output(path);
    write_error_plot(out, result.rows, j,
                     to_string(result.config.domain) + ", k=" + std::to_string(result.config.k) +
                         ", gamma " + result.config.gamma.to_string() + ": eigenvalue " + std::to_string(j));
    if (!out) throw std::runtime_error("cannot write " + path);
    written.push_back(path);
  }
  if (result.finest && !result.finest->eigen.modes.empty()) {
    const WgSpace space(result.finest->mesh, result.finest->k);
    for (const auto c : {FieldComponent::U1, FieldComponent::U2, FieldComponent::Magnitude, FieldComponent::Pressure}) {
      const std::string path = prefix + "_mode1_" + to_string(c) + ".csv";
      auto out = open_output(path);
      write_raster(out, space, result.finest->eigen.modes.front(), c);
      if (!out) throw std::runtime_error("cannot write " + path);
      written.push_back(path);
    }
  }
  return written;
}

}  // namespace wgs
