#include "wgstokes/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "wgstokes/errors.hpp"
#include "wgstokes/experiments.hpp"
#include "wgstokes/glb_cert.hpp"
#include "wgstokes/source_solver.hpp"

namespace wgs {

namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

struct Options {
  std::string domain = "square";
  int k = 1;
  std::string gamma = "const";
  std::string stabilizer = "standard";
  std::string diagonal = "bl-tr";
  std::vector<int> h_seq{4, 8, 16, 32};
  int h = 8;
  int num_eigs = 6;
  double tol = 1e-10;
  std::vector<double> ref;
  int ref_level = 16;
  std::string out;
  std::string config;
  double alpha = kUnset;
  double c_apx = kUnset;
  double kappa_cr = kUnset;
  double lambda_h = kUnset;
  double lambda_ref = kUnset;
  double h_max = kUnset;
};

// Typed view of the options, validated before any computation starts.
struct Settings {
  DomainTag domain = DomainTag::UnitSquare;
  GammaSchedule gamma;
  Stabilizer stabilizer;
  Diagonal diagonal = Diagonal::BottomLeftTopRight;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

DomainTag parse_domain(const std::string& s) {
  if (s == "square") return DomainTag::UnitSquare;
  if (s == "l-shape") return DomainTag::LShape;
  throw std::invalid_argument("unknown domain '" + s + "' (expected square or l-shape)");
}

void check_k(int k) {
  if (k < 1) throw std::invalid_argument("invalid --k " + std::to_string(k) + ": k must satisfy k >= 1");
  if (k > 3) throw std::invalid_argument("invalid --k " + std::to_string(k) + ": k must satisfy k <= 3");
}

void check_n(int n, const char* flag) {
  if (n < 1) throw std::invalid_argument(std::string("invalid ") + flag + ": denominators must be >= 1");
}

Settings settle(const Options& o) {
  Settings s;
  s.domain = parse_domain(o.domain);
  check_k(o.k);
  s.gamma = GammaSchedule::parse(o.gamma);
  s.stabilizer = Stabilizer::parse(o.stabilizer);
  s.diagonal = parse_diagonal(o.diagonal);
  if (!(o.tol > 0.0)) throw std::invalid_argument("invalid --tol: must be > 0");
  if (o.num_eigs < 1) throw std::invalid_argument("invalid --num-eigs: must be >= 1");
  return s;
}

std::string join_values(const CLI::Option* opt) {
  std::string s;
  for (const auto& r : opt->results()) s += (s.empty() ? "" : ",") + r;
  return s;
}

std::string num(double x, int digits = 12) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

std::ofstream open_file(const std::string& path) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  return f;
}

AssembledSystem assemble_for(const Settings& s, int n, int k) {
  const WgSpace space(build_domain_mesh(s.domain, n, s.diagonal), k);
  return assemble(space, s.gamma, s.stabilizer);
}

int cmd_mesh_info(const Options& o, std::ostream& out) {
  const Settings s = settle(o);
  check_n(o.h, "--h");
  const auto mesh = build_domain_mesh(s.domain, o.h, s.diagonal);
  const auto issues = validate(*mesh);
  out << "domain " << to_string(mesh->domain) << ", h = 1/" << o.h << ", diagonal " << to_string(s.diagonal) << '\n'
      << "vertices " << mesh->num_vertices() << ", edges " << mesh->num_edges() << ", cells " << mesh->num_cells()
      << '\n'
      << "h_max " << num(mesh->h_max) << ", area " << num(mesh->total_area()) << '\n';
  const WgSpace space(mesh, o.k);
  out << "k = " << o.k << ": interior " << space.num_interior() << ", edge " << space.num_edge() << ", pressure "
      << space.num_pressure() << " unknowns\n";
  out << (issues.empty() ? "valid" : "INVALID") << '\n';
  for (const auto& v : issues) out << "  " << to_string(v.kind) << ": " << v.message << '\n';
  if (!o.out.empty()) {
    auto f = open_file(o.out + ".mesh");
    write_mesh(f, *mesh);
    out << "wrote " << o.out << ".mesh\n";
  }
  return issues.empty() ? kExitOk : kExitSolver;
}

int cmd_solve_eig(const Options& o, std::ostream& out) {
  const Settings s = settle(o);
  check_n(o.h, "--h");
  const AssembledSystem sys = assemble_for(s, o.h, o.k);
  const EigenResult r = solve_smallest(sys, {o.num_eigs, o.tol});
  out << "domain " << o.domain << ", k = " << o.k << ", h = 1/" << o.h << ", gamma " << s.gamma.to_string() << " ("
      << num(sys.gamma, 8) << "), stabilizer " << s.stabilizer.to_string() << '\n'
      << "unknowns: interior " << sys.space.num_interior() << ", edge " << sys.space.num_edge() << ", pressure "
      << sys.space.num_pressure() << '\n';
  out << std::setw(4) << "j" << std::setw(22) << "lambda_h" << std::setw(14) << "residual" << '\n';
  for (std::size_t j = 0; j < r.eigenvalues.size(); ++j)
    out << std::setw(4) << j + 1 << std::setw(22) << num(r.eigenvalues[j]) << std::setw(14)
        << num(r.residuals[j], 3) << '\n';
  if (!o.out.empty()) {
    {
      auto f = open_file(o.out + "_eigs.csv");
      f << "j,lambda_h,residual\n";
      for (std::size_t j = 0; j < r.eigenvalues.size(); ++j)
        f << j + 1 << ',' << num(r.eigenvalues[j]) << ',' << num(r.residuals[j], 3) << '\n';
    }
    for (const auto c : {FieldComponent::U1, FieldComponent::U2, FieldComponent::Magnitude, FieldComponent::Pressure}) {
      auto f = open_file(o.out + "_mode1_" + to_string(c) + ".csv");
      write_raster(f, sys.space, r.modes.front(), c);
    }
    out << "wrote " << o.out << "_eigs.csv and mode-1 rasters\n";
  }
  return kExitOk;
}

int cmd_solve_source(const Options& o, std::ostream& out) {
  const Settings s = settle(o);
  if (s.domain != DomainTag::UnitSquare)
    throw std::invalid_argument("solve-source: the manufactured solution is defined on the square only");
  for (std::size_t i = 0; i < o.h_seq.size(); ++i) {
    check_n(o.h_seq[i], "--h-seq");
    if (i > 0 && o.h_seq[i] <= o.h_seq[i - 1])
      throw std::invalid_argument("invalid --h-seq: h must be strictly decreasing");
  }
  const ManufacturedCase mcase = ManufacturedCase::stream_function();
  std::ostringstream csv;
  csv << "h,e_V,e_p,e_0,order_V,order_p,order_0\n";
  out << std::setw(8) << "h" << std::setw(14) << "e_V" << std::setw(8) << "order" << std::setw(14) << "e_p"
      << std::setw(8) << "order" << std::setw(14) << "e_0" << std::setw(8) << "order" << '\n';
  SourceErrors prev;
  for (std::size_t i = 0; i < o.h_seq.size(); ++i) {
    const int n = o.h_seq[i];
    const SourceSolution sol = solve_source(assemble_for(s, n, o.k), mcase);
    const SourceErrors& e = sol.errors;
    auto order = [&](double a, double b) {
      return i == 0 || a <= 0 || b <= 0 ? std::string() : num(std::log(a / b) / std::log(double(n) / o.h_seq[i - 1]), 4);
    };
    out << std::setw(8) << ("1/" + std::to_string(n)) << std::setw(14) << num(e.e_V, 5) << std::setw(8)
        << order(prev.e_V, e.e_V) << std::setw(14) << num(e.e_p, 5) << std::setw(8) << order(prev.e_p, e.e_p)
        << std::setw(14) << num(e.e_0, 5) << std::setw(8) << order(prev.e_0, e.e_0) << '\n';
    csv << num(1.0 / n) << ',' << num(e.e_V) << ',' << num(e.e_p) << ',' << num(e.e_0) << ','
        << order(prev.e_V, e.e_V) << ',' << order(prev.e_p, e.e_p) << ',' << order(prev.e_0, e.e_0) << '\n';
    prev = e;
  }
  if (!o.out.empty()) {
    auto f = open_file(o.out + "_source.csv");
    f << csv.str();
    out << "wrote " << o.out << "_source.csv\n";
  }
  return kExitOk;
}

int cmd_study(const Options& o, const Metadata& meta, std::ostream& out, std::ostream& err) {
  const Settings s = settle(o);
  StudyConfig cfg;
  cfg.domain = s.domain;
  cfg.k = o.k;
  cfg.gamma = s.gamma;
  cfg.stabilizer = s.stabilizer;
  cfg.diagonal = s.diagonal;
  cfg.h_seq = o.h_seq;
  cfg.num_eigs = o.num_eigs;
  cfg.tol = o.tol;
  check_n(o.ref_level, "--ref-level");
  cfg.reference_options.n_coarse = o.ref_level;
  if (!o.ref.empty()) cfg.reference = ReferenceSet{o.ref, "user", false, {}};
  cfg.validate();

  const StudyResult res = run_study(cfg);
  for (const auto& w : res.reference.warnings) err << "warning: " << w << '\n';
  out << "reference: " << res.reference.provenance << (res.reference.low_confidence ? " (low confidence)" : "")
      << '\n';
  out << std::setw(8) << "h" << std::setw(4) << "j" << std::setw(20) << "lambda_h" << std::setw(20) << "lambda_ref"
      << std::setw(14) << "error" << std::setw(9) << "order" << '\n';
  bool failed = false;
  for (const auto& r : res.rows) {
    out << std::setw(8) << ("1/" + std::to_string(r.n)) << std::setw(4) << r.j;
    if (r.failed) {
      failed = true;
      out << "  failed: " << r.failure << '\n';
      continue;
    }
    out << std::setw(20) << num(r.lambda_h) << std::setw(20) << num(r.lambda_ref) << std::setw(14) << num(r.error, 5)
        << std::setw(9) << (r.order ? num(*r.order, 4) : std::string()) << '\n';
  }
  out << lower_bound_report(res.rows, cfg.gamma).summary() << '\n';
  if (!o.out.empty())
    for (const auto& path : export_study(res, o.out, meta)) out << "wrote " << path << '\n';
  return failed ? kExitSolver : kExitOk;
}

int cmd_glb_check(const Options& o, CLI::App& sub, std::ostream& out) {
  const Settings s = settle(o);
  const bool has_capx = sub.count("--c-apx") > 0, has_kappa = sub.count("--kappa-cr") > 0;
  if (!has_capx && !has_kappa) throw std::invalid_argument("glb-check needs --c-apx and/or --kappa-cr");
  double alpha = o.alpha;
  if (sub.count("--alpha") == 0)
    alpha = s.stabilizer.variant == Stabilizer::Variant::Skeletal ? s.stabilizer.alpha : 0.0;
  if (!(alpha >= 0.0)) throw std::invalid_argument("invalid --alpha: must be >= 0");
  if (has_capx && !(o.c_apx > 0.0)) throw std::invalid_argument("invalid --c-apx: must be > 0");
  if (has_kappa && !(o.kappa_cr > 0.0)) throw std::invalid_argument("invalid --kappa-cr: must be > 0");
  if (sub.count("--lambda-h") && !(o.lambda_h > 0.0)) throw std::invalid_argument("invalid --lambda-h: must be > 0");
  if (sub.count("--h-max") && !(o.h_max > 0.0)) throw std::invalid_argument("invalid --h-max: must be > 0");
  check_n(o.h, "--h");

  double h_max = o.h_max, lambda_h = o.lambda_h;
  if (sub.count("--h-max") == 0) h_max = build_domain_mesh(s.domain, o.h, s.diagonal)->h_max;
  if (sub.count("--lambda-h") == 0) {
    const EigenResult r = solve_smallest(assemble_for(s, o.h, o.k), {1, o.tol});
    lambda_h = r.eigenvalues.front();
    out << "computed lambda_h = " << num(lambda_h) << " (" << o.domain << ", k = " << o.k << ", h = 1/" << o.h
        << ", stabilizer " << s.stabilizer.to_string() << ")\n";
  }
  std::optional<double> lambda_ref;
  if (sub.count("--lambda-ref")) lambda_ref = o.lambda_ref;

  if (has_capx) {
    const GlbParams p = derive_constants(alpha, o.c_apx, h_max, 2);
    out << "alpha = " << num(alpha) << "\nC_apx = " << num(o.c_apx) << "\nh_max = " << num(h_max)
        << "\ndelta = " << num(p.delta) << "\nLambda = " << num(p.Lambda) << '\n';
    write_certificate(out, check_conditions(p, lambda_ref, lambda_h));
  }
  if (has_kappa) {
    if (o.k != 1) out << "note: the lowest-order test assumes k = 1\n";
    write_certificate(out, check_lowest_order(alpha, h_max, o.kappa_cr, lambda_ref, lambda_h));
  }
  return kExitOk;
}

void add_common(CLI::App* app, Options& o) {
  app->add_option("--domain", o.domain, "square | l-shape")->capture_default_str();
  app->add_option("--k", o.k, "polynomial degree of v0 (1..3)")->capture_default_str();
  app->add_option("--gamma", o.gamma, "const[:c] | pow:<eps> | log")->capture_default_str();
  app->add_option("--stabilizer", o.stabilizer, "standard | skeletal:<alpha>")->capture_default_str();
  app->add_option("--diagonal", o.diagonal, "bl-tr | br-tl grid-square split")->capture_default_str();
  app->add_option("--tol", o.tol, "relative eigen-residual tolerance")->capture_default_str();
  app->add_option("--out", o.out, "output path prefix");
  app->add_option("--config", o.config, "flat key = value file with flag defaults");
}

}  // namespace

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path);
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || trim(line.substr(0, eq)).empty())
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key = value");
    kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return kv;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  const std::vector<std::string> commands{"solve-eig", "solve-source", "study", "glb-check", "mesh-info"};

  // Config values act as defaults: they are inserted after the subcommand
  // unless the same flag is already present on the command line.
  try {
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
      if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (!config_path.empty()) {
      std::size_t pos = 0;
      while (pos < args.size() && std::find(commands.begin(), commands.end(), args[pos]) == commands.end()) ++pos;
      if (pos == args.size()) throw std::invalid_argument("--config needs a subcommand");
      std::vector<std::string> extra;
      for (const auto& [key, value] : read_config_file(config_path)) {
        const std::string flag = "--" + key;
        const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
          return a == flag || a.rfind(flag + "=", 0) == 0;
        });
        if (given) continue;
        extra.push_back(flag);
        extra.push_back(value);
      }
      args.insert(args.begin() + static_cast<std::ptrdiff_t>(pos) + 1, extra.begin(), extra.end());
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  Options o;
  CLI::App app{"Weak Galerkin Stokes eigenvalue solver"};
  app.name("wgstokes");
  app.set_help_flag("--help", "print this help and exit");  // frees -h so that --h is usable
  app.require_subcommand(1);

  auto* eig = app.add_subcommand("solve-eig", "smallest eigenpairs on one mesh");
  add_common(eig, o);
  eig->add_option("--h", o.h, "mesh denominator n, h = 1/n")->capture_default_str();
  eig->add_option("--num-eigs", o.num_eigs, "number of eigenpairs")->capture_default_str();

  auto* src = app.add_subcommand("solve-source", "manufactured source problem and error norms");
  add_common(src, o);
  src->add_option("--h-seq", o.h_seq, "mesh denominators, e.g. 4,8,16,32")->delimiter(',')->capture_default_str();

  auto* study = app.add_subcommand("study", "eigenvalue convergence study");
  add_common(study, o);
  study->add_option("--h-seq", o.h_seq, "mesh denominators, e.g. 4,8,16,32")->delimiter(',')->capture_default_str();
  study->add_option("--num-eigs", o.num_eigs, "number of eigenvalues")->capture_default_str();
  study->add_option("--ref", o.ref, "reference eigenvalues, comma separated")->delimiter(',');
  study->add_option("--ref-level", o.ref_level, "coarse denominator of the extrapolated references")
      ->capture_default_str();

  auto* glb = app.add_subcommand("glb-check", "guaranteed-lower-bound certificate");
  add_common(glb, o);
  glb->add_option("--h", o.h, "mesh denominator n, h = 1/n")->capture_default_str();
  glb->add_option("--alpha", o.alpha, "stabilizer parameter (defaults to the skeletal alpha)");
  glb->add_option("--c-apx", o.c_apx, "approximation constant C_apx");
  glb->add_option("--kappa-cr", o.kappa_cr, "interpolation constant kappa_CR");
  glb->add_option("--lambda-h", o.lambda_h, "discrete eigenvalue (computed when absent)");
  glb->add_option("--lambda-ref", o.lambda_ref, "reference eigenvalue for condition (i)");
  glb->add_option("--h-max", o.h_max, "mesh size (taken from the mesh when absent)");

  auto* mi = app.add_subcommand("mesh-info", "mesh statistics and validation");
  add_common(mi, o);
  mi->add_option("--h", o.h, "mesh denominator n, h = 1/n")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  // Effective settings, echoed into study output so runs are self-describing.
  Metadata meta;
  auto echo = [&](CLI::App* sub) {
    meta.emplace_back("command", sub->get_name());
    for (const CLI::Option* opt : sub->get_options()) {
      if (opt->get_name() == "--help" || opt->get_name() == "--config" || opt->get_name() == "--out") continue;
      meta.emplace_back(opt->get_name().substr(2), opt->count() ? join_values(opt) : opt->get_default_str());
    }
  };

  try {
    if (*eig) return cmd_solve_eig(o, out);
    if (*src) return cmd_solve_source(o, out);
    if (*study) {
      echo(study);
      return cmd_study(o, meta, out, err);
    }
    if (*glb) return cmd_glb_check(o, *glb, out);
    if (*mi) return cmd_mesh_info(o, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ConvergenceError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitInvalid;
}

}  // namespace wgs
