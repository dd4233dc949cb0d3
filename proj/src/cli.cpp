#include "finsler/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "finsler/checks.hpp"
#include "finsler/errors.hpp"
#include "finsler/operators.hpp"
#include "finsler/parse.hpp"
#include "finsler/sampling.hpp"
#include "finsler/transforms.hpp"

namespace finsler::cli {

namespace {

struct Options {
  std::string norm_spec;
  int n = 2;
  double p = 2.0;
  std::string field_spec = "poly:y1^2+y2^2";
  int points = 100;
  std::uint64_t seed = 7;
  double step = 0.0;  // 0 -> gradient-mode default
  double tol = 0.0;   // 0 -> checker default
  double rmin = 0.3;
  double rmax = 3.0;
  std::string grad = "analytic";
  bool corrupt = false;
  bool parallel = false;
  std::string out;
  std::string format = "text";
  // mvp
  std::string hpoly = "y1^2-y2^2";
  std::vector<std::string> centers;
  std::vector<double> radii;
  int density = 64;
  // liouville
  double extent = 200.0;
  // dual / op point evaluation
  std::vector<std::string> at;
  int grid = 256;
};

void add_output_flags(CLI::App* sub, Options& o) {
  sub->add_option("--out", o.out, "Write the report to this path instead of stdout");
  sub->add_option("--format", o.format, "Report format")
      ->check(CLI::IsMember({"json", "csv", "text"}))
      ->capture_default_str();
}

void add_sampling_flags(CLI::App* sub, Options& o) {
  sub->add_option("--points", o.points, "Number of seeded sample points")->capture_default_str();
  sub->add_option("--seed", o.seed, "Sampling seed (default from FINSLER_SEED when set)")
      ->capture_default_str();
  sub->add_option("--rmin", o.rmin, "Inner sampling radius")->capture_default_str();
  sub->add_option("--rmax", o.rmax, "Outer sampling radius")->capture_default_str();
}

void add_operator_flags(CLI::App* sub, Options& o) {
  sub->add_option("--step", o.step, "Base finite-difference step (0 = mode default)")
      ->capture_default_str();
  sub->add_option("--grad", o.grad, "Gradient source for the flux")
      ->check(CLI::IsMember({"analytic", "fd"}))
      ->capture_default_str();
  sub->add_option("--tol", o.tol, "Tolerance override (0 = checker default)")
      ->capture_default_str();
  sub->add_flag("--corrupt", o.corrupt, "Run the built-in negative control");
  sub->add_flag("--parallel", o.parallel, "Evaluate samples concurrently");
}

OperatorConfig make_cfg(const Options& o, double p) {
  OperatorConfig cfg =
      o.grad == "fd" ? OperatorConfig::finite_difference(p) : OperatorConfig::analytic(p);
  if (o.step > 0.0) cfg.h_flux = o.step;
  return cfg;
}

SampleSpec make_samples(const Options& o) {
  SampleSpec s;
  s.seed = o.seed;
  s.count = o.points;
  s.r_min = o.rmin;
  s.r_max = o.rmax;
  return s;
}

CheckOptions make_check_options(const Options& o) {
  CheckOptions c;
  c.tolerance = o.tol;
  c.corrupt = o.corrupt;
  c.keep_points = o.format == "csv";
  c.parallel = o.parallel;
  return c;
}

void write_payload(const Options& o, const std::string& payload) {
  if (o.out.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw Error("cannot open output path " + o.out);
  f << payload;
}

int emit_report(const VerificationReport& rep, const Options& o) {
  std::string payload;
  if (o.format == "json")
    payload = rep.to_json().dump(2) + "\n";
  else if (o.format == "csv")
    payload = rep.to_csv();
  else
    payload = rep.to_text();
  write_payload(o, payload);
  return rep.pass ? 0 : 1;
}

std::vector<Vec> evaluation_points(const Options& o, int n) {
  std::vector<Vec> pts;
  for (const std::string& s : o.at) {
    Vec x = parse_vector(s);
    if (x.size() != n) throw DimensionMismatch("--at point does not match dimension " +
                                               std::to_string(n));
    pts.push_back(std::move(x));
  }
  if (pts.empty()) pts = draw_samples(make_samples(o), n);
  return pts;
}

std::uint64_t env_seed() {
  const char* env = std::getenv("FINSLER_SEED");
  if (!env) return 7;
  std::uint64_t v = 0;
  const char* end = env + std::string(env).size();
  const auto res = std::from_chars(env, end, v);
  if (res.ec != std::errc{} || res.ptr != end)
    throw Error("FINSLER_SEED is not an unsigned integer");
  return v;
}

int dispatch(CLI::App& app, Options& o) {
  const auto subs = app.get_subcommands();
  if (subs.empty()) {
    std::cerr << app.help();
    return 2;
  }
  const std::string cmd = subs.front()->get_name();

  if (cmd == "theorem1") {
    const Norm h = parse_norm(o.norm_spec, o.n);
    const ScalarField u = parse_field(o.field_spec, h.dim(), &h);
    const auto rep =
        check_theorem1(h, o.p, u, make_samples(o), make_cfg(o, o.p), make_check_options(o));
    return emit_report(rep, o);
  }
  if (cmd == "kelvin2") {
    const Norm h = parse_norm(o.norm_spec, o.n);
    const ScalarField u = parse_field(o.field_spec, h.dim(), &h);
    const auto rep =
        check_kelvin_p2(h, u, make_samples(o), make_cfg(o, 2.0), make_check_options(o));
    return emit_report(rep, o);
  }
  if (cmd == "kelvin-n") {
    const Norm h = parse_norm(o.norm_spec, o.n);
    const ScalarField u = parse_field(o.field_spec, h.dim(), &h);
    const auto rep = check_kelvin_pn(h, u, make_samples(o), make_cfg(o, h.dim()),
                                     make_check_options(o));
    return emit_report(rep, o);
  }
  if (cmd == "mvp") {
    const Norm h = parse_norm(o.norm_spec, o.n);
    const Polynomial hp = parse_polynomial(o.hpoly, h.dim());
    std::vector<Vec> centers;
    if (o.centers.empty()) {
      if (h.dim() != 2)
        throw Error("default mvp centers are two-dimensional; pass --center for n != 2");
      centers = {parse_vector("1,1"), parse_vector("-0.5,1.5"), parse_vector("2,-0.5")};
    } else {
      for (const auto& c : o.centers) centers.push_back(parse_vector(c));
    }
    std::vector<double> radii = o.radii.empty() ? std::vector<double>{0.25, 0.5, 1.0} : o.radii;
    const auto rep = check_mvp(h, hp, centers, radii, o.density, make_check_options(o));
    return emit_report(rep, o);
  }
  if (cmd == "liouville") {
    const Norm h = parse_norm(o.norm_spec, o.n);
    const auto rep =
        check_liouville(h, make_samples(o), o.extent, o.density, make_check_options(o));
    return emit_report(rep, o);
  }
  if (cmd == "classify") {
    const Norm h = parse_norm(o.norm_spec, o.n);
    const auto rep = classify_norm(h, make_samples(o), make_check_options(o));
    return emit_report(rep, o);
  }
  if (cmd == "dual") {
    const Norm h = parse_norm(o.norm_spec, o.n);
    const Norm hd = dual_norm(h);
    nlohmann::json out;
    out["schema"] = 1;
    out["command"] = "dual";
    out["norm"] = norm_to_spec(h);
    out["dual_norm"] = norm_to_spec(hd);
    out["grid_density"] = o.grid;
    nlohmann::json jp = nlohmann::json::array();
    std::string text = "dual of " + norm_to_spec(h) + "\n";
    std::ostringstream csv;
    csv.precision(17);
    for (int i = 0; i < h.dim(); ++i) csv << "x" << i << ",";
    csv << "closed_form,numeric,rel_diff\n";
    for (const Vec& x : evaluation_points(o, h.dim())) {
      const double closed = eval_norm(hd, x);
      const double numeric = dual_eval_numeric(h, x, o.grid);
      nlohmann::json jx = nlohmann::json::array();
      for (Eigen::Index i = 0; i < x.size(); ++i) jx.push_back(x[i]);
      jp.push_back({{"x", jx},
                    {"closed_form", closed},
                    {"numeric", numeric},
                    {"rel_diff", relative_residual(closed, numeric)}});
      for (Eigen::Index i = 0; i < x.size(); ++i) csv << x[i] << ",";
      csv << closed << "," << numeric << "," << relative_residual(closed, numeric) << "\n";
      std::ostringstream line;
      line.precision(10);
      line << "  H*(" << x.transpose() << ") = " << closed << "   numeric sup = " << numeric
           << "\n";
      text += line.str();
    }
    out["points"] = jp;
    write_payload(o, o.format == "text" ? text
                     : o.format == "csv" ? csv.str()
                                         : out.dump(2) + "\n");
    return 0;
  }
  if (cmd == "op") {
    const Norm h = parse_norm(o.norm_spec, o.n);
    const ScalarField u = parse_field(o.field_spec, h.dim(), &h);
    const OperatorConfig cfg = make_cfg(o, o.p);
    nlohmann::json out;
    out["schema"] = 1;
    out["command"] = "op";
    out["norm"] = norm_to_spec(h);
    out["p"] = o.p;
    out["field"] = o.field_spec;
    nlohmann::json jp = nlohmann::json::array();
    std::string text = "Delta_p^H of " + o.field_spec + ", p = " + std::to_string(o.p) + "\n";
    std::ostringstream csv;
    csv.precision(17);
    for (int i = 0; i < h.dim(); ++i) csv << "x" << i << ",";
    csv << "value\n";
    for (const Vec& x : evaluation_points(o, h.dim())) {
      const double v = finsler_p_laplacian(h, cfg, u, x);
      nlohmann::json jx = nlohmann::json::array();
      for (Eigen::Index i = 0; i < x.size(); ++i) jx.push_back(x[i]);
      jp.push_back({{"x", jx}, {"value", v}});
      for (Eigen::Index i = 0; i < x.size(); ++i) csv << x[i] << ",";
      csv << v << "\n";
      std::ostringstream line;
      line.precision(10);
      line << "  at (" << x.transpose() << "): " << v << "\n";
      text += line.str();
    }
    out["points"] = jp;
    write_payload(o, o.format == "text" ? text
                     : o.format == "csv" ? csv.str()
                                         : out.dump(2) + "\n");
    return 0;
  }
  std::cerr << "unknown subcommand " << cmd << "\n";
  return 2;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Anisotropic (Finsler) p-Laplace operators, dual norms, Kelvin transforms, and "
               "numerical identity checks"};
  app.name("finsler");
  app.require_subcommand(0, 1);

  Options o;
  try {
    o.seed = env_seed();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  auto* theorem1 = app.add_subcommand(
      "theorem1", "Check Delta_p(u o B) = (Delta_p^H u) o B for quadratic norms");
  theorem1->add_option("--norm", o.norm_spec, "Norm spec, e.g. quad:[[4,0],[0,1]]")->required();
  theorem1->add_option("--p", o.p, "Operator exponent p > 1")->capture_default_str();
  theorem1->add_option("--field", o.field_spec, "Field spec, e.g. poly:y1^2+y2^2")
      ->capture_default_str();
  add_sampling_flags(theorem1, o);
  add_operator_flags(theorem1, o);
  add_output_flags(theorem1, o);

  auto* kelvin2 = app.add_subcommand(
      "kelvin2", "Check the p = 2 Kelvin duality for the hat transform (n >= 3)");
  kelvin2->add_option("--norm", o.norm_spec, "Quadratic norm spec")->required();
  kelvin2->add_option("--field", o.field_spec, "Field spec")->capture_default_str();
  add_sampling_flags(kelvin2, o);
  add_operator_flags(kelvin2, o);
  add_output_flags(kelvin2, o);

  auto* kelvinn = app.add_subcommand(
      "kelvin-n", "Check the p = n Kelvin duality for the star transform");
  kelvinn->add_option("--norm", o.norm_spec, "Quadratic norm spec")->required();
  kelvinn->add_option("--field", o.field_spec, "Field spec")->capture_default_str();
  add_sampling_flags(kelvinn, o);
  add_operator_flags(kelvinn, o);
  add_output_flags(kelvinn, o);

  auto* mvp = app.add_subcommand(
      "mvp", "Check the mean value property over Wulff balls for harmonic pullbacks");
  mvp->add_option("--norm", o.norm_spec, "Quadratic norm spec")->required();
  mvp->add_option("--hpoly", o.hpoly, "Harmonic polynomial in y1..yn")->capture_default_str();
  mvp->add_option("--center", o.centers, "Ball center, e.g. 1,1 (repeatable)");
  mvp->add_option("--radius", o.radii, "Ball radius (repeatable)");
  mvp->add_option("--density", o.density, "Quadrature density per axis")->capture_default_str();
  mvp->add_option("--tol", o.tol, "Tolerance override (0 = checker default)")
      ->capture_default_str();
  mvp->add_flag("--corrupt", o.corrupt, "Run the built-in negative control");
  add_output_flags(mvp, o);

  auto* liouville = app.add_subcommand(
      "liouville", "Check the planar Liouville profile: PDE residual and total mass");
  liouville->add_option("--norm", o.norm_spec, "Quadratic norm spec (n = 2)")->required();
  liouville->add_option("--extent", o.extent, "Half-width L of the mass quadrature box")
      ->capture_default_str();
  liouville->add_option("--density", o.density, "Mass quadrature points per axis (default 2048)");
  add_sampling_flags(liouville, o);
  liouville->add_option("--tol", o.tol, "Tolerance override (0 = checker default)")
      ->capture_default_str();
  liouville->add_flag("--corrupt", o.corrupt, "Run the built-in negative control");
  liouville->add_flag("--parallel", o.parallel, "Evaluate samples concurrently");
  add_output_flags(liouville, o);

  auto* classify = app.add_subcommand(
      "classify", "Classify a norm as quadratic or not via Hessian constancy and the "
                  "Ferone-Kawohl pairing");
  classify->add_option("--norm", o.norm_spec, "Norm spec, e.g. q:4")->required();
  classify->add_option("--n", o.n, "Dimension (q-norms)")->capture_default_str();
  add_sampling_flags(classify, o);
  classify->add_option("--tol", o.tol, "Tolerance override (0 = checker default)")
      ->capture_default_str();
  add_output_flags(classify, o);

  auto* dual = app.add_subcommand("dual", "Evaluate the dual norm at points, closed form vs "
                                          "numeric support function");
  dual->add_option("--norm", o.norm_spec, "Norm spec")->required();
  dual->add_option("--n", o.n, "Dimension (q-norms)")->capture_default_str();
  dual->add_option("--at", o.at, "Evaluation point, e.g. 1,1 (repeatable)");
  dual->add_option("--grid", o.grid, "Direction-grid density for the numeric sup")
      ->capture_default_str();
  add_sampling_flags(dual, o);
  add_output_flags(dual, o);

  auto* op = app.add_subcommand("op", "Evaluate Delta_p^H of a field at points");
  op->add_option("--norm", o.norm_spec, "Norm spec")->required();
  op->add_option("--n", o.n, "Dimension (q-norms)")->capture_default_str();
  op->add_option("--p", o.p, "Operator exponent p > 1")->capture_default_str();
  op->add_option("--field", o.field_spec, "Field spec")->capture_default_str();
  op->add_option("--at", o.at, "Evaluation point (repeatable)");
  add_sampling_flags(op, o);
  add_operator_flags(op, o);
  add_output_flags(op, o);

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("finsler");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  // the Liouville sampling region defaults to the disk |x| <= 5
  if (liouville->parsed()) {
    if (!liouville->count("--rmin")) o.rmin = 0.0;
    if (!liouville->count("--rmax")) o.rmax = 5.0;
    if (!liouville->count("--density")) o.density = 2048;
  }

  try {
    return dispatch(app, o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace finsler::cli
