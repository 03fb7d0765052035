// Command-line driver: solving, sweeps, force and Hessian tables, the
// Beltrami checks, meshing and mesh diagnostics, and certificate reruns.
//
// Exit codes: 0 success, 1 usage error, 2 validation failure (a JSON report
// is printed on stdout).

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <future>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "scherk/beltrami.hpp"
#include "scherk/forces.hpp"
#include "scherk/lab/diagnostics.hpp"
#include "scherk/lab/io.hpp"

using namespace scherk;
using namespace scherk::lab;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kValidation = 2;

/// Raised by a subcommand whose computation ran but whose checks failed.
struct ValidationFailure {
  Json report;
};

Truncation parse_truncation(const std::string& m) {
  if (m.empty() || m == "inf") return Truncation::limit();
  try {
    std::size_t used = 0;
    const int order = std::stoi(m, &used);
    if (used == m.size() && order >= 1) return Truncation::finite(order);
  } catch (const std::exception&) {
  }
  throw CLI::ValidationError("--m", "expected a positive integer or 'inf', got '" + m + "'");
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError(flag, "not a number: '" + item + "'");
    }
  }
  if (out.empty()) throw CLI::ValidationError(flag, "empty list");
  return out;
}

Json residual_json(const ResidualNorms& r) {
  return {{"conjugacy", r.conjugacy}, {"angle", r.angle}, {"sup", r.sup}};
}

Json certificate_json(const Certificate& c, double tol) {
  return {{"truncation", c.truncation.str()},   {"conjugacy", c.conjugacy},
          {"angle", c.angle},                   {"closure", c.closure},
          {"edge_conjugacy", c.edge_conjugacy}, {"flux_law", c.flux_law},
          {"flux_zigzag", c.flux_zigzag},       {"flux_balance", c.flux_balance},
          {"flux_divergence", c.flux_divergence}, {"end_flux", {c.end_flux.x1, c.end_flux.x2}},
          {"tolerance", tol},                   {"passes", c.passes(tol)}};
}

void print(const Json& j) { std::cout << j.dump(2) << "\n"; }

struct Common {
  std::string out;
  double tol = 1e-8;
  unsigned seed = 1;
};

struct MeshArgs {
  std::string solution;
  int resolution = 64;
  int periods = 1;
  double height = 3.0;
};

void add_mesh_args(CLI::App* cmd, MeshArgs& a, int periods) {
  a.periods = periods;
  cmd->add_option("--solution", a.solution, "solution record")->required()->check(CLI::ExistingFile);
  cmd->add_option("--resolution", a.resolution, "grid intervals per unit period")->check(CLI::Range(8, 4096));
  cmd->add_option("--periods", a.periods, "vertical periods")->check(CLI::Range(1, 1000));
  cmd->add_option("--height", a.height, "strip height")->check(CLI::PositiveNumber);
}

SurfaceMesh mesh_from(const MeshArgs& a, SolvedSurface& s) {
  s = load_solution(a.solution);
  return sample_mesh(s, {a.resolution, a.periods, a.height});
}

int cmd_solve(int genus, double theta, const std::string& m, const Common& c) {
  SolverOptions opts;
  opts.tol = c.tol;
  const auto s = solve_from_nodes(genus, theta, parse_truncation(m), opts);
  const auto path = write_solution(s, results_dir(c.out));
  Json j = solution_json(s);
  j["iterations"] = s.iterations;
  j["path"] = path.string();
  print(j);
  return kOk;
}

int cmd_sweep(int genus, double lo, double hi, int steps, const std::string& m, int jobs, const Common& c) {
  if (!(lo < hi) && steps > 1) throw CLI::ValidationError("--theta-min", "need theta-min < theta-max");
  std::vector<double> thetas;
  for (int i = 0; i < steps; ++i) thetas.push_back(steps == 1 ? hi : lo + (hi - lo) * i / (steps - 1));
  const Truncation t = parse_truncation(m);
  SolverOptions opts;
  opts.tol = c.tol;
  const auto dir = results_dir(c.out);

  struct Outcome {
    Json record;
    std::vector<double> row;
    bool ok = false;
  };
  auto run = [&](double theta) {
    Outcome o;
    try {
      const auto s = solve_from_nodes(genus, theta, t, opts);
      write_solution(s, dir);
      o.record = solution_json(s);
      const auto& z = s.orthodisks.gdh;
      o.row = {theta, s.theta_achieved, s.lambda, slope_of_orbit(z), 2.0 * z.l_plus(), s.residuals.sup};
      o.ok = true;
    } catch (const Error& e) {
      o.record = {{"theta_target", theta}, {"error", to_string(e.code())}, {"message", e.what()}};
    }
    return o;
  };
  // Workers pick angles in order; results are kept by index so output is
  // independent of scheduling.
  std::vector<Outcome> results(thetas.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < thetas.size();) results[i] = run(thetas[i]);
  };
  std::vector<std::future<void>> pool;
  for (int w = 0; w < std::max(1, jobs); ++w) pool.push_back(std::async(std::launch::async, worker));
  for (auto& f : pool) f.get();

  std::vector<std::vector<double>> rows;
  Json records = Json::array();
  bool all_ok = true;
  for (auto& o : results) {
    all_ok = all_ok && o.ok;
    if (o.ok) rows.push_back(o.row);
    records.push_back(std::move(o.record));
  }
  char name[64];
  std::snprintf(name, sizeof name, "sweep_genus%d.csv", genus);
  write_csv(dir / name, {"theta_target", "theta_achieved", "lambda", "slope_of_orbit", "flux", "residual"}, rows);
  // Slope of the orbit must move monotonically along the family.
  bool monotone = true;
  for (std::size_t i = 2; i < rows.size(); ++i) {
    if ((rows[i][3] - rows[i - 1][3]) * (rows[1][3] - rows[0][3]) <= 0.0) monotone = false;
  }
  Json report = {{"genus", genus}, {"steps", steps}, {"solved", rows.size()}, {"slope_monotone", monotone},
                 {"csv", (dir / name).string()}, {"records", records}};
  if (!all_ok || !monotone) throw ValidationFailure{report};
  print(report);
  return kOk;
}

int cmd_forces(int genus, const std::string& config, const std::string& m, const std::string& decay,
               const Common& c) {
  NodeConfiguration cfg = equally_spaced(genus);
  if (!config.empty()) cfg = {genus, parse_list(config, "--config")};
  const Truncation t = parse_truncation(m);
  const auto rep = force(cfg, t);
  Json j = {{"genus", genus},
            {"c", cfg.c},
            {"M", t.str()},
            {"force", std::vector<double>(rep.force.data(), rep.force.data() + rep.force.size())},
            {"sup_norm", rep.sup_norm}};
  if (!decay.empty()) {
    std::vector<int> ms;
    for (double x : parse_list(decay, "--decay")) ms.push_back(static_cast<int>(x));
    std::vector<std::vector<double>> rows;
    for (int mm : ms) {
      const double s = truncated_force(cfg, mm).sup_norm;
      rows.push_back({static_cast<double>(mm), s, mm * s});
    }
    char name[64];
    std::snprintf(name, sizeof name, "force_decay_genus%d.csv", genus);
    const auto path = results_dir(c.out) / name;
    write_csv(path, {"M", "sup_norm", "scaled"}, rows);
    j["decay_csv"] = path.string();
  }
  print(j);
  return kOk;
}

int cmd_hessian(int genus, const std::string& config, const std::string& m) {
  NodeConfiguration cfg = equally_spaced(genus);
  if (!config.empty()) cfg = {genus, parse_list(config, "--config")};
  const Truncation t = parse_truncation(m);
  auto eig = [](const Eigen::MatrixXd& h) {
    if (h.size() == 0) return std::vector<double>{};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    return std::vector<double>(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  };
  const auto full = eig(hessian(cfg, t));
  const auto pinned = eig(reduced_hessian(cfg, t));
  const bool definite = std::all_of(pinned.begin(), pinned.end(), [](double x) { return x < 0.0; });
  print({{"genus", genus}, {"M", t.str()}, {"eigenvalues", full}, {"pinned_eigenvalues", pinned},
         {"pinned_negative_definite", definite}});
  return kOk;
}

int cmd_beltrami(double a, double b, double delta, int samples, const Common& c) {
  const PushParams p{a, b, delta};
  validate(p);
  std::mt19937 rng(c.seed);
  // Samples in the six collar rectangles, kept off the interfaces.
  std::vector<Complex> collar;
  const double xs[] = {-a - delta, -a, a, a + delta};
  for (int i = 0; i < 3; ++i) {
    if (!(xs[i + 1] - xs[i] > 1e-3)) continue;
    for (double y0 : {-b, 0.0}) {
      std::uniform_real_distribution<double> ux(xs[i] + 1e-4, xs[i + 1] - 1e-4), uy(y0 + 1e-4, y0 + b - 1e-4);
      for (int k = 0; k < samples; ++k) collar.emplace_back(ux(rng), uy(rng));
    }
  }
  const double fd = finite_difference_check(p, collar, 1e-6);

  const PushParams corner{0.0, b, delta};
  std::vector<Complex> left;
  std::uniform_real_distribution<double> lx(-delta, 0.0), ly(-b, b);
  for (int k = 0; k < samples; ++k) left.emplace_back(lx(rng), ly(rng));
  const double cancel = cancellation_check(corner, left);
  const double negated = cancellation_check_negated(corner, left);

  const double r = 0.8 * std::min(b, delta);
  const auto even = pairing_report({Complex(0.6, -0.3), Complex(0.2, 0.5)}, corner, r);
  const auto odd = pairing_report({0.0, 0.0, 1.0}, corner, r);

  const bool ok = fd < 1e-6 && cancel < 1e-14 && std::abs(even.total) < 1e-8 && negated > 1e-3 &&
                  std::abs(odd.total) > 1e-3;
  Json j = {{"finite_difference_error", fd},
            {"cancellation_residual", cancel},
            {"negated_control", negated},
            {"even_pairing", std::abs(even.total)},
            {"odd_control", std::abs(odd.total)},
            {"passes", ok}};
  if (!c.out.empty()) {
    const auto path = results_dir(c.out) / "beltrami_check.csv";
    write_csv(path, {"finite_difference_error", "cancellation_residual", "negated_control", "even_pairing", "odd_control"},
              {{fd, cancel, negated, std::abs(even.total), std::abs(odd.total)}});
    j["csv"] = path.string();
  }
  if (!ok) throw ValidationFailure{j};
  print(j);
  return kOk;
}

int cmd_mesh(const MeshArgs& a, const std::string& obj) {
  SolvedSurface s;
  const auto m = mesh_from(a, s);
  export_obj(m, obj);
  const bool ok = m.mirror_seam_mismatch < 1e-8 && m.period_seam_mismatch < 1e-8;
  Json j = {{"obj", obj},
            {"vertices", m.vertices.size()},
            {"triangles", m.triangles.size()},
            {"mirror_seam_mismatch", m.mirror_seam_mismatch},
            {"period_seam_mismatch", m.period_seam_mismatch},
            {"mean_curvature_residual", mean_curvature_residual(m)},
            {"provenance", m.provenance}};
  if (!ok) throw ValidationFailure{j};
  print(j);
  return kOk;
}

int cmd_area_growth(const MeshArgs& a, const std::string& radii, const Common& c) {
  SolvedSurface s;
  const auto m = mesh_from(a, s);
  const auto prof = area_growth_profile(m, parse_list(radii, "--radii"));
  std::vector<std::vector<double>> rows;
  Json table = Json::array();
  for (const auto& p : prof) {
    rows.push_back({p.r, p.area, p.normalized});
    table.push_back({{"r", p.r}, {"normalized", p.normalized}});
  }
  const bool mono = monotone_profile(prof);
  Json j = {{"profile", table}, {"monotone", mono}, {"boundary_distance", boundary_distance(m)}};
  if (!c.out.empty()) {
    const auto path = results_dir(c.out) / (solution_key(s.cfg.genus, s.theta_target) + "_area.csv");
    write_csv(path, {"r", "area", "normalized"}, rows);
    j["csv"] = path.string();
  }
  if (!mono) throw ValidationFailure{j};
  print(j);
  return kOk;
}

int cmd_symmetry(const MeshArgs& a) {
  SolvedSurface s;
  const auto m = mesh_from(a, s);
  Json planes = Json::array();
  bool ok = true;
  for (int axis : {0, 1}) {
    const auto rep = symmetry_curves(m, axis);
    planes.push_back({{"plane", axis == 0 ? "x1=0" : "x2=0"},
                      {"components", rep.curves.size()},
                      {"closed", rep.closed},
                      {"closed_convex", rep.closed_convex},
                      {"per_period", rep.per_period}});
    ok = ok && rep.per_period == s.cfg.genus + 1 && rep.closed == rep.closed_convex;
  }
  Json j = {{"genus", s.cfg.genus}, {"periods", a.periods}, {"planes", planes}, {"expected_per_period", s.cfg.genus + 1}};
  if (!ok) throw ValidationFailure{j};
  print(j);
  return kOk;
}

int cmd_verify(const std::string& file, const Common& c) {
  const auto rec = read_solution_record(file);
  // Rebuild from the stored configuration at doubled truncation and a finer
  // quadrature tolerance, independent of the stored residuals.
  VertexConfiguration cfg = rec.cfg;
  cfg.truncation = cfg.truncation.doubled();
  const auto s = assemble_surface(cfg, rec.lambda, rec.theta_target, 1e-13);
  const auto cert = certify(s, cfg.truncation, 1e-13);
  Json j = {{"solution", file}, {"certificate", certificate_json(cert, c.tol)}, {"residuals", residual_json(s.residuals)}};
  if (!cert.passes(c.tol)) throw ValidationFailure{j};
  print(j);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scherk-type tower laboratory"};
  app.set_config("--run-config", "", "key=value file mirroring the flags; flags win");
  app.require_subcommand(1);
  Common common;
  app.add_option("--out", common.out, "results directory (overrides SCHERK_LAB_RESULTS)");
  app.add_option("--tol", common.tol, "validation tolerance")->check(CLI::PositiveNumber);
  app.add_option("--seed", common.seed, "random seed");

  int genus = 0;
  double theta = 0.5 * kPi, theta_min = 0.3, theta_max = 0.5 * kPi;
  int steps = 20;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string m, config, decay, obj, radii = "1,2,3", solution;
  double a = 0.0, b = 0.5, delta = 0.5;
  int samples = 32;
  MeshArgs mesh_args;

  auto* solve = app.add_subcommand("solve", "solve the period problem at one angle");
  solve->add_option("--genus", genus)->required()->check(CLI::NonNegativeNumber);
  solve->add_option("--theta", theta)->required();
  solve->add_option("--m", m, "truncation order or 'inf'");

  auto* sweep = app.add_subcommand("sweep", "independent solves over an angle grid");
  sweep->add_option("--genus", genus)->required()->check(CLI::NonNegativeNumber);
  sweep->add_option("--theta-min", theta_min)->required();
  sweep->add_option("--theta-max", theta_max)->required();
  sweep->add_option("--steps", steps)->required()->check(CLI::PositiveNumber);
  sweep->add_option("--m", m, "truncation order or 'inf'");
  sweep->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  auto* forces = app.add_subcommand("forces", "balance forces on a node configuration");
  forces->add_option("--genus", genus)->required()->check(CLI::NonNegativeNumber);
  forces->add_option("--config", config, "comma-separated nodes c_0,...,c_genus");
  forces->add_option("--m", m, "truncation order or 'inf'");
  forces->add_option("--decay", decay, "comma-separated truncation orders for a decay table");

  auto* hess = app.add_subcommand("hessian", "spectrum of the balance Hessian");
  hess->add_option("--genus", genus)->required()->check(CLI::NonNegativeNumber);
  hess->add_option("--config", config, "comma-separated nodes c_0,...,c_genus");
  hess->add_option("--m", m, "truncation order or 'inf'");

  auto* belt = app.add_subcommand("beltrami-check", "push-map and pairing checks");
  belt->add_option("--a", a)->check(CLI::NonNegativeNumber);
  belt->add_option("--b", b)->check(CLI::PositiveNumber);
  belt->add_option("--delta", delta)->check(CLI::PositiveNumber);
  belt->add_option("--samples", samples)->check(CLI::Range(1, 100000));

  auto* mesh = app.add_subcommand("mesh", "mesh a solution and write OBJ");
  add_mesh_args(mesh, mesh_args, 1);
  mesh->add_option("--obj", obj, "output OBJ path")->required();

  MeshArgs area_args;
  area_args.resolution = 32;
  area_args.height = 12.0;
  auto* area = app.add_subcommand("area-growth", "normalized area in balls about the origin");
  add_mesh_args(area, area_args, 20);
  area->add_option("--radii", radii, "comma-separated increasing radii")->required();

  MeshArgs sym_args;
  sym_args.resolution = 32;
  auto* sym = app.add_subcommand("symmetry", "curves in the vertical symmetry planes");
  add_mesh_args(sym, sym_args, 3);

  auto* verify = app.add_subcommand("verify", "rerun the certificate at doubled truncation");
  verify->add_option("--solution", solution)->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*solve) return cmd_solve(genus, theta, m, common);
    if (*sweep) return cmd_sweep(genus, theta_min, theta_max, steps, m, jobs, common);
    if (*forces) return cmd_forces(genus, config, m, decay, common);
    if (*hess) return cmd_hessian(genus, config, m);
    if (*belt) return cmd_beltrami(a, b, delta, samples, common);
    if (*mesh) return cmd_mesh(mesh_args, obj);
    if (*area) return cmd_area_growth(area_args, radii, common);
    if (*sym) return cmd_symmetry(sym_args);
    if (*verify) return cmd_verify(solution, common);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const ValidationFailure& f) {
    Json report = f.report;
    report["status"] = "failure";
    print(report);
    return kValidation;
  } catch (const Error& e) {
    print({{"status", "failure"}, {"error", to_string(e.code())}, {"message", e.what()}});
    return kValidation;
  }
  return kUsage;
}
