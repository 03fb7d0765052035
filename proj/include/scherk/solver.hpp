#pragma once
// Period-conjugacy solver for the prevertices of a genus-k Scherk-type tower
// with prescribed wing angle, continuation in the angle, and reconstruction of
// the Weierstrass data from the two developing maps.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

#include "scherk/error.hpp"
#include "scherk/forces.hpp"
#include "scherk/orthodisk.hpp"
#include "scherk/scmap.hpp"
#include "scherk/weierstrass.hpp"

namespace scherk {

struct SolverOptions {
  double tol = 1e-8;          // required residual sup-norm
  double target = 1e-12;      // keep iterating towards this while it improves
  double quad_tol = 1e-12;    // relative tolerance of the edge integrals
  double fd_step = 1e-6;      // central-difference step of the Jacobian
  int max_iterations = 60;
  double max_condition = 1e13;
};

struct SolveProblem {
  int genus = 0;
  double theta = 0.5 * kPi;
  Truncation truncation = Truncation::limit();
  VertexConfiguration init;
  double lambda = 1.0;
  SolverOptions options;
};

struct ResidualNorms {
  double conjugacy = 0.0;  // max |lambda l_gdh - l_inv / lambda|
  double angle = 0.0;      // |achieved theta - target|
  double sup = 0.0;        // sup-norm of the residual vector
};

struct SolvedSurface {
  VertexConfiguration cfg;
  double lambda = 1.0;
  double theta_target = 0.0;
  double theta_achieved = 0.0;
  ResidualNorms residuals;
  OrthodiskPair orthodisks;
  WeierstrassData data;
  int iterations = 0;
};

/// Residual from precomputed edge lengths: 2k+2 edge mismatches followed by
/// the angle mismatch L+/|T| - cos(theta/2) of the scaled g dh zigzag.
inline Eigen::VectorXd residual_from_lengths(const std::vector<double>& gdh, const std::vector<double>& inv,
                                             double lambda, double theta) {
  if (gdh.size() != inv.size()) throw Error(ErrorCode::CountMismatch, "edge counts differ");
  const int n = static_cast<int>(gdh.size());
  Eigen::VectorXd r(n + 1);
  double lp = 0.0, lm = 0.0;
  for (int i = 0; i < n; ++i) {
    r[i] = lambda * gdh[i] - inv[i] / lambda;
    // Odd edges [b_j, a_{j+1}] carry slope +1 in the g dh development.
    (i % 2 == 1 ? lp : lm) += lambda * gdh[i];
  }
  r[n] = lp / std::hypot(lp, lm) - std::cos(0.5 * theta);
  return r;
}

inline Eigen::VectorXd residual(const VertexConfiguration& cfg, double lambda, double theta, double quad_tol = 1e-12) {
  validate(cfg);
  return residual_from_lengths(edge_image_lengths(cfg, Structure::Gdh, quad_tol),
                               edge_image_lengths(cfg, Structure::Inv, quad_tol), lambda, theta);
}

/// Angle realized by the scaled g dh zigzag: 2 atan(L- / L+).
inline double achieved_angle(const std::vector<double>& gdh) {
  double lp = 0.0, lm = 0.0;
  for (std::size_t i = 0; i < gdh.size(); ++i) (i % 2 == 1 ? lp : lm) += gdh[i];
  return angle_from_lengths(lp, lm);
}

/// Nodes at equally spaced positions c*_j, each opened to [c*_j, c*_j + eps].
inline VertexConfiguration small_angle_init(int genus, double eps, Truncation t = Truncation::limit()) {
  if (genus < 0) throw Error(ErrorCode::OutOfRange, "genus must be non-negative");
  if (!(eps > 0.0) || !(eps < 0.25 / (genus + 1))) {
    throw Error(ErrorCode::EpsTooLarge, "opening must lie in (0, 1/(4(genus+1)))");
  }
  const auto nodes = equally_spaced(genus);
  VertexConfiguration cfg{genus, nodes.c, nodes.c, t};
  for (double& b : cfg.b) b += eps;
  return cfg;
}

/// Opening used to start a solve at angle theta from the node configuration.
inline double initial_opening(int genus, double theta) {
  return std::min(theta / (kPi * (genus + 1)), 0.9 * 0.25 / (genus + 1));
}

namespace detail {

inline Eigen::VectorXd pack(const VertexConfiguration& cfg, double lambda) {
  const int k = cfg.genus;
  Eigen::VectorXd x(2 * k + 2);
  for (int j = 1; j <= k; ++j) x[j - 1] = cfg.a[j];
  for (int j = 0; j <= k; ++j) x[k + j] = cfg.b[j];
  x[2 * k + 1] = lambda;
  return x;
}

inline VertexConfiguration unpack(const Eigen::VectorXd& x, const VertexConfiguration& like, double& lambda) {
  VertexConfiguration cfg = like;
  const int k = like.genus;
  for (int j = 1; j <= k; ++j) cfg.a[j] = x[j - 1];
  for (int j = 0; j <= k; ++j) cfg.b[j] = x[k + j];
  lambda = x[2 * k + 1];
  return cfg;
}

inline bool admissible(const VertexConfiguration& cfg, double lambda) {
  if (!(lambda > 0.0)) return false;
  for (int i = 0; i < cfg.edge_count(); ++i)
    if (!(cfg.prevertex(i) < cfg.prevertex(i + 1))) return false;
  return true;
}

}  // namespace detail

/// Weierstrass data g = lambda G, dh = dz on the strip of period 1. The
/// developing-map quotient gives g up to the constant e^{i pi/4}; dropping it
/// rotates the surface so that the symmetry planes are x1 = 0 and x2 = 0.
inline WeierstrassData scherk_weierstrass(const VertexConfiguration& cfg, double lambda) {
  return {[cfg, lambda](Complex z) { return lambda * sc_integrand(cfg, Structure::Gdh, z); },
          [](Complex) { return Complex(1.0, 0.0); },
          {DomainKind::HalfPlaneStrip, Complex(1.0, 0.0), Vec3(0.0, 0.0, 1.0)}};
}

/// Checks the reconstruction g^2 = e^{-i pi/2} D1/D2 and h'^2 = D1 D2 against
/// the scaled derivatives D1, D2 of the two developing maps.
inline double reconstruction_defect(const SolvedSurface& s, const std::vector<Complex>& samples) {
  double worst = 0.0;
  for (Complex z : samples) {
    const Complex d1 = s.lambda * prefactor(Structure::Gdh) * sc_integrand(s.cfg, Structure::Gdh, z);
    const Complex d2 = prefactor(Structure::Inv) * sc_integrand(s.cfg, Structure::Inv, z) / s.lambda;
    const Complex g = s.data.g(z), h = s.data.dh(z);
    worst = std::max(worst, std::abs(g * g * Complex(0.0, 1.0) - d1 / d2) / std::abs(d1 / d2));
    worst = std::max(worst, std::abs(h * h - d1 * d2));
  }
  return worst;
}

inline WeierstrassData reconstruct_weierstrass(const SolvedSurface& s, double tol = 1e-8) {
  SolvedSurface copy = s;
  copy.data = scherk_weierstrass(s.cfg, s.lambda);
  const std::vector<Complex> samples = {Complex(0.0, 1.0), Complex(0.13, 0.4), Complex(0.77, 0.05), Complex(0.5, 2.0)};
  const double defect = reconstruction_defect(copy, samples);
  if (defect > tol) {
    throw Error(ErrorCode::BranchInconsistency, "reconstructed Gauss map disagrees with the developments");
  }
  return copy.data;
}

/// Everything derived from a configuration and scale: developed zigzags,
/// residuals and the reconstructed Weierstrass data.
inline SolvedSurface assemble_surface(const VertexConfiguration& cfg, double lambda, double theta,
                                      double quad_tol = 1e-12) {
  validate(cfg);
  SolvedSurface s;
  s.cfg = cfg;
  s.lambda = lambda;
  s.theta_target = theta;
  const auto lg = edge_image_lengths(cfg, Structure::Gdh, quad_tol);
  const auto li = edge_image_lengths(cfg, Structure::Inv, quad_tol);
  std::vector<double> sg(lg.size()), si(li.size());
  for (std::size_t i = 0; i < lg.size(); ++i) {
    sg[i] = lambda * lg[i];
    si[i] = li[i] / lambda;
  }
  s.theta_achieved = achieved_angle(sg);
  s.orthodisks = make_pair(build_zigzag(sg, start_slope(Structure::Gdh)), build_zigzag(si, start_slope(Structure::Inv)));
  const double sup = residual_from_lengths(lg, li, lambda, theta).cwiseAbs().maxCoeff();
  s.residuals = {s.orthodisks.conjugacy_residual, std::abs(s.theta_achieved - theta), sup};
  s.data = scherk_weierstrass(cfg, lambda);
  s.data = reconstruct_weierstrass(s);
  return s;
}

inline SolvedSurface solve(const SolveProblem& problem) {
  const SolverOptions& opt = problem.options;
  if (!(problem.theta > 0.0 && problem.theta <= 0.5 * kPi)) {
    throw Error(ErrorCode::OutOfRange, "target angle must lie in (0, pi/2]");
  }
  VertexConfiguration cfg = problem.init;
  cfg.truncation = problem.truncation;
  if (cfg.genus != problem.genus) throw Error(ErrorCode::BadCount, "initial configuration has the wrong genus");
  validate(cfg);
  double lambda = problem.lambda;
  const double theta = problem.theta;

  auto eval = [&](const VertexConfiguration& c, double l) { return residual(c, l, theta, opt.quad_tol); };
  Eigen::VectorXd x = detail::pack(cfg, lambda);
  Eigen::VectorXd r = eval(cfg, lambda);
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    const double sup = r.cwiseAbs().maxCoeff();
    if (sup < opt.target) break;
    Eigen::MatrixXd jac(r.size(), x.size());
    for (int c = 0; c < x.size(); ++c) {
      Eigen::VectorXd xp = x, xm = x;
      xp[c] += opt.fd_step;
      xm[c] -= opt.fd_step;
      double lp, lm;
      const auto cp = detail::unpack(xp, cfg, lp);
      const auto cm = detail::unpack(xm, cfg, lm);
      if (!detail::admissible(cp, lp) || !detail::admissible(cm, lm)) {
        throw Error(ErrorCode::OrderViolation, "difference stencil leaves the ordered configurations");
      }
      jac.col(c) = (eval(cp, lp) - eval(cm, lm)) / (2.0 * opt.fd_step);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cond = sv[0] / sv[sv.size() - 1];
    if (!(cond < opt.max_condition)) {
      std::ostringstream msg;
      msg << "Jacobian is singular (condition estimate " << cond << ")";
      throw Error(ErrorCode::SingularJacobian, msg.str());
    }
    const Eigen::VectorXd step = svd.solve(-r);

    const double norm = r.norm();
    bool accepted = false;
    double scale = 1.0;
    for (int halving = 0; halving < 30; ++halving, scale *= 0.5) {
      const Eigen::VectorXd xt = x + scale * step;
      double lt;
      const auto ct = detail::unpack(xt, cfg, lt);
      if (!detail::admissible(ct, lt)) continue;
      const Eigen::VectorXd rt = eval(ct, lt);
      if (rt.norm() < norm) {
        x = xt;
        cfg = ct;
        lambda = lt;
        r = rt;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // stagnated at the quadrature noise floor
  }
  const double sup = r.cwiseAbs().maxCoeff();
  if (!(sup < opt.tol)) {
    std::ostringstream msg;
    msg << "Gauss-Newton stopped at residual " << sup << " after " << it << " iterations";
    throw Error(ErrorCode::NoConvergence, msg.str());
  }

  SolvedSurface s = assemble_surface(cfg, lambda, theta, opt.quad_tol);
  s.iterations = it;
  return s;
}

/// Solve at theta starting from the opened node configuration.
inline SolvedSurface solve_from_nodes(int genus, double theta, Truncation t = Truncation::limit(),
                                      const SolverOptions& opts = {}) {
  SolveProblem p;
  p.genus = genus;
  p.theta = theta;
  p.truncation = t;
  p.init = small_angle_init(genus, initial_opening(genus, theta), t);
  p.options = opts;
  return solve(p);
}

/// Warm-started solves along a monotone grid of angles. A failed step is
/// retried through intermediate angles, halving the step up to six times.
inline std::vector<SolvedSurface> continue_family(int genus, const std::vector<double>& thetas,
                                                  Truncation t = Truncation::limit(), const SolverOptions& opts = {}) {
  if (thetas.empty()) return {};
  for (std::size_t i = 1; i < thetas.size(); ++i) {
    if ((thetas[i] - thetas[i - 1]) * (thetas.back() - thetas.front()) <= 0.0) {
      throw Error(ErrorCode::InvalidConfiguration, "angle grid must be strictly monotone");
    }
  }
  std::vector<SolvedSurface> out;
  out.push_back(solve_from_nodes(genus, thetas.front(), t, opts));
  for (std::size_t i = 1; i < thetas.size(); ++i) {
    const SolvedSurface* last = &out.back();
    SolvedSurface current = *last;
    double reached = last->theta_target;
    double step = thetas[i] - reached;
    int halvings = 0;
    while (reached != thetas[i]) {
      const double next = std::abs(thetas[i] - reached) <= std::abs(step) ? thetas[i] : reached + step;
      SolveProblem p;
      p.genus = genus;
      p.theta = next;
      p.truncation = t;
      p.init = current.cfg;
      p.lambda = current.lambda;
      p.options = opts;
      try {
        current = solve(p);
        reached = next;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoConvergence && e.code() != ErrorCode::SingularJacobian &&
            e.code() != ErrorCode::OrderViolation) {
          throw;
        }
        if (++halvings > 6) {
          std::ostringstream msg;
          msg << "continuation failed beyond theta = " << reached << ": " << e.what();
          throw Error(ErrorCode::NoConvergence, msg.str());
        }
        step *= 0.5;
      }
    }
    out.push_back(current);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Certificates evaluated on the reconstructed surface.

/// Corners of the fundamental domain in space, X(prevertex_i) for i = 0..2k+2.
inline std::vector<Vec3> boundary_corners(const WeierstrassData& data, const VertexConfiguration& cfg, double tol = 1e-12) {
  std::vector<Vec3> out{Vec3::Zero()};
  PathOptions opts{tol, true};
  Vec3 x = Vec3::Zero();
  for (int i = 0; i < cfg.edge_count(); ++i) {
    const Complex seg[2] = {cfg.prevertex(i), cfg.prevertex(i + 1)};
    x += integrate_forms(data, std::span<const Complex>(seg, 2), opts).real();
    out.push_back(x);
  }
  return out;
}

struct Certificate {
  Truncation truncation;
  double conjugacy = 0.0;       // edge-length mismatch of the two developments
  double angle = 0.0;           // |achieved - target|
  double closure = 0.0;         // translation and corner-axis defects
  double edge_conjugacy = 0.0;  // |int g dh - conj int dh/g| over boundary edges
  double flux_law = 0.0;        // | |v + R1 v| - 2 cos(theta/2) |
  double flux_zigzag = 0.0;     // | |v + R1 v| - 2 L+ |
  double flux_balance = 0.0;    // |sum of the four end fluxes|
  double flux_divergence = 0.0; // |boundary flux - end flux|
  FluxVector end_flux;

  bool passes(double tol = 1e-8) const {
    return conjugacy < tol && angle < tol && closure < tol && edge_conjugacy < tol;
  }
};

/// Flux of the end z -> i infinity across the cycle iY -> 1 + iY.
inline FluxVector end_flux(const WeierstrassData& data, double height = 6.0, double tol = 1e-12) {
  const Complex c[2] = {Complex(0.0, height), Complex(1.0, height)};
  return flux_vector(data, std::span<const Complex>(c, 2), "end", {tol, false});
}

/// The four ends of the quotient surface: v, R1 v, R2 v, R1 R2 v.
inline std::array<FluxVector, 4> four_end_fluxes(const FluxVector& v) {
  return {FluxVector{v.x1, v.x2, "end"}, FluxVector{-v.x1, v.x2, "R1 end"}, FluxVector{v.x1, -v.x2, "R2 end"},
          FluxVector{-v.x1, -v.x2, "R1R2 end"}};
}

/// Revalidates a solution independently of the solver path at the given
/// truncation with tightened quadrature.
inline Certificate certify(const SolvedSurface& s, Truncation t, double quad_tol = 1e-13) {
  Certificate c;
  c.truncation = t;
  VertexConfiguration cfg = s.cfg;
  cfg.truncation = t;
  const auto lg = edge_image_lengths(cfg, Structure::Gdh, quad_tol);
  const auto li = edge_image_lengths(cfg, Structure::Inv, quad_tol);
  std::vector<double> sg(lg.size()), si(li.size());
  for (std::size_t i = 0; i < lg.size(); ++i) {
    sg[i] = s.lambda * lg[i];
    si[i] = li[i] / s.lambda;
  }
  c.conjugacy = conjugacy_residual(build_zigzag(sg, -1), build_zigzag(si, 1));
  c.angle = std::abs(achieved_angle(sg) - s.theta_target);

  const WeierstrassData data = scherk_weierstrass(cfg, s.lambda);
  const auto corners = boundary_corners(data, cfg, quad_tol * 10);
  const Vec3 period = corners.back();
  c.closure = std::max({std::abs(period[0]), std::abs(period[1]), std::abs(period[2] - 1.0)});
  for (const Vec3& p : corners) c.closure = std::max({c.closure, std::abs(p[0]), std::abs(p[1])});

  PathOptions opts{quad_tol * 10, true};
  for (int i = 0; i < cfg.edge_count(); ++i) {
    const Complex seg[2] = {cfg.prevertex(i), cfg.prevertex(i + 1)};
    c.edge_conjugacy = std::max(c.edge_conjugacy, horizontal_conjugacy_defect(data, std::span<const Complex>(seg, 2), opts));
  }

  c.end_flux = end_flux(data);
  const auto ends = four_end_fluxes(c.end_flux);
  double sx = 0.0, sy = 0.0;
  for (const auto& e : ends) sx += e.x1, sy += e.x2;
  c.flux_balance = std::hypot(sx, sy);
  const double magnitude = std::hypot(c.end_flux.x1 + ends[1].x1, c.end_flux.x2 + ends[1].x2);
  c.flux_law = std::abs(magnitude - flux_from_angle(s.theta_target));
  double lp = 0.0;
  for (std::size_t i = 1; i < sg.size(); i += 2) lp += sg[i];
  c.flux_zigzag = std::abs(magnitude - 2.0 * lp);

  std::vector<Complex> cuts;
  for (int i = 0; i <= cfg.edge_count(); ++i) cuts.push_back(cfg.prevertex(i));
  const auto boundary = flux_vector(data, cuts, "boundary", opts);
  c.flux_divergence = std::hypot(boundary.x1 - c.end_flux.x1, boundary.x2 - c.end_flux.x2);
  return c;
}

inline Certificate certify(const SolvedSurface& s) { return certify(s, s.cfg.truncation.doubled()); }

}  // namespace scherk
