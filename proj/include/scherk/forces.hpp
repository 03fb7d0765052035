#pragma once
// Balance forces between periodic node configurations, the logarithmic energy
// they derive from, its Hessian and the damped Newton solver for the
// equilibrium.

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "scherk/error.hpp"
#include "scherk/numerics.hpp"

namespace scherk {

/// Nodes 0 = c_0 < c_1 < ... < c_genus < 1 in one unit period.
struct NodeConfiguration {
  int genus = 0;
  std::vector<double> c{0.0};

  std::size_t size() const { return c.size(); }
};

struct ForceReport {
  Eigen::VectorXd force;
  Truncation truncation;
  double sup_norm = 0.0;
};

inline void validate(const NodeConfiguration& cfg) {
  if (cfg.genus < 0 || cfg.c.size() != static_cast<std::size_t>(cfg.genus) + 1) {
    throw Error(ErrorCode::BadCount, "configuration needs genus+1 nodes");
  }
  if (cfg.c.front() != 0.0) {
    throw Error(ErrorCode::InvalidConfiguration, "c_0 must be pinned to 0");
  }
  for (std::size_t j = 1; j < cfg.c.size(); ++j) {
    if (cfg.c[j] == cfg.c[j - 1]) throw Error(ErrorCode::CoincidentNodes, "coincident nodes");
    if (!(cfg.c[j] > cfg.c[j - 1])) throw Error(ErrorCode::OrderViolation, "nodes out of order");
  }
  if (!(cfg.c.back() < 1.0)) {
    throw Error(ErrorCode::InvalidConfiguration, "nodes must lie in [0, 1)");
  }
}

inline NodeConfiguration equally_spaced(int genus) {
  if (genus < 0) throw Error(ErrorCode::OutOfRange, "genus must be non-negative");
  NodeConfiguration cfg{genus, {}};
  for (int j = 0; j <= genus; ++j) cfg.c.push_back(static_cast<double>(j) / (genus + 1));
  return cfg;
}

namespace detail {

inline ForceReport make_report(Eigen::VectorXd f, Truncation t) {
  const double sup = f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
  return {std::move(f), t, sup};
}

}  // namespace detail

/// F_j = sum over translates (k, j') != (0, j) with |k| <= M of 1/(c_j - c_j' - k).
/// With an infinite window this is the cotangent closed form.
inline ForceReport force(const NodeConfiguration& cfg, Truncation t) {
  validate(cfg);
  const int n = static_cast<int>(cfg.size());
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    // Self-translates cancel in pairs.
    for (int jp = 0; jp < n; ++jp) {
      if (jp == j) continue;
      f[j] += lattice_sum({cfg.c[j] - cfg.c[jp], 1, t});
    }
  }
  return detail::make_report(std::move(f), t);
}

inline ForceReport truncated_force(const NodeConfiguration& cfg, int m) {
  return force(cfg, Truncation::finite(m));
}

inline ForceReport limit_force(const NodeConfiguration& cfg) {
  return force(cfg, Truncation::limit());
}

/// E = sum over unordered interacting pairs of log|c_j - c_j' - k|.
/// The infinite window is renormalized to sum_{j<j'} log|2 sin pi(c_j - c_j')|,
/// which has the same gradient.
inline double log_energy(const NodeConfiguration& cfg, Truncation t) {
  validate(cfg);
  double e = 0.0;
  for (std::size_t j = 0; j < cfg.size(); ++j) {
    for (std::size_t jp = j + 1; jp < cfg.size(); ++jp) {
      const double d = cfg.c[j] - cfg.c[jp];
      if (t.infinite) {
        e += std::log(std::abs(2.0 * std::sin(kPi * d)));
      } else {
        for (int k = -t.order; k <= t.order; ++k) e += std::log(std::abs(d - k));
      }
    }
  }
  return e;
}

inline double log_energy(const NodeConfiguration& cfg, int m) {
  return log_energy(cfg, Truncation::finite(m));
}

/// Balance Hessian with self-translate terms on the diagonal:
/// H_jj = -sum_{(k,j') != (0,j)} (c_j - c_j' - k)^-2, H_ij = +sum_k (c_i - c_j - k)^-2.
inline Eigen::MatrixXd hessian(const NodeConfiguration& cfg, Truncation t) {
  validate(cfg);
  const int n = static_cast<int>(cfg.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  const double self = lattice_sum({0.0, 2, t});
  for (int i = 0; i < n; ++i) {
    h(i, i) = -self;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double s = lattice_sum({cfg.c[i] - cfg.c[j], 2, t});
      h(i, j) = s;
      h(i, i) -= s;
    }
  }
  return h;
}

/// Hessian of the energy with c_0 pinned: the rows and columns of c_1..c_genus
/// of the true second-derivative matrix (self-translates contribute nothing).
inline Eigen::MatrixXd reduced_hessian(const NodeConfiguration& cfg, Truncation t) {
  Eigen::MatrixXd h = hessian(cfg, t);
  const double self = lattice_sum({0.0, 2, t});
  h.diagonal().array() += self;
  const int n = static_cast<int>(h.rows());
  return h.bottomRightCorner(n - 1, n - 1);
}

struct CriticalPointOptions {
  double tol = 1e-12;
  int max_iterations = 100;
};

struct CriticalPointResult {
  NodeConfiguration cfg;
  int iterations = 0;
  double residual = 0.0;
};

/// Damped Newton iteration on the limit force. Steps that would leave the
/// ordered simplex are halved; the energy is concave there, so the Newton
/// direction is always an ascent direction.
inline CriticalPointResult solve_critical_point(int genus, const NodeConfiguration& init,
                                                const CriticalPointOptions& opts = {}) {
  if (init.genus != genus) throw Error(ErrorCode::BadCount, "genus does not match configuration");
  validate(init);
  NodeConfiguration cfg = init;
  const auto t = Truncation::limit();
  auto free_force = [&](const NodeConfiguration& c) {
    return Eigen::VectorXd(force(c, t).force.tail(genus));
  };
  auto ordered = [](const NodeConfiguration& c) {
    for (std::size_t j = 1; j < c.size(); ++j)
      if (!(c.c[j] > c.c[j - 1])) return false;
    return c.c.back() < 1.0;
  };
  CriticalPointResult out{cfg, 0, 0.0};
  if (genus == 0) return out;

  Eigen::VectorXd f = free_force(cfg);
  double energy = log_energy(cfg, t);
  for (int it = 0; it < opts.max_iterations; ++it) {
    const double res = f.cwiseAbs().maxCoeff();
    if (res < opts.tol) {
      out = {cfg, it, res};
      return out;
    }
    const Eigen::MatrixXd j = reduced_hessian(cfg, t);
    const Eigen::VectorXd step = j.ldlt().solve(-f);
    if (!step.allFinite()) throw Error(ErrorCode::SingularJacobian, "singular balance Hessian");

    double scale = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving, scale *= 0.5) {
      NodeConfiguration trial = cfg;
      for (int k = 0; k < genus; ++k) trial.c[k + 1] += scale * step[k];
      if (!ordered(trial)) continue;
      const Eigen::VectorXd ft = free_force(trial);
      const double et = log_energy(trial, t);
      if (et >= energy + 1e-4 * scale * f.dot(step) || ft.cwiseAbs().maxCoeff() < res) {
        cfg = trial;
        f = ft;
        energy = et;
        accepted = true;
        break;
      }
    }
    if (!accepted) throw Error(ErrorCode::LeftSimplex, "damped step could not stay in the simplex");
  }
  throw Error(ErrorCode::NoConvergence, "balance Newton iteration did not converge");
}

struct DecayRow {
  int m = 0;
  double sup_norm = 0.0;
  double scaled = 0.0;  // M * sup_norm
};

inline std::vector<DecayRow> truncated_force_decay(int genus, const std::vector<int>& ms) {
  const NodeConfiguration cfg = equally_spaced(genus);
  std::vector<DecayRow> rows;
  for (int m : ms) {
    const double s = truncated_force(cfg, m).sup_norm;
    rows.push_back({m, s, m * s});
  }
  return rows;
}

}  // namespace scherk
