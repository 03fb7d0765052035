#pragma once
// Mesh diagnostics: discrete mean curvature, area growth in balls, and the
// curves cut out by the two vertical symmetry planes.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include "scherk/error.hpp"
#include "scherk/lab/mesh.hpp"

namespace scherk::lab {

inline double mean_edge_length(const SurfaceMesh& m) {
  double total = 0.0;
  const auto use = edge_use(m);
  for (const auto& [e, n] : use) total += (m.vertices[e.first] - m.vertices[e.second]).norm();
  return use.empty() ? 0.0 : total / static_cast<double>(use.size());
}

struct CurvatureReport {
  double percentile95 = 0.0;
  double max = 0.0;
  std::size_t interior = 0;
  double mean_edge = 0.0;
};

/// |H| at interior vertices from the cotangent Laplacian over barycentric
/// areas, scaled by the mean edge length.
inline CurvatureReport mean_curvature_report(const SurfaceMesh& m) {
  const std::size_t n = m.vertices.size();
  std::vector<Vec3> lap(n, Vec3::Zero());
  std::vector<double> area(n, 0.0);
  const double h = mean_edge_length(m);
  for (const auto& t : m.triangles) {
    const Vec3 &p0 = m.vertices[t[0]], &p1 = m.vertices[t[1]], &p2 = m.vertices[t[2]];
    const double a2 = (p1 - p0).cross(p2 - p0).norm();
    if (!(a2 > 1e-14 * h * h)) throw Error(ErrorCode::DegenerateTriangles, "triangle with vanishing area");
    for (int k = 0; k < 3; ++k) {
      const int i = t[(k + 1) % 3], j = t[(k + 2) % 3];
      const Vec3 u = m.vertices[i] - m.vertices[t[k]], v = m.vertices[j] - m.vertices[t[k]];
      const double w = 0.5 * u.dot(v) / a2;  // half the cotangent of the angle at t[k]
      lap[i] += w * (m.vertices[j] - m.vertices[i]);
      lap[j] += w * (m.vertices[i] - m.vertices[j]);
      area[t[k]] += a2 / 6.0;
    }
  }
  const auto boundary = boundary_vertices(m);
  std::vector<double> r;
  for (std::size_t i = 0; i < n; ++i) {
    if (boundary[i] || area[i] == 0.0) continue;
    r.push_back(0.5 * lap[i].norm() / area[i] * h);
  }
  CurvatureReport rep;
  rep.mean_edge = h;
  rep.interior = r.size();
  if (r.empty()) return rep;
  std::sort(r.begin(), r.end());
  rep.max = r.back();
  rep.percentile95 = r[static_cast<std::size_t>(std::floor(0.95 * static_cast<double>(r.size() - 1)))];
  return rep;
}

inline double mean_curvature_residual(const SurfaceMesh& m) { return mean_curvature_report(m).percentile95; }

namespace detail {

inline double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Signed area of the disc of radius r about 0 intersected with the triangle
/// (0, a, b).
inline double disc_wedge_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b, double r) {
  auto sector = [r](const Eigen::Vector2d& p, const Eigen::Vector2d& q) {
    // A side through the centre sweeps no angle.
    if (p.norm() <= 1e-12 * r || q.norm() <= 1e-12 * r) return 0.0;
    return 0.5 * r * r * std::atan2(cross2(p, q), p.dot(q));
  };
  const Eigen::Vector2d d = b - a;
  const double qa = d.dot(d);
  if (qa == 0.0) return 0.0;
  const double qb = a.dot(d), qc = a.dot(a) - r * r;
  const double disc = qb * qb - qa * qc;
  if (disc <= 0.0) return sector(a, b);
  const double s = std::sqrt(disc);
  const double t1 = (-qb - s) / qa, t2 = (-qb + s) / qa;
  if (t2 <= 0.0 || t1 >= 1.0) return sector(a, b);
  const Eigen::Vector2d p1 = a + std::max(t1, 0.0) * d, p2 = a + std::min(t2, 1.0) * d;
  return sector(a, p1) + 0.5 * cross2(p1, p2) + sector(p2, b);
}

}  // namespace detail

/// Exact area of a triangle inside the ball of radius r about the origin.
inline double triangle_ball_area(const Vec3& p0, const Vec3& p1, const Vec3& p2, double r) {
  const Vec3 e1 = p1 - p0, e2 = p2 - p0;
  Vec3 n = e1.cross(e2);
  const double len = n.norm();
  if (len == 0.0) return 0.0;
  n /= len;
  const double dist = n.dot(p0);
  if (std::abs(dist) >= r) return 0.0;
  const double rho = std::sqrt(r * r - dist * dist);
  const Vec3 c = dist * n;  // centre of the cutting disc
  const Vec3 ux = e1.normalized(), uy = n.cross(ux);
  auto flat = [&](const Vec3& p) { return Eigen::Vector2d((p - c).dot(ux), (p - c).dot(uy)); };
  const Eigen::Vector2d a = flat(p0), b = flat(p1), d = flat(p2);
  return std::abs(detail::disc_wedge_area(a, b, rho) + detail::disc_wedge_area(b, d, rho) +
                  detail::disc_wedge_area(d, a, rho));
}

/// Distance from the origin to the mesh boundary (infinity for closed meshes).
inline double boundary_distance(const SurfaceMesh& m, const Vec3& origin = Vec3::Zero()) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [e, n] : edge_use(m)) {
    if (n != 1) continue;
    const Vec3 a = m.vertices[e.first] - origin, d = m.vertices[e.second] - m.vertices[e.first];
    const double t = std::clamp(-a.dot(d) / d.dot(d), 0.0, 1.0);
    best = std::min(best, (a + t * d).norm());
  }
  return best;
}

struct AreaSample {
  double r = 0.0;
  double area = 0.0;
  double normalized = 0.0;  // A(r) / r^2
};

inline std::vector<AreaSample> area_growth_profile(const SurfaceMesh& m, const std::vector<double>& radii,
                                                   const Vec3& origin = Vec3::Zero()) {
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] > radii[i - 1]))) {
      throw Error(ErrorCode::OutOfRange, "radii must be positive and increasing");
    }
  }
  if (!radii.empty() && !(radii.back() < boundary_distance(m, origin))) {
    throw Error(ErrorCode::MeshTooSmall, "ball reaches the mesh boundary");
  }
  std::vector<AreaSample> out;
  for (double r : radii) {
    double a = 0.0;
    for (const auto& t : m.triangles) {
      a += triangle_ball_area(m.vertices[t[0]] - origin, m.vertices[t[1]] - origin, m.vertices[t[2]] - origin, r);
    }
    out.push_back({r, a, a / (r * r)});
  }
  return out;
}

/// True when the normalized profile never drops by more than slack times its value.
inline bool monotone_profile(const std::vector<AreaSample>& p, double slack = 1e-6) {
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (p[i].normalized < p[i - 1].normalized * (1.0 - slack)) return false;
  }
  return true;
}

struct PlaneCurve {
  std::vector<Vec3> points;  // in order; closed curves do not repeat the first point
  bool closed = false;
  bool convex = false;
  double x3_min = 0.0;
  double x3_max = 0.0;
};

struct SymmetryReport {
  int axis = 0;  // 0: plane x1 = 0, 1: plane x2 = 0
  std::vector<PlaneCurve> curves;
  int closed = 0;
  int closed_convex = 0;
  double per_period = 0.0;  // closed curves starting in one reference period
  bool degenerate = true;   // no closed curves at all
};

namespace detail {

/// Strict convexity of a closed polygon in the plane: every turn has the same
/// sign, allowing turns below `flat` radians as straight.
inline bool convex_polygon(const std::vector<Eigen::Vector2d>& p, double flat = 1e-9) {
  int sign = 0;
  double total = 0.0;
  const std::size_t n = p.size();
  if (n < 3) return false;
  for (std::size_t k = 0; k < n; ++k) {
    const Eigen::Vector2d u = p[(k + 1) % n] - p[k], v = p[(k + 2) % n] - p[(k + 1) % n];
    const double turn = std::atan2(cross2(u, v), u.dot(v));
    total += turn;
    if (std::abs(turn) <= flat) continue;
    const int s = turn > 0.0 ? 1 : -1;
    if (sign == 0) sign = s;
    if (s != sign) return false;
  }
  return std::abs(std::abs(total) - 2.0 * kPi) < 1e-6;
}

}  // namespace detail

/// Curves cut from the mesh by the plane x_{axis+1} = 0.
inline SymmetryReport symmetry_curves(const SurfaceMesh& m, int axis, double tol = 1e-9) {
  if (axis != 0 && axis != 1) throw Error(ErrorCode::OutOfRange, "axis must be 0 or 1");
  const double scale = std::max(1.0, mean_edge_length(m));
  std::vector<int> sign(m.vertices.size());
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    const double d = m.vertices[i][axis];
    sign[i] = std::abs(d) <= tol * scale ? 0 : (d > 0.0 ? 1 : -1);
  }
  // Nodes are mesh vertices on the plane (key (v, -1)) or crossing points on
  // edges (key (lo, hi)).
  std::map<std::pair<int, int>, int> node_id;
  std::vector<Vec3> node_pos;
  auto vertex_node = [&](int v) {
    auto [it, fresh] = node_id.emplace(std::make_pair(v, -1), static_cast<int>(node_pos.size()));
    if (fresh) {
      Vec3 p = m.vertices[v];
      p[axis] = 0.0;
      node_pos.push_back(p);
    }
    return it->second;
  };
  auto edge_node = [&](int a, int b) {
    auto [it, fresh] = node_id.emplace(edge_key(a, b), static_cast<int>(node_pos.size()));
    if (fresh) {
      const Vec3 &pa = m.vertices[a], &pb = m.vertices[b];
      const double t = pa[axis] / (pa[axis] - pb[axis]);
      Vec3 p = pa + t * (pb - pa);
      p[axis] = 0.0;
      node_pos.push_back(p);
    }
    return it->second;
  };
  std::map<std::pair<int, int>, bool> links;
  auto link = [&](int a, int b) {
    if (a != b) links[edge_key(a, b)] = true;
  };
  for (const auto& t : m.triangles) {
    std::vector<int> zero, pos, neg;
    for (int v : t) (sign[v] == 0 ? zero : sign[v] > 0 ? pos : neg).push_back(v);
    if (zero.size() == 3) throw Error(ErrorCode::NontransverseIntersection, "triangle lies in the symmetry plane");
    if (zero.size() == 2) {
      link(vertex_node(zero[0]), vertex_node(zero[1]));
    } else if (zero.size() == 1 && pos.size() == 1) {
      link(vertex_node(zero[0]), edge_node(pos[0], neg[0]));
    } else if (zero.empty() && !pos.empty() && !neg.empty()) {
      const int lone = pos.size() == 1 ? pos[0] : neg[0];
      const auto& pair = pos.size() == 1 ? neg : pos;
      link(edge_node(lone, pair[0]), edge_node(lone, pair[1]));
    }
  }
  const std::size_t nn = node_pos.size();
  std::vector<std::vector<int>> adj(nn);
  for (const auto& [e, _] : links) {
    adj[e.first].push_back(e.second);
    adj[e.second].push_back(e.first);
  }
  SymmetryReport rep;
  rep.axis = axis;
  std::vector<bool> seen(nn, false);
  const int other = 1 - axis;
  double x3_floor = std::numeric_limits<double>::infinity();
  for (const auto& v : m.vertices) x3_floor = std::min(x3_floor, v[2]);
  for (std::size_t start = 0; start < nn; ++start) {
    if (seen[start]) continue;
    // Collect the component and check whether it is a simple cycle.
    std::vector<int> comp{static_cast<int>(start)};
    seen[start] = true;
    for (std::size_t k = 0; k < comp.size(); ++k)
      for (int w : adj[comp[k]])
        if (!seen[w]) {
          seen[w] = true;
          comp.push_back(w);
        }
    PlaneCurve c;
    c.closed = comp.size() >= 3 && std::all_of(comp.begin(), comp.end(), [&](int v) { return adj[v].size() == 2; });
    // Walk the component in order, starting from an end if it is open.
    int first = comp[0];
    for (int v : comp)
      if (adj[v].size() == 1) {
        first = v;
        break;
      }
    int prev = -1, cur = first;
    for (std::size_t k = 0; k < comp.size() && cur >= 0; ++k) {
      c.points.push_back(node_pos[cur]);
      int next = -1;
      for (int w : adj[cur])
        if (w != prev && (c.points.size() < 2 || w != first)) {
          next = w;
          break;
        }
      prev = cur;
      cur = next;
    }
    c.x3_min = c.x3_max = c.points[0][2];
    for (const auto& p : c.points) {
      c.x3_min = std::min(c.x3_min, p[2]);
      c.x3_max = std::max(c.x3_max, p[2]);
    }
    if (c.closed) {
      std::vector<Eigen::Vector2d> flat;
      for (const auto& p : c.points) flat.emplace_back(p[other], p[2]);
      c.convex = detail::convex_polygon(flat);
      ++rep.closed;
      if (c.convex) ++rep.closed_convex;
      if (c.x3_min >= x3_floor - 1e-6 && c.x3_min < x3_floor + 1.0 - 1e-6) rep.per_period += 1.0;
    }
    rep.curves.push_back(std::move(c));
  }
  rep.degenerate = rep.closed == 0;
  return rep;
}

}  // namespace scherk::lab
