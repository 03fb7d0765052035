#pragma once
// Triangle meshes of Weierstrass immersions sampled on conformal grids, and
// the unfolded Scherk-type tower built from one quarter of a period.

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "scherk/error.hpp"
#include "scherk/solver.hpp"
#include "scherk/weierstrass.hpp"

namespace scherk::lab {

using Triangle = std::array<int, 3>;

struct SurfaceMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::vector<Vec3> normals;
  int periods = 0;
  std::string provenance;
  double mirror_seam_mismatch = 0.0;
  double period_seam_mismatch = 0.0;
};

/// Area-weighted vertex normals.
inline std::vector<Vec3> vertex_normals(const std::vector<Vec3>& v, const std::vector<Triangle>& t) {
  std::vector<Vec3> n(v.size(), Vec3::Zero());
  for (const auto& tri : t) {
    const Vec3 c = (v[tri[1]] - v[tri[0]]).cross(v[tri[2]] - v[tri[0]]);
    for (int k : tri) n[k] += c;
  }
  for (auto& x : n) {
    const double len = x.norm();
    if (len > 0.0) x /= len;
  }
  return n;
}

/// Forms in a chart w, already multiplied by dz/dw.
using ChartForms = std::function<Forms(Complex)>;

/// Immersion values on the tensor grid us x vs, by cumulative integration
/// along the first row and then up every column. Index (i, j) -> i + nu*j.
inline std::vector<Vec3> integrate_grid(const ChartForms& f, const std::vector<double>& us, const std::vector<double>& vs,
                                        const Vec3& base, double tol = 1e-11) {
  const std::size_t nu = us.size(), nv = vs.size();
  std::vector<Vec3> x(nu * nv);
  auto segment = [&](Complex w0, Complex w1) -> Vec3 {
    try {
      const Complex path[2] = {w0, w1};
      return contour_integral(f, std::span<const Complex>(path, 2), tol, true).real();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularOnPath && e.code() != ErrorCode::AtPrevertex) throw;
    }
    // Step around a branch point through a slightly displaced midpoint.
    const Complex mid = 0.5 * (w0 + w1) + Complex(0.0, 1e-7) * std::abs(w1 - w0);
    try {
      const Complex path[3] = {w0, mid, w1};
      return contour_integral(f, std::span<const Complex>(path, 3), tol, true).real();
    } catch (const Error&) {
      throw Error(ErrorCode::SingularSample, "grid segment runs through a branch point");
    }
  };
  x[0] = base;
  for (std::size_t i = 1; i < nu; ++i) x[i] = x[i - 1] + segment(Complex(us[i - 1], vs[0]), Complex(us[i], vs[0]));
  for (std::size_t i = 0; i < nu; ++i) {
    for (std::size_t j = 1; j < nv; ++j) {
      x[i + nu * j] = x[i + nu * (j - 1)] + segment(Complex(us[i], vs[j - 1]), Complex(us[i], vs[j]));
    }
  }
  return x;
}

/// Two triangles per grid cell, split along the (i, j)-(i+1, j+1) diagonal.
inline void grid_triangles(std::vector<Triangle>& out, int nu, int nv, const std::function<int(int, int)>& id,
                           bool flip) {
  for (int j = 0; j + 1 < nv; ++j) {
    for (int i = 0; i + 1 < nu; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if (flip) {
        out.push_back({a, c, b});
        out.push_back({a, d, c});
      } else {
        out.push_back({a, b, c});
        out.push_back({a, c, d});
      }
    }
  }
}

struct MeshOptions {
  int resolution = 64;   // grid intervals per unit of the period
  int periods = 1;
  double height = 3.0;   // extent of the half-strip in Im z
  double growth = 1.05;  // ratio of successive row spacings
};

/// Strip abscissae: every prevertex plus a uniform subdivision of each edge.
/// `kind` is -1 at prevertices and otherwise the edge index.
inline std::vector<double> strip_abscissae(const VertexConfiguration& cfg, int resolution, std::vector<int>& kind) {
  std::vector<double> xs;
  kind.clear();
  for (int e = 0; e < cfg.edge_count(); ++e) {
    const double x0 = cfg.prevertex(e), x1 = cfg.prevertex(e + 1);
    const int n = std::max(2, static_cast<int>(std::ceil(resolution * (x1 - x0) - 1e-9)));
    for (int k = 0; k < n; ++k) {
      xs.push_back(x0 + (x1 - x0) * k / n);
      kind.push_back(k == 0 ? -1 : e);
    }
  }
  xs.push_back(cfg.prevertex(cfg.edge_count()));
  kind.push_back(-1);
  return xs;
}

/// Strip ordinates from 0 with first step 1/resolution growing geometrically.
inline std::vector<double> strip_ordinates(int resolution, double height, double growth) {
  std::vector<double> ys{0.0};
  double dy = 1.0 / resolution;
  while (ys.back() + dy < height * (1.0 - 1e-9)) {
    ys.push_back(ys.back() + dy);
    dy *= growth;
  }
  ys.push_back(height);
  return ys;
}

/// Unfolded mesh of a solved surface: the quarter over the half-strip
/// 0 <= Re z <= 1, its mirror images in x1 = 0 and x2 = 0, and `periods`
/// vertical translates centred on the horizontal plane x3 = 0.
inline SurfaceMesh sample_mesh(const SolvedSurface& s, const MeshOptions& opt = {}) {
  if (opt.resolution < 8) throw Error(ErrorCode::OutOfRange, "resolution must be at least 8");
  if (opt.periods < 1) throw Error(ErrorCode::OutOfRange, "need at least one period");
  std::vector<int> kind;
  const auto xs = strip_abscissae(s.cfg, opt.resolution, kind);
  const auto ys = strip_ordinates(opt.resolution, opt.height, opt.growth);
  const WeierstrassData& data = s.data;
  const auto quarter = integrate_grid([&](Complex z) { return forms(data, z); }, xs, ys, Vec3::Zero());

  const int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size());
  const int k0 = -(opt.periods / 2);
  static constexpr std::array<std::array<double, 2>, 4> kSigns = {{{1, 1}, {-1, 1}, {1, -1}, {-1, -1}}};
  auto position = [&](int copy, int period, int i, int j) {
    Vec3 p = quarter[i + nx * j];
    p[0] *= kSigns[copy][0];
    p[1] *= kSigns[copy][1];
    p[2] += k0 + period;
    return p;
  };
  // Canonical representative of a grid vertex after welding.
  auto canonical = [&](int copy, int period, int i, int j) {
    if (i == nx - 1 && period + 1 < opt.periods) {
      ++period;
      i = 0;
    }
    if (j == 0) {
      if (kind[i] < 0) {
        copy = 0;
      } else if (kind[i] % 2 == 0) {
        copy &= 2;  // plane x1 = 0: copies differing by the first reflection agree
      } else {
        copy &= 1;  // plane x2 = 0
      }
    }
    return std::make_tuple(copy, period, i, j);
  };

  SurfaceMesh m;
  m.periods = opt.periods;
  std::map<std::tuple<int, int, int, int>, int> ids;
  for (int copy = 0; copy < 4; ++copy) {
    for (int period = 0; period < opt.periods; ++period) {
      for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
          const auto key = canonical(copy, period, i, j);
          const Vec3 p = position(copy, period, i, j);
          auto it = ids.find(key);
          if (it == ids.end()) {
            ids.emplace(key, static_cast<int>(m.vertices.size()));
            m.vertices.push_back(std::apply(position, key));
          }
          const double gap = (p - std::apply(position, key)).norm();
          if (std::get<2>(key) != i) {
            m.period_seam_mismatch = std::max(m.period_seam_mismatch, gap);
          } else {
            m.mirror_seam_mismatch = std::max(m.mirror_seam_mismatch, gap);
          }
        }
      }
    }
  }
  for (int copy = 0; copy < 4; ++copy) {
    const bool flip = kSigns[copy][0] * kSigns[copy][1] < 0.0;
    for (int period = 0; period < opt.periods; ++period) {
      grid_triangles(m.triangles, nx, ny, [&](int i, int j) { return ids.at(canonical(copy, period, i, j)); }, flip);
    }
  }
  m.normals = vertex_normals(m.vertices, m.triangles);
  std::ostringstream key;
  key << "genus=" << s.cfg.genus << " theta=" << std::fixed << std::setprecision(6) << s.theta_target
      << " M=" << s.cfg.truncation.str();
  m.provenance = key.str();
  return m;
}

/// Catenoid from g = z, dh = dz/z on the annulus e^{u0} <= |z| <= e^{u1},
/// meshed in the chart z = e^w with resolution points around the waist.
inline SurfaceMesh catenoid_mesh(int resolution, double u0 = -1.0, double u1 = 1.0) {
  if (resolution < 8) throw Error(ErrorCode::OutOfRange, "resolution must be at least 8");
  const auto cat = catenoid_data();
  const ChartForms f = [&](Complex w) {
    const Complex z = std::exp(w);
    return Forms(forms(cat, z) * z);
  };
  const int nu = std::max(2, static_cast<int>(std::ceil((u1 - u0) * resolution / (2.0 * kPi))));
  std::vector<double> us, vs;
  for (int i = 0; i <= nu; ++i) us.push_back(u0 + (u1 - u0) * i / nu);
  for (int j = 0; j <= resolution; ++j) vs.push_back(2.0 * kPi * j / resolution);
  const Vec3 base = immersion_point(cat, 1.0, std::exp(u0));
  const auto x = integrate_grid(f, us, vs, base);
  SurfaceMesh m;
  m.periods = 1;
  m.provenance = "catenoid";
  const int nuu = nu + 1;
  for (int j = 0; j < resolution; ++j)
    for (int i = 0; i < nuu; ++i) m.vertices.push_back(x[i + nuu * j]);
  m.period_seam_mismatch = 0.0;
  for (int i = 0; i < nuu; ++i) m.period_seam_mismatch = std::max(m.period_seam_mismatch, (x[i + nuu * resolution] - x[i]).norm());
  grid_triangles(m.triangles, nuu, resolution + 1, [&](int i, int j) { return i + nuu * (j % resolution); }, false);
  m.normals = vertex_normals(m.vertices, m.triangles);
  return m;
}

/// Flat square [-half, half]^2 in the plane x3 = 0, or `copies` stacked
/// coincident copies of it.
inline SurfaceMesh plane_mesh(double half, int n, int copies = 1) {
  SurfaceMesh m;
  m.periods = 1;
  m.provenance = "plane";
  for (int c = 0; c < copies; ++c) {
    const int offset = static_cast<int>(m.vertices.size());
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) m.vertices.emplace_back(-half + 2.0 * half * i / n, -half + 2.0 * half * j / n, 0.0);
    grid_triangles(m.triangles, n + 1, n + 1, [&](int i, int j) { return offset + i + (n + 1) * j; }, false);
  }
  m.normals = vertex_normals(m.vertices, m.triangles);
  return m;
}

/// Undirected edge key with the smaller index first.
inline std::pair<int, int> edge_key(int a, int b) { return a < b ? std::make_pair(a, b) : std::make_pair(b, a); }

/// Number of triangles using each edge.
inline std::map<std::pair<int, int>, int> edge_use(const SurfaceMesh& m) {
  std::map<std::pair<int, int>, int> use;
  for (const auto& t : m.triangles)
    for (int k = 0; k < 3; ++k) ++use[edge_key(t[k], t[(k + 1) % 3])];
  return use;
}

inline std::vector<bool> boundary_vertices(const SurfaceMesh& m) {
  std::vector<bool> out(m.vertices.size(), false);
  for (const auto& [e, n] : edge_use(m)) {
    if (n == 1) out[e.first] = out[e.second] = true;
  }
  return out;
}

/// True when every edge is shared by at most two triangles, traversed in
/// opposite directions.
inline bool consistently_oriented(const SurfaceMesh& m) {
  std::map<std::pair<int, int>, int> directed;
  for (const auto& t : m.triangles)
    for (int k = 0; k < 3; ++k)
      if (++directed[{t[k], t[(k + 1) % 3]}] > 1) return false;
  return true;
}

}  // namespace scherk::lab
