#pragma once
// Result files: solution records as JSON, meshes as OBJ text, tables as CSV.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scherk/error.hpp"
#include "scherk/lab/mesh.hpp"
#include "scherk/solver.hpp"

namespace scherk::lab {

using Json = nlohmann::ordered_json;

/// Results directory: the override if given, else $SCHERK_LAB_RESULTS, else "results".
inline std::filesystem::path results_dir(const std::string& override_dir = {}) {
  if (!override_dir.empty()) return override_dir;
  if (const char* env = std::getenv("SCHERK_LAB_RESULTS"); env && *env) return env;
  return "results";
}

/// Record key, with theta rounded to 1e-6.
inline std::string solution_key(int genus, double theta) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "genus%d_theta%.6f", genus, std::round(theta * 1e6) / 1e6);
  return buf;
}

inline Json zigzag_json(const Zigzag& z) {
  return Json{{"genus", z.genus()}, {"edge_lengths", z.edge_lengths}, {"start_slope", z.start_slope}};
}

inline Json solution_json(const SolvedSurface& s) {
  Json j;
  j["genus"] = s.cfg.genus;
  j["theta_target"] = s.theta_target;
  j["theta_achieved"] = s.theta_achieved;
  j["a"] = s.cfg.a;
  j["b"] = s.cfg.b;
  j["lambda"] = s.lambda;
  if (s.cfg.truncation.infinite) {
    j["M"] = "inf";
  } else {
    j["M"] = s.cfg.truncation.order;
  }
  j["residuals"] = {{"conjugacy", s.residuals.conjugacy}, {"angle", s.residuals.angle}, {"sup", s.residuals.sup}};
  j["zigzag"] = {{"gdh", zigzag_json(s.orthodisks.gdh)}, {"inv", zigzag_json(s.orthodisks.inv)}};
  return j;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out.flush()) throw Error(ErrorCode::IoError, "write to " + path.string() + " failed");
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes <dir>/<key>.json and returns the path.
inline std::filesystem::path write_solution(const SolvedSurface& s, const std::filesystem::path& dir) {
  const auto path = dir / (solution_key(s.cfg.genus, s.theta_target) + ".json");
  write_text(path, solution_json(s).dump(2) + "\n");
  return path;
}

struct SolutionRecord {
  VertexConfiguration cfg;
  double lambda = 1.0;
  double theta_target = 0.0;
  double theta_achieved = 0.0;
  ResidualNorms residuals;
};

inline SolutionRecord parse_solution(const Json& j) {
  try {
    SolutionRecord r;
    r.cfg.genus = j.at("genus").get<int>();
    r.cfg.a = j.at("a").get<std::vector<double>>();
    r.cfg.b = j.at("b").get<std::vector<double>>();
    const auto& m = j.at("M");
    if (m.is_string()) {
      if (m.get<std::string>() != "inf") throw Error(ErrorCode::IoError, "M must be an integer or \"inf\"");
      r.cfg.truncation = Truncation::limit();
    } else {
      r.cfg.truncation = Truncation::finite(m.get<int>());
    }
    r.lambda = j.at("lambda").get<double>();
    r.theta_target = j.at("theta_target").get<double>();
    r.theta_achieved = j.value("theta_achieved", 0.0);
    if (j.contains("residuals")) {
      const auto& res = j["residuals"];
      r.residuals = {res.value("conjugacy", 0.0), res.value("angle", 0.0), res.value("sup", 0.0)};
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::IoError, std::string("malformed solution record: ") + e.what());
  }
}

inline SolutionRecord read_solution_record(const std::filesystem::path& path) {
  try {
    return parse_solution(Json::parse(read_text(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::IoError, path.string() + ": " + e.what());
  }
}

/// Loads a record and recomputes everything derived from it; the stored
/// residuals are ignored.
inline SolvedSurface load_solution(const std::filesystem::path& path, double quad_tol = 1e-12) {
  const auto r = read_solution_record(path);
  return assemble_surface(r.cfg, r.lambda, r.theta_target, quad_tol);
}

inline std::string obj_text(const SurfaceMesh& m) {
  if (m.vertices.empty() || m.triangles.empty()) throw Error(ErrorCode::IoError, "refusing to export an empty mesh");
  std::string out;
  char buf[128];
  for (const auto& v : m.vertices) {
    std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", v[0], v[1], v[2]);
    out += buf;
  }
  for (const auto& t : m.triangles) {
    std::snprintf(buf, sizeof buf, "f %d %d %d\n", t[0] + 1, t[1] + 1, t[2] + 1);
    out += buf;
  }
  return out;
}

inline void export_obj(const SurfaceMesh& m, const std::filesystem::path& path) { write_text(path, obj_text(m)); }

/// Reads the `v` / `f` subset written by export_obj.
inline SurfaceMesh import_obj(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  SurfaceMesh m;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p[0] >> p[1] >> p[2])) throw Error(ErrorCode::IoError, "bad vertex on line " + std::to_string(lineno));
      m.vertices.push_back(p);
    } else if (tag == "f") {
      Triangle t;
      if (!(ls >> t[0] >> t[1] >> t[2])) throw Error(ErrorCode::IoError, "bad face on line " + std::to_string(lineno));
      for (int& k : t) {
        if (k < 1 || k > static_cast<int>(m.vertices.size())) {
          throw Error(ErrorCode::IoError, "face index out of range on line " + std::to_string(lineno));
        }
        --k;
      }
      m.triangles.push_back(t);
    } else {
      throw Error(ErrorCode::IoError, "unsupported record '" + tag + "' on line " + std::to_string(lineno));
    }
  }
  if (m.triangles.empty()) throw Error(ErrorCode::IoError, path.string() + " holds no faces");
  m.periods = 1;
  m.provenance = path.filename().string();
  m.normals = vertex_normals(m.vertices, m.triangles);
  return m;
}

/// Header row then comma-separated %.12e values.
inline std::string csv_text(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += '\n';
  char buf[40];
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw Error(ErrorCode::CountMismatch, "row width differs from header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s%.12e", i ? "," : "", row[i]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

inline void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  write_text(path, csv_text(header, rows));
}

}  // namespace scherk::lab
