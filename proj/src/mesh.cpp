#include "wgstokes/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace wgs {

std::string to_string(DomainTag tag) {
  switch (tag) {
    case DomainTag::UnitSquare: return "square";
    case DomainTag::LShape: return "l-shape";
    case DomainTag::Custom: return "custom";
  }
  return "custom";
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::Orientation: return "orientation";
    case ViolationKind::Adjacency: return "adjacency";
    case ViolationKind::Euler: return "euler";
    case ViolationKind::Normal: return "normal";
    case ViolationKind::Measure: return "measure";
  }
  return "unknown";
}

double Mesh::total_area() const {
  double sum = 0.0;
  for (const auto& c : cells) sum += c.area;
  return sum;
}

namespace {

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

Vec2 edge_normal(const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  return Vec2(d.y(), -d.x()).normalized();
}

}  // namespace

Mesh Mesh::from_cells(std::vector<Vec2> points, std::vector<std::array<int, 3>> triangles,
                      DomainTag tag, double nominal_h) {
  Mesh mesh;
  mesh.domain = tag;
  mesh.vertices.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    mesh.vertices.push_back({static_cast<int>(i), points[i].x(), points[i].y()});

  std::map<std::pair<int, int>, int> edge_ids;
  for (const auto& tri : triangles)
    for (int i = 0; i < 3; ++i) {
      const int a = tri[i], b = tri[(i + 1) % 3];
      edge_ids.emplace(std::minmax(a, b), 0);
    }
  mesh.edges.resize(edge_ids.size());
  int next = 0;
  for (auto& [key, id] : edge_ids) {
    id = next++;
    Edge& e = mesh.edges[id];
    e.id = id;
    e.vertices = {key.first, key.second};
    e.length = (points[key.second] - points[key.first]).norm();
  }

  mesh.cells.resize(triangles.size());
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    Cell& c = mesh.cells[t];
    c.id = static_cast<int>(t);
    c.vertices = triangles[t];
    const Vec2& p0 = points[c.vertices[0]];
    const Vec2& p1 = points[c.vertices[1]];
    const Vec2& p2 = points[c.vertices[2]];
    c.area = signed_area(p0, p1, p2);
    c.centroid = (p0 + p1 + p2) / 3.0;
    c.diameter = 0.0;
    for (int i = 0; i < 3; ++i) {
      const int a = c.vertices[i], b = c.vertices[(i + 1) % 3];
      const int eid = edge_ids.at(std::minmax(a, b));
      c.edges[i] = eid;
      c.normals[i] = edge_normal(points[a], points[b]);
      c.diameter = std::max(c.diameter, mesh.edges[eid].length);
      Edge& e = mesh.edges[eid];
      const int slot = e.cells[0] < 0 ? 0 : 1;
      if (e.cells[slot] >= 0) continue;  // over-referenced; validate() reports it
      e.cells[slot] = c.id;
      e.normals[slot] = c.normals[i];
    }
  }
  for (auto& e : mesh.edges) e.boundary = e.cells[1] < 0;

  mesh.h_max = 0.0;
  for (const auto& c : mesh.cells) mesh.h_max = std::max(mesh.h_max, c.diameter);
  mesh.nominal_h = nominal_h > 0.0 ? nominal_h : mesh.h_max;
  return mesh;
}

namespace {

void split_square(std::vector<std::array<int, 3>>& tris, int bl, int br, int tr, int tl, Diagonal diag) {
  if (diag == Diagonal::BottomLeftTopRight) {
    tris.push_back({bl, br, tr});
    tris.push_back({bl, tr, tl});
  } else {
    tris.push_back({bl, br, tl});
    tris.push_back({br, tr, tl});
  }
}

}  // namespace

std::string to_string(Diagonal diag) {
  return diag == Diagonal::BottomLeftTopRight ? "bl-tr" : "br-tl";
}

Diagonal parse_diagonal(const std::string& text) {
  if (text == "bl-tr") return Diagonal::BottomLeftTopRight;
  if (text == "br-tl") return Diagonal::BottomRightTopLeft;
  throw std::invalid_argument("unknown diagonal '" + text + "' (expected bl-tr or br-tl)");
}

Mesh build_unit_square_mesh(int n, Diagonal diag) {
  if (n < 1) throw std::invalid_argument("build_unit_square_mesh: n must be >= 1");
  std::vector<Vec2> points;
  points.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      points.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };

  std::vector<std::array<int, 3>> tris;
  tris.reserve(static_cast<std::size_t>(2 * n * n));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int bl = vid(i, j), br = vid(i + 1, j), tr = vid(i + 1, j + 1), tl = vid(i, j + 1);
      split_square(tris, bl, br, tr, tl, diag);
    }
  return Mesh::from_cells(std::move(points), std::move(tris), DomainTag::UnitSquare, 1.0 / n);
}

Mesh build_l_shape_mesh(int n, Diagonal diag) {
  if (n < 1) throw std::invalid_argument("build_l_shape_mesh: n must be >= 1");
  const int m = 2 * n;
  auto coord = [n](int i) { return -1.0 + static_cast<double>(i) / n; };
  // Grid point (i, j) is removed when it lies strictly inside the notch.
  auto inside = [n](int i, int j) { return !(i > n && j > n); };

  std::vector<int> ids(static_cast<std::size_t>((m + 1) * (m + 1)), -1);
  std::vector<Vec2> points;
  for (int j = 0; j <= m; ++j)
    for (int i = 0; i <= m; ++i)
      if (inside(i, j)) {
        ids[static_cast<std::size_t>(j * (m + 1) + i)] = static_cast<int>(points.size());
        points.emplace_back(coord(i), coord(j));
      }
  auto vid = [&](int i, int j) { return ids[static_cast<std::size_t>(j * (m + 1) + i)]; };

  std::vector<std::array<int, 3>> tris;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      if (i >= n && j >= n) continue;
      const int bl = vid(i, j), br = vid(i + 1, j), tr = vid(i + 1, j + 1), tl = vid(i, j + 1);
      split_square(tris, bl, br, tr, tl, diag);
    }
  return Mesh::from_cells(std::move(points), std::move(tris), DomainTag::LShape, 1.0 / n);
}

Mesh uniform_refine(const Mesh& mesh) {
  std::vector<Vec2> points;
  points.reserve(mesh.vertices.size() + mesh.edges.size());
  for (const auto& v : mesh.vertices) points.push_back(v.point());
  const int nv = mesh.num_vertices();
  for (const auto& e : mesh.edges)
    points.push_back(0.5 * (mesh.point(e.vertices[0]) + mesh.point(e.vertices[1])));

  std::vector<std::array<int, 3>> tris;
  tris.reserve(4 * mesh.cells.size());
  for (const auto& c : mesh.cells) {
    const int a = c.vertices[0], b = c.vertices[1], d = c.vertices[2];
    const int mab = nv + c.edges[0], mbd = nv + c.edges[1], mda = nv + c.edges[2];
    tris.push_back({a, mab, mda});
    tris.push_back({mab, b, mbd});
    tris.push_back({mda, mbd, d});
    tris.push_back({mab, mbd, mda});
  }
  return Mesh::from_cells(std::move(points), std::move(tris), mesh.domain, 0.5 * mesh.nominal_h);
}

std::vector<Violation> validate(const Mesh& mesh) {
  std::vector<Violation> out;
  auto report = [&out](ViolationKind kind, const std::string& msg) { out.push_back({kind, msg}); };
  const double tol = 1e-12;

  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const auto& v = mesh.vertices[i];
    if (v.id != static_cast<int>(i) || !std::isfinite(v.x) || !std::isfinite(v.y))
      report(ViolationKind::Measure, "vertex " + std::to_string(i) + " has bad id or coordinates");
  }

  std::vector<int> refs(mesh.edges.size(), 0);
  double h_max = 0.0;
  for (const auto& c : mesh.cells) {
    const std::string name = "cell " + std::to_string(c.id);
    const Vec2 p0 = mesh.point(c.vertices[0]), p1 = mesh.point(c.vertices[1]),
               p2 = mesh.point(c.vertices[2]);
    const double area = signed_area(p0, p1, p2);
    if (area <= 0.0) report(ViolationKind::Orientation, name + " is not counterclockwise");
    if (std::abs(area - c.area) > tol * std::max(1.0, std::abs(area)))
      report(ViolationKind::Measure, name + " stores an inconsistent area");
    double longest = 0.0;
    for (int i = 0; i < 3; ++i) {
      const int a = c.vertices[i], b = c.vertices[(i + 1) % 3];
      const int eid = c.edges[i];
      if (eid < 0 || eid >= mesh.num_edges()) {
        report(ViolationKind::Adjacency, name + " references a missing edge");
        continue;
      }
      ++refs[static_cast<std::size_t>(eid)];
      const Edge& e = mesh.edges[eid];
      if (std::minmax(a, b) != std::minmax(e.vertices[0], e.vertices[1]))
        report(ViolationKind::Adjacency, name + " edge " + std::to_string(i) + " does not match its vertices");
      if (e.cells[0] != c.id && e.cells[1] != c.id)
        report(ViolationKind::Adjacency, "edge " + std::to_string(eid) + " does not list " + name);
      longest = std::max(longest, (mesh.point(b) - mesh.point(a)).norm());
      const Vec2 mid = 0.5 * (mesh.point(a) + mesh.point(b));
      const Vec2 n = c.normals[i];
      if (std::abs(n.norm() - 1.0) > tol || n.dot(mid - c.centroid) <= 0.0)
        report(ViolationKind::Normal, name + " normal " + std::to_string(i) + " is not outward unit");
    }
    if (std::abs(longest - c.diameter) > tol * std::max(1.0, longest))
      report(ViolationKind::Measure, name + " diameter is not its longest edge");
    h_max = std::max(h_max, c.diameter);
  }

  for (const auto& e : mesh.edges) {
    const std::string name = "edge " + std::to_string(e.id);
    const int count = refs[static_cast<std::size_t>(e.id)];
    if (count == 0 || count > 2)
      report(ViolationKind::Adjacency, name + " is referenced by " + std::to_string(count) + " cells");
    if (e.num_cells() != count)
      report(ViolationKind::Adjacency, name + " adjacency list disagrees with cell references");
    if (e.boundary != (count == 1))
      report(ViolationKind::Adjacency, name + " boundary flag is inconsistent");
    const double len = (mesh.point(e.vertices[1]) - mesh.point(e.vertices[0])).norm();
    if (std::abs(len - e.length) > 1e-14 * std::max(1.0, len))
      report(ViolationKind::Measure, name + " length mismatch");
    if (count == 2 && e.cells[1] >= 0 && e.normals[0].dot(e.normals[1]) > -1.0 + tol)
      report(ViolationKind::Normal, name + " normals are not antiparallel");
  }

  const long euler = static_cast<long>(mesh.vertices.size()) - static_cast<long>(mesh.edges.size()) +
                     static_cast<long>(mesh.cells.size());
  if (euler != 1)
    report(ViolationKind::Euler, "V - E + C = " + std::to_string(euler) + ", expected 1");
  if (std::abs(h_max - mesh.h_max) > tol * std::max(1.0, h_max))
    report(ViolationKind::Measure, "h_max is not the largest cell diameter");
  return out;
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  std::ostringstream buf;
  buf.precision(17);
  buf << "# wgstokes mesh, domain " << to_string(mesh.domain) << '\n';
  buf << "# " << mesh.num_vertices() << " vertices, " << mesh.num_cells() << " cells\n";
  for (const auto& v : mesh.vertices) buf << "v " << v.x << ' ' << v.y << '\n';
  for (const auto& c : mesh.cells)
    buf << "c " << c.vertices[0] << ' ' << c.vertices[1] << ' ' << c.vertices[2] << '\n';
  out << buf.str();
}

}  // namespace wgs
