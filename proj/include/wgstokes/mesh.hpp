#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace wgs {

using Vec2 = Eigen::Vector2d;

struct Vertex {
  int id = 0;
  double x = 0.0;
  double y = 0.0;

  Vec2 point() const { return {x, y}; }
};

/// An edge is oriented from vertices[0] to vertices[1] (lower id first).
/// cells[1] == -1 on the boundary. normals[i] is the unit normal pointing
/// out of cells[i].
struct Edge {
  int id = 0;
  std::array<int, 2> vertices{-1, -1};
  std::array<int, 2> cells{-1, -1};
  bool boundary = false;
  double length = 0.0;
  std::array<Vec2, 2> normals{Vec2::Zero(), Vec2::Zero()};

  int num_cells() const { return cells[1] < 0 ? (cells[0] < 0 ? 0 : 1) : 2; }
};

/// Triangle with counterclockwise vertices. Local edge i joins vertices i and
/// i+1 (mod 3); edges[i] is its global id and normals[i] its outward normal.
struct Cell {
  int id = 0;
  std::array<int, 3> vertices{-1, -1, -1};
  std::array<int, 3> edges{-1, -1, -1};
  std::array<Vec2, 3> normals{Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
  double area = 0.0;      // signed; positive for CCW
  double diameter = 0.0;  // longest edge
  Vec2 centroid = Vec2::Zero();
};

enum class DomainTag { UnitSquare, LShape, Custom };

std::string to_string(DomainTag tag);

/// Conforming triangulation of a polygonal domain. Treated as immutable once
/// built; members are public so that tests can construct broken meshes.
struct Mesh {
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  std::vector<Cell> cells;
  double h_max = 0.0;
  /// Grid spacing of the generating lattice (1/n); equals h_max for custom
  /// meshes.
  double nominal_h = 0.0;
  DomainTag domain = DomainTag::Custom;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  int num_cells() const { return static_cast<int>(cells.size()); }

  Vec2 point(int vertex) const { return vertices[vertex].point(); }
  double total_area() const;

  /// Builds edges, normals and measures from a vertex list and cell triples.
  /// Edge ids are assigned lexicographically by (min vertex, max vertex).
  static Mesh from_cells(std::vector<Vec2> points,
                         std::vector<std::array<int, 3>> triangles,
                         DomainTag tag = DomainTag::Custom,
                         double nominal_h = 0.0);
};

/// Which diagonal splits each grid square into two triangles.
enum class Diagonal { BottomLeftTopRight, BottomRightTopLeft };
std::string to_string(Diagonal diag);
/// Parses `bl-tr` or `br-tl`.
Diagonal parse_diagonal(const std::string& text);

Mesh build_unit_square_mesh(int n, Diagonal diag = Diagonal::BottomLeftTopRight);

/// (-1,1)^2 minus [0,1]^2 with n subdivisions per unit length.
Mesh build_l_shape_mesh(int n, Diagonal diag = Diagonal::BottomLeftTopRight);

/// Red refinement: every triangle is split into four by its edge midpoints.
Mesh uniform_refine(const Mesh& mesh);

enum class ViolationKind { Orientation, Adjacency, Euler, Normal, Measure };

struct Violation {
  ViolationKind kind;
  std::string message;
};

std::string to_string(ViolationKind kind);

/// Reports every violated invariant; an empty result means the mesh is valid.
std::vector<Violation> validate(const Mesh& mesh);

/// Plain-text export: `v x y` and `c i j k` lines, `#` comments.
void write_mesh(std::ostream& out, const Mesh& mesh);

}  // namespace wgs
