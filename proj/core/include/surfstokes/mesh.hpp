#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "surfstokes/geometry.hpp"

namespace surfstokes {

/// Edge between two vertices (v[0] < v[1]) with the 1-2 adjacent triangles;
/// tri[1] == -1 marks a boundary edge (never happens for a closed mesh).
struct EdgeRef {
  std::array<int, 2> v;
  std::array<int, 2> tri;
};

/// Flat triangulation whose vertices lie on the surface. Triangles are
/// counterclockwise seen from outside. `tri_edges[t][s]` is the global edge id
/// of local edge s of triangle t, with local edges (v0,v1), (v1,v2), (v2,v0).
struct BaseMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<EdgeRef> edges;
  std::vector<std::array<int, 3>> tri_edges;
  int level = 0;
  double h_max = 0.0;
  double h_min = 0.0;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }
  int euler_characteristic() const {
    return n_vertices() - n_edges() + n_triangles();
  }
};

/// Coarsest mesh of the family: an icosahedron scaled to the sphere, or a
/// 16x8 structured grid split into triangles for the torus. Vertices lie on
/// the surface exactly (up to roundoff), orientation is outward.
BaseMesh build_base_mesh(const AnalyticSurface& surface);

/// Uniform red refinement: each triangle splits into four via edge midpoints,
/// new vertices are projected onto the surface by the closest-point map.
BaseMesh refine(const BaseMesh& mesh, const AnalyticSurface& surface);

/// (h_max, h_min): extreme triangle diameters, i.e. longest-edge lengths.
std::pair<double, double> mesh_size(const BaseMesh& mesh);

struct MeshDiagnostics {
  bool closed = false;    // every edge shared by exactly two triangles
  bool oriented = false;  // flat normals point outward
  double max_vertex_distance = 0.0;  // max |d(v)| over vertices
  double shape_regularity = 0.0;     // max circumradius/inradius
  double quasi_uniformity = 0.0;     // h_max / h_min
};

MeshDiagnostics validate(const BaseMesh& mesh, const AnalyticSurface& surface);

/// Writes the mesh in OFF layout: "OFF", counts, vertices, triangle rows.
void write_off(const BaseMesh& mesh, std::ostream& out);

// Internal helpers shared with refinement and DOF numbering.
void rebuild_edges(BaseMesh& mesh);
void recompute_sizes(BaseMesh& mesh);

}  // namespace surfstokes
