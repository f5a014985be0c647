#include "surfstokes/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

namespace surfstokes {

namespace {

double triangle_diameter(const BaseMesh& mesh, const std::array<int, 3>& t) {
  const Vec3& a = mesh.vertices[t[0]];
  const Vec3& b = mesh.vertices[t[1]];
  const Vec3& c = mesh.vertices[t[2]];
  return std::max({(a - b).norm(), (b - c).norm(), (c - a).norm()});
}

Vec3 flat_normal(const BaseMesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  const Vec3& a = mesh.vertices[tri[0]];
  const Vec3& b = mesh.vertices[tri[1]];
  const Vec3& c = mesh.vertices[tri[2]];
  return (b - a).cross(c - a);
}

// Flips triangles whose flat normal disagrees with the exact outward normal
// at the centroid. Keeps constructors independent of vertex-table chirality.
void orient_outward(BaseMesh& mesh, const AnalyticSurface& surface) {
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    auto& tri = mesh.triangles[t];
    const Vec3 centroid = (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] +
                           mesh.vertices[tri[2]]) /
                          3.0;
    if (flat_normal(mesh, t).dot(exact_normal_extension(surface, centroid)) <
        0.0)
      std::swap(tri[1], tri[2]);
  }
}

}  // namespace

void rebuild_edges(BaseMesh& mesh) {
  std::map<std::array<int, 2>, int> edge_ids;
  mesh.edges.clear();
  mesh.tri_edges.assign(mesh.triangles.size(), {-1, -1, -1});
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int s = 0; s < 3; ++s) {
      const int a = tri[s];
      const int b = tri[(s + 1) % 3];
      const std::array<int, 2> key{std::min(a, b), std::max(a, b)};
      auto it = edge_ids.find(key);
      if (it == edge_ids.end()) {
        it = edge_ids.emplace(key, static_cast<int>(mesh.edges.size())).first;
        mesh.edges.push_back(EdgeRef{key, {t, -1}});
      } else {
        mesh.edges[it->second].tri[1] = t;
      }
      mesh.tri_edges[t][s] = it->second;
    }
  }
  // Renumber edges lexicographically by vertex pair so ids are deterministic
  // and independent of triangle order.
  std::vector<int> order(mesh.edges.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    return mesh.edges[i].v < mesh.edges[j].v;
  });
  std::vector<int> rank(order.size());
  for (size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i);
  std::vector<EdgeRef> sorted(mesh.edges.size());
  for (size_t i = 0; i < order.size(); ++i) sorted[i] = mesh.edges[order[i]];
  mesh.edges = std::move(sorted);
  for (auto& te : mesh.tri_edges)
    for (int s = 0; s < 3; ++s) te[s] = rank[te[s]];
}

void recompute_sizes(BaseMesh& mesh) {
  mesh.h_max = 0.0;
  mesh.h_min = std::numeric_limits<double>::max();
  for (const auto& t : mesh.triangles) {
    const double h = triangle_diameter(mesh, t);
    mesh.h_max = std::max(mesh.h_max, h);
    mesh.h_min = std::min(mesh.h_min, h);
  }
  if (mesh.triangles.empty()) mesh.h_min = 0.0;
}

BaseMesh build_base_mesh(const AnalyticSurface& surface) {
  BaseMesh mesh;
  if (surface.kind() == SurfaceKind::Sphere) {
    const double R = surface.radius();
    const double tau = (1.0 + std::sqrt(5.0)) / 2.0;
    const double raw[12][3] = {
        {-1, tau, 0}, {1, tau, 0},   {-1, -tau, 0}, {1, -tau, 0},
        {0, -1, tau}, {0, 1, tau},   {0, -1, -tau}, {0, 1, -tau},
        {tau, 0, -1}, {tau, 0, 1},   {-tau, 0, -1}, {-tau, 0, 1}};
    for (const auto& v : raw) {
      Vec3 p(v[0], v[1], v[2]);
      mesh.vertices.push_back(R * p.normalized());
    }
    const int faces[20][3] = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    for (const auto& f : faces)
      mesh.triangles.push_back({f[0], f[1], f[2]});
  } else {
    // Structured 16x8 grid on the torus, fine enough to resolve the inner
    // equator at level 0.
    const int n_major = 16;
    const int n_minor = 8;
    const double R = surface.major_radius();
    const double r = surface.minor_radius();
    for (int i = 0; i < n_major; ++i) {
      const double theta = 2.0 * M_PI * i / n_major;
      for (int j = 0; j < n_minor; ++j) {
        const double phi = 2.0 * M_PI * j / n_minor;
        const double a = R + r * std::cos(phi);
        mesh.vertices.emplace_back(a * std::cos(theta), a * std::sin(theta),
                                   r * std::sin(phi));
      }
    }
    auto vid = [&](int i, int j) {
      return (i % n_major) * n_minor + (j % n_minor);
    };
    for (int i = 0; i < n_major; ++i) {
      for (int j = 0; j < n_minor; ++j) {
        const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1),
                  d = vid(i, j + 1);
        mesh.triangles.push_back({a, b, c});
        mesh.triangles.push_back({a, c, d});
      }
    }
  }
  orient_outward(mesh, surface);
  rebuild_edges(mesh);
  recompute_sizes(mesh);
  mesh.level = 0;
  return mesh;
}

BaseMesh refine(const BaseMesh& mesh, const AnalyticSurface& surface) {
  BaseMesh fine;
  fine.vertices = mesh.vertices;
  fine.vertices.reserve(mesh.vertices.size() + mesh.edges.size());
  // One new vertex per edge: midpoint projected onto the surface.
  std::vector<int> edge_vertex(mesh.edges.size());
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Vec3 mid = 0.5 * (mesh.vertices[mesh.edges[e].v[0]] +
                            mesh.vertices[mesh.edges[e].v[1]]);
    edge_vertex[e] = static_cast<int>(fine.vertices.size());
    fine.vertices.push_back(closest_point(surface, mid));
  }
  fine.triangles.reserve(4 * mesh.triangles.size());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const int m01 = edge_vertex[mesh.tri_edges[t][0]];
    const int m12 = edge_vertex[mesh.tri_edges[t][1]];
    const int m20 = edge_vertex[mesh.tri_edges[t][2]];
    // Children keep the parent orientation.
    fine.triangles.push_back({tri[0], m01, m20});
    fine.triangles.push_back({m01, tri[1], m12});
    fine.triangles.push_back({m20, m12, tri[2]});
    fine.triangles.push_back({m01, m12, m20});
  }
  rebuild_edges(fine);
  recompute_sizes(fine);
  fine.level = mesh.level + 1;
  return fine;
}

std::pair<double, double> mesh_size(const BaseMesh& mesh) {
  if (mesh.triangles.empty()) throw ConfigError("mesh_size of an empty mesh");
  double hmax = 0.0, hmin = std::numeric_limits<double>::max();
  for (const auto& t : mesh.triangles) {
    const double h = triangle_diameter(mesh, t);
    hmax = std::max(hmax, h);
    hmin = std::min(hmin, h);
  }
  return {hmax, hmin};
}

MeshDiagnostics validate(const BaseMesh& mesh, const AnalyticSurface& surface) {
  MeshDiagnostics diag;
  diag.closed = true;
  for (const auto& e : mesh.edges)
    if (e.tri[1] < 0) diag.closed = false;

  diag.oriented = true;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec3 centroid = (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] +
                           mesh.vertices[tri[2]]) /
                          3.0;
    if (flat_normal(mesh, t).dot(exact_normal_extension(surface, centroid)) <=
        0.0)
      diag.oriented = false;
  }

  for (const auto& v : mesh.vertices)
    diag.max_vertex_distance =
        std::max(diag.max_vertex_distance, std::abs(signed_distance(surface, v)));

  double worst_ratio = 0.0;
  for (const auto& t : mesh.triangles) {
    const double a = (mesh.vertices[t[1]] - mesh.vertices[t[2]]).norm();
    const double b = (mesh.vertices[t[0]] - mesh.vertices[t[2]]).norm();
    const double c = (mesh.vertices[t[0]] - mesh.vertices[t[1]]).norm();
    const double s = 0.5 * (a + b + c);
    const double area2 = s * (s - a) * (s - b) * (s - c);
    const double area = area2 > 0.0 ? std::sqrt(area2) : 0.0;
    if (area == 0.0) {
      worst_ratio = std::numeric_limits<double>::infinity();
      continue;
    }
    const double circumradius = a * b * c / (4.0 * area);
    const double inradius = area / s;
    worst_ratio = std::max(worst_ratio, circumradius / inradius);
  }
  diag.shape_regularity = worst_ratio;

  const auto [hmax, hmin] = mesh_size(mesh);
  diag.quasi_uniformity = hmax / hmin;
  return diag;
}

void write_off(const BaseMesh& mesh, std::ostream& out) {
  out << "OFF\n";
  out << mesh.n_vertices() << ' ' << mesh.n_triangles() << ' ' << mesh.n_edges()
      << '\n';
  out.precision(17);
  for (const auto& v : mesh.vertices)
    out << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  for (const auto& t : mesh.triangles)
    out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  if (!out) throw IoError("failed to write OFF mesh");
}

}  // namespace surfstokes
