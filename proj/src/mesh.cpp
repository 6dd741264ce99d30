#include "pqsys/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>
#include <utility>

namespace pqsys {

namespace {

Real signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

/// Sorts vertices lexicographically by (x, y) and remaps triangle indices.
/// Returns the permutation old_index -> new_index.
std::vector<int> canonicalize(Mesh& mesh) {
  const int nv = mesh.num_vertices();
  std::vector<int> order(static_cast<std::size_t>(nv));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (mesh.vertices(a, 0) != mesh.vertices(b, 0)) return mesh.vertices(a, 0) < mesh.vertices(b, 0);
    return mesh.vertices(a, 1) < mesh.vertices(b, 1);
  });
  std::vector<int> perm(static_cast<std::size_t>(nv));
  Eigen::Matrix<Real, Eigen::Dynamic, 2> sorted_vertices(nv, 2);
  std::vector<bool> sorted_flags(static_cast<std::size_t>(nv));
  for (int new_id = 0; new_id < nv; ++new_id) {
    const int old_id = order[static_cast<std::size_t>(new_id)];
    perm[static_cast<std::size_t>(old_id)] = new_id;
    sorted_vertices.row(new_id) = mesh.vertices.row(old_id);
    sorted_flags[static_cast<std::size_t>(new_id)] = mesh.boundary_vertex[static_cast<std::size_t>(old_id)];
  }
  mesh.vertices = std::move(sorted_vertices);
  mesh.boundary_vertex = std::move(sorted_flags);
  for (int t = 0; t < mesh.num_triangles(); ++t)
    for (int k = 0; k < 3; ++k)
      mesh.triangles(t, k) = perm[static_cast<std::size_t>(mesh.triangles(t, k))];
  return perm;
}

struct RefinedMesh {
  Mesh mesh;
  // Fine-vertex provenance in terms of coarse vertex ids: (v, v) for an
  // inherited vertex, (v1, v2) for the midpoint of edge {v1, v2}.
  std::vector<std::pair<int, int>> parents;
};

RefinedMesh refine_with_provenance(const Mesh& coarse) {
  RefinedMesh out;
  Mesh& fine = out.mesh;
  const int nv = coarse.num_vertices();
  const int nt = coarse.num_triangles();

  // Edge table: sorted vertex pair -> (midpoint vertex id, incident triangle count).
  std::map<std::pair<int, int>, std::pair<int, int>> edges;
  auto edge_key = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
  for (int t = 0; t < nt; ++t) {
    for (int k = 0; k < 3; ++k) {
      const auto key = edge_key(coarse.triangles(t, k), coarse.triangles(t, (k + 1) % 3));
      auto [it, inserted] = edges.try_emplace(key, std::make_pair(-1, 0));
      it->second.second += 1;
    }
  }

  const int ne = static_cast<int>(edges.size());
  fine.vertices.resize(nv + ne, 2);
  fine.boundary_vertex.resize(static_cast<std::size_t>(nv + ne));
  out.parents.resize(static_cast<std::size_t>(nv + ne));
  for (int v = 0; v < nv; ++v) {
    fine.vertices.row(v) = coarse.vertices.row(v);
    fine.boundary_vertex[static_cast<std::size_t>(v)] = coarse.boundary_vertex[static_cast<std::size_t>(v)];
    out.parents[static_cast<std::size_t>(v)] = {v, v};
  }
  int next = nv;
  for (auto& [key, value] : edges) {
    value.first = next;
    fine.vertices.row(next) = 0.5 * (coarse.vertices.row(key.first) + coarse.vertices.row(key.second));
    fine.boundary_vertex[static_cast<std::size_t>(next)] = (value.second == 1);
    out.parents[static_cast<std::size_t>(next)] = key;
    ++next;
  }

  fine.triangles.resize(4 * nt, 3);
  for (int t = 0; t < nt; ++t) {
    const int a = coarse.triangles(t, 0);
    const int b = coarse.triangles(t, 1);
    const int c = coarse.triangles(t, 2);
    const int mab = edges.at(edge_key(a, b)).first;
    const int mbc = edges.at(edge_key(b, c)).first;
    const int mca = edges.at(edge_key(c, a)).first;
    fine.triangles.row(4 * t + 0) << a, mab, mca;
    fine.triangles.row(4 * t + 1) << mab, b, mbc;
    fine.triangles.row(4 * t + 2) << mca, mbc, c;
    fine.triangles.row(4 * t + 3) << mab, mbc, mca;
  }

  fine.level = coarse.level + 1;
  const std::vector<int> perm = canonicalize(fine);
  // Re-express provenance against the canonical fine ordering.
  std::vector<std::pair<int, int>> reordered(out.parents.size());
  for (std::size_t old_id = 0; old_id < out.parents.size(); ++old_id)
    reordered[static_cast<std::size_t>(perm[old_id])] = out.parents[old_id];
  out.parents = std::move(reordered);
  fine.finalize();
  return out;
}

SparseMat build_prolongation(const Mesh& coarse, const RefinedMesh& refined) {
  const Mesh& fine = refined.mesh;
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(2 * fine.num_interior()));
  for (int dof = 0; dof < fine.num_interior(); ++dof) {
    const int v = fine.interior_vertices[static_cast<std::size_t>(dof)];
    const auto [pa, pb] = refined.parents[static_cast<std::size_t>(v)];
    if (pa == pb) {
      const int cdof = coarse.interior_index(pa);
      if (cdof >= 0) triplets.emplace_back(dof, cdof, 1.0);
    } else {
      for (int p : {pa, pb}) {
        const int cdof = coarse.interior_index(p);
        if (cdof >= 0) triplets.emplace_back(dof, cdof, 0.5);
      }
    }
  }
  SparseMat P(fine.num_interior(), coarse.num_interior());
  P.setFromTriplets(triplets.begin(), triplets.end());
  P.makeCompressed();
  return P;
}

}  // namespace

void Mesh::finalize() {
  const int nt = num_triangles();
  const int nv = num_vertices();
  require(static_cast<int>(boundary_vertex.size()) == nv, "mesh: boundary flag count mismatch");

  element_area.resize(nt);
  shape_gradients.assign(static_cast<std::size_t>(nt), Eigen::Matrix<Real, 2, 3>::Zero());
  domain_measure = 0.0;
  for (int t = 0; t < nt; ++t) {
    const Vec2 a = vertex(triangles(t, 0));
    const Vec2 b = vertex(triangles(t, 1));
    const Vec2 c = vertex(triangles(t, 2));
    const Real area = signed_area(a, b, c);
    require(area > 0.0, "mesh: triangle " + std::to_string(t) + " has non-positive area");
    element_area(t) = area;
    domain_measure += area;
    auto& g = shape_gradients[static_cast<std::size_t>(t)];
    const Real inv = 1.0 / (2.0 * area);
    g.col(0) << (b.y() - c.y()) * inv, (c.x() - b.x()) * inv;
    g.col(1) << (c.y() - a.y()) * inv, (a.x() - c.x()) * inv;
    g.col(2) << (a.y() - b.y()) * inv, (b.x() - a.x()) * inv;
  }

  interior_index = Eigen::VectorXi::Constant(nv, -1);
  interior_vertices.clear();
  for (int v = 0; v < nv; ++v) {
    if (!boundary_vertex[static_cast<std::size_t>(v)]) {
      interior_index(v) = static_cast<int>(interior_vertices.size());
      interior_vertices.push_back(v);
    }
  }
}

Mesh generate_unit_square(int n_cells_per_side) {
  require(n_cells_per_side >= 1, "generate_unit_square: n_cells_per_side must be >= 1");
  const int n = n_cells_per_side;
  Mesh mesh;
  const int grid = (n + 1) * (n + 1);
  mesh.vertices.resize(grid + n * n, 2);
  mesh.boundary_vertex.assign(static_cast<std::size_t>(grid + n * n), false);

  const Real h = 1.0 / static_cast<Real>(n);
  auto grid_id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      mesh.vertices.row(grid_id(i, j)) << i * h, j * h;
      mesh.boundary_vertex[static_cast<std::size_t>(grid_id(i, j))] =
          (i == 0 || i == n || j == 0 || j == n);
    }
  }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      mesh.vertices.row(grid + j * n + i) << (i + 0.5) * h, (j + 0.5) * h;

  mesh.triangles.resize(4 * n * n, 3);
  int t = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int sw = grid_id(i, j), se = grid_id(i + 1, j);
      const int ne = grid_id(i + 1, j + 1), nw = grid_id(i, j + 1);
      const int center = grid + j * n + i;
      mesh.triangles.row(t++) << sw, se, center;
      mesh.triangles.row(t++) << se, ne, center;
      mesh.triangles.row(t++) << ne, nw, center;
      mesh.triangles.row(t++) << nw, sw, center;
    }
  }

  mesh.level = 0;
  canonicalize(mesh);
  mesh.finalize();
  return mesh;
}

Mesh refine_uniform(const Mesh& mesh) { return refine_with_provenance(mesh).mesh; }

RefinementHierarchy build_hierarchy(Mesh base, int num_levels) {
  require(num_levels >= 1, "build_hierarchy: need at least one level");
  base.level = 0;
  base.finalize();
  RefinementHierarchy hierarchy;
  hierarchy.meshes.push_back(std::move(base));
  for (int l = 1; l < num_levels; ++l) {
    RefinedMesh refined = refine_with_provenance(hierarchy.meshes.back());
    hierarchy.prolongations.push_back(build_prolongation(hierarchy.meshes.back(), refined));
    hierarchy.meshes.push_back(std::move(refined.mesh));
  }
  return hierarchy;
}

Vector prolongate(const RefinementHierarchy& hierarchy, const Vector& coeffs,
                  int from_level, int to_level) {
  require(from_level >= 0 && to_level < hierarchy.num_levels() && from_level <= to_level,
          "prolongate: level out of range");
  require(coeffs.size() == hierarchy.mesh(from_level).num_interior(),
          "prolongate: coefficient count does not match level");
  Vector result = coeffs;
  for (int l = from_level; l < to_level; ++l)
    result = hierarchy.prolongations[static_cast<std::size_t>(l)] * result;
  return result;
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << "vertices " << mesh.num_vertices() << " triangles " << mesh.num_triangles() << "\n";
  char buf[96];
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %d\n", mesh.vertices(v, 0), mesh.vertices(v, 1),
                  mesh.boundary_vertex[static_cast<std::size_t>(v)] ? 1 : 0);
    os << buf;
  }
  for (int t = 0; t < mesh.num_triangles(); ++t)
    os << mesh.triangles(t, 0) << ' ' << mesh.triangles(t, 1) << ' ' << mesh.triangles(t, 2) << "\n";
}

}  // namespace pqsys
