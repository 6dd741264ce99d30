#pragma once

#include "pqsys/types.hpp"

#include <iosfwd>
#include <vector>

namespace pqsys {

/// 2D simplicial mesh of a polygonal domain with homogeneous-Dirichlet
/// bookkeeping. Immutable after construction; refinement returns a new mesh.
///
/// Vertex indexing is lexicographic by (x, y) so runs are bit-reproducible.
struct Mesh {
  Eigen::Matrix<Real, Eigen::Dynamic, 2> vertices;
  Eigen::Matrix<int, Eigen::Dynamic, 3> triangles;
  std::vector<bool> boundary_vertex;
  int level = 0;
  Real domain_measure = 0.0;

  // Derived geometry, filled by finalize().
  Vector element_area;                              // per triangle
  std::vector<Eigen::Matrix<Real, 2, 3>> shape_gradients;  // columns: grad of the 3 nodal hats
  Eigen::VectorXi interior_index;                   // vertex -> dof id, or -1 on the boundary
  std::vector<int> interior_vertices;               // dof id -> vertex

  int num_vertices() const { return static_cast<int>(vertices.rows()); }
  int num_triangles() const { return static_cast<int>(triangles.rows()); }
  int num_interior() const { return static_cast<int>(interior_vertices.size()); }

  Vec2 vertex(int v) const { return vertices.row(v).transpose(); }

  /// Recomputes areas, shape gradients, interior numbering and domain_measure.
  /// Throws if any triangle has non-positive signed area.
  void finalize();
};

/// Structured crisscross triangulation of (0,1)^2: every cell is split into
/// four triangles through its center, so even n = 1 has an interior vertex.
Mesh generate_unit_square(int n_cells_per_side);

/// Red refinement: each triangle splits into 4 congruent children via edge
/// midpoints. A midpoint is a boundary vertex iff its parent edge is a
/// boundary edge (an edge with exactly one incident triangle).
Mesh refine_uniform(const Mesh& mesh);

/// Nested sequence of uniformly refined meshes with interior-dof
/// prolongation maps between consecutive levels.
struct RefinementHierarchy {
  std::vector<Mesh> meshes;
  std::vector<SparseMat> prolongations;  // [l]: level l coeffs -> level l+1 coeffs

  const Mesh& mesh(int level) const { return meshes.at(static_cast<std::size_t>(level)); }
  int num_levels() const { return static_cast<int>(meshes.size()); }
};

/// Builds level 0..num_levels-1 from the given base mesh.
RefinementHierarchy build_hierarchy(Mesh base, int num_levels);

/// Represents the same piecewise-linear function on the finer mesh.
Vector prolongate(const RefinementHierarchy& hierarchy, const Vector& coeffs,
                  int from_level, int to_level);

/// Plain-text export: header `vertices <n> triangles <m>`, one vertex per
/// line (`x y boundary_flag`), one triangle per line (three 0-based indices).
void write_mesh(std::ostream& os, const Mesh& mesh);

}  // namespace pqsys
