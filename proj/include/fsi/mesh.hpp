// Structured triangulations of rectangles with tagged boundaries, the 1D
// interface mesh living on the elastic wall, and uniform refinement.
#pragma once

#include <array>
#include <iosfwd>
#include <utility>
#include <vector>

namespace fsi {

enum class BoundaryTag { Inlet, Outlet, Interface, Bottom, StructureOuter };

const char* to_string(BoundaryTag tag);

// Lattice the mesh was generated from. Kept around so fields can be
// evaluated at arbitrary points (nested-mesh transfer) without a search tree.
struct GridMeta {
  int nx = 0, ny = 0;
  double L = 0.0, H = 0.0;
};

struct BoundaryEdge {
  int a, b;
  BoundaryTag tag;
};

// Tag assignment for the four sides of a generated rectangle.
struct RectTags {
  BoundaryTag left, right, bottom, top;
};

// Fluid block: inflow on the left, outflow on the right, symmetry plane at
// the bottom, elastic interface on top.
constexpr RectTags fluid_tags() {
  return {BoundaryTag::Inlet, BoundaryTag::Outlet, BoundaryTag::Bottom,
          BoundaryTag::Interface};
}

// Thick structure block: the interface is its *bottom* side (the block is
// glued on top of the fluid); lateral sides carry the positional tags and
// are where the structure is clamped.
constexpr RectTags structure_tags() {
  return {BoundaryTag::Inlet, BoundaryTag::Outlet, BoundaryTag::Interface,
          BoundaryTag::StructureOuter};
}

struct Mesh2D {
  std::vector<std::array<double, 2>> vertices;
  std::vector<std::array<int, 3>> triangles;  // counterclockwise
  std::vector<BoundaryEdge> boundary_edges;
  GridMeta grid;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
  double triangle_area(int t) const;
  double total_area() const;
};

struct InterfaceMesh1D {
  std::vector<double> nodes;        // x-coordinates, strictly increasing
  std::vector<int> parent_vertex;   // node -> vertex index in the 2D mesh

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  double length() const { return nodes.back() - nodes.front(); }
};

// Rectangle (0,L)x(0,H), nx-by-ny cells, every cell split along its
// bottom-left -> top-right diagonal. Vertex (i,j) sits at
// (i*L/nx, j*H/ny) with the last row/column pinned to exactly L and H.
Mesh2D build_rectangle_mesh(double L, double H, int nx, int ny,
                            const RectTags& tags);

// All vertices lying on Interface-tagged edges, sorted by x.
InterfaceMesh1D extract_interface(const Mesh2D& mesh);

// Split every triangle into four via edge midpoints; children of triangle k
// occupy slots 4k..4k+3. Boundary tags are inherited by the half-edges.
Mesh2D uniform_refine(const Mesh2D& mesh);

// For each boundary edge, the triangle owning it and the vertex opposite to
// it. Throws if some boundary edge is not owned by exactly one triangle.
std::vector<std::pair<int, int>> boundary_edge_owners(const Mesh2D& mesh);

// Plain-text dump: `vertices`, `triangles`, `boundary` sections (see README).
void write_mesh(std::ostream& os, const Mesh2D& mesh);

}  // namespace fsi
