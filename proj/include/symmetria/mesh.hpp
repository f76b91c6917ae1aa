#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "symmetria/errors.hpp"

namespace symmetria {

using Vec3 = Eigen::Vector3d;
using Face = std::array<int, 3>;

enum class MeshFormat { Off, Obj };

// Immutable triangle mesh: positions, faces, and the derived edge list.
// Construction validates index ranges, face degeneracy, and connectivity.
class TriangleMesh {
public:
    // Validates and indexes the mesh. Throws ValidationError on bad indices,
    // repeated face vertices, degenerate faces, or a disconnected edge graph.
    TriangleMesh(std::vector<Vec3> vertices, std::vector<Face> faces);

    int n() const { return static_cast<int>(vertices_.size()); }
    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<Face>& faces() const { return faces_; }

    // Unordered vertex-index pairs (i < j), sorted lexicographically.
    const std::vector<std::pair<int, int>>& edge_list() const { return edges_; }

    double face_area(int f) const;
    double bounding_box_diagonal() const { return bbox_diag_; }

private:
    std::vector<Vec3> vertices_;
    std::vector<Face> faces_;
    std::vector<std::pair<int, int>> edges_;
    double bbox_diag_ = 0.0;

    void validate() const;
};

// Per-vertex and per-edge incidence derived from the face list.
// One-ring lists are sorted and duplicate-free. Interior edges carry two
// incident faces, boundary edges one.
class AdjacencyIndex {
public:
    // Throws NonManifoldError if any edge has more than two incident faces.
    explicit AdjacencyIndex(const TriangleMesh& mesh);

    const std::vector<int>& one_ring(int v) const { return one_ring_.at(v); }
    const std::vector<int>& vertex_faces(int v) const { return vertex_faces_.at(v); }

    // Edge i of mesh.edge_list(); second entry is -1 for boundary edges.
    const std::array<int, 2>& edge_faces(int e) const { return edge_faces_.at(e); }
    bool is_boundary_edge(int e) const { return edge_faces_.at(e)[1] < 0; }

    // Vertices within graph distance <= 2, excluding v itself. Sorted.
    std::vector<int> two_ring(int v) const;

    int n() const { return static_cast<int>(one_ring_.size()); }

private:
    std::vector<std::vector<int>> one_ring_;
    std::vector<std::vector<int>> vertex_faces_;
    std::vector<std::array<int, 2>> edge_faces_;
};

// Reads an OFF or OBJ file. Only geometry records are consumed from OBJ
// (v/f); normals, texcoords, and materials are skipped.
TriangleMesh parse_mesh(const std::string& path, MeshFormat format);

// Format chosen from the file extension (.off / .obj).
TriangleMesh parse_mesh(const std::string& path);

AdjacencyIndex build_adjacency(const TriangleMesh& mesh);

// Barycentric vertex areas: one third of each incident face area.
std::vector<double> vertex_areas(const TriangleMesh& mesh);

double surface_area(const TriangleMesh& mesh);

} // namespace symmetria
