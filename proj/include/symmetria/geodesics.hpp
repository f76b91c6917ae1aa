#pragma once

#include <vector>

#include <Eigen/Core>

#include "symmetria/laplace.hpp"
#include "symmetria/mesh.hpp"

namespace symmetria {

struct GeodesicPath {
    std::vector<int> vertex_seq; // source first, target last
    double length = 0.0;
};

// Shortest path over the edge graph with Euclidean edge weights; equal-length
// alternatives resolve toward the smaller predecessor index.
GeodesicPath shortest_path(const TriangleMesh& mesh, const AdjacencyIndex& adj,
                           int src, int dst);

// Single-source distances to a set of targets (early exit once all targets
// are settled).
std::vector<double> geodesic_distances(const TriangleMesh& mesh, const AdjacencyIndex& adj,
                                       int src, const std::vector<int>& targets);

// Eigenfunction values along a path: p[m] = Phi(vertex_seq[m], i).
Eigen::VectorXd restrict_to_path(const SpectralBasis& basis, const GeodesicPath& path, int i);

} // namespace symmetria
