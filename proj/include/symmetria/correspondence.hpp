#pragma once

#include <vector>

#include <Eigen/Core>

#include "symmetria/functional_map.hpp"
#include "symmetria/laplace.hpp"
#include "symmetria/mesh.hpp"

namespace symmetria {

struct SymmetryMap {
    std::vector<int> sigma;          // detected partner per vertex
    std::vector<double> nn_distance; // embedding distance to that partner
};

struct Embedding {
    Eigen::MatrixXd source; // k' x n, rotated spectral coordinates
    Eigen::MatrixXd target; // k' x n, rows sign-flipped by parity
};

// Spectral embedding restricted to active eigenfunctions: source = R' Phi',
// target row i = sign(active[i]) * source row i. Pass nullptr for R = I.
Embedding embed(const SpectralBasis& basis, const FunctionalMap& map,
                const Eigen::MatrixXd* R = nullptr);

// sigma(j) = column of target nearest to source column j (ties to the lower
// index), via a kd-tree over the target columns.
SymmetryMap nearest_neighbor_map(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target);

// Geodesic distance between j and sigma(sigma(j)) per vertex.
std::vector<double> involution_diagnostics(const TriangleMesh& mesh, const AdjacencyIndex& adj,
                                           const std::vector<int>& sigma);

} // namespace symmetria
