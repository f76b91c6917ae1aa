#pragma once

#include <vector>

#include <Eigen/Core>

#include "symmetria/laplace.hpp"
#include "symmetria/mesh.hpp"

namespace symmetria {

struct FeatureSet {
    std::vector<int> indices;     // d feature vertex indices
    Eigen::MatrixXd H;            // h x d descriptor matrix, column j = feature j
    Eigen::MatrixXi S;            // k x d sign matrix, entries in {-1, +1}
    double t_h = 0.0;             // reference diffusion time
    std::vector<double> time_samples;

    int d() const { return static_cast<int>(indices.size()); }
};

// Heat kernel energy at every vertex for one diffusion time:
// value[j] = sum_i exp(-lambda_i t) phi_i(x_j)^2.
Eigen::VectorXd hks_energy(const SpectralBasis& basis, double t);

// Reference diffusion time 4 ln(10) / lambda_2.
double reference_time(const SpectralBasis& basis);

// h log-uniformly spaced times on [4 ln10 / lambda_k, 4 ln10 / lambda_2].
std::vector<double> hks_time_samples(const SpectralBasis& basis, int h);

// Feature points: strict local maxima of the heat kernel energy at the
// reference time over their two-ring, keeping the d_max largest by energy
// (ties to the lower vertex index).
FeatureSet detect_features(const TriangleMesh& mesh, const AdjacencyIndex& adj,
                           const SpectralBasis& basis, int d_max, int h = 50);

// Average fraction of eigenfunction sign coordinates that agree across the
// two endpoints of each mesh edge (diagnostic; nodal sets are sparse, so
// smooth bases score close to 1).
double sign_agreement_over_edges(const TriangleMesh& mesh, const SpectralBasis& basis);

} // namespace symmetria
