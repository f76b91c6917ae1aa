#pragma once

#include <vector>

#include "symmetria/geodesics.hpp"
#include "symmetria/laplace.hpp"

namespace symmetria {

struct FunctionalMap {
    std::vector<int> sign;          // length k, entries in {-1, 0, +1}
    std::vector<int> active;        // indices with sign != 0 and no gap flag
    std::vector<double> confidence; // |vote sum| / sum of squared restriction norms
};

// Parity vote for eigenfunction i over the paired geodesics:
// sign of sum_j p_ij . reverse(p_ij); 0 when the sum is within
// eps_sign * sum_j ||p_ij||^2 of zero.
int eigenfunction_sign(const SpectralBasis& basis, const std::vector<GeodesicPath>& paths,
                       int i, double eps_sign = 1e-6);

// Diagonal correspondence matrix as a sign vector: voted parity for unflagged
// eigenfunctions, 0 for flagged ones, +1 for the constant eigenfunction.
FunctionalMap build_functional_map(const SpectralBasis& basis,
                                   const std::vector<GeodesicPath>& paths,
                                   const std::vector<bool>& gap_flags,
                                   double eps_sign = 1e-6, int min_active = 3);

} // namespace symmetria
