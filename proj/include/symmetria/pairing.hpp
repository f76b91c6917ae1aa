#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "symmetria/signatures.hpp"

namespace symmetria {

struct AffinityMatrix {
    Eigen::MatrixXd W; // d x d, symmetric, diagonal = q
    double q = 0.0;
};

struct PairSet {
    std::vector<std::pair<int, int>> pairs; // c disjoint pairs (first < second), sorted
    double total_cost = 0.0;
};

// W(j,j') = ||h_j - h_j'|| + q * [sign vectors identical], W(j,j) = q.
AffinityMatrix build_affinity(const FeatureSet& features, double q);

double max_descriptor_distance(const FeatureSet& features);

// Default penalty weight: 1000 x the largest pairwise descriptor distance
// (1.0 when all descriptors coincide).
double default_penalty(const FeatureSet& features);

// Exact minimum-cost set of c disjoint unordered pairs; pair {j,j'} costs
// 2 W(j,j'). Ties resolved toward the lexicographically smallest pair list.
PairSet solve_assignment(const AffinityMatrix& affinity, int c);

// Exhaustive reference implementation, d <= 10.
PairSet brute_force_assignment(const AffinityMatrix& affinity, int c);

} // namespace symmetria
