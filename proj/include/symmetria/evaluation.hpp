#pragma once

#include <string>
#include <utility>
#include <vector>

#include "symmetria/mesh.hpp"

namespace symmetria {

struct EvalReport {
    std::vector<double> per_pair_error; // geodesic distance, ground truth vs estimate
    double threshold = 0.0;             // sqrt(area / 20 pi)
    double corr_rate = 0.0;             // fraction of errors strictly below threshold
    double runtime_seconds = 0.0;
};

// Scores sigma against ground-truth pairs (j, partner): a pair counts as a
// true positive when the geodesic distance between partner and sigma(j) is
// strictly below the threshold.
EvalReport correspondence_rate(const TriangleMesh& mesh, const AdjacencyIndex& adj,
                               const std::vector<int>& sigma,
                               const std::vector<std::pair<int, int>>& ground_truth);

// Fraction of reports with corr_rate strictly above 0.75.
double mesh_rate(const std::vector<EvalReport>& reports);

// Parses one "j partner" pair per line; '#' starts a comment.
std::vector<std::pair<int, int>> read_ground_truth(const std::string& path, bool one_based);

} // namespace symmetria
