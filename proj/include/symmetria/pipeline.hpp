#pragma once

#include <string>
#include <utility>
#include <vector>

#include "symmetria/correction.hpp"
#include "symmetria/correspondence.hpp"
#include "symmetria/functional_map.hpp"
#include "symmetria/laplace.hpp"
#include "symmetria/mesh.hpp"
#include "symmetria/pairing.hpp"
#include "symmetria/signatures.hpp"

namespace symmetria {

struct RunConfig {
    int k = 13;                  // eigenfunctions
    int d_max = 25;              // feature cap
    int c = 0;                   // pair count; 0 = min(8, d/2)
    double q_multiplier = 1000.0;
    int h = 50;                  // descriptor time samples
    double mu = 1.0;
    double tau_gap = 1e-3;
    double eps_sign = 1e-6;
    bool correction = true;
    int max_iter = 200;
    double tol_grad = 1e-7;
    int min_active = 3;
    bool analytic_hessian = false;
    int dense_threshold = 1000;  // eigensolver crossover
    double residual_tol = 1e-9;
    unsigned seed = 0;           // reserved; the pipeline takes no random decisions
};

void validate_config(const RunConfig& config);

// Applies "key = value" lines; '#' starts a comment. Unknown keys are errors.
void load_config_file(RunConfig& config, const std::string& path);
void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value);
std::vector<std::pair<std::string, std::string>> read_config_entries(const std::string& path);

struct DetectionResult {
    SpectralBasis basis;
    std::vector<bool> gap_flags;
    FeatureSet features;
    PairSet assignment;                             // indices into features
    std::vector<std::pair<int, int>> vertex_pairs;  // same pairs as vertex ids
    double q = 0.0;
    int c = 0;
    FunctionalMap map;
    RotationCorrection correction;
    bool correction_applied = false;
    SymmetryMap sym;
    std::vector<std::pair<std::string, double>> timings; // (stage, seconds)
};

DetectionResult detect(const TriangleMesh& mesh, const RunConfig& config);

// Pipeline stages downstream of the eigendecomposition.
DetectionResult detect_from_basis(const TriangleMesh& mesh, const AdjacencyIndex& adj,
                                  const SpectralBasis& basis, const RunConfig& config);

// Correspondence file: "# n=<n> k=<k'>" header, then one "j sigma(j)" line
// per vertex (0-based).
void write_correspondence(const std::string& path, const SymmetryMap& sym, int k_active);
std::vector<int> read_correspondence(const std::string& path);

void write_report(const std::string& path, const TriangleMesh& mesh, const RunConfig& config,
                  const DetectionResult& result);

// ASCII PLY with per-vertex colors from a blue-to-yellow map over the field
// range; the range is recorded in a header comment.
void export_ply(const std::string& path, const TriangleMesh& mesh,
                const std::vector<double>& field);

} // namespace symmetria
