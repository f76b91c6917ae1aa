#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "symmetria/mesh.hpp"

namespace symmetria {

// Discrete Laplace-Beltrami operator: cotangent matrix M (symmetric, rows
// sum to zero) and lumped mass diagonal A. The operator is L = -A^{-1} M and
// eigenpairs solve M phi = -lambda A phi.
struct LaplaceOperator {
    Eigen::SparseMatrix<double> M;
    Eigen::VectorXd A;
    int n = 0;
};

// The k smallest eigenpairs, ascending. Columns of Phi are A-orthonormal and
// sign-normalized so each column's largest-magnitude entry is positive.
struct SpectralBasis {
    std::vector<double> eigenvalues;
    Eigen::MatrixXd Phi; // n x k
    int k = 0;
};

struct EigOptions {
    // Meshes at or below this size use the dense solver; larger ones use
    // shift-invert Lanczos on the sparse matrices.
    int dense_threshold = 1000;
    double residual_tol = 1e-9;
    int max_subspace = 400;
};

LaplaceOperator assemble_operator(const TriangleMesh& mesh);

// Throws DimensionError (k >= n or k < 1) and ConvergenceError.
SpectralBasis eigendecompose(const LaplaceOperator& op, int k, const EigOptions& opts = {});

// flag[i] is true when eigenvalue i sits in a near-degenerate cluster:
// min_j |lambda_i - lambda_j| / max(lambda_i, lambda_second) < tau_gap,
// where lambda_second is the second-smallest eigenvalue.
std::vector<bool> eigen_gap_flags(const SpectralBasis& basis, double tau_gap = 1e-3);

// Text dump: "n k" header, one line of eigenvalues, then n rows of k values.
void dump_basis(const std::string& path, const SpectralBasis& basis);

} // namespace symmetria
