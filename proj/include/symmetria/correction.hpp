#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "symmetria/functional_map.hpp"
#include "symmetria/laplace.hpp"

namespace symmetria {

// Data for the rotation-correction objective over the active eigenfunctions:
// off(R'DR) + ||R'DR - D||_F^2 + mu ||R'Fbar - C R'Gbar||_F^2.
struct CorrectionProblem {
    Eigen::VectorXd D;    // active eigenvalues (diagonal of D)
    Eigen::VectorXd C;    // active parities, entries in {-1, +1}
    Eigen::MatrixXd Fbar; // k' x 2c spectral coefficients of pair indicators
    Eigen::MatrixXd Gbar; // k' x 2c, columns swapped pairwise relative to Fbar
    double mu = 1.0;
};

struct OptimizeOptions {
    int max_iter = 200;
    double tol_grad = 1e-7;
    bool analytic_hessian = false; // default: finite differences of the gradient field
    double hess_fd_step = 1e-5;
};

struct RotationCorrection {
    Eigen::MatrixXd R;
    double final_cost = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<std::pair<double, double>> trace; // (cost, gradient norm) per accepted iterate
};

// Assemble the problem from the paired feature vertices: Fbar columns are the
// rows of the active eigenfunctions at [a_1..a_c, b_1..b_c], Gbar at the
// swapped order [b_1..b_c, a_1..a_c].
CorrectionProblem build_correction_problem(const SpectralBasis& basis, const FunctionalMap& map,
                                           const std::vector<std::pair<int, int>>& vertex_pairs,
                                           double mu = 1.0);

double cost(const CorrectionProblem& prob, const Eigen::MatrixXd& R);

// Gradient of the cost treating R as a free square matrix.
Eigen::MatrixXd euclidean_gradient(const CorrectionProblem& prob, const Eigen::MatrixXd& R);

// Orthogonal projection onto the tangent space of SO(k') at R.
Eigen::MatrixXd project_tangent(const Eigen::MatrixXd& R, const Eigen::MatrixXd& X);

Eigen::MatrixXd riemannian_gradient(const CorrectionProblem& prob, const Eigen::MatrixXd& R);

// QR-based retraction of a tangent step, sign-fixed to stay in SO(k').
Eigen::MatrixXd qr_retract(const Eigen::MatrixXd& R, const Eigen::MatrixXd& step);

// Riemannian trust-region descent with a Steihaug-CG subproblem solver.
RotationCorrection optimize(const CorrectionProblem& prob, const Eigen::MatrixXd& R0,
                            const OptimizeOptions& opts = {});

} // namespace symmetria
