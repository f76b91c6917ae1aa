#include "symmetria/correction.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "symmetria/errors.hpp"

namespace symmetria {

namespace {

double frob_dot(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
    return (X.array() * Y.array()).sum();
}

// Riemannian gradient formula evaluated at an arbitrary (not necessarily
// orthogonal) matrix; smooth extension used for Hessian finite differences.
Eigen::MatrixXd gradient_field(const CorrectionProblem& prob, const Eigen::MatrixXd& X) {
    Eigen::MatrixXd G = euclidean_gradient(prob, X);
    return X * (X.transpose() * G - G.transpose() * X) * 0.5;
}

// Directional derivative of the euclidean gradient along V.
Eigen::MatrixXd euclidean_gradient_derivative(const CorrectionProblem& prob,
                                              const Eigen::MatrixXd& R,
                                              const Eigen::MatrixXd& V) {
    const auto D = prob.D.asDiagonal();
    const auto C = prob.C.asDiagonal();
    Eigen::MatrixXd DR = D * R;
    Eigen::MatrixXd DV = D * V;
    Eigen::MatrixXd B = R.transpose() * DR;
    Eigen::MatrixXd dB = V.transpose() * DR + R.transpose() * DV;

    Eigen::MatrixXd Boff = B;
    Boff.diagonal() -= B.diagonal(); // B - diag(B)
    Eigen::MatrixXd dBoff = dB;
    dBoff.diagonal() -= dB.diagonal();
    Eigen::MatrixXd dG1 = 4.0 * (DV * Boff + DR * dBoff);

    Eigen::MatrixXd Bd = B;
    Bd.diagonal() -= prob.D; // B - D
    Eigen::MatrixXd dG2 = 4.0 * (DV * Bd + DR * dB);

    Eigen::MatrixXd S = prob.Fbar * prob.Gbar.transpose() + prob.Gbar * prob.Fbar.transpose();
    Eigen::MatrixXd dG3 = 2.0 * (prob.Fbar * (prob.Fbar.transpose() * V) +
                                 prob.Gbar * (prob.Gbar.transpose() * V)) -
                          2.0 * (S * V) * C;

    return dG1 + dG2 + prob.mu * dG3;
}

// Hessian-vector product: derivative of the projected gradient field along a
// tangent direction, projected back to the tangent space.
Eigen::MatrixXd hessian_apply(const CorrectionProblem& prob, const Eigen::MatrixXd& R,
                              const Eigen::MatrixXd& V, const OptimizeOptions& opts) {
    double vnorm = V.norm();
    if (vnorm == 0.0) return Eigen::MatrixXd::Zero(R.rows(), R.cols());

    if (opts.analytic_hessian) {
        Eigen::MatrixXd G = euclidean_gradient(prob, R);
        Eigen::MatrixXd dG = euclidean_gradient_derivative(prob, R, V);
        Eigen::MatrixXd M1 = R.transpose() * G - G.transpose() * R;
        Eigen::MatrixXd M2 = V.transpose() * G + R.transpose() * dG;
        Eigen::MatrixXd deriv = V * M1 * 0.5 + R * (M2 - M2.transpose()) * 0.5;
        return project_tangent(R, deriv);
    }

    double h = opts.hess_fd_step / vnorm;
    Eigen::MatrixXd Gp = gradient_field(prob, R + h * V);
    Eigen::MatrixXd Gm = gradient_field(prob, R - h * V);
    return project_tangent(R, (Gp - Gm) / (2.0 * h));
}

// Steihaug truncated CG for the trust-region subproblem.
Eigen::MatrixXd steihaug(const CorrectionProblem& prob, const Eigen::MatrixXd& R,
                         const Eigen::MatrixXd& grad, double radius,
                         const OptimizeOptions& opts) {
    const int k = static_cast<int>(R.rows());
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(k, k);
    Eigen::MatrixXd r = grad;
    Eigen::MatrixXd d = -grad;

    double g_norm = grad.norm();
    double rtol = std::min(0.1, std::sqrt(g_norm)) * g_norm;
    double rr = frob_dot(r, r);
    if (std::sqrt(rr) <= rtol) return z;

    auto boundary_step = [&](const Eigen::MatrixXd& base, const Eigen::MatrixXd& dir) {
        // Positive tau with ||base + tau dir|| = radius.
        double a = frob_dot(dir, dir);
        double b = 2.0 * frob_dot(base, dir);
        double c = frob_dot(base, base) - radius * radius;
        double tau = (-b + std::sqrt(std::max(b * b - 4.0 * a * c, 0.0))) / (2.0 * a);
        return base + tau * dir;
    };

    const int max_cg = std::max(10, k * (k - 1) / 2 + 5);
    for (int j = 0; j < max_cg; ++j) {
        Eigen::MatrixXd Hd = hessian_apply(prob, R, d, opts);
        double dHd = frob_dot(d, Hd);
        if (dHd <= 0.0) return boundary_step(z, d);
        double alpha = rr / dHd;
        Eigen::MatrixXd z_next = z + alpha * d;
        if (z_next.norm() >= radius) return boundary_step(z, d);
        r += alpha * Hd;
        double rr_next = frob_dot(r, r);
        z = std::move(z_next);
        if (std::sqrt(rr_next) <= rtol) return z;
        d = -r + (rr_next / rr) * d;
        rr = rr_next;
    }
    return z;
}

} // namespace

CorrectionProblem build_correction_problem(const SpectralBasis& basis, const FunctionalMap& map,
                                           const std::vector<std::pair<int, int>>& vertex_pairs,
                                           double mu) {
    const int kp = static_cast<int>(map.active.size());
    const int c = static_cast<int>(vertex_pairs.size());
    if (kp < 1) throw DegenerateMapError("no active eigenfunctions for correction");
    if (c < 1) throw DimensionError("correction needs at least one vertex pair");

    CorrectionProblem prob;
    prob.mu = mu;
    prob.D.resize(kp);
    prob.C.resize(kp);
    for (int i = 0; i < kp; ++i) {
        prob.D[i] = basis.eigenvalues[map.active[i]];
        prob.C[i] = map.sign[map.active[i]];
    }
    prob.Fbar.resize(kp, 2 * c);
    prob.Gbar.resize(kp, 2 * c);
    for (int j = 0; j < c; ++j) {
        auto [a, b] = vertex_pairs[j];
        for (int i = 0; i < kp; ++i) {
            double pa = basis.Phi(a, map.active[i]);
            double pb = basis.Phi(b, map.active[i]);
            prob.Fbar(i, j) = pa;
            prob.Fbar(i, c + j) = pb;
            prob.Gbar(i, j) = pb;
            prob.Gbar(i, c + j) = pa;
        }
    }
    return prob;
}

double cost(const CorrectionProblem& prob, const Eigen::MatrixXd& R) {
    Eigen::MatrixXd B = R.transpose() * (prob.D.asDiagonal() * R);
    double f1 = B.squaredNorm() - B.diagonal().squaredNorm();
    Eigen::MatrixXd Bd = B;
    Bd.diagonal() -= prob.D;
    double f2 = Bd.squaredNorm();
    Eigen::MatrixXd E =
        R.transpose() * prob.Fbar - prob.C.asDiagonal() * (R.transpose() * prob.Gbar);
    return f1 + f2 + prob.mu * E.squaredNorm();
}

Eigen::MatrixXd euclidean_gradient(const CorrectionProblem& prob, const Eigen::MatrixXd& R) {
    const auto C = prob.C.asDiagonal();
    Eigen::MatrixXd DR = prob.D.asDiagonal() * R;
    Eigen::MatrixXd B = R.transpose() * DR;

    Eigen::MatrixXd G1 = 4.0 * (DR * B - DR * B.diagonal().asDiagonal());
    Eigen::MatrixXd Bd = B;
    Bd.diagonal() -= prob.D;
    Eigen::MatrixXd G2 = 4.0 * (DR * Bd);

    Eigen::MatrixXd S = prob.Fbar * prob.Gbar.transpose() + prob.Gbar * prob.Fbar.transpose();
    Eigen::MatrixXd G3 = 2.0 * (prob.Fbar * (prob.Fbar.transpose() * R) +
                                prob.Gbar * (prob.Gbar.transpose() * R)) -
                         2.0 * (S * R) * C;

    return G1 + G2 + prob.mu * G3;
}

Eigen::MatrixXd project_tangent(const Eigen::MatrixXd& R, const Eigen::MatrixXd& X) {
    return R * (R.transpose() * X - X.transpose() * R) * 0.5;
}

Eigen::MatrixXd riemannian_gradient(const CorrectionProblem& prob, const Eigen::MatrixXd& R) {
    return project_tangent(R, euclidean_gradient(prob, R));
}

Eigen::MatrixXd qr_retract(const Eigen::MatrixXd& R, const Eigen::MatrixXd& step) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(R + step);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(R.rows(), R.cols());
    Eigen::VectorXd diag = qr.matrixQR().diagonal();
    for (int i = 0; i < Q.cols(); ++i)
        if (diag[i] < 0.0) Q.col(i) = -Q.col(i);
    return Q;
}

RotationCorrection optimize(const CorrectionProblem& prob, const Eigen::MatrixXd& R0,
                            const OptimizeOptions& opts) {
    const int k = static_cast<int>(R0.rows());
    if ((R0.transpose() * R0 - Eigen::MatrixXd::Identity(k, k)).norm() > 1e-8)
        throw ValidationError("correction start point is not orthogonal");

    RotationCorrection out;
    out.R = R0;

    const double radius_max = 2.0 * std::sqrt(static_cast<double>(k));
    double radius = 0.25 * radius_max;

    double current_cost = cost(prob, out.R);
    Eigen::MatrixXd grad = riemannian_gradient(prob, out.R);
    double gnorm = grad.norm();
    out.trace.emplace_back(current_cost, gnorm);

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        if (gnorm <= opts.tol_grad) {
            out.converged = true;
            break;
        }
        if (radius < 1e-14) break;

        Eigen::MatrixXd step = steihaug(prob, out.R, grad, radius, opts);
        if (step.norm() == 0.0) break;

        Eigen::MatrixXd candidate = qr_retract(out.R, step);
        double candidate_cost = cost(prob, candidate);
        double actual = current_cost - candidate_cost;
        double predicted =
            -frob_dot(grad, step) - 0.5 * frob_dot(step, hessian_apply(prob, out.R, step, opts));
        double rho = predicted > 0.0 ? actual / predicted : (actual > 0.0 ? 1.0 : -1.0);

        if (rho < 0.25)
            radius *= 0.25;
        else if (rho > 0.75 && step.norm() >= 0.99 * radius)
            radius = std::min(2.0 * radius, radius_max);

        if (rho > 0.1 && actual > 0.0) {
            out.R = candidate;
            current_cost = candidate_cost;
            grad = riemannian_gradient(prob, out.R);
            gnorm = grad.norm();
            out.iterations = iter + 1;
            out.trace.emplace_back(current_cost, gnorm);
        }
    }
    if (gnorm <= opts.tol_grad) out.converged = true;

    out.final_cost = current_cost;
    return out;
}

} // namespace symmetria
