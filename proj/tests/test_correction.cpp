#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "symmetria/correction.hpp"
#include "oracles.hpp"

using namespace symmetria;

namespace {

std::mt19937_64& rng() {
    static std::mt19937_64 gen(0xfeedface);
    return gen;
}

Eigen::MatrixXd random_matrix(int rows, int cols, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = normal(rng());
    return m;
}

Eigen::MatrixXd random_rotation(int k) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(k, k));
    Eigen::MatrixXd q = qr.householderQ();
    if (q.determinant() < 0) q.col(0) *= -1.0;
    return q;
}

Eigen::MatrixXd random_skew(int k) {
    Eigen::MatrixXd a = random_matrix(k, k);
    return 0.5 * (a - a.transpose());
}

CorrectionProblem random_problem(int kp, int c, double noise, double mu = 1.0) {
    CorrectionProblem prob;
    prob.mu = mu;
    prob.D.resize(kp);
    prob.C.resize(kp);
    for (int i = 0; i < kp; ++i) {
        prob.D[i] = 0.5 + i;
        prob.C[i] = i % 2 ? -1.0 : 1.0;
    }
    prob.Gbar = random_matrix(kp, 2 * c);
    prob.Fbar = prob.C.asDiagonal() * prob.Gbar + random_matrix(kp, 2 * c, noise);
    return prob;
}

double constraint_residual(const CorrectionProblem& prob, const Eigen::MatrixXd& R) {
    return (R.transpose() * prob.Fbar -
            prob.C.asDiagonal() * (R.transpose() * prob.Gbar))
        .norm();
}

} // namespace

TEST_CASE("cost: exact problems vanish at the identity") {
    CorrectionProblem prob = random_problem(4, 3, 0.0);
    CHECK(cost(prob, Eigen::MatrixXd::Identity(4, 4)) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("cost at the identity reduces to the coupling term") {
    CorrectionProblem prob = random_problem(5, 2, 0.3, 2.5);
    double expect =
        2.5 * (prob.Fbar - prob.C.asDiagonal() * prob.Gbar).squaredNorm();
    CHECK(cost(prob, Eigen::MatrixXd::Identity(5, 5)) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("cost matches the plain-loop oracle at random rotations") {
    for (int trial = 0; trial < 10; ++trial) {
        CorrectionProblem prob = random_problem(4, 2, 0.5, 0.7 + 0.2 * trial);
        Eigen::MatrixXd R = random_rotation(4);
        double fast = cost(prob, R);
        double slow = testsupport::naive_correction_cost(prob, R);
        CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
        CHECK(fast >= 0.0);
    }
}

TEST_CASE("problem assembly: active rows, parities, swapped indicator columns") {
    SpectralBasis basis;
    basis.k = 4;
    basis.eigenvalues = {0.0, 1.5, 2.0, 7.0};
    basis.Phi = random_matrix(9, 4);

    FunctionalMap map;
    map.sign = {1, -1, 0, 1};
    map.active = {0, 1, 3};
    map.confidence = {1.0, 1.0, 0.0, 1.0};

    std::vector<std::pair<int, int>> pairs = {{2, 5}, {7, 3}};
    CorrectionProblem prob = build_correction_problem(basis, map, pairs, 4.0);

    REQUIRE(prob.D.size() == 3);
    CHECK(prob.D[0] == doctest::Approx(0.0));
    CHECK(prob.D[1] == doctest::Approx(1.5));
    CHECK(prob.D[2] == doctest::Approx(7.0));
    CHECK(prob.C[0] == doctest::Approx(1.0));
    CHECK(prob.C[1] == doctest::Approx(-1.0));
    CHECK(prob.C[2] == doctest::Approx(1.0));
    CHECK(prob.mu == doctest::Approx(4.0));

    REQUIRE(prob.Fbar.rows() == 3);
    REQUIRE(prob.Fbar.cols() == 4);
    // Column order: first elements of each pair, then the second elements;
    // Gbar swaps the roles.
    std::vector<int> forder = {2, 7, 5, 3};
    std::vector<int> gorder = {5, 3, 2, 7};
    std::vector<int> active = {0, 1, 3};
    for (int col = 0; col < 4; ++col)
        for (int row = 0; row < 3; ++row) {
            CHECK(prob.Fbar(row, col) == doctest::Approx(basis.Phi(forder[col], active[row])));
            CHECK(prob.Gbar(row, col) == doctest::Approx(basis.Phi(gorder[col], active[row])));
        }

    FunctionalMap empty;
    empty.sign = {0, 0, 0, 0};
    CHECK_THROWS_AS(build_correction_problem(basis, empty, pairs), DegenerateMapError);
    CHECK_THROWS_AS(build_correction_problem(basis, map, {}), DimensionError);
}

TEST_CASE("gradient: degenerate data gives a zero field") {
    CorrectionProblem prob;
    prob.D = Eigen::VectorXd::Zero(3);
    prob.C = Eigen::VectorXd::Ones(3);
    prob.Fbar = Eigen::MatrixXd::Zero(3, 4);
    prob.Gbar = Eigen::MatrixXd::Zero(3, 4);
    prob.mu = 1.0;
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::MatrixXd R = random_rotation(3);
        CHECK(euclidean_gradient(prob, R).cwiseAbs().maxCoeff() <= 1e-15);
    }
}

TEST_CASE("gradient: spectral terms are stationary at the identity") {
    // With mu = 0 only the two spectral terms remain, and R = I is a global
    // minimum of both, so the full euclidean gradient must vanish there.
    CorrectionProblem prob = random_problem(5, 2, 0.4, 0.0);
    Eigen::MatrixXd g = euclidean_gradient(prob, Eigen::MatrixXd::Identity(5, 5));
    CHECK(g.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("gradient matches central finite differences") {
    for (int kp : {3, 5}) {
        for (int trial = 0; trial < 6; ++trial) {
            CorrectionProblem prob = random_problem(kp, 2, 0.5, 0.5 + 0.5 * trial);
            Eigen::MatrixXd R = random_rotation(kp);
            Eigen::MatrixXd g = euclidean_gradient(prob, R);
            Eigen::MatrixXd fd = testsupport::fd_cost_gradient(prob, R, 1e-6);
            double rel = (g - fd).norm() / std::max(1.0, fd.norm());
            CHECK(rel < 1e-5);
        }
    }
}

TEST_CASE("tangent projection: fixed points, kernel, skewness") {
    const int k = 4;
    Eigen::MatrixXd R = random_rotation(k);

    CHECK(project_tangent(R, R).cwiseAbs().maxCoeff() <= 1e-14);

    Eigen::MatrixXd omega = random_skew(k);
    Eigen::MatrixXd tangent = R * omega;
    CHECK((project_tangent(R, tangent) - tangent).cwiseAbs().maxCoeff() <= 1e-13);

    for (int trial = 0; trial < 5; ++trial) {
        Eigen::MatrixXd x = random_matrix(k, k);
        Eigen::MatrixXd g = project_tangent(R, x);
        Eigen::MatrixXd skew_check = R.transpose() * g + g.transpose() * R;
        CHECK(skew_check.cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("riemannian gradient is tangent and drives a first-order model") {
    CorrectionProblem prob = random_problem(4, 3, 0.5);
    Eigen::MatrixXd R = random_rotation(4);

    Eigen::MatrixXd g = riemannian_gradient(prob, R);
    CHECK((R.transpose() * g + g.transpose() * R).cwiseAbs().maxCoeff() <= 1e-10);

    // Directional derivative along a retracted tangent direction converges at
    // first order to <grad, R Omega>.
    Eigen::MatrixXd omega = random_skew(4);
    Eigen::MatrixXd dir = R * omega;
    double inner = (g.array() * dir.array()).sum();
    double base = cost(prob, R);

    auto fd_error = [&](double eps) {
        double forward = cost(prob, qr_retract(R, eps * dir));
        return std::abs((forward - base) / eps - inner);
    };
    double e4 = fd_error(1e-4);
    double e5 = fd_error(1e-5);
    double e6 = fd_error(1e-6);
    CHECK(e5 <= 0.5 * e4 + 1e-12);
    CHECK(e6 <= 0.5 * e5 + 1e-10);
}

TEST_CASE("qr retraction stays on the rotation manifold") {
    const int k = 5;
    Eigen::MatrixXd R = random_rotation(k);
    CHECK((qr_retract(R, Eigen::MatrixXd::Zero(k, k)) - R).cwiseAbs().maxCoeff() <= 1e-12);

    for (double scale : {1e-3, 0.1, 1.0}) {
        Eigen::MatrixXd step = R * (scale * random_skew(k));
        Eigen::MatrixXd next = qr_retract(R, step);
        CHECK((next.transpose() * next - Eigen::MatrixXd::Identity(k, k)).norm() <= 1e-10);
        CHECK(next.determinant() > 0.0);
    }
}

TEST_CASE("optimize: exact problem converges at the identity immediately") {
    CorrectionProblem prob = random_problem(4, 3, 0.0);
    RotationCorrection rc = optimize(prob, Eigen::MatrixXd::Identity(4, 4));
    CHECK(rc.converged);
    CHECK((rc.R - Eigen::MatrixXd::Identity(4, 4)).norm() <= 1e-6);
    CHECK(rc.final_cost <= 1e-12);
}

TEST_CASE("optimize: monotone cost, manifold iterates, shrinking residual") {
    CorrectionProblem prob = random_problem(4, 3, 0.15);
    Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(4, 4);
    RotationCorrection rc = optimize(prob, eye);

    CHECK(rc.final_cost <= cost(prob, eye) + 1e-12);
    REQUIRE(!rc.trace.empty());
    for (size_t i = 1; i < rc.trace.size(); ++i)
        CHECK(rc.trace[i].first <= rc.trace[i - 1].first + 1e-12);
    CHECK(rc.final_cost == doctest::Approx(rc.trace.back().first).epsilon(1e-12));

    CHECK((rc.R.transpose() * rc.R - eye).norm() <= 1e-8);
    CHECK(rc.R.determinant() > 0.0);

    // The coupling residual itself must improve on the uncorrected map.
    CHECK(constraint_residual(prob, rc.R) < constraint_residual(prob, eye));
}

TEST_CASE("optimize: analytic and differenced hessians reach the same optimum") {
    CorrectionProblem prob = random_problem(5, 3, 0.2);
    Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(5, 5);

    OptimizeOptions fd;
    fd.analytic_hessian = false;
    OptimizeOptions an;
    an.analytic_hessian = true;

    RotationCorrection a = optimize(prob, eye, fd);
    RotationCorrection b = optimize(prob, eye, an);
    CHECK(a.converged);
    CHECK(b.converged);
    CHECK(a.final_cost == doctest::Approx(b.final_cost).epsilon(1e-6));
}

TEST_CASE("optimize: iteration cap reports non-convergence but returns a result") {
    CorrectionProblem prob = random_problem(5, 3, 0.4);
    OptimizeOptions opts;
    opts.max_iter = 1;
    RotationCorrection rc = optimize(prob, Eigen::MatrixXd::Identity(5, 5), opts);
    CHECK_FALSE(rc.converged);
    CHECK(rc.iterations <= 1);
    CHECK(rc.R.allFinite());
    CHECK((rc.R.transpose() * rc.R - Eigen::MatrixXd::Identity(5, 5)).norm() <= 1e-8);
}
