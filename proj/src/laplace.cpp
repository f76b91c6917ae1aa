#include "symmetria/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "symmetria/errors.hpp"

namespace symmetria {

namespace {

// cot of the angle at c in triangle (a, b, c).
double corner_cotangent(const Vec3& a, const Vec3& b, const Vec3& c) {
    Vec3 u = a - c, v = b - c;
    double cross = u.cross(v).norm();
    double dot = u.dot(v);
    double cot = dot / cross;
    if (!std::isfinite(cot))
        throw NumericalError("non-finite cotangent at a zero-area corner");
    return cot;
}

void normalize_column_signs(Eigen::MatrixXd& Phi) {
    for (Eigen::Index c = 0; c < Phi.cols(); ++c) {
        Eigen::Index imax = 0;
        double best = -1.0;
        for (Eigen::Index r = 0; r < Phi.rows(); ++r) {
            double mag = std::abs(Phi(r, c));
            if (mag > best) {
                best = mag;
                imax = r;
            }
        }
        if (Phi(imax, c) < 0.0) Phi.col(c) = -Phi.col(c);
    }
}

// Deterministic start vector (splitmix64 stream).
Eigen::VectorXd seeded_vector(int n, std::uint64_t seed) {
    Eigen::VectorXd v(n);
    std::uint64_t state = seed;
    for (int i = 0; i < n; ++i) {
        state += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z ^= z >> 31;
        v[i] = static_cast<double>(z >> 11) / 9007199254740992.0 - 0.5;
    }
    return v;
}

SpectralBasis dense_eigendecompose(const LaplaceOperator& op, int k) {
    Eigen::MatrixXd W = Eigen::MatrixXd(op.M) * -1.0;
    Eigen::MatrixXd B = op.A.asDiagonal();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(W, B);
    if (es.info() != Eigen::Success)
        throw ConvergenceError("dense generalized eigensolver failed");

    SpectralBasis basis;
    basis.k = k;
    basis.eigenvalues.resize(k);
    basis.Phi = es.eigenvectors().leftCols(k);
    for (int i = 0; i < k; ++i)
        basis.eigenvalues[i] = std::max(es.eigenvalues()[i], 0.0);
    // Columns are already B-orthonormal; renormalize to tighten roundoff.
    for (int i = 0; i < k; ++i) {
        double nrm = std::sqrt(basis.Phi.col(i).dot(op.A.cwiseProduct(basis.Phi.col(i))));
        basis.Phi.col(i) /= nrm;
    }
    normalize_column_signs(basis.Phi);
    return basis;
}

// Shift-invert Lanczos in the A-inner product for W x = lambda A x.
// Operator P^{-1} A with P = W + delta I has Ritz values theta = 1/lambda,
// so the smallest eigenvalues converge first.
SpectralBasis lanczos_eigendecompose(const LaplaceOperator& op, int k, const EigOptions& opts) {
    const int n = op.n;
    Eigen::SparseMatrix<double> W = -op.M;
    const Eigen::VectorXd& A = op.A;

    // Mass-scaled shift: P = W + delta A is SPD and (W + delta A) x = (lambda +
    // delta) A x, so theta = 1/(lambda + delta) still orders small lambda first.
    // delta sits near the first nonzero eigenvalue (Weyl estimate: the trace of
    // A^{-1} W is the eigenvalue sum, about n/2 times the spectral gap), which
    // keeps the factorization far from singular; a vanishing shift would let
    // solve noise along the constant nullspace cap the attainable residual.
    double eig_sum = 0.0;
    for (int i = 0; i < n; ++i) eig_sum += W.coeff(i, i) / A[i];
    double delta = eig_sum / (static_cast<double>(n) * static_cast<double>(n));
    Eigen::SparseMatrix<double> P = W;
    for (int i = 0; i < n; ++i) P.coeffRef(i, i) += delta * A[i];
    P.makeCompressed();

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(P);
    if (solver.info() != Eigen::Success)
        throw ConvergenceError("LDLT factorization of the stiffness matrix failed");

    auto adot = [&A](const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
        return (u.array() * A.array() * v.array()).sum();
    };

    const int m_max = std::min(n - 1, opts.max_subspace);
    std::vector<Eigen::VectorXd> Q;
    std::vector<double> alpha, beta;
    Q.reserve(m_max + 1);

    Eigen::VectorXd q0 = seeded_vector(n, 0x5eed5eedULL);
    Q.push_back(q0 / std::sqrt(adot(q0, q0)));

    auto extend = [&](int target) {
        while (static_cast<int>(alpha.size()) < target) {
            int j = static_cast<int>(alpha.size());
            Eigen::VectorXd v = solver.solve(A.cwiseProduct(Q[j]));
            if (j > 0) v -= beta[j - 1] * Q[j - 1];
            double a = adot(v, Q[j]);
            v -= a * Q[j];
            alpha.push_back(a);
            // Two passes of full reorthogonalization.
            for (int pass = 0; pass < 2; ++pass)
                for (int i = 0; i <= j; ++i) v -= adot(v, Q[i]) * Q[i];
            double b = std::sqrt(adot(v, v));
            if (b < 1e-13) {
                // Invariant subspace hit; continue with a fresh direction.
                v = seeded_vector(n, 0x9c0ffee0 + j);
                for (int pass = 0; pass < 2; ++pass)
                    for (int i = 0; i <= j; ++i) v -= adot(v, Q[i]) * Q[i];
                b = 0.0;
                double nrm = std::sqrt(adot(v, v));
                if (nrm < 1e-300) throw ConvergenceError("Lanczos basis exhausted");
                v /= nrm;
                beta.push_back(b);
                Q.push_back(v);
                continue;
            }
            beta.push_back(b);
            Q.push_back(v / b);
        }
    };

    int m = std::min(m_max, std::max(2 * k + 20, 60));
    while (true) {
        extend(m);

        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tes(T);
        if (tes.info() != Eigen::Success)
            throw ConvergenceError("tridiagonal eigensolver failed");

        // Largest theta correspond to the smallest lambda.
        std::vector<std::pair<double, Eigen::VectorXd>> pairs(k);
        bool converged = true;
        for (int i = 0; i < k; ++i) {
            Eigen::VectorXd y = tes.eigenvectors().col(m - 1 - i);
            Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
            for (int j = 0; j < m; ++j) x += y[j] * Q[j];
            x /= std::sqrt(adot(x, x));
            double lambda = std::max(x.dot(W * x), 0.0);
            Eigen::VectorXd resid = W * x - lambda * A.cwiseProduct(x);
            double rel = resid.norm() / (A.cwiseProduct(x)).norm();
            if (rel > opts.residual_tol) converged = false;
            pairs[i] = {lambda, std::move(x)};
        }

        if (converged) {
            std::sort(pairs.begin(), pairs.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            SpectralBasis basis;
            basis.k = k;
            basis.eigenvalues.resize(k);
            basis.Phi.resize(n, k);
            for (int i = 0; i < k; ++i) {
                basis.eigenvalues[i] = pairs[i].first;
                basis.Phi.col(i) = pairs[i].second;
            }
            normalize_column_signs(basis.Phi);
            return basis;
        }

        if (m >= m_max)
            throw ConvergenceError("Lanczos did not converge within subspace limit " +
                                   std::to_string(m_max));
        m = std::min(m_max, m + 40);
    }
}

} // namespace

LaplaceOperator assemble_operator(const TriangleMesh& mesh) {
    const int n = mesh.n();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(mesh.faces().size() * 12);

    const auto& V = mesh.vertices();
    for (const Face& f : mesh.faces()) {
        for (int corner = 0; corner < 3; ++corner) {
            int c = f[corner];
            int a = f[(corner + 1) % 3];
            int b = f[(corner + 2) % 3];
            double w = 0.5 * corner_cotangent(V[a], V[b], V[c]);
            // Edge (a, b) opposite corner c.
            trips.emplace_back(a, b, w);
            trips.emplace_back(b, a, w);
            trips.emplace_back(a, a, -w);
            trips.emplace_back(b, b, -w);
        }
    }

    LaplaceOperator op;
    op.n = n;
    op.M.resize(n, n);
    op.M.setFromTriplets(trips.begin(), trips.end());
    op.M.makeCompressed();

    std::vector<double> areas = vertex_areas(mesh);
    op.A = Eigen::Map<Eigen::VectorXd>(areas.data(), n);
    return op;
}

SpectralBasis eigendecompose(const LaplaceOperator& op, int k, const EigOptions& opts) {
    if (k < 1 || k >= op.n)
        throw DimensionError("eigenpair count k=" + std::to_string(k) +
                             " must satisfy 1 <= k < n=" + std::to_string(op.n));
    if (op.n <= opts.dense_threshold) return dense_eigendecompose(op, k);
    return lanczos_eigendecompose(op, k, opts);
}

std::vector<bool> eigen_gap_flags(const SpectralBasis& basis, double tau_gap) {
    const int k = basis.k;
    std::vector<bool> flags(k, false);
    if (k < 2) return flags;

    std::vector<double> sorted(basis.eigenvalues);
    std::sort(sorted.begin(), sorted.end());
    const double lambda_second = sorted[1];

    for (int i = 0; i < k; ++i) {
        double min_gap = std::numeric_limits<double>::infinity();
        for (int j = 0; j < k; ++j)
            if (j != i) min_gap = std::min(min_gap, std::abs(basis.eigenvalues[i] - basis.eigenvalues[j]));
        double denom = std::max(basis.eigenvalues[i], lambda_second);
        if (denom <= 0.0)
            flags[i] = true;
        else
            flags[i] = min_gap / denom < tau_gap;
    }
    return flags;
}

void dump_basis(const std::string& path, const SpectralBasis& basis) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open basis dump file: " + path);
    const Eigen::Index n = basis.Phi.rows();
    out.precision(17);
    out << n << " " << basis.k << "\n";
    for (int i = 0; i < basis.k; ++i) out << (i ? " " : "") << basis.eigenvalues[i];
    out << "\n";
    for (Eigen::Index r = 0; r < n; ++r) {
        for (int c = 0; c < basis.k; ++c) out << (c ? " " : "") << basis.Phi(r, c);
        out << "\n";
    }
}

} // namespace symmetria
