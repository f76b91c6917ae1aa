#include "symmetria/signatures.hpp"

#include <algorithm>
#include <cmath>

#include "symmetria/errors.hpp"

namespace symmetria {

Eigen::VectorXd hks_energy(const SpectralBasis& basis, double t) {
    if (t <= 0.0) throw Error("diffusion time must be positive");
    Eigen::VectorXd weights(basis.k);
    for (int i = 0; i < basis.k; ++i) weights[i] = std::exp(-basis.eigenvalues[i] * t);
    return basis.Phi.array().square().matrix() * weights;
}

double reference_time(const SpectralBasis& basis) {
    if (basis.k < 2 || basis.eigenvalues[1] <= 1e-12)
        throw DegenerateSpectrumError("lambda_2 is numerically zero; no reference diffusion time");
    return 4.0 * std::log(10.0) / basis.eigenvalues[1];
}

std::vector<double> hks_time_samples(const SpectralBasis& basis, int h) {
    if (h < 1) throw Error("need at least one time sample");
    double lambda2 = basis.eigenvalues[1];
    double lambdak = basis.eigenvalues[basis.k - 1];
    if (basis.k < 2 || lambda2 <= 1e-12)
        throw DegenerateSpectrumError("lambda_2 is numerically zero; no diffusion time range");
    double t_min = 4.0 * std::log(10.0) / lambdak;
    double t_max = 4.0 * std::log(10.0) / lambda2;
    std::vector<double> times(h);
    if (h == 1) {
        times[0] = t_max;
        return times;
    }
    double lo = std::log(t_min), hi = std::log(t_max);
    for (int i = 0; i < h; ++i)
        times[i] = std::exp(lo + (hi - lo) * i / (h - 1));
    return times;
}

FeatureSet detect_features(const TriangleMesh& mesh, const AdjacencyIndex& adj,
                           const SpectralBasis& basis, int d_max, int h) {
    if (d_max < 2) throw Error("d_max must be at least 2");

    FeatureSet fs;
    fs.t_h = reference_time(basis);
    Eigen::VectorXd energy = hks_energy(basis, fs.t_h);

    std::vector<int> maxima;
    for (int v = 0; v < mesh.n(); ++v) {
        bool is_max = true;
        for (int u : adj.two_ring(v)) {
            if (energy[u] >= energy[v]) {
                is_max = false;
                break;
            }
        }
        if (is_max) maxima.push_back(v);
    }
    if (maxima.empty())
        throw NoFeaturesError("heat kernel energy has no strict local maximum");

    std::sort(maxima.begin(), maxima.end(), [&energy](int a, int b) {
        if (energy[a] != energy[b]) return energy[a] > energy[b];
        return a < b;
    });
    if (static_cast<int>(maxima.size()) > d_max) maxima.resize(d_max);
    std::sort(maxima.begin(), maxima.end());
    fs.indices = std::move(maxima);

    fs.time_samples = hks_time_samples(basis, h);
    const int d = fs.d();
    Eigen::MatrixXd weights(h, basis.k);
    for (int ti = 0; ti < h; ++ti)
        for (int i = 0; i < basis.k; ++i)
            weights(ti, i) = std::exp(-basis.eigenvalues[i] * fs.time_samples[ti]);
    Eigen::MatrixXd phi_sq(basis.k, d);
    for (int j = 0; j < d; ++j)
        phi_sq.col(j) = basis.Phi.row(fs.indices[j]).array().square().transpose();
    fs.H = weights * phi_sq;

    fs.S.resize(basis.k, d);
    for (int i = 0; i < basis.k; ++i)
        for (int j = 0; j < d; ++j)
            fs.S(i, j) = basis.Phi(fs.indices[j], i) < 0.0 ? -1 : 1;
    return fs;
}

double sign_agreement_over_edges(const TriangleMesh& mesh, const SpectralBasis& basis) {
    const auto& edges = mesh.edge_list();
    if (edges.empty()) return 1.0;
    double total = 0.0;
    for (const auto& e : edges) {
        int agree = 0;
        for (int i = 0; i < basis.k; ++i) {
            int sa = basis.Phi(e.first, i) < 0.0 ? -1 : 1;
            int sb = basis.Phi(e.second, i) < 0.0 ? -1 : 1;
            if (sa == sb) ++agree;
        }
        total += static_cast<double>(agree) / basis.k;
    }
    return total / edges.size();
}

} // namespace symmetria
