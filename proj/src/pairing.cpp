#include "symmetria/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "symmetria/errors.hpp"

namespace symmetria {

namespace {

struct Search {
    const Eigen::MatrixXd& W;
    int d;
    int c;
    bool prune;

    std::vector<bool> decided;
    std::vector<std::pair<int, int>> current;
    double current_cost = 0.0;

    double best_cost = std::numeric_limits<double>::infinity();
    std::vector<std::pair<int, int>> best;

    Search(const Eigen::MatrixXd& W_, int c_, bool prune_)
        : W(W_), d(static_cast<int>(W_.rows())), c(c_), prune(prune_), decided(d, false) {}

    double pair_cost(int a, int b) const { return W(a, b) + W(b, a); }

    // Sum of the cheapest (c - made) pair costs among undecided vertices;
    // a valid lower bound since disjointness only removes options.
    double lower_bound() const {
        int need = c - static_cast<int>(current.size());
        if (need == 0) return 0.0;
        std::vector<double> costs;
        for (int a = 0; a < d; ++a) {
            if (decided[a]) continue;
            for (int b = a + 1; b < d; ++b)
                if (!decided[b]) costs.push_back(pair_cost(a, b));
        }
        if (static_cast<int>(costs.size()) < need)
            return std::numeric_limits<double>::infinity();
        std::nth_element(costs.begin(), costs.begin() + need - 1, costs.end());
        double s = 0.0;
        for (int i = 0; i < need; ++i) s += costs[i];
        return s;
    }

    void offer_current() {
        std::vector<std::pair<int, int>> sorted = current;
        std::sort(sorted.begin(), sorted.end());
        if (current_cost < best_cost ||
            (current_cost == best_cost &&
             std::lexicographical_compare(sorted.begin(), sorted.end(), best.begin(), best.end()))) {
            best_cost = current_cost;
            best = std::move(sorted);
        }
    }

    void recurse(int undecided_left) {
        if (static_cast<int>(current.size()) == c) {
            offer_current();
            return;
        }
        if (prune && current_cost + lower_bound() > best_cost) return;

        int v = 0;
        while (v < d && decided[v]) ++v;
        if (v == d) return;

        int need = 2 * (c - static_cast<int>(current.size()));
        decided[v] = true;

        for (int u = v + 1; u < d; ++u) {
            if (decided[u]) continue;
            decided[u] = true;
            current.emplace_back(v, u);
            current_cost += pair_cost(v, u);
            recurse(undecided_left - 2);
            current_cost -= pair_cost(v, u);
            current.pop_back();
            decided[u] = false;
        }

        // Leave v unmatched when enough vertices remain for the rest.
        if (undecided_left - 1 >= need) recurse(undecided_left - 1);

        decided[v] = false;
    }

    PairSet run() {
        // Greedy matching seeds the upper bound.
        if (prune) {
            std::vector<std::tuple<double, int, int>> all;
            for (int a = 0; a < d; ++a)
                for (int b = a + 1; b < d; ++b) all.emplace_back(pair_cost(a, b), a, b);
            std::sort(all.begin(), all.end());
            std::vector<bool> used(d, false);
            std::vector<std::pair<int, int>> greedy;
            double cost = 0.0;
            for (const auto& [w, a, b] : all) {
                if (static_cast<int>(greedy.size()) == c) break;
                if (used[a] || used[b]) continue;
                used[a] = used[b] = true;
                greedy.emplace_back(a, b);
                cost += w;
            }
            if (static_cast<int>(greedy.size()) == c) {
                std::sort(greedy.begin(), greedy.end());
                best = std::move(greedy);
                best_cost = cost;
            }
        }

        recurse(d);

        PairSet out;
        out.pairs = std::move(best);
        out.total_cost = best_cost;
        return out;
    }
};

PairSet matching(const AffinityMatrix& affinity, int c, bool prune) {
    int d = static_cast<int>(affinity.W.rows());
    if (c < 1) throw InfeasibleError("pair count c must be positive");
    if (2 * c > d)
        throw InfeasibleError("cannot form " + std::to_string(c) + " disjoint pairs from " +
                              std::to_string(d) + " features");
    Search search(affinity.W, c, prune);
    return search.run();
}

} // namespace

AffinityMatrix build_affinity(const FeatureSet& features, double q) {
    const int d = features.d();
    if (d < 2) throw DimensionError("need at least two features for an affinity matrix");
    AffinityMatrix out;
    out.q = q;
    out.W.resize(d, d);
    for (int a = 0; a < d; ++a) {
        out.W(a, a) = q;
        for (int b = a + 1; b < d; ++b) {
            double hks_dist = (features.H.col(a) - features.H.col(b)).norm();
            bool same_signs = (features.S.col(a) - features.S.col(b)).cwiseAbs().maxCoeff() == 0;
            double w = hks_dist + (same_signs ? q : 0.0);
            out.W(a, b) = out.W(b, a) = w;
        }
    }
    return out;
}

double max_descriptor_distance(const FeatureSet& features) {
    double max_dist = 0.0;
    for (int a = 0; a < features.d(); ++a)
        for (int b = a + 1; b < features.d(); ++b)
            max_dist = std::max(max_dist, (features.H.col(a) - features.H.col(b)).norm());
    return max_dist;
}

double default_penalty(const FeatureSet& features) {
    double max_dist = max_descriptor_distance(features);
    return max_dist > 0.0 ? 1000.0 * max_dist : 1.0;
}

PairSet solve_assignment(const AffinityMatrix& affinity, int c) {
    return matching(affinity, c, true);
}

PairSet brute_force_assignment(const AffinityMatrix& affinity, int c) {
    if (affinity.W.rows() > 10)
        throw DimensionError("exhaustive matching is limited to d <= 10");
    return matching(affinity, c, false);
}

} // namespace symmetria
