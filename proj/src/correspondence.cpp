#include "symmetria/correspondence.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "symmetria/errors.hpp"
#include "symmetria/geodesics.hpp"
#include "symmetria/parallel.hpp"

namespace symmetria {

namespace {

// kd-tree over matrix columns; exact nearest neighbor with ties resolved to
// the lowest column index.
class ColumnKdTree {
public:
    explicit ColumnKdTree(const Eigen::MatrixXd& pts) : pts_(pts) {
        order_.resize(pts.cols());
        std::iota(order_.begin(), order_.end(), 0);
        if (!order_.empty()) root_ = build(0, static_cast<int>(order_.size()));
    }

    std::pair<int, double> nearest(const Eigen::VectorXd& q) const {
        Best best;
        search(root_, q, best);
        return {best.idx, std::sqrt(best.d2)};
    }

private:
    struct Node {
        int axis = -1;       // -1 marks a leaf
        double split = 0.0;
        int left = -1, right = -1;
        int begin = 0, end = 0; // leaf range into order_
    };

    static constexpr int kLeafSize = 16;

    int build(int lo, int hi) {
        Node node;
        if (hi - lo <= kLeafSize) {
            node.axis = -1;
            node.begin = lo;
            node.end = hi;
            nodes_.push_back(node);
            return static_cast<int>(nodes_.size()) - 1;
        }

        // Split along the axis of largest spread.
        int dims = static_cast<int>(pts_.rows());
        int axis = 0;
        double best_spread = -1.0;
        for (int d = 0; d < dims; ++d) {
            double lomin = std::numeric_limits<double>::infinity(), lomax = -lomin;
            for (int i = lo; i < hi; ++i) {
                double v = pts_(d, order_[i]);
                lomin = std::min(lomin, v);
                lomax = std::max(lomax, v);
            }
            if (lomax - lomin > best_spread) {
                best_spread = lomax - lomin;
                axis = d;
            }
        }

        int mid = lo + (hi - lo) / 2;
        std::nth_element(order_.begin() + lo, order_.begin() + mid, order_.begin() + hi,
                         [this, axis](int a, int b) {
                             double va = pts_(axis, a), vb = pts_(axis, b);
                             if (va != vb) return va < vb;
                             return a < b;
                         });

        node.axis = axis;
        node.split = pts_(axis, order_[mid]);
        nodes_.push_back(node);
        int self = static_cast<int>(nodes_.size()) - 1;
        int left = build(lo, mid);
        int right = build(mid, hi);
        nodes_[self].left = left;
        nodes_[self].right = right;
        return self;
    }

    struct Best {
        int idx = -1;
        double d2 = std::numeric_limits<double>::infinity();
    };

    void consider(int idx, const Eigen::VectorXd& q, Best& best) const {
        double d2 = (pts_.col(idx) - q).squaredNorm();
        if (d2 < best.d2 || (d2 == best.d2 && idx < best.idx)) {
            best.d2 = d2;
            best.idx = idx;
        }
    }

    void search(int ni, const Eigen::VectorXd& q, Best& best) const {
        const Node& node = nodes_[ni];
        if (node.axis < 0) {
            for (int i = node.begin; i < node.end; ++i) consider(order_[i], q, best);
            return;
        }
        double delta = q[node.axis] - node.split;
        int near = delta < 0.0 ? node.left : node.right;
        int far = delta < 0.0 ? node.right : node.left;
        search(near, q, best);
        if (delta * delta <= best.d2) search(far, q, best);
    }

    const Eigen::MatrixXd& pts_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

} // namespace

Embedding embed(const SpectralBasis& basis, const FunctionalMap& map, const Eigen::MatrixXd* R) {
    const int kp = static_cast<int>(map.active.size());
    if (kp < 3)
        throw DegenerateMapError("embedding needs at least 3 active eigenfunctions, have " +
                                 std::to_string(kp));

    const Eigen::Index n = basis.Phi.rows();
    Eigen::MatrixXd Phi_active(n, kp);
    for (int i = 0; i < kp; ++i) Phi_active.col(i) = basis.Phi.col(map.active[i]);

    Embedding out;
    if (R) {
        if (R->rows() != kp || R->cols() != kp)
            throw DimensionError("rotation size does not match the active eigenfunction count");
        out.source = (Phi_active * (*R)).transpose();
    } else {
        out.source = Phi_active.transpose();
    }
    out.target = out.source;
    for (int i = 0; i < kp; ++i)
        out.target.row(i) *= static_cast<double>(map.sign[map.active[i]]);
    return out;
}

SymmetryMap nearest_neighbor_map(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target) {
    if (source.rows() != target.rows() || source.cols() != target.cols())
        throw DimensionError("embedding matrices must have matching shapes");
    const int n = static_cast<int>(source.cols());

    ColumnKdTree tree(target);
    SymmetryMap map;
    map.sigma.resize(n);
    map.nn_distance.resize(n);
    parallel_for(n, [&](int j) {
        auto [idx, dist] = tree.nearest(source.col(j));
        map.sigma[j] = idx;
        map.nn_distance[j] = dist;
    });
    return map;
}

std::vector<double> involution_diagnostics(const TriangleMesh& mesh, const AdjacencyIndex& adj,
                                           const std::vector<int>& sigma) {
    const int n = mesh.n();
    if (static_cast<int>(sigma.size()) != n)
        throw DimensionError("correspondence length does not match vertex count");

    std::vector<double> err(n, 0.0);
    std::map<int, std::vector<int>> by_source; // round-trip vertex -> original vertices
    for (int j = 0; j < n; ++j) {
        int s = sigma[j];
        if (s < 0 || s >= n) throw IndexError("correspondence index out of range");
        int round_trip = sigma[s];
        if (round_trip != j) by_source[round_trip].push_back(j);
    }
    for (const auto& [src, targets] : by_source) {
        std::vector<double> dists = geodesic_distances(mesh, adj, src, targets);
        for (std::size_t i = 0; i < targets.size(); ++i) err[targets[i]] = dists[i];
    }
    return err;
}

} // namespace symmetria
