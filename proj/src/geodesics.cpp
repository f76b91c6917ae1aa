#include "symmetria/geodesics.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <string>

#include "symmetria/errors.hpp"

namespace symmetria {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Dijkstra from src, stopping once every vertex in `stop` is settled.
// Ties in distance keep the smaller predecessor index.
void dijkstra(const TriangleMesh& mesh, const AdjacencyIndex& adj, int src,
              const std::vector<int>& stop, std::vector<double>& dist,
              std::vector<int>& pred) {
    const int n = mesh.n();
    if (src < 0 || src >= n) throw IndexError("path endpoint out of range");
    for (int t : stop)
        if (t < 0 || t >= n) throw IndexError("path endpoint out of range");

    dist.assign(n, kInf);
    pred.assign(n, -1);
    std::vector<bool> settled(n, false);
    std::vector<bool> wanted(n, false);
    int remaining = 0;
    for (int t : stop) {
        if (!wanted[t]) ++remaining;
        wanted[t] = true;
    }

    using Entry = std::pair<double, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue;
    dist[src] = 0.0;
    queue.emplace(0.0, src);

    const auto& V = mesh.vertices();
    while (!queue.empty()) {
        auto [d, u] = queue.top();
        queue.pop();
        if (settled[u]) continue;
        settled[u] = true;
        if (wanted[u] && --remaining == 0) return;
        for (int v : adj.one_ring(u)) {
            if (settled[v]) continue;
            double nd = d + (V[u] - V[v]).norm();
            if (nd < dist[v]) {
                dist[v] = nd;
                pred[v] = u;
                queue.emplace(nd, v);
            } else if (nd == dist[v] && u < pred[v]) {
                pred[v] = u;
            }
        }
    }
}

} // namespace

GeodesicPath shortest_path(const TriangleMesh& mesh, const AdjacencyIndex& adj,
                           int src, int dst) {
    if (src == dst) throw IndexError("path endpoints must be distinct");
    std::vector<double> dist;
    std::vector<int> pred;
    dijkstra(mesh, adj, src, {dst}, dist, pred);
    if (dist[dst] == kInf)
        throw UnreachableError("no path from vertex " + std::to_string(src) + " to " +
                               std::to_string(dst));

    GeodesicPath path;
    path.length = dist[dst];
    for (int v = dst; v != -1; v = pred[v]) path.vertex_seq.push_back(v);
    std::reverse(path.vertex_seq.begin(), path.vertex_seq.end());
    return path;
}

std::vector<double> geodesic_distances(const TriangleMesh& mesh, const AdjacencyIndex& adj,
                                       int src, const std::vector<int>& targets) {
    std::vector<double> dist;
    std::vector<int> pred;
    dijkstra(mesh, adj, src, targets, dist, pred);
    std::vector<double> out(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        out[i] = dist[targets[i]];
        if (out[i] == kInf)
            throw UnreachableError("no path from vertex " + std::to_string(src) + " to " +
                                   std::to_string(targets[i]));
    }
    return out;
}

Eigen::VectorXd restrict_to_path(const SpectralBasis& basis, const GeodesicPath& path, int i) {
    if (i < 0 || i >= basis.k)
        throw IndexError("eigenfunction index " + std::to_string(i) + " out of range");
    Eigen::VectorXd p(path.vertex_seq.size());
    for (std::size_t m = 0; m < path.vertex_seq.size(); ++m)
        p[m] = basis.Phi(path.vertex_seq[m], i);
    return p;
}

} // namespace symmetria
