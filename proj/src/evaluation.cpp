#include "symmetria/evaluation.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "symmetria/errors.hpp"
#include "symmetria/geodesics.hpp"

namespace symmetria {

EvalReport correspondence_rate(const TriangleMesh& mesh, const AdjacencyIndex& adj,
                               const std::vector<int>& sigma,
                               const std::vector<std::pair<int, int>>& ground_truth) {
    if (ground_truth.empty()) throw EmptyGroundTruthError("ground-truth pair list is empty");
    const int n = mesh.n();
    if (static_cast<int>(sigma.size()) != n)
        throw DimensionError("correspondence length does not match vertex count");

    auto t0 = std::chrono::steady_clock::now();

    EvalReport report;
    report.threshold = std::sqrt(surface_area(mesh) / (20.0 * M_PI));
    report.per_pair_error.assign(ground_truth.size(), 0.0);

    // Group the geodesic queries by estimated vertex; exact hits need none.
    std::map<int, std::vector<std::pair<int, std::size_t>>> pending; // est -> (partner, slot)
    for (std::size_t i = 0; i < ground_truth.size(); ++i) {
        auto [j, partner] = ground_truth[i];
        if (j < 0 || j >= n || partner < 0 || partner >= n)
            throw IndexError("ground-truth vertex index out of range");
        int est = sigma[j];
        if (est != partner) pending[est].emplace_back(partner, i);
    }
    for (const auto& [est, queries] : pending) {
        std::vector<int> targets;
        targets.reserve(queries.size());
        for (const auto& [partner, slot] : queries) targets.push_back(partner);
        std::vector<double> dists = geodesic_distances(mesh, adj, est, targets);
        for (std::size_t q = 0; q < queries.size(); ++q)
            report.per_pair_error[queries[q].second] = dists[q];
    }

    int true_positives = 0;
    for (double err : report.per_pair_error)
        if (err < report.threshold) ++true_positives;
    report.corr_rate = static_cast<double>(true_positives) / ground_truth.size();

    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

double mesh_rate(const std::vector<EvalReport>& reports) {
    if (reports.empty()) throw Error("mesh rate needs at least one report");
    int above = 0;
    for (const EvalReport& r : reports)
        if (r.corr_rate > 0.75) ++above;
    return static_cast<double>(above) / reports.size();
}

std::vector<std::pair<int, int>> read_ground_truth(const std::string& path, bool one_based) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open ground-truth file: " + path);

    std::vector<std::pair<int, int>> pairs;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string body = line.substr(0, line.find('#'));
        std::istringstream ss(body);
        long j, partner;
        if (!(ss >> j)) continue; // blank or comment-only line
        if (!(ss >> partner))
            throw ParseError("ground-truth line " + std::to_string(line_no) +
                             ": expected two indices");
        std::string extra;
        if (ss >> extra)
            throw ParseError("ground-truth line " + std::to_string(line_no) +
                             ": trailing content '" + extra + "'");
        if (one_based) {
            --j;
            --partner;
        }
        if (j < 0 || partner < 0)
            throw ParseError("ground-truth line " + std::to_string(line_no) +
                             ": negative vertex index");
        pairs.emplace_back(static_cast<int>(j), static_cast<int>(partner));
    }
    return pairs;
}

} // namespace symmetria
