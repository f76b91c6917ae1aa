#include "symmetria/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "symmetria/errors.hpp"
#include "symmetria/geodesics.hpp"
#include "symmetria/parallel.hpp"

namespace symmetria {

namespace {

class StageClock {
public:
    explicit StageClock(std::vector<std::pair<std::string, double>>& sink) : sink_(sink) {}

    template <typename Fn>
    auto time(const std::string& stage, Fn&& fn) {
        auto t0 = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            sink_.emplace_back(stage, seconds_since(t0));
        } else {
            auto result = fn();
            sink_.emplace_back(stage, seconds_since(t0));
            return result;
        }
    }

private:
    static double seconds_since(std::chrono::steady_clock::time_point t0) {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    std::vector<std::pair<std::string, double>>& sink_;
};

} // namespace

void validate_config(const RunConfig& config) {
    if (config.k < 3) throw ValidationError("k must be at least 3");
    if (config.d_max < 2) throw ValidationError("d_max must be at least 2");
    if (config.c < 0) throw ValidationError("pair count must be nonnegative");
    if (config.q_multiplier <= 0.0) throw ValidationError("q multiplier must be positive");
    if (config.h < 2) throw ValidationError("descriptor needs at least 2 time samples");
    if (config.mu < 0.0) throw ValidationError("mu must be nonnegative");
    if (config.tau_gap <= 0.0) throw ValidationError("tau_gap must be positive");
    if (config.eps_sign <= 0.0) throw ValidationError("eps_sign must be positive");
    if (config.max_iter < 1) throw ValidationError("max_iter must be positive");
    if (config.tol_grad <= 0.0) throw ValidationError("tol_grad must be positive");
    if (config.min_active < 3) throw ValidationError("min_active must be at least 3");
    if (config.dense_threshold < 1) throw ValidationError("dense_threshold must be positive");
    if (config.residual_tol <= 0.0) throw ValidationError("residual_tol must be positive");
}

void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value) {
    auto as_int = [&](int& slot) { slot = std::stoi(value); };
    auto as_double = [&](double& slot) { slot = std::stod(value); };
    auto as_bool = [&](bool& slot) {
        if (value == "1" || value == "true" || value == "on")
            slot = true;
        else if (value == "0" || value == "false" || value == "off")
            slot = false;
        else
            throw ParseError("config key '" + key + "': boolean expected, got '" + value + "'");
    };

    try {
        if (key == "k") as_int(config.k);
        else if (key == "d_max") as_int(config.d_max);
        else if (key == "pairs") as_int(config.c);
        else if (key == "q_multiplier") as_double(config.q_multiplier);
        else if (key == "h") as_int(config.h);
        else if (key == "mu") as_double(config.mu);
        else if (key == "tau_gap") as_double(config.tau_gap);
        else if (key == "eps_sign") as_double(config.eps_sign);
        else if (key == "correction") as_bool(config.correction);
        else if (key == "max_iter") as_int(config.max_iter);
        else if (key == "tol_grad") as_double(config.tol_grad);
        else if (key == "min_active") as_int(config.min_active);
        else if (key == "analytic_hessian") as_bool(config.analytic_hessian);
        else if (key == "dense_threshold") as_int(config.dense_threshold);
        else if (key == "residual_tol") as_double(config.residual_tol);
        else if (key == "seed") config.seed = static_cast<unsigned>(std::stoul(value));
        else throw ParseError("unknown config key '" + key + "'");
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("config key '" + key + "': cannot parse value '" + value + "'");
    }
}

std::vector<std::pair<std::string, std::string>> read_config_entries(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string body = line.substr(0, line.find('#'));
        auto eq = body.find('=');
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        if (eq == std::string::npos) {
            if (!trim(body).empty())
                throw ParseError("config line " + std::to_string(line_no) +
                                 ": expected 'key = value'");
            continue;
        }
        std::string key = trim(body.substr(0, eq));
        std::string value = trim(body.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ParseError("config line " + std::to_string(line_no) +
                             ": expected 'key = value'");
        entries.emplace_back(key, value);
    }
    return entries;
}

void load_config_file(RunConfig& config, const std::string& path) {
    for (const auto& [key, value] : read_config_entries(path))
        apply_config_entry(config, key, value);
}

namespace {

// Stages downstream of the eigensolver treat (lambda_i, phi_i) as a set, so a
// caller-permuted basis is normalized back to ascending order here.
SpectralBasis sorted_by_eigenvalue(const SpectralBasis& basis) {
    std::vector<int> order(basis.k);
    for (int i = 0; i < basis.k; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return basis.eigenvalues[a] < basis.eigenvalues[b];
    });
    bool identity = true;
    for (int i = 0; i < basis.k; ++i) identity = identity && order[i] == i;
    if (identity) return basis;

    SpectralBasis out;
    out.k = basis.k;
    out.eigenvalues.resize(basis.k);
    out.Phi.resize(basis.Phi.rows(), basis.k);
    for (int i = 0; i < basis.k; ++i) {
        out.eigenvalues[i] = basis.eigenvalues[order[i]];
        out.Phi.col(i) = basis.Phi.col(order[i]);
    }
    return out;
}

} // namespace

DetectionResult detect_from_basis(const TriangleMesh& mesh, const AdjacencyIndex& adj,
                                  const SpectralBasis& unsorted_basis, const RunConfig& config) {
    validate_config(config);

    DetectionResult result;
    result.basis = sorted_by_eigenvalue(unsorted_basis);
    const SpectralBasis& basis = result.basis;
    StageClock clock(result.timings);

    result.gap_flags =
        clock.time("gap_flags", [&] { return eigen_gap_flags(basis, config.tau_gap); });

    result.features = clock.time("features", [&] {
        return detect_features(mesh, adj, basis, config.d_max, config.h);
    });

    const int d = result.features.d();
    result.c = config.c > 0 ? config.c : std::min(8, d / 2);

    clock.time("assignment", [&] {
        double max_dist = max_descriptor_distance(result.features);
        result.q = max_dist > 0.0 ? config.q_multiplier * max_dist : 1.0;
        AffinityMatrix affinity = build_affinity(result.features, result.q);
        result.assignment = solve_assignment(affinity, result.c);
    });
    for (auto [a, b] : result.assignment.pairs)
        result.vertex_pairs.emplace_back(result.features.indices[a], result.features.indices[b]);

    std::vector<GeodesicPath> paths(result.vertex_pairs.size());
    clock.time("geodesic_votes", [&] {
        parallel_for(static_cast<int>(result.vertex_pairs.size()), [&](int i) {
            paths[i] = shortest_path(mesh, adj, result.vertex_pairs[i].first,
                                     result.vertex_pairs[i].second);
        });
        result.map = build_functional_map(basis, paths, result.gap_flags, config.eps_sign,
                                          config.min_active);
    });

    const int kp = static_cast<int>(result.map.active.size());
    clock.time("correction", [&] {
        if (config.correction) {
            CorrectionProblem prob =
                build_correction_problem(basis, result.map, result.vertex_pairs, config.mu);
            OptimizeOptions opts;
            opts.max_iter = config.max_iter;
            opts.tol_grad = config.tol_grad;
            opts.analytic_hessian = config.analytic_hessian;
            result.correction = optimize(prob, Eigen::MatrixXd::Identity(kp, kp), opts);
            result.correction_applied = true;
        } else {
            result.correction.R = Eigen::MatrixXd::Identity(kp, kp);
            result.correction.final_cost = 0.0;
        }
    });

    clock.time("correspondence", [&] {
        Embedding emb = embed(basis, result.map, &result.correction.R);
        result.sym = nearest_neighbor_map(emb.source, emb.target);
    });

    return result;
}

DetectionResult detect(const TriangleMesh& mesh, const RunConfig& config) {
    validate_config(config);

    std::vector<std::pair<std::string, double>> timings;
    StageClock clock(timings);

    AdjacencyIndex adj = clock.time("adjacency", [&] { return build_adjacency(mesh); });
    LaplaceOperator op = clock.time("laplacian", [&] { return assemble_operator(mesh); });
    SpectralBasis basis = clock.time("eigensolve", [&] {
        EigOptions opts;
        opts.dense_threshold = config.dense_threshold;
        opts.residual_tol = config.residual_tol;
        return eigendecompose(op, config.k, opts);
    });

    DetectionResult result = detect_from_basis(mesh, adj, basis, config);
    result.timings.insert(result.timings.begin(), timings.begin(), timings.end());

    double total = 0.0;
    for (const auto& [stage, secs] : result.timings) total += secs;
    result.timings.emplace_back("total", total);
    return result;
}

void write_correspondence(const std::string& path, const SymmetryMap& sym, int k_active) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open correspondence file for writing: " + path);
    out << "# n=" << sym.sigma.size() << " k=" << k_active << "\n";
    for (std::size_t j = 0; j < sym.sigma.size(); ++j) out << j << " " << sym.sigma[j] << "\n";
    if (!out) throw Error("failed writing correspondence file: " + path);
}

std::vector<int> read_correspondence(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open correspondence file: " + path);
    std::vector<int> sigma;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string body = line.substr(0, line.find('#'));
        std::istringstream ss(body);
        long j, s;
        if (!(ss >> j)) continue;
        if (!(ss >> s) || j != static_cast<long>(sigma.size()))
            throw ParseError("correspondence line " + std::to_string(line_no) +
                             ": expected '" + std::to_string(sigma.size()) + " <partner>'");
        sigma.push_back(static_cast<int>(s));
    }
    if (sigma.empty()) throw ParseError("correspondence file has no entries: " + path);
    return sigma;
}

void write_report(const std::string& path, const TriangleMesh& mesh, const RunConfig& config,
                  const DetectionResult& result) {
    nlohmann::ordered_json doc;
    doc["mesh"] = {{"vertices", mesh.n()},
                   {"faces", mesh.faces().size()},
                   {"area", surface_area(mesh)}};
    doc["config"] = {{"k", config.k},
                     {"d_max", config.d_max},
                     {"pairs", result.c},
                     {"q_multiplier", config.q_multiplier},
                     {"h", config.h},
                     {"mu", config.mu},
                     {"tau_gap", config.tau_gap},
                     {"eps_sign", config.eps_sign},
                     {"correction", config.correction},
                     {"max_iter", config.max_iter},
                     {"tol_grad", config.tol_grad},
                     {"min_active", config.min_active},
                     {"analytic_hessian", config.analytic_hessian},
                     {"dense_threshold", config.dense_threshold},
                     {"residual_tol", config.residual_tol}};

    nlohmann::ordered_json stages = nlohmann::ordered_json::array();
    for (const auto& [stage, secs] : result.timings)
        stages.push_back({{"stage", stage}, {"seconds", secs}});
    doc["timings"] = stages;

    doc["spectral"] = {{"eigenvalues", result.basis.eigenvalues},
                       {"gap_flags", result.gap_flags}};
    doc["features"] = {{"indices", result.features.indices}, {"t_h", result.features.t_h}};

    nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
    for (auto [a, b] : result.vertex_pairs) pairs.push_back({a, b});
    doc["pairing"] = {{"vertex_pairs", pairs},
                      {"q", result.q},
                      {"total_cost", result.assignment.total_cost}};

    doc["functional_map"] = {{"sign", result.map.sign},
                             {"active", result.map.active},
                             {"confidence", result.map.confidence}};

    nlohmann::ordered_json trace = nlohmann::ordered_json::array();
    for (auto [c, g] : result.correction.trace) trace.push_back({{"cost", c}, {"grad_norm", g}});
    doc["correction"] = {{"applied", result.correction_applied},
                         {"iterations", result.correction.iterations},
                         {"final_cost", result.correction.final_cost},
                         {"converged", result.correction.converged},
                         {"trace", trace}};

    std::ofstream out(path);
    if (!out) throw Error("cannot open report file for writing: " + path);
    out << doc.dump(2) << "\n";
}

void export_ply(const std::string& path, const TriangleMesh& mesh,
                const std::vector<double>& field) {
    if (static_cast<int>(field.size()) != mesh.n())
        throw DimensionError("scalar field length does not match vertex count");

    double lo = *std::min_element(field.begin(), field.end());
    double hi = *std::max_element(field.begin(), field.end());

    std::ofstream out(path);
    if (!out) throw Error("cannot open PLY file for writing: " + path);
    out.precision(9);
    out << "ply\nformat ascii 1.0\n";
    out << "comment scalar_range " << lo << " " << hi << "\n";
    out << "element vertex " << mesh.n() << "\n";
    out << "property float x\nproperty float y\nproperty float z\n";
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out << "element face " << mesh.faces().size() << "\n";
    out << "property list uchar int vertex_indices\nend_header\n";

    // A span at rounding-noise scale would amplify noise into full-range color.
    bool flat = hi - lo <= 1e-12 * std::max(std::abs(lo), std::abs(hi));
    for (int j = 0; j < mesh.n(); ++j) {
        double t = flat ? 0.5 : (field[j] - lo) / (hi - lo);
        int warm = static_cast<int>(std::lround(255.0 * t));
        int cold = static_cast<int>(std::lround(255.0 * (1.0 - t)));
        const Vec3& v = mesh.vertices()[j];
        out << v.x() << " " << v.y() << " " << v.z() << " " << warm << " " << warm << " "
            << cold << "\n";
    }
    for (const Face& f : mesh.faces()) out << "3 " << f[0] << " " << f[1] << " " << f[2] << "\n";
    if (!out) throw Error("failed writing PLY file: " + path);
}

} // namespace symmetria
