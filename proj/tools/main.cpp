#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "symmetria/errors.hpp"
#include "symmetria/evaluation.hpp"
#include "symmetria/geodesics.hpp"
#include "symmetria/pipeline.hpp"
#include "symmetria/signatures.hpp"

namespace {

using namespace symmetria;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumerical = 2;

int classify(const Error& err) {
    if (dynamic_cast<const ParseError*>(&err) || dynamic_cast<const ValidationError*>(&err) ||
        dynamic_cast<const NonManifoldError*>(&err) || dynamic_cast<const IndexError*>(&err) ||
        dynamic_cast<const EmptyGroundTruthError*>(&err) ||
        dynamic_cast<const InfeasibleError*>(&err))
        return kExitInput;
    return kExitNumerical;
}

struct DetectArgs {
    std::string mesh_path;
    std::string out_path = "correspondence.txt";
    std::string report_path;
    std::string config_path;
    std::string basis_dump_path;
    RunConfig config;
    std::map<std::string, CLI::Option*> flag_for_key;
};

int run_detect(const DetectArgs& args) {
    RunConfig config = args.config;
    if (!args.config_path.empty()) {
        // Explicit flags win over config-file entries.
        for (const auto& [key, value] : read_config_entries(args.config_path)) {
            auto it = args.flag_for_key.find(key);
            if (it != args.flag_for_key.end() && it->second->count() > 0) continue;
            apply_config_entry(config, key, value);
        }
    }
    validate_config(config);

    TriangleMesh mesh = parse_mesh(args.mesh_path);
    DetectionResult result = detect(mesh, config);

    write_correspondence(args.out_path, result.sym, static_cast<int>(result.map.active.size()));
    if (!args.report_path.empty()) write_report(args.report_path, mesh, config, result);
    if (!args.basis_dump_path.empty()) dump_basis(args.basis_dump_path, result.basis);

    std::cout << "vertices: " << mesh.n() << "\n";
    std::cout << "features: " << result.features.d() << ", pairs: " << result.c << "\n";
    std::cout << "parity signs:";
    for (int s : result.map.sign) std::cout << " " << s;
    std::cout << "\nactive eigenfunctions: " << result.map.active.size() << "\n";
    if (result.correction_applied) {
        std::cout << "correction: " << result.correction.iterations << " iterations, final cost "
                  << result.correction.final_cost
                  << (result.correction.converged ? "" : " (iteration cap reached)") << "\n";
    } else {
        std::cout << "correction: skipped\n";
    }
    for (const auto& [stage, secs] : result.timings)
        std::cout << "  " << stage << ": " << secs << " s\n";
    std::cout << "correspondence written to " << args.out_path << "\n";
    return kExitOk;
}

EvalReport eval_one(const std::string& mesh_path, const std::string& corr_path,
                    const std::string& gt_path, bool one_based) {
    TriangleMesh mesh = parse_mesh(mesh_path);
    AdjacencyIndex adj = build_adjacency(mesh);
    std::vector<int> sigma = read_correspondence(corr_path);
    std::vector<std::pair<int, int>> gt = read_ground_truth(gt_path, one_based);
    return correspondence_rate(mesh, adj, sigma, gt);
}

int run_eval(const std::string& mesh_path, const std::string& corr_path,
             const std::string& gt_path, bool one_based) {
    EvalReport report = eval_one(mesh_path, corr_path, gt_path, one_based);
    std::cout << "threshold: " << report.threshold << "\n";
    std::cout << "corr_rate: " << report.corr_rate << "\n";
    return kExitOk;
}

int run_eval_batch(const std::string& dir, bool one_based) {
    namespace fs = std::filesystem;
    std::vector<fs::path> meshes;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        auto ext = entry.path().extension().string();
        if (ext == ".off" || ext == ".obj") meshes.push_back(entry.path());
    }
    std::sort(meshes.begin(), meshes.end());
    if (meshes.empty()) throw ParseError("no .off or .obj meshes in " + dir);

    std::vector<EvalReport> reports;
    for (const auto& mesh_path : meshes) {
        fs::path corr = mesh_path;
        corr.replace_extension(".corr");
        fs::path gt = mesh_path;
        gt.replace_extension(".gt");
        if (!fs::exists(corr) || !fs::exists(gt))
            throw ParseError("missing " + corr.filename().string() + " or " +
                             gt.filename().string() + " next to " + mesh_path.string());
        EvalReport report = eval_one(mesh_path.string(), corr.string(), gt.string(), one_based);
        std::cout << mesh_path.filename().string() << ": corr_rate " << report.corr_rate << "\n";
        reports.push_back(report);
    }
    std::cout << "mesh_rate: " << mesh_rate(reports) << "\n";
    return kExitOk;
}

int run_export(const std::string& mesh_path, const std::string& field, int index,
               const std::string& corr_path, const std::string& gt_path, bool one_based,
               const std::string& out_path, const RunConfig& config) {
    TriangleMesh mesh = parse_mesh(mesh_path);
    std::vector<double> values(mesh.n());

    if (field == "eigenfunction" || field == "hks") {
        validate_config(config);
        LaplaceOperator op = assemble_operator(mesh);
        EigOptions opts;
        opts.dense_threshold = config.dense_threshold;
        opts.residual_tol = config.residual_tol;
        SpectralBasis basis = eigendecompose(op, config.k, opts);
        if (field == "eigenfunction") {
            if (index < 1 || index > basis.k)
                throw IndexError("eigenfunction index must be in [1, " +
                                 std::to_string(basis.k) + "]");
            for (int j = 0; j < mesh.n(); ++j) values[j] = basis.Phi(j, index - 1);
        } else {
            Eigen::VectorXd energy = hks_energy(basis, reference_time(basis));
            for (int j = 0; j < mesh.n(); ++j) values[j] = energy[j];
        }
    } else if (field == "correspondence-error") {
        if (corr_path.empty() || gt_path.empty())
            throw ParseError("correspondence-error export needs --corr and --gt");
        AdjacencyIndex adj = build_adjacency(mesh);
        std::vector<int> sigma = read_correspondence(corr_path);
        if (static_cast<int>(sigma.size()) != mesh.n())
            throw DimensionError("correspondence length does not match vertex count");
        std::vector<std::pair<int, int>> gt = read_ground_truth(gt_path, one_based);
        EvalReport report = correspondence_rate(mesh, adj, sigma, gt);
        for (std::size_t i = 0; i < gt.size(); ++i) {
            int j = gt[i].first;
            values[j] = report.per_pair_error[i];
        }
    } else {
        throw ParseError("unknown field '" + field +
                         "' (expected eigenfunction, hks, or correspondence-error)");
    }

    export_ply(out_path, mesh, values);
    std::cout << "wrote " << out_path << "\n";
    return kExitOk;
}

std::map<std::string, CLI::Option*> add_config_flags(CLI::App* cmd, RunConfig& config) {
    std::map<std::string, CLI::Option*> flags;
    flags["k"] = cmd->add_option("--k", config.k, "eigenfunction count");
    flags["d_max"] = cmd->add_option("--d-max", config.d_max, "feature point cap");
    flags["pairs"] = cmd->add_option("--pairs", config.c, "feature pair count (0 = auto)");
    flags["mu"] = cmd->add_option("--mu", config.mu, "correction coupling weight");
    flags["tau_gap"] =
        cmd->add_option("--tau-gap", config.tau_gap, "relative eigenvalue gap threshold");
    flags["eps_sign"] = cmd->add_option("--eps-sign", config.eps_sign, "parity vote dead zone");
    flags["q_multiplier"] =
        cmd->add_option("--q-multiplier", config.q_multiplier, "sign penalty multiplier");
    flags["h"] = cmd->add_option("--h", config.h, "descriptor time samples");
    flags["max_iter"] =
        cmd->add_option("--max-iter", config.max_iter, "correction iteration cap");
    flags["tol_grad"] =
        cmd->add_option("--tol-grad", config.tol_grad, "correction gradient tolerance");
    flags["min_active"] =
        cmd->add_option("--min-active", config.min_active, "minimum usable eigenfunctions");
    flags["dense_threshold"] = cmd->add_option("--dense-threshold", config.dense_threshold,
                                               "dense eigensolver vertex limit");
    flags["residual_tol"] =
        cmd->add_option("--residual-tol", config.residual_tol, "eigenpair residual tolerance");
    flags["analytic_hessian"] = cmd->add_flag("--analytic-hessian", config.analytic_hessian,
                                              "use analytic Hessian products in the correction");
    return flags;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"symmetria: intrinsic reflective symmetry detection for triangle meshes"};
    app.require_subcommand(1);
    // Long-form help only: -h would collide with the --h descriptor option.
    app.set_help_flag("--help", "print help and exit");

    DetectArgs detect_args;
    CLI::App* detect_cmd = app.add_subcommand("detect", "detect the symmetry map of a mesh");
    detect_cmd->set_help_flag("--help", "print help and exit");
    detect_cmd->add_option("mesh", detect_args.mesh_path, "input mesh (.off or .obj)")
        ->required();
    detect_cmd->add_option("--out", detect_args.out_path, "correspondence output path");
    detect_cmd->add_option("--report", detect_args.report_path, "JSON run report path");
    detect_cmd->add_option("--config", detect_args.config_path, "key = value config file");
    detect_cmd->add_option("--dump-basis", detect_args.basis_dump_path,
                           "write eigenvalues and eigenfunctions to a text file");
    bool no_correction = false;
    CLI::Option* no_corr_flag =
        detect_cmd->add_flag("--no-correction", no_correction, "skip the rotation correction");
    detect_args.flag_for_key = add_config_flags(detect_cmd, detect_args.config);
    detect_args.flag_for_key["correction"] = no_corr_flag;

    std::string eval_mesh, eval_corr, eval_gt, eval_batch_dir;
    bool eval_one_based = false;
    CLI::App* eval_cmd = app.add_subcommand("eval", "score a correspondence vs ground truth");
    eval_cmd->set_help_flag("--help", "print help and exit");
    eval_cmd->add_option("mesh", eval_mesh, "input mesh");
    eval_cmd->add_option("correspondence", eval_corr, "correspondence file");
    eval_cmd->add_option("ground_truth", eval_gt, "ground-truth pair file");
    eval_cmd->add_option("--batch", eval_batch_dir,
                         "directory of meshes with sibling .corr/.gt files");
    eval_cmd->add_flag("--one-based", eval_one_based, "ground-truth indices start at 1");

    std::string export_mesh, export_field = "eigenfunction", export_out = "field.ply";
    std::string export_corr, export_gt;
    int export_index = 1;
    bool export_one_based = false;
    RunConfig export_config;
    CLI::App* export_cmd = app.add_subcommand("export", "write a colored PLY of a scalar field");
    export_cmd->set_help_flag("--help", "print help and exit");
    export_cmd->add_option("mesh", export_mesh, "input mesh")->required();
    export_cmd->add_option("--field", export_field,
                           "eigenfunction | hks | correspondence-error");
    export_cmd->add_option("--index", export_index, "eigenfunction number (1 = constant)");
    export_cmd->add_option("--corr", export_corr, "correspondence file (for error field)");
    export_cmd->add_option("--gt", export_gt, "ground-truth file (for error field)");
    export_cmd->add_flag("--one-based", export_one_based, "ground-truth indices start at 1");
    export_cmd->add_option("--out", export_out, "output PLY path");
    add_config_flags(export_cmd, export_config);

    CLI11_PARSE(app, argc, argv);

    try {
        if (detect_cmd->parsed()) {
            if (no_correction) detect_args.config.correction = false;
            return run_detect(detect_args);
        }
        if (eval_cmd->parsed()) {
            if (!eval_batch_dir.empty()) return run_eval_batch(eval_batch_dir, eval_one_based);
            if (eval_mesh.empty() || eval_corr.empty() || eval_gt.empty())
                throw ParseError("eval needs <mesh> <correspondence> <ground_truth> or --batch");
            return run_eval(eval_mesh, eval_corr, eval_gt, eval_one_based);
        }
        if (export_cmd->parsed())
            return run_export(export_mesh, export_field, export_index, export_corr, export_gt,
                              export_one_based, export_out, export_config);
    } catch (const Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return classify(err);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
