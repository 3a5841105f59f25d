#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "divprune/dataset.hpp"
#include "divprune/diversity.hpp"
#include "divprune/errors.hpp"
#include "divprune/evaluation.hpp"
#include "divprune/model_io.hpp"
#include "divprune/pruning.hpp"
#include "divprune/rng.hpp"
#include "divprune/synthetic.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace divprune;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

std::string fixed6(double v) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(6);
    out << v;
    return out.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << text;
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::ostringstream out;
    out << std::hex << fnv1a64(bytes.data(), bytes.size());
    return out.str();
}

struct DataFlags {
    std::string label_column = "label";
    std::string positive_label = "1";
};

struct EnsembleFlags {
    std::string ensemble = "bagging";
    std::string base = "stump";
    int depth = 3;
    std::size_t size = 11;
};

LearnerSpec learner_spec(const EnsembleFlags& f) {
    LearnerSpec spec;
    if (f.base == "stump") {
        spec.kind = LearnerSpec::Kind::stump;
    } else if (f.base == "tree") {
        spec.kind = LearnerSpec::Kind::tree;
        spec.max_depth = f.depth;
    } else {
        throw CLI::ValidationError("--base", "must be 'stump' or 'tree'");
    }
    return spec;
}

void write_manifest(const std::string& path, const std::string& command, json config,
                    std::uint64_t seed, const std::vector<std::string>& inputs) {
    json m;
    m["tool_version"] = kToolVersion;
    m["command"] = command;
    m["master_seed"] = seed;
    m["config"] = std::move(config);
    json digests = json::object();
    for (const auto& p : inputs) digests[p] = file_digest(p);
    m["input_digests"] = digests;
    write_file(path, m.dump(2) + "\n");
}

int cmd_train(const std::string& data_path, const DataFlags& df, const EnsembleFlags& ef,
              std::uint64_t seed, const std::string& out_path, const std::string& manifest) {
    const Dataset d = load_csv(data_path, df.label_column, df.positive_label);
    const LearnerSpec spec = learner_spec(ef);
    Ensemble e;
    if (ef.ensemble == "bagging")
        e = train_bagging(d, ef.size, spec, seed);
    else
        e = train_adaboost(d, ef.size, spec);
    save_ensemble(e, out_path);
    if (!manifest.empty()) {
        json cfg;
        cfg["data"] = data_path;
        cfg["label_column"] = df.label_column;
        cfg["positive_label"] = df.positive_label;
        cfg["ensemble"] = ef.ensemble;
        cfg["base"] = ef.base;
        cfg["depth"] = ef.depth;
        cfg["size"] = ef.size;
        cfg["out"] = out_path;
        write_manifest(manifest, "train", cfg, seed, {data_path});
    }
    std::cout << "wrote " << out_path << " (" << e.members.size() << " members)\n";
    return 0;
}

int cmd_analyze(const std::string& model_path, const std::string& data_path, const DataFlags& df,
                RiskParams params, const std::string& out_path) {
    const Ensemble e = load_ensemble(model_path);
    const Dataset d = load_csv(data_path, df.label_column, df.positive_label);
    params.sample_size = d.n_instances();
    params.validate();

    const PredictionMatrix pm = prediction_matrix(e, d);
    const DiversityProfile profile = decompose(pm, e.weights);
    const CriticalPoints cp = critical_points(params);

    json report;
    report["model"] = model_path;
    report["data"] = data_path;
    report["sample_size"] = params.sample_size;
    report["delta"] = params.delta;
    report["epsilon"] = params.epsilon;
    report["xi"] = params.confidence;
    report["g_bar"] = profile.g_bar;
    report["a_bar"] = profile.a_bar;
    report["d_bar"] = profile.d_bar;
    report["tie_count"] = profile.tie_count;
    report["critical_points"] = json::parse(critical_points_json(cp));

    std::cout << "G_bar = " << fixed6(profile.g_bar) << "\n"
              << "A_bar = " << fixed6(profile.a_bar) << "\n"
              << "D_bar = " << fixed6(profile.d_bar) << "\n"
              << "ties  = " << profile.tie_count << "\n";

    try {
        const GammaResult gamma = gamma_margin(pm, e.weights, params);
        report["gamma"] = gamma.gamma;
        report["argmin_index"] = gamma.argmin_index;
        report["div_at_argmin"] = gamma.div_at_argmin;
        std::cout << "gamma = " << fixed6(gamma.gamma) << " at instance " << gamma.argmin_index
                  << " (div = " << fixed6(gamma.div_at_argmin) << ")\n";

        if (gamma.lambda_at_argmin == 0) {
            report["warning"] = "decomposition degenerate at the margin minimizer; bound inapplicable";
            std::cout << "warning: " << report["warning"].get<std::string>() << "\n";
        } else {
            const double rhat =
                estimated_risk(gamma.div_at_argmin, gamma.lambda_at_argmin, params);
            report["estimated_risk"] = rhat;
            std::cout << "R_hat = " << fixed6(rhat) << "\n";
            if (gamma.gamma > 0.0) {
                report["kappa"] = kappa_of(gamma.gamma, params.delta);
                std::cout << "kappa = " << report["kappa"].get<std::uint64_t>() << "\n";
                try {
                    const double bound = risk_bound(gamma.gamma, params);
                    report["risk_bound"] = bound;
                    std::cout << "bound = " << fixed6(bound) << "\n";
                } catch (const std::domain_error& ex) {
                    report["risk_bound_warning"] = ex.what();
                    std::cout << "warning: " << ex.what() << "\n";
                }
            } else {
                report["kappa_warning"] = "margin is not positive; kappa and bound inapplicable";
                std::cout << "warning: " << report["kappa_warning"].get<std::string>() << "\n";
            }
            try {
                const IntervalClass ic = classify_interval(gamma.div_at_argmin, cp);
                json icj;
                icj["name"] = ic.name;
                icj["risk"] = std::string(ic.risk_trend == Trend::increasing ? "increasing "
                                                                             : "decreasing ") +
                              ic.risk_shape;
                icj["risk_d1"] = std::string(ic.d1_trend == Trend::increasing ? "increasing "
                                                                              : "decreasing ") +
                                 ic.d1_shape;
                icj["diversity_helps"] = ic.diversity_helps;
                report["interval"] = icj;
                std::cout << "interval " << ic.name
                          << (ic.diversity_helps ? " (diversity helps)" : "") << "\n";
            } catch (const std::domain_error& ex) {
                report["interval_warning"] = ex.what();
                std::cout << "warning: " << ex.what() << "\n";
            }
        }
    } catch (const std::domain_error& ex) {
        // every instance tied: structured warning, still exit 0
        report["warning"] = ex.what();
        std::cout << "warning: " << ex.what() << "\n";
    }

    if (!out_path.empty()) write_file(out_path, report.dump(2) + "\n");
    return 0;
}

int cmd_sweep(RiskParams params, const std::string& grid_spec, const std::string& out_path) {
    params.validate();
    double lo = 0.0, hi = 0.0;
    std::size_t count = 0;
    {
        std::stringstream ss(grid_spec);
        std::string a, b, c;
        if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c, ':'))
            throw CLI::ValidationError("--grid", "expected LO:HI:COUNT");
        try {
            lo = std::stod(a);
            hi = std::stod(b);
            count = static_cast<std::size_t>(std::stoul(c));
        } catch (const std::exception&) {
            throw CLI::ValidationError("--grid", "expected LO:HI:COUNT with numeric fields");
        }
    }
    if (count < 1 || hi < lo) throw CLI::ValidationError("--grid", "needs HI >= LO and COUNT >= 1");

    std::vector<double> grid;
    grid.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        grid.push_back(lo + t * (hi - lo));
    }
    const std::string csv = sweep_csv(sweep_curve(params, grid));
    if (out_path.empty())
        std::cout << csv;
    else
        write_file(out_path, csv);
    return 0;
}

int cmd_bench(std::vector<std::string> data_paths, const DataFlags& df, const EnsembleFlags& ef,
              const std::string& methods_csv, PruneConfig prune_cfg, int folds,
              std::uint64_t seed, const std::string& out_csv, const std::string& out_json,
              const std::string& manifest) {
    ExperimentConfig cfg;
    if (data_paths.empty()) {
        cfg.datasets = benchmark_suite(seed);
    } else {
        for (const auto& p : data_paths)
            cfg.datasets.push_back(load_csv(p, df.label_column, df.positive_label));
    }
    cfg.ensemble = ef.ensemble == "bagging" ? EnsembleMethod::bagging : EnsembleMethod::adaboost;
    cfg.base = learner_spec(ef);
    cfg.ensemble_size = ef.size;
    cfg.prune = prune_cfg;
    cfg.folds = folds;
    cfg.seed = seed;

    std::stringstream ss(methods_csv);
    std::string token;
    while (std::getline(ss, token, ',')) {
        const auto m = prune_method_from_string(token);
        if (!m) throw CLI::ValidationError("--methods", "unknown method '" + token + "'");
        cfg.methods.push_back(*m);
    }

    const ResultTable table = cross_validate(cfg);
    const std::string csv = result_table_csv(table);
    const std::string report = result_table_json(table, 0.05);
    if (!out_csv.empty())
        write_file(out_csv, csv);
    else
        std::cout << csv;
    if (!out_json.empty()) write_file(out_json, report + "\n");

    if (!manifest.empty()) {
        json c;
        c["data"] = data_paths;
        c["builtin_suite"] = data_paths.empty();
        c["ensemble"] = ef.ensemble;
        c["base"] = ef.base;
        c["depth"] = ef.depth;
        c["size"] = ef.size;
        c["methods"] = methods_csv;
        c["alpha"] = prune_cfg.alpha;
        c["beta"] = prune_cfg.beta;
        c["rho"] = prune_cfg.rho;
        c["epsilon"] = prune_cfg.epsilon;
        c["folds"] = folds;
        c["out_csv"] = out_csv;
        c["out_json"] = out_json;
        write_manifest(manifest, "bench", c, seed, data_paths);
    }

    // total failure (no cell present at all) is an input problem
    bool any_present = false;
    for (const auto& name : table.dataset_names)
        for (PruneMethod m : table.methods)
            if (table.cell(name, m).present) any_present = true;
    if (!any_present) throw DataError("every benchmark cell failed");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"divprune: diversity-aware ensemble analysis and pruning"};
    app.require_subcommand(1);

    DataFlags df;
    EnsembleFlags ef;
    std::uint64_t seed = 7;
    RiskParams risk;

    // train
    auto* train = app.add_subcommand("train", "Train an ensemble and write a model file");
    std::string train_data, train_out = "model.json", train_manifest;
    train->add_option("--data", train_data, "training CSV")->required();
    train->add_option("--label-column", df.label_column, "label column name or index")
        ->capture_default_str();
    train->add_option("--positive-label", df.positive_label, "label value mapped to +1")
        ->capture_default_str();
    train->add_option("--ensemble", ef.ensemble, "bagging|adaboost")
        ->check(CLI::IsMember({"bagging", "adaboost"}))
        ->capture_default_str();
    train->add_option("--base", ef.base, "stump|tree")
        ->check(CLI::IsMember({"stump", "tree"}))
        ->capture_default_str();
    train->add_option("--depth", ef.depth, "tree depth limit")->capture_default_str();
    train->add_option("--size", ef.size, "ensemble size")->capture_default_str();
    train->add_option("--seed", seed, "master seed")->capture_default_str();
    train->add_option("--out", train_out, "model output path")->capture_default_str();
    train->add_option("--manifest", train_manifest, "write a run manifest to this path");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Decomposition and risk report for a model");
    std::string an_model, an_data, an_out;
    analyze->add_option("--model", an_model, "model JSON path")->required();
    analyze->add_option("--data", an_data, "evaluation CSV")->required();
    analyze->add_option("--label-column", df.label_column)->capture_default_str();
    analyze->add_option("--positive-label", df.positive_label)->capture_default_str();
    analyze->add_option("--delta", risk.delta, "feature-map norm bound")->capture_default_str();
    analyze->add_option("--epsilon", risk.epsilon, "label noise rate")->capture_default_str();
    analyze->add_option("--xi", risk.confidence, "bound confidence")->capture_default_str();
    analyze->add_option("--out", an_out, "write the JSON report to this path");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Estimated-risk curve over a diversity grid");
    std::string grid = "-0.49:0.49:99", sweep_out;
    std::uint64_t samples = 200;
    sweep->add_option("--delta", risk.delta)->capture_default_str();
    sweep->add_option("--epsilon", risk.epsilon)->capture_default_str();
    sweep->add_option("--samples", samples, "|S| used in the estimator")->capture_default_str();
    sweep->add_option("--xi", risk.confidence)->capture_default_str();
    sweep->add_option("--grid", grid, "LO:HI:COUNT diversity grid")->capture_default_str();
    sweep->add_option("--out", sweep_out, "write CSV to this path instead of stdout");

    // bench
    auto* bench = app.add_subcommand("bench", "Cross-validated pruning benchmark");
    std::vector<std::string> bench_data;
    std::string methods = "none,es,kl,kp,oo,drep,epbd";
    std::string bench_csv, bench_json, bench_manifest;
    PruneConfig prune_cfg;
    int folds = 5;
    ef.base = "stump";
    bench->add_option("--data", bench_data,
                      "dataset CSV (repeatable); omitted -> built-in synthetic suite");
    bench->add_option("--label-column", df.label_column)->capture_default_str();
    bench->add_option("--positive-label", df.positive_label)->capture_default_str();
    bench->add_option("--ensemble", ef.ensemble)
        ->check(CLI::IsMember({"bagging", "adaboost"}))
        ->capture_default_str();
    bench->add_option("--base", ef.base)->check(CLI::IsMember({"stump", "tree"}))
        ->capture_default_str();
    bench->add_option("--depth", ef.depth)->capture_default_str();
    bench->add_option("--size", ef.size)->capture_default_str();
    bench->add_option("--methods", methods, "comma-separated subset of none,es,kl,kp,oo,drep,epbd")
        ->capture_default_str();
    bench->add_option("--alpha", prune_cfg.alpha, "kept fraction")->capture_default_str();
    bench->add_option("--beta", prune_cfg.beta, "accuracy/diversity trade-off")
        ->capture_default_str();
    bench->add_option("--rho", prune_cfg.rho, "DREP candidate fraction")->capture_default_str();
    bench->add_option("--epsilon", prune_cfg.epsilon, "noise rate for EPBD")
        ->capture_default_str();
    bench->add_option("--folds", folds)->capture_default_str();
    bench->add_option("--seed", seed)->capture_default_str();
    bench->add_option("--out-csv", bench_csv, "accuracy table CSV path");
    bench->add_option("--out-json", bench_json, "full JSON report path");
    bench->add_option("--manifest", bench_manifest, "write a run manifest to this path");

    try {
        app.parse(argc, argv);
        if (*train) return cmd_train(train_data, df, ef, seed, train_out, train_manifest);
        if (*analyze) return cmd_analyze(an_model, an_data, df, risk, an_out);
        if (*sweep) {
            risk.sample_size = samples;
            return cmd_sweep(risk, grid, sweep_out);
        }
        if (*bench)
            return cmd_bench(bench_data, df, ef, methods, prune_cfg, folds, seed, bench_csv,
                             bench_json, bench_manifest);
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    } catch (const InternalConsistencyError& e) {
        std::cerr << "internal consistency error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}
