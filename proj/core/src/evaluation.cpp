#include "divprune/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "divprune/diversity.hpp"
#include "divprune/errors.hpp"
#include "divprune/parallel.hpp"
#include "divprune/rng.hpp"
#include "divprune/stats.hpp"

#include <nlohmann/json.hpp>

namespace divprune {

namespace {

// Fixed display order for reports.
const std::vector<PruneMethod> kCanonicalOrder = {
    PruneMethod::none, PruneMethod::es,   PruneMethod::kl,  PruneMethod::kp,
    PruneMethod::oo,   PruneMethod::drep, PruneMethod::epbd};

}  // namespace

void ExperimentConfig::validate() const {
    if (datasets.empty()) throw DataError("no datasets configured");
    if (methods.empty()) throw DataError("no pruning methods configured");
    if (folds < 2) throw DataError("folds must be >= 2");
    if (ensemble_size < 1) throw DataError("ensemble size must be >= 1");
    for (const auto& d : datasets) {
        d.validate();
        if (d.n_instances() < static_cast<std::size_t>(folds))
            throw DataError("dataset '" + d.name + "' has fewer instances than folds");
        bool has_pos = false, has_neg = false;
        for (auto y : d.labels) (y > 0 ? has_pos : has_neg) = true;
        if (!has_pos || !has_neg)
            throw DataError("dataset '" + d.name + "' does not contain both classes");
    }
}

double accuracy(const Ensemble& e, const Dataset& d) {
    e.check();
    if (d.n_instances() == 0) throw DataError("accuracy over an empty dataset");
    const PredictionMatrix pm = prediction_matrix(e, d);
    double err = 0.0;
    std::vector<std::int8_t> preds(pm.n_classifiers);
    for (std::size_t i = 0; i < pm.n_instances; ++i) {
        for (std::size_t j = 0; j < pm.n_classifiers; ++j) preds[j] = pm.at(j, i);
        const int vote = vote_from_sum(weighted_prediction_sum(preds, e.weights));
        err += err01(vote * d.labels[i]);
    }
    return 1.0 - err / static_cast<double>(pm.n_instances);
}

const ResultCell& ResultTable::cell(const std::string& dataset, PruneMethod m) const {
    return cells.at(dataset).at(m);
}

bool ResultTable::complete() const {
    for (const auto& name : dataset_names)
        for (PruneMethod m : methods)
            if (!cell(name, m).present) return false;
    return true;
}

namespace {

struct FoldOutcome {
    bool ok = false;
    double accuracy_pct = 0.0;
    double size = 0.0;
    std::string error;
};

void finalize_cell(ResultCell& c) {
    if (c.fold_accuracy.empty()) {
        c.present = false;
        return;
    }
    c.present = c.error.empty();
    c.mean_accuracy = mean(c.fold_accuracy);
    c.sd_accuracy = sample_sd(c.fold_accuracy);
    c.mean_size = mean(c.fold_size);
    c.sd_size = sample_sd(c.fold_size);
}

}  // namespace

ResultTable cross_validate(const ExperimentConfig& cfg) {
    cfg.validate();

    ResultTable table;
    table.folds = cfg.folds;
    table.seed = cfg.seed;
    for (PruneMethod m : kCanonicalOrder)
        if (std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end())
            table.methods.push_back(m);
    for (const auto& d : cfg.datasets) table.dataset_names.push_back(d.name);
    std::sort(table.dataset_names.begin(), table.dataset_names.end());

    // (dataset, fold) grid evaluated in parallel; every slot is preallocated
    // and written once, so scheduling cannot change results.
    const std::size_t n_datasets = cfg.datasets.size();
    const std::size_t jobs = n_datasets * static_cast<std::size_t>(cfg.folds);
    std::vector<std::vector<std::vector<FoldOutcome>>> grid(n_datasets);
    for (std::size_t di = 0; di < n_datasets; ++di)
        grid[di].assign(static_cast<std::size_t>(cfg.folds),
                        std::vector<FoldOutcome>(table.methods.size()));

    parallel_for(jobs, [&](std::size_t job) {
        const std::size_t di = job / static_cast<std::size_t>(cfg.folds);
        const int fold = static_cast<int>(job % static_cast<std::size_t>(cfg.folds));
        const Dataset& data = cfg.datasets[di];
        const std::uint64_t dataset_id = fnv1a64_str(data.name);

        const FoldPlan plan = split_kfold(data, cfg.folds, derive_seed(cfg.seed, dataset_id));
        const auto [train, test] = split_train_test(data, plan, fold);
        const std::uint64_t fold_seed =
            derive_seed(cfg.seed, dataset_id, static_cast<std::uint64_t>(fold));

        Ensemble full;
        try {
            full = cfg.ensemble == EnsembleMethod::bagging
                       ? train_bagging(train, cfg.ensemble_size, cfg.base, fold_seed)
                       : train_adaboost(train, cfg.ensemble_size, cfg.base);
        } catch (const std::exception& ex) {
            for (std::size_t mi = 0; mi < table.methods.size(); ++mi)
                grid[di][static_cast<std::size_t>(fold)][mi].error = ex.what();
            return;
        }

        for (std::size_t mi = 0; mi < table.methods.size(); ++mi) {
            FoldOutcome& out = grid[di][static_cast<std::size_t>(fold)][mi];
            try {
                PruneConfig pc = cfg.prune;
                pc.method = table.methods[mi];
                const PruneResult pruned = prune(full, train, pc);
                out.accuracy_pct = 100.0 * accuracy(pruned.sub_ensemble, test);
                out.size = static_cast<double>(pruned.kept_indices.size());
                out.ok = true;
            } catch (const std::exception& ex) {
                out.error = ex.what();
            }
        }
    });

    for (std::size_t di = 0; di < n_datasets; ++di) {
        const std::string& name = cfg.datasets[di].name;
        for (std::size_t mi = 0; mi < table.methods.size(); ++mi) {
            ResultCell cell;
            for (int f = 0; f < cfg.folds; ++f) {
                const FoldOutcome& out = grid[di][static_cast<std::size_t>(f)][mi];
                if (out.ok) {
                    cell.fold_accuracy.push_back(out.accuracy_pct);
                    cell.fold_size.push_back(out.size);
                } else if (cell.error.empty()) {
                    cell.error = out.error;
                }
            }
            finalize_cell(cell);
            table.cells[name][table.methods[mi]] = std::move(cell);
        }
    }
    return table;
}

TTestResult paired_ttest(std::span<const double> a, std::span<const double> b, double level) {
    if (a.size() != b.size())
        throw DataError("paired t-test requires equal-length samples");
    if (a.size() < 2) throw DataError("paired t-test requires at least two pairs");

    const std::size_t k = a.size();
    std::vector<double> diff(k);
    for (std::size_t i = 0; i < k; ++i) diff[i] = a[i] - b[i];
    const double m = mean(diff);
    const double sd = sample_sd(diff);

    TTestResult r;
    r.dof = static_cast<int>(k) - 1;
    if (sd == 0.0) {
        r.degenerate = true;
        if (m == 0.0) {
            r.outcome = TTestResult::Outcome::tie;
        } else {
            r.outcome = m > 0.0 ? TTestResult::Outcome::win : TTestResult::Outcome::loss;
            r.p_value = 0.0;
        }
        return r;
    }
    r.t_stat = m / (sd / std::sqrt(static_cast<double>(k)));
    r.p_value = student_t_two_tailed_p(r.t_stat, r.dof);
    if (r.p_value < level)
        r.outcome = r.t_stat > 0.0 ? TTestResult::Outcome::win : TTestResult::Outcome::loss;
    else
        r.outcome = TTestResult::Outcome::tie;
    return r;
}

FriedmanResult friedman_ranks(const std::vector<std::vector<double>>& accuracies) {
    const std::size_t n_datasets = accuracies.size();
    if (n_datasets < 2) throw DataError("Friedman ranking needs at least two datasets");
    const std::size_t k = accuracies.front().size();
    if (k < 2) throw DataError("Friedman ranking needs at least two methods");
    for (const auto& row : accuracies)
        if (row.size() != k) throw DataError("ragged accuracy table");

    FriedmanResult r;
    r.avg_ranks.assign(k, 0.0);
    for (const auto& row : accuracies) {
        // rank 1 = highest accuracy; tied values share the average rank
        std::vector<std::size_t> order(k);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t x, std::size_t y) { return row[x] > row[y]; });
        std::size_t i = 0;
        while (i < k) {
            std::size_t j = i;
            while (j + 1 < k && row[order[j + 1]] == row[order[i]]) ++j;
            const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
            for (std::size_t t = i; t <= j; ++t) r.avg_ranks[order[t]] += shared;
            i = j + 1;
        }
    }
    for (double& v : r.avg_ranks) v /= static_cast<double>(n_datasets);

    const double dn = static_cast<double>(n_datasets);
    const double dk = static_cast<double>(k);
    double sum_sq = 0.0;
    for (double v : r.avg_ranks) sum_sq += v * v;
    r.chi_sq = 12.0 * dn / (dk * (dk + 1.0)) * (sum_sq - dk * (dk + 1.0) * (dk + 1.0) / 4.0);
    return r;
}

std::string result_table_csv(const ResultTable& t) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(6);
    out << "dataset";
    for (PruneMethod m : t.methods) out << "," << to_string(m) << "_mean," << to_string(m) << "_sd";
    out << "\n";
    for (const auto& name : t.dataset_names) {
        out << name;
        for (PruneMethod m : t.methods) {
            const ResultCell& c = t.cell(name, m);
            if (c.present)
                out << "," << c.mean_accuracy << "," << c.sd_accuracy;
            else
                out << ",,";
        }
        out << "\n";
    }
    return out.str();
}

std::string result_table_json(const ResultTable& t, double ttest_level) {
    nlohmann::ordered_json j;
    j["folds"] = t.folds;
    j["seed"] = t.seed;
    j["methods"] = nlohmann::ordered_json::array();
    for (PruneMethod m : t.methods) j["methods"].push_back(to_string(m));

    j["datasets"] = nlohmann::ordered_json::array();
    for (const auto& name : t.dataset_names) {
        nlohmann::ordered_json row;
        row["name"] = name;
        for (PruneMethod m : t.methods) {
            const ResultCell& c = t.cell(name, m);
            nlohmann::ordered_json cell;
            cell["present"] = c.present;
            if (c.present) {
                cell["mean"] = c.mean_accuracy;
                cell["sd"] = c.sd_accuracy;
                cell["folds"] = c.fold_accuracy;
                cell["size_mean"] = c.mean_size;
                cell["size_sd"] = c.sd_size;
            } else {
                cell["error"] = c.error;
            }
            row[to_string(m)] = cell;
        }
        j["datasets"].push_back(row);
    }

    const bool has_epbd =
        std::find(t.methods.begin(), t.methods.end(), PruneMethod::epbd) != t.methods.end();
    if (has_epbd) {
        nlohmann::ordered_json wtl;
        for (PruneMethod m : t.methods) {
            if (m == PruneMethod::epbd) continue;
            int w = 0, tie = 0, l = 0;
            bool comparable = true;
            for (const auto& name : t.dataset_names) {
                const ResultCell& a = t.cell(name, PruneMethod::epbd);
                const ResultCell& b = t.cell(name, m);
                if (!a.present || !b.present) {
                    comparable = false;
                    continue;
                }
                const TTestResult r = paired_ttest(a.fold_accuracy, b.fold_accuracy, ttest_level);
                if (r.outcome == TTestResult::Outcome::win)
                    ++w;
                else if (r.outcome == TTestResult::Outcome::loss)
                    ++l;
                else
                    ++tie;
            }
            nlohmann::ordered_json entry;
            entry["win"] = w;
            entry["tie"] = tie;
            entry["loss"] = l;
            entry["all_cells_present"] = comparable;
            wtl[to_string(m)] = entry;
        }
        j["ttest_vs_epbd"] = wtl;
        j["ttest_level"] = ttest_level;
    }

    if (t.complete() && t.dataset_names.size() >= 2 && t.methods.size() >= 2) {
        std::vector<std::vector<double>> acc;
        for (const auto& name : t.dataset_names) {
            std::vector<double> row;
            for (PruneMethod m : t.methods) row.push_back(t.cell(name, m).mean_accuracy);
            acc.push_back(std::move(row));
        }
        const FriedmanResult fr = friedman_ranks(acc);
        nlohmann::ordered_json ranks;
        for (std::size_t i = 0; i < t.methods.size(); ++i)
            ranks[to_string(t.methods[i])] = fr.avg_ranks[i];
        j["friedman"] = {{"avg_ranks", ranks}, {"chi_sq", fr.chi_sq}};
    } else {
        j["friedman"] = nullptr;
    }
    return j.dump(2);
}

}  // namespace divprune
