#ifndef DIVPRUNE_EVALUATION_HPP
#define DIVPRUNE_EVALUATION_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "divprune/dataset.hpp"
#include "divprune/learners.hpp"
#include "divprune/pruning.hpp"

namespace divprune {

enum class EnsembleMethod { bagging, adaboost };

struct ExperimentConfig {
    std::vector<Dataset> datasets;
    EnsembleMethod ensemble = EnsembleMethod::bagging;
    LearnerSpec base;
    std::size_t ensemble_size = 11;
    std::vector<PruneMethod> methods;
    PruneConfig prune;  // alpha/beta/rho/epsilon shared across methods
    int folds = 5;
    std::uint64_t seed = 7;

    void validate() const;
};

struct ResultCell {
    bool present = false;
    std::vector<double> fold_accuracy;  // percentages
    std::vector<double> fold_size;      // |H| per fold
    double mean_accuracy = 0.0;
    double sd_accuracy = 0.0;
    double mean_size = 0.0;
    double sd_size = 0.0;
    std::string error;  // first failure message when absent
};

struct ResultTable {
    std::vector<std::string> dataset_names;    // sorted
    std::vector<PruneMethod> methods;          // canonical order
    std::map<std::string, std::map<PruneMethod, ResultCell>> cells;
    int folds = 5;
    std::uint64_t seed = 0;

    const ResultCell& cell(const std::string& dataset, PruneMethod m) const;
    bool complete() const;
};

struct TTestResult {
    enum class Outcome { win, tie, loss };
    Outcome outcome = Outcome::tie;
    double t_stat = 0.0;
    int dof = 0;
    double p_value = 1.0;
    bool degenerate = false;  // zero-variance difference path
};

struct FriedmanResult {
    std::vector<double> avg_ranks;  // per method, rank 1 = best accuracy
    double chi_sq = 0.0;
};

// 1 - mean err01(vote * label); ties contribute half credit.
double accuracy(const Ensemble& e, const Dataset& d);

// Per fold: train on the 80% split, prune on the same split, evaluate every
// method on the held-out fold. A method failing on a fold marks the whole
// (dataset, method) cell absent; the run continues.
ResultTable cross_validate(const ExperimentConfig& cfg);

// Paired two-tailed t-test on a - b; all-zero differences tie, other
// zero-variance differences decide by the sign of the mean.
TTestResult paired_ttest(std::span<const double> a, std::span<const double> b, double level);

// accuracies[dataset][method]; ranks per dataset row with average ties.
FriedmanResult friedman_ranks(const std::vector<std::vector<double>>& accuracies);

std::string result_table_csv(const ResultTable& t);

// Full report: per-cell stats, W/T/L t-tests against EPBD, Friedman ranks
// (when every cell of the included methods is present).
std::string result_table_json(const ResultTable& t, double ttest_level);

}  // namespace divprune

#endif
