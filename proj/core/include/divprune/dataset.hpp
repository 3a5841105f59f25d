#ifndef DIVPRUNE_DATASET_HPP
#define DIVPRUNE_DATASET_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace divprune {

// Binary-labelled instance sample. Labels are always exactly -1 or +1.
struct Dataset {
    std::vector<double> features;  // row-major, n_instances x n_features
    std::vector<std::int8_t> labels;
    std::size_t n_features = 0;
    std::string name;

    std::size_t n_instances() const { return labels.size(); }

    std::span<const double> row(std::size_t i) const {
        return {features.data() + i * n_features, n_features};
    }

    // Rectangularity and label codomain. Throws DataError.
    void validate() const;

    Dataset subset(const std::vector<std::size_t>& indices) const;
};

struct FoldPlan {
    int k = 0;
    std::vector<int> assignments;  // fold index in [0, k) per instance
    std::uint64_t seed = 0;
};

// CSV ingestion: header row required, ',' separator, '.' decimals.
// label_column is a header name or a 0-based index written as digits.
// Rows mapping to positive_label become +1, the single other value -1.
Dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::string& positive_label);

void save_csv(const Dataset& d, const std::string& path);

// Stratified k-fold assignment: fold sizes differ by at most one, per-class
// counts differ by at most one across folds, deterministic under seed.
FoldPlan split_kfold(const Dataset& d, int k, std::uint64_t seed);

// n indices drawn uniformly with replacement.
std::vector<std::size_t> bootstrap_sample(const Dataset& d, std::uint64_t seed);

std::pair<Dataset, Dataset> split_train_test(const Dataset& d, const FoldPlan& plan, int test_fold);

}  // namespace divprune

#endif
