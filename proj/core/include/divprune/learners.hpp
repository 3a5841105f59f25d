#ifndef DIVPRUNE_LEARNERS_HPP
#define DIVPRUNE_LEARNERS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "divprune/dataset.hpp"

namespace divprune {

// Axis-aligned threshold classifier: predicts polarity where x[feature] >
// threshold and -polarity elsewhere.
struct Stump {
    int feature = 0;
    double threshold = 0.0;
    int polarity = 1;  // +1 or -1

    std::int8_t predict(std::span<const double> x) const {
        return static_cast<std::int8_t>(x[static_cast<std::size_t>(feature)] > threshold
                                            ? polarity
                                            : -polarity);
    }
};

struct TreeNode {
    bool is_leaf = true;
    std::int8_t leaf_label = 1;
    int feature = 0;
    double threshold = 0.0;
    int left = -1;   // x[feature] <= threshold
    int right = -1;  // x[feature] >  threshold
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    int max_depth = 1;

    std::int8_t predict(std::span<const double> x) const;
};

class Classifier {
public:
    Classifier() = default;
    Classifier(Stump s, std::string descriptor)
        : model_(s), descriptor_(std::move(descriptor)) {}
    Classifier(Tree t, std::string descriptor)
        : model_(std::move(t)), descriptor_(std::move(descriptor)) {}

    std::int8_t predict(std::span<const double> x) const;

    const std::string& descriptor() const { return descriptor_; }
    const std::variant<Stump, Tree>& model() const { return model_; }

private:
    std::variant<Stump, Tree> model_;
    std::string descriptor_;
};

// Weighted plurality voting committee. Weights are nonnegative and normalized
// to sum 1 on construction.
struct Ensemble {
    std::vector<Classifier> members;
    std::vector<double> weights;

    void normalize_weights();
    void check() const;  // invariants: non-empty, lengths match, sum==1 within 1e-12

    // sgn of the weighted prediction sum; exact zero -> 0 (tie).
    int vote(std::span<const double> x) const;
};

// Cached per-member, per-instance predictions plus the instance labels.
struct PredictionMatrix {
    std::size_t n_classifiers = 0;
    std::size_t n_instances = 0;
    std::vector<std::int8_t> values;  // row-major, member-major
    std::vector<std::int8_t> labels;

    std::int8_t at(std::size_t classifier, std::size_t instance) const {
        return values[classifier * n_instances + instance];
    }
};

struct LearnerSpec {
    enum class Kind { stump, tree };
    Kind kind = Kind::stump;
    int max_depth = 3;  // trees only

    std::string describe() const;
};

// Positive weighted sum minus negative weighted sum, accumulated separately so
// that symmetric vote splits cancel to an exact 0.0.
double weighted_prediction_sum(std::span<const std::int8_t> predictions,
                               std::span<const double> weights);

int vote_from_sum(double sum);

// Exhaustive weighted 0/1-error minimization over the below-minimum sentinel
// threshold plus all midpoints between consecutive distinct feature values.
// Ties resolve to the lowest feature, then lowest threshold, then polarity +1.
Classifier train_stump(const Dataset& d, std::span<const double> instance_weights);

// Greedy CART-style tree: weighted Gini impurity, axis-aligned midpoint
// thresholds, weighted-majority leaves. Stops at max_depth, a pure node, or
// when no split separates the node. Zero-gain splits are taken.
Classifier train_tree(const Dataset& d, std::span<const double> instance_weights,
                      int max_depth);

Classifier train_base(const Dataset& d, std::span<const double> instance_weights,
                      const LearnerSpec& spec);

// size members, each fit on an independent bootstrap resample with the RNG
// stream derived from (seed, member index); weights all 1/size.
Ensemble train_bagging(const Dataset& d, std::size_t size, const LearnerSpec& base,
                       std::uint64_t seed);

// Discrete AdaBoost with member weight 0.5*ln((1-e)/e); stops early on a
// perfect round (e=0, member kept) or a no-better-than-chance round
// (e>=0.5, member kept at weight 0). Final weights renormalized to sum 1.
Ensemble train_adaboost(const Dataset& d, std::size_t size, const LearnerSpec& base);

int ensemble_vote(const Ensemble& e, std::span<const double> x);

PredictionMatrix prediction_matrix(const Ensemble& e, const Dataset& d);

}  // namespace divprune

#endif
