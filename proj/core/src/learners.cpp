#include "divprune/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "divprune/errors.hpp"
#include "divprune/parallel.hpp"
#include "divprune/rng.hpp"

namespace divprune {

std::int8_t Tree::predict(std::span<const double> x) const {
    int node = 0;
    for (;;) {
        const TreeNode& nd = nodes[static_cast<std::size_t>(node)];
        if (nd.is_leaf) return nd.leaf_label;
        node = x[static_cast<std::size_t>(nd.feature)] > nd.threshold ? nd.right : nd.left;
    }
}

std::int8_t Classifier::predict(std::span<const double> x) const {
    return std::visit([&](const auto& m) { return m.predict(x); }, model_);
}

void Ensemble::normalize_weights() {
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw InternalConsistencyError("negative ensemble weight");
        total += w;
    }
    if (total <= 0.0) {
        // all-zero weights only occur for a single chance-level member
        weights.assign(weights.size(), 1.0 / static_cast<double>(weights.size()));
        return;
    }
    for (double& w : weights) w /= total;
}

void Ensemble::check() const {
    if (members.empty()) throw InternalConsistencyError("empty ensemble");
    if (members.size() != weights.size())
        throw InternalConsistencyError("ensemble weights/members size mismatch");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw InternalConsistencyError("negative ensemble weight");
        total += w;
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw InternalConsistencyError("ensemble weights sum to " + std::to_string(total));
}

double weighted_prediction_sum(std::span<const std::int8_t> predictions,
                               std::span<const double> weights) {
    // Separate accumulators keep symmetric splits exactly cancelled, so a
    // balanced uniform-weight vote compares equal to zero.
    double pos = 0.0, neg = 0.0;
    for (std::size_t j = 0; j < predictions.size(); ++j) {
        if (predictions[j] > 0)
            pos += weights[j];
        else
            neg += weights[j];
    }
    return pos - neg;
}

int vote_from_sum(double sum) { return sum > 0.0 ? 1 : (sum < 0.0 ? -1 : 0); }

int Ensemble::vote(std::span<const double> x) const {
    std::vector<std::int8_t> preds(members.size());
    for (std::size_t j = 0; j < members.size(); ++j) preds[j] = members[j].predict(x);
    return vote_from_sum(weighted_prediction_sum(preds, weights));
}

int ensemble_vote(const Ensemble& e, std::span<const double> x) { return e.vote(x); }

std::string LearnerSpec::describe() const {
    if (kind == Kind::stump) return "stump";
    return "tree(max_depth=" + std::to_string(max_depth) + ")";
}

namespace {

struct StumpSearch {
    double error = std::numeric_limits<double>::infinity();
    Stump stump;
};

// Candidate thresholds per feature: a sentinel below the minimum (covers the
// constant classifiers) followed by midpoints between consecutive distinct
// sorted values. Evaluated in (feature, threshold, polarity +1 first) order
// with strict improvement, which realizes the documented tie-breaking.
void search_feature(const Dataset& d, std::span<const double> w, int feature,
                    StumpSearch& best) {
    const std::size_t n = d.n_instances();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const std::size_t f = static_cast<std::size_t>(feature);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return d.features[a * d.n_features + f] < d.features[b * d.n_features + f];
    });

    double total_wrong_plus = 0.0;  // error of "predict +1 everywhere"
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += w[i];
        if (d.labels[i] < 0) total_wrong_plus += w[i];
    }

    // err(+pol, t) = total_wrong_plus - (wrong_plus below t) + (right_plus below t)
    auto consider = [&](double threshold, double err_plus) {
        if (err_plus < best.error) {
            best.error = err_plus;
            best.stump = Stump{feature, threshold, +1};
        }
        const double err_minus = total - err_plus;
        if (err_minus < best.error) {
            best.error = err_minus;
            best.stump = Stump{feature, threshold, -1};
        }
    };

    const double first_value = d.features[order[0] * d.n_features + f];
    consider(first_value - 1.0, total_wrong_plus);

    double below_adjust = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t idx = order[i];
        // instance idx moves below the threshold: predicted -1 by polarity +1
        below_adjust += d.labels[idx] > 0 ? w[idx] : -w[idx];
        const double v = d.features[idx * d.n_features + f];
        if (i + 1 < n) {
            const double next = d.features[order[i + 1] * d.n_features + f];
            if (next > v) consider((v + next) / 2.0, total_wrong_plus + below_adjust);
        }
    }
}

void validate_weights(const Dataset& d, std::span<const double> w) {
    if (w.size() != d.n_instances())
        throw DataError("instance weight vector length " + std::to_string(w.size()) +
                        " does not match " + std::to_string(d.n_instances()) + " instances");
    double total = 0.0;
    for (double x : w) {
        if (x < 0.0) throw DataError("negative instance weight");
        total += x;
    }
    if (std::fabs(total - 1.0) > 1e-9)
        throw DataError("instance weights sum to " + std::to_string(total) + ", expected 1");
}

struct NodeSlice {
    std::vector<std::size_t> idx;
    int depth = 0;
    int slot = 0;
};

double gini_term(double wp, double wn) {
    const double s = wp + wn;
    if (s <= 0.0) return 0.0;
    const double p = wp / s;
    return 2.0 * p * (1.0 - p) * s;
}

}  // namespace

Classifier train_stump(const Dataset& d, std::span<const double> instance_weights) {
    d.validate();
    if (d.n_instances() == 0) throw DataError("cannot train on an empty dataset");
    validate_weights(d, instance_weights);

    StumpSearch best;
    for (std::size_t f = 0; f < d.n_features; ++f)
        search_feature(d, instance_weights, static_cast<int>(f), best);

    std::ostringstream desc;
    desc << "stump(f=" << best.stump.feature << ",t=" << best.stump.threshold
         << ",pol=" << best.stump.polarity << ")";
    return Classifier(best.stump, desc.str());
}

Classifier train_tree(const Dataset& d, std::span<const double> instance_weights,
                      int max_depth) {
    d.validate();
    if (d.n_instances() == 0) throw DataError("cannot train on an empty dataset");
    if (max_depth < 1) throw DataError("max_depth must be positive");
    validate_weights(d, instance_weights);

    Tree tree;
    tree.max_depth = max_depth;

    std::vector<NodeSlice> stack;
    {
        NodeSlice root;
        root.idx.resize(d.n_instances());
        std::iota(root.idx.begin(), root.idx.end(), 0);
        root.depth = 0;
        root.slot = 0;
        tree.nodes.emplace_back();
        stack.push_back(std::move(root));
    }

    while (!stack.empty()) {
        NodeSlice node = std::move(stack.back());
        stack.pop_back();

        double wp = 0.0, wn = 0.0;
        for (std::size_t i : node.idx)
            (d.labels[i] > 0 ? wp : wn) += instance_weights[i];
        const std::int8_t majority = wp >= wn ? std::int8_t{1} : std::int8_t{-1};

        auto make_leaf = [&] {
            TreeNode& slot = tree.nodes[static_cast<std::size_t>(node.slot)];
            slot.is_leaf = true;
            slot.leaf_label = majority;
        };

        if (node.depth >= max_depth || wp == 0.0 || wn == 0.0) {
            make_leaf();
            continue;
        }

        // best split: minimal summed child impurity; ties keep the first
        // candidate in (feature, threshold) order
        double best_impurity = std::numeric_limits<double>::infinity();
        int best_feature = -1;
        double best_threshold = 0.0;
        std::vector<std::size_t> order;
        for (std::size_t f = 0; f < d.n_features; ++f) {
            order = node.idx;
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return d.features[a * d.n_features + f] < d.features[b * d.n_features + f];
            });
            double lp = 0.0, ln = 0.0;
            for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                const std::size_t idx = order[i];
                (d.labels[idx] > 0 ? lp : ln) += instance_weights[idx];
                const double v = d.features[idx * d.n_features + f];
                const double next = d.features[order[i + 1] * d.n_features + f];
                if (next <= v) continue;
                const double impurity = gini_term(lp, ln) + gini_term(wp - lp, wn - ln);
                if (impurity < best_impurity) {
                    best_impurity = impurity;
                    best_feature = static_cast<int>(f);
                    best_threshold = (v + next) / 2.0;
                }
            }
        }

        if (best_feature < 0) {  // all feature vectors identical within the node
            make_leaf();
            continue;
        }

        NodeSlice left, right;
        left.depth = right.depth = node.depth + 1;
        for (std::size_t i : node.idx) {
            if (d.features[i * d.n_features + static_cast<std::size_t>(best_feature)] >
                best_threshold)
                right.idx.push_back(i);
            else
                left.idx.push_back(i);
        }

        TreeNode& slot = tree.nodes[static_cast<std::size_t>(node.slot)];
        slot.is_leaf = false;
        slot.feature = best_feature;
        slot.threshold = best_threshold;
        slot.left = static_cast<int>(tree.nodes.size());
        slot.right = static_cast<int>(tree.nodes.size() + 1);
        left.slot = slot.left;
        right.slot = slot.right;
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        stack.push_back(std::move(right));
        stack.push_back(std::move(left));
    }

    std::ostringstream desc;
    desc << "tree(max_depth=" << max_depth << ",nodes=" << tree.nodes.size() << ")";
    return Classifier(std::move(tree), desc.str());
}

Classifier train_base(const Dataset& d, std::span<const double> instance_weights,
                      const LearnerSpec& spec) {
    if (spec.kind == LearnerSpec::Kind::stump) return train_stump(d, instance_weights);
    return train_tree(d, instance_weights, spec.max_depth);
}

Ensemble train_bagging(const Dataset& d, std::size_t size, const LearnerSpec& base,
                       std::uint64_t seed) {
    d.validate();
    if (size == 0) throw DataError("ensemble size must be >= 1");

    Ensemble e;
    e.members.resize(size);
    e.weights.assign(size, 1.0 / static_cast<double>(size));
    parallel_for(size, [&](std::size_t j) {
        const auto idx = bootstrap_sample(d, derive_seed(seed, 0x626167ULL, j));
        const Dataset boot = d.subset(idx);
        const std::vector<double> w(boot.n_instances(), 1.0 / static_cast<double>(boot.n_instances()));
        e.members[j] = train_base(boot, w, base);
    });
    e.check();
    return e;
}

Ensemble train_adaboost(const Dataset& d, std::size_t size, const LearnerSpec& base) {
    d.validate();
    if (size == 0) throw DataError("ensemble size must be >= 1");
    const std::size_t n = d.n_instances();

    Ensemble e;
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    std::vector<std::int8_t> preds(n);

    for (std::size_t t = 0; t < size; ++t) {
        Classifier member = train_base(d, w, base);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            preds[i] = member.predict(d.row(i));
            if (preds[i] != d.labels[i]) err += w[i];
        }

        if (err == 0.0) {
            if (t == 0) {
                e.members.push_back(std::move(member));
                e.weights.push_back(1.0);
                break;
            }
            // perfect mid-run member: clamp the error so the weight stays finite
            const double clamped = 1e-12;
            e.members.push_back(std::move(member));
            e.weights.push_back(0.5 * std::log((1.0 - clamped) / clamped));
            break;
        }
        if (err >= 0.5) {
            // chance-level member: kept at zero weight, boosting stops
            e.members.push_back(std::move(member));
            e.weights.push_back(0.0);
            break;
        }

        const double member_weight = 0.5 * std::log((1.0 - err) / err);
        e.members.push_back(std::move(member));
        e.weights.push_back(member_weight);

        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            w[i] *= std::exp(-member_weight * d.labels[i] * preds[i]);
            total += w[i];
        }
        for (double& x : w) x /= total;
    }

    e.normalize_weights();
    e.check();
    return e;
}

PredictionMatrix prediction_matrix(const Ensemble& e, const Dataset& d) {
    PredictionMatrix pm;
    pm.n_classifiers = e.members.size();
    pm.n_instances = d.n_instances();
    pm.values.resize(pm.n_classifiers * pm.n_instances);
    pm.labels.assign(d.labels.begin(), d.labels.end());
    for (std::size_t j = 0; j < pm.n_classifiers; ++j)
        for (std::size_t i = 0; i < pm.n_instances; ++i)
            pm.values[j * pm.n_instances + i] = e.members[j].predict(d.row(i));
    return pm;
}

}  // namespace divprune
