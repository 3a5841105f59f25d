#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace divprune::oracle {

StumpChoice exhaustive_stump(const Dataset& d, std::span<const double> w) {
    const std::size_t n = d.n_instances();
    StumpChoice best{0, 0.0, 1, std::numeric_limits<double>::infinity()};
    for (std::size_t f = 0; f < d.n_features; ++f) {
        std::set<double> values;
        for (std::size_t i = 0; i < n; ++i) values.insert(d.features[i * d.n_features + f]);
        std::vector<double> thresholds{*values.begin() - 1.0};
        for (auto it = values.begin(); std::next(it) != values.end(); ++it)
            thresholds.push_back((*it + *std::next(it)) / 2.0);
        for (double t : thresholds) {
            for (int pol : {1, -1}) {
                double err = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const int pred = d.features[i * d.n_features + f] > t ? pol : -pol;
                    if (pred != d.labels[i]) err += w[i];
                }
                if (err < best.error) best = {static_cast<int>(f), t, pol, err};
            }
        }
    }
    return best;
}

DecompositionCheck replay_decomposition(const PredictionMatrix& pm,
                                        std::span<const double> weights) {
    const std::size_t n = pm.n_instances;
    const std::size_t k = pm.n_classifiers;
    DecompositionCheck out{0.0L, 0.0L, 0.0L};
    for (std::size_t i = 0; i < n; ++i) {
        long double sum = 0.0L;
        for (std::size_t j = 0; j < k; ++j)
            sum += static_cast<long double>(weights[j]) * pm.at(j, i);
        const int vote = sum > 1e-15L ? 1 : (sum < -1e-15L ? -1 : 0);
        const int m = vote * pm.labels[i];
        out.g_bar += m == -1 ? 1.0L : (m == 0 ? 0.5L : 0.0L);
        long double mean_margin = 0.0L;
        for (std::size_t j = 0; j < k; ++j)
            mean_margin += static_cast<long double>(weights[j]) * pm.at(j, i) * pm.labels[i];
        out.d_bar += 0.5L * m - 0.5L * mean_margin;
    }
    out.g_bar /= n;
    out.d_bar /= n;
    for (std::size_t j = 0; j < k; ++j) {
        long double wrong = 0.0L;
        for (std::size_t i = 0; i < n; ++i)
            if (pm.at(j, i) != pm.labels[i]) wrong += 1.0L;
        out.a_bar += static_cast<long double>(weights[j]) * (wrong / n);
    }
    return out;
}

namespace {

struct ScanOutcome {
    std::size_t argmin = 0;
    double value = 0.0;
};

ScanOutcome scan(const PredictionMatrix& pm, const std::vector<std::size_t>& members,
                 double epsilon) {
    ScanOutcome out;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pm.n_instances; ++i) {
        int balance = 0;
        for (std::size_t j : members) balance += pm.at(j, i);
        const int vote = balance > 0 ? 1 : (balance < 0 ? -1 : 0);
        const double bar =
            static_cast<double>(balance) / static_cast<double>(members.size()) * pm.labels[i];
        const double div = 0.5 * (vote * pm.labels[i]) - 0.5 * bar;
        int lambda;
        if (div > 0.0)
            lambda = 1;
        else if (div < 0.0)
            lambda = -1;
        else
            lambda = vote == 0 ? 0 : vote * pm.labels[i];
        const double value = (1.0 - 2.0 * epsilon) * (lambda - 2.0 * div);
        if (value < best) {
            best = value;
            out.argmin = i;
            out.value = value;
        }
    }
    return out;
}

}  // namespace

bool replay_epbd_trace(const PredictionMatrix& pm, const PruneResult& result, double alpha,
                       double beta, double epsilon) {
    const std::size_t size = pm.n_classifiers;
    const std::size_t cap =
        static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(size)));
    if (result.kept_indices.size() != result.trace.size()) return false;
    if (result.kept_indices.size() > cap) return false;

    std::vector<double> acc(size, 0.0);
    for (std::size_t j = 0; j < size; ++j) {
        for (std::size_t i = 0; i < pm.n_instances; ++i)
            if (pm.at(j, i) == pm.labels[i]) acc[j] += 1.0;
        acc[j] /= static_cast<double>(pm.n_instances);
    }

    std::vector<std::size_t> remaining(size);
    for (std::size_t j = 0; j < size; ++j) remaining[j] = j;
    std::vector<std::size_t> selected;

    for (std::size_t step = 0; step < result.trace.size(); ++step) {
        const auto& tr = result.trace[step];
        if (tr.iteration != step) return false;

        const std::vector<std::size_t>& scan_set = selected.empty() ? remaining : selected;
        const ScanOutcome sc = scan(pm, scan_set, epsilon);
        if (sc.argmin != tr.instance) return false;

        std::size_t best_member = size;
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t j : remaining) {
            if (pm.at(j, tr.instance) != pm.labels[tr.instance]) continue;
            std::vector<std::size_t> candidate(selected);
            candidate.push_back(j);
            int balance = 0;
            for (std::size_t m : candidate) balance += pm.at(m, tr.instance);
            const int vote = balance > 0 ? 1 : (balance < 0 ? -1 : 0);
            const double bar = static_cast<double>(balance) /
                               static_cast<double>(candidate.size()) * pm.labels[tr.instance];
            const double div = 0.5 * (vote * pm.labels[tr.instance]) - 0.5 * bar;
            const double score = acc[j] + beta * div;
            if (score > best_score) {
                best_score = score;
                best_member = j;
            }
        }
        if (best_member != tr.classifier) return false;
        if (std::fabs(best_score - tr.score) > 1e-9) return false;

        selected.push_back(best_member);
        remaining.erase(std::find(remaining.begin(), remaining.end(), best_member));
    }

    // early termination is only legitimate when no remaining member gets the
    // next argmin instance right (or the cap is already reached)
    if (selected.size() < cap && !remaining.empty()) {
        const ScanOutcome sc = scan(pm, selected.empty() ? remaining : selected, epsilon);
        for (std::size_t j : remaining)
            if (pm.at(j, sc.argmin) == pm.labels[sc.argmin]) return false;
    }
    return selected == result.kept_indices;
}

}  // namespace divprune::oracle
