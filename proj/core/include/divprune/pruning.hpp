#ifndef DIVPRUNE_PRUNING_HPP
#define DIVPRUNE_PRUNING_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "divprune/dataset.hpp"
#include "divprune/learners.hpp"

namespace divprune {

enum class PruneMethod { none, es, kl, kp, oo, drep, epbd };

const char* to_string(PruneMethod m);
std::optional<PruneMethod> prune_method_from_string(const std::string& s);

struct PruneConfig {
    PruneMethod method = PruneMethod::epbd;
    double alpha = 0.6;    // kept fraction; cap = ceil(alpha * |F|)
    double beta = 1.0;     // accuracy/diversity trade-off in the EPBD score
    double rho = 0.4;      // DREP candidate fraction, in (0, 1)
    double epsilon = 0.01; // noise rate forwarded to diversity computations

    void validate(std::size_t ensemble_size) const;
    std::size_t cap(std::size_t ensemble_size) const;
};

struct PruneTraceStep {
    std::size_t iteration = 0;
    std::size_t instance = 0;    // selected x* index
    std::size_t classifier = 0;  // original member index moved into H
    double score = 0.0;
};

struct PruneResult {
    std::vector<std::size_t> kept_indices;  // selection order
    Ensemble sub_ensemble;                  // uniform 1/|H| weights (method none keeps original)
    std::vector<PruneTraceStep> trace;
    std::string note;  // early-termination reason, fallback markers, ...
};

// EPBD. Iterates: locate the instance minimizing the noise-adjusted margin
// (1-2eps)*(lambda - 2*div) of the accumulated sub-ensemble H under uniform
// weights (the full pool stands in while H is empty); then move the
// highest-scoring remaining classifier that labels that instance correctly
// into H, scoring by pruning-set accuracy + beta * div of H u {f} at x*.
// Stops at cap ceil(alpha*|F|) or when every remaining classifier
// misclassifies x*. No selectable classifier at all -> NoSelectionError.
PruneResult prune_epbd(const Ensemble& e, const Dataset& d, const PruneConfig& cfg);

// Keeps the first cap members in training order.
PruneResult prune_es(const Ensemble& e, const Dataset& d, const PruneConfig& cfg);

// Greedy kappa pruning: seed with the lowest-kappa pair, then repeatedly add
// the classifier with the lowest mean kappa against the current selection.
PruneResult prune_kp(const Ensemble& e, const Dataset& d, const PruneConfig& cfg);

// Greedy selection maximizing summed pairwise symmetric KL divergence between
// add-1-smoothed output distributions.
PruneResult prune_kl(const Ensemble& e, const Dataset& d, const PruneConfig& cfg);

// Orientation ordering: members whose margin-signature vector points within
// pi/2 of the reference direction (ones vector orthogonalized against the
// ensemble-average signature), nearest angles first, capped.
PruneResult prune_oo(const Ensemble& e, const Dataset& d, const PruneConfig& cfg);

// DREP-style: start from the lowest-error member; each round consider the
// ceil(rho*|remaining|) members least agreeing with the current vote and take
// the one minimizing sub-ensemble error; stop when the error stops improving.
PruneResult prune_drep(const Ensemble& e, const Dataset& d, const PruneConfig& cfg);

// Dispatcher; method none returns the ensemble unchanged.
PruneResult prune(const Ensemble& e, const Dataset& d, const PruneConfig& cfg);

std::string prune_result_json(const PruneResult& r, const PruneConfig& cfg);

// Pairwise Cohen kappa from the 2x2 agreement table of two prediction
// vectors; degenerate expected agreement (p_e == 1) maps to kappa = 1.
double pairwise_kappa(std::span<const std::int8_t> a, std::span<const std::int8_t> b);

}  // namespace divprune

#endif
