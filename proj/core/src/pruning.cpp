#include "divprune/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "divprune/diversity.hpp"
#include "divprune/errors.hpp"

#include <nlohmann/json.hpp>

namespace divprune {

const char* to_string(PruneMethod m) {
    switch (m) {
        case PruneMethod::none: return "none";
        case PruneMethod::es: return "es";
        case PruneMethod::kl: return "kl";
        case PruneMethod::kp: return "kp";
        case PruneMethod::oo: return "oo";
        case PruneMethod::drep: return "drep";
        case PruneMethod::epbd: return "epbd";
    }
    return "?";
}

std::optional<PruneMethod> prune_method_from_string(const std::string& s) {
    for (PruneMethod m : {PruneMethod::none, PruneMethod::es, PruneMethod::kl, PruneMethod::kp,
                          PruneMethod::oo, PruneMethod::drep, PruneMethod::epbd})
        if (s == to_string(m)) return m;
    return std::nullopt;
}

void PruneConfig::validate(std::size_t ensemble_size) const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DataError("alpha must lie in (0, 1]");
    if (!(beta >= 0.0)) throw DataError("beta must be nonnegative");
    if (!(rho > 0.0 && rho < 1.0)) throw DataError("rho must lie in (0, 1)");
    if (!(epsilon >= 0.0 && epsilon < 0.5)) throw DataError("epsilon must lie in [0, 0.5)");
    if (cap(ensemble_size) < 1) throw DataError("alpha keeps no classifiers");
}

std::size_t PruneConfig::cap(std::size_t ensemble_size) const {
    return static_cast<std::size_t>(
        std::ceil(alpha * static_cast<double>(ensemble_size)));
}

double pairwise_kappa(std::span<const std::int8_t> a, std::span<const std::int8_t> b) {
    const double n = static_cast<double>(a.size());
    double both_pos = 0, a_pos = 0, b_pos = 0, agree = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > 0) ++a_pos;
        if (b[i] > 0) ++b_pos;
        if (a[i] > 0 && b[i] > 0) ++both_pos;
        if (a[i] == b[i]) ++agree;
    }
    const double p_o = agree / n;
    const double p_e = (a_pos / n) * (b_pos / n) + (1.0 - a_pos / n) * (1.0 - b_pos / n);
    if (std::fabs(1.0 - p_e) < 1e-12) return 1.0;
    return (p_o - p_e) / (1.0 - p_e);
}

namespace {

struct PruneContext {
    const Ensemble* ensemble = nullptr;
    const Dataset* data = nullptr;
    PredictionMatrix pm;
    std::size_t size = 0;
    std::size_t cap = 0;
};

PruneContext make_context(const Ensemble& e, const Dataset& d, const PruneConfig& cfg) {
    e.check();
    d.validate();
    if (d.n_instances() == 0) throw DataError("pruning set is empty");
    cfg.validate(e.members.size());
    PruneContext ctx;
    ctx.ensemble = &e;
    ctx.data = &d;
    ctx.pm = prediction_matrix(e, d);
    ctx.size = e.members.size();
    ctx.cap = cfg.cap(e.members.size());
    return ctx;
}

Ensemble uniform_sub_ensemble(const Ensemble& e, const std::vector<std::size_t>& kept) {
    Ensemble sub;
    sub.members.reserve(kept.size());
    for (std::size_t j : kept) sub.members.push_back(e.members[j]);
    sub.weights.assign(kept.size(), 1.0 / static_cast<double>(kept.size()));
    sub.check();
    return sub;
}

PruneResult finish(const PruneContext& ctx, std::vector<std::size_t> kept,
                   std::vector<PruneTraceStep> trace = {}, std::string note = {}) {
    PruneResult r;
    r.kept_indices = std::move(kept);
    r.trace = std::move(trace);
    r.note = std::move(note);
    r.sub_ensemble = uniform_sub_ensemble(*ctx.ensemble, r.kept_indices);
    return r;
}

// Member accuracy on the pruning set; individual classifiers never abstain.
std::vector<double> member_accuracies(const PredictionMatrix& pm) {
    std::vector<double> acc(pm.n_classifiers, 0.0);
    for (std::size_t j = 0; j < pm.n_classifiers; ++j) {
        double correct = 0.0;
        for (std::size_t i = 0; i < pm.n_instances; ++i)
            if (pm.at(j, i) == pm.labels[i]) correct += 1.0;
        acc[j] = correct / static_cast<double>(pm.n_instances);
    }
    return acc;
}

// eq4 scan value (1-2eps)*(lambda - 2*div) of the given member set under
// uniform weights; the tie case carries value 0 through lambda = 0.
double scan_value(const PredictionMatrix& pm, const std::vector<std::size_t>& members,
                  std::size_t instance, double noise_scale) {
    double pos = 0.0, neg = 0.0;
    const double w = 1.0 / static_cast<double>(members.size());
    for (std::size_t j : members) {
        if (pm.at(j, instance) > 0)
            pos += w;
        else
            neg += w;
    }
    const double sum = pos - neg;
    const int vote = vote_from_sum(sum);
    const double bar = std::clamp(pm.labels[instance] * sum, -1.0, 1.0);
    const double div = 0.5 * (vote * pm.labels[instance]) - 0.5 * bar;
    const int lambda = lambda_of(div, vote, pm.labels[instance]);
    return noise_scale * (lambda - 2.0 * div);
}

double div_at(const PredictionMatrix& pm, const std::vector<std::size_t>& members,
              std::size_t instance) {
    double pos = 0.0, neg = 0.0;
    const double w = 1.0 / static_cast<double>(members.size());
    for (std::size_t j : members) {
        if (pm.at(j, instance) > 0)
            pos += w;
        else
            neg += w;
    }
    const double sum = pos - neg;
    const int vote = vote_from_sum(sum);
    return 0.5 * (vote * pm.labels[instance]) -
           0.5 * std::clamp(pm.labels[instance] * sum, -1.0, 1.0);
}

// Uniform-vote error with tie votes priced at one half.
double subset_error(const PredictionMatrix& pm, const std::vector<std::size_t>& members) {
    double err = 0.0;
    for (std::size_t i = 0; i < pm.n_instances; ++i) {
        double pos = 0.0, neg = 0.0;
        const double w = 1.0 / static_cast<double>(members.size());
        for (std::size_t j : members) {
            if (pm.at(j, i) > 0)
                pos += w;
            else
                neg += w;
        }
        const int vote = vote_from_sum(pos - neg);
        err += err01(vote * pm.labels[i]);
    }
    return err / static_cast<double>(pm.n_instances);
}

}  // namespace

PruneResult prune_epbd(const Ensemble& e, const Dataset& d, const PruneConfig& cfg) {
    PruneContext ctx = make_context(e, d, cfg);
    const double noise_scale = 1.0 - 2.0 * cfg.epsilon;
    const auto acc = member_accuracies(ctx.pm);

    std::vector<std::size_t> remaining(ctx.size);
    std::iota(remaining.begin(), remaining.end(), 0);
    std::vector<std::size_t> kept;
    std::vector<PruneTraceStep> trace;
    std::string note;

    while (kept.size() < ctx.cap && !remaining.empty()) {
        // the margin scan runs over the sub-ensemble built so far; the full
        // remaining pool stands in before anything is selected
        const std::vector<std::size_t>& scan_set = kept.empty() ? remaining : kept;
        std::size_t x_star = 0;
        double best_value = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < ctx.pm.n_instances; ++i) {
            const double v = scan_value(ctx.pm, scan_set, i, noise_scale);
            if (v < best_value) {
                best_value = v;
                x_star = i;
            }
        }

        std::size_t chosen = ctx.size;
        double chosen_score = -std::numeric_limits<double>::infinity();
        std::vector<std::size_t> candidate_set(kept);
        candidate_set.push_back(0);  // slot for the candidate under scoring
        for (std::size_t j : remaining) {
            if (ctx.pm.at(j, x_star) != ctx.pm.labels[x_star]) continue;
            candidate_set.back() = j;
            const double score = acc[j] + cfg.beta * div_at(ctx.pm, candidate_set, x_star);
            if (score > chosen_score) {
                chosen_score = score;
                chosen = j;
            }
        }
        if (chosen == ctx.size) {
            note = "terminated early at |H| = " + std::to_string(kept.size()) +
                   ": every remaining classifier misclassifies instance " +
                   std::to_string(x_star);
            break;
        }

        trace.push_back({kept.size(), x_star, chosen, chosen_score});
        kept.push_back(chosen);
        remaining.erase(std::find(remaining.begin(), remaining.end(), chosen));
    }

    if (kept.empty())
        throw NoSelectionError(
            "EPBD selected no classifier: every member misclassifies the minimum-margin "
            "instance");
    return finish(ctx, std::move(kept), std::move(trace), std::move(note));
}

PruneResult prune_es(const Ensemble& e, const Dataset& d, const PruneConfig& cfg) {
    PruneContext ctx = make_context(e, d, cfg);
    std::vector<std::size_t> kept(ctx.cap);
    std::iota(kept.begin(), kept.end(), 0);
    return finish(ctx, std::move(kept));
}

PruneResult prune_kp(const Ensemble& e, const Dataset& d, const PruneConfig& cfg) {
    PruneContext ctx = make_context(e, d, cfg);
    const std::size_t k = ctx.size;

    std::vector<double> kappa(k * k, 1.0);
    for (std::size_t a = 0; a < k; ++a) {
        std::span<const std::int8_t> pa{ctx.pm.values.data() + a * ctx.pm.n_instances,
                                        ctx.pm.n_instances};
        for (std::size_t b = a + 1; b < k; ++b) {
            std::span<const std::int8_t> pb{ctx.pm.values.data() + b * ctx.pm.n_instances,
                                            ctx.pm.n_instances};
            kappa[a * k + b] = kappa[b * k + a] = pairwise_kappa(pa, pb);
        }
    }

    std::vector<std::size_t> kept;
    std::vector<bool> taken(k, false);
    if (ctx.cap == 1) {
        kept.push_back(0);
        taken[0] = true;
    } else {
        std::size_t bi = 0, bj = 1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = a + 1; b < k; ++b)
                if (kappa[a * k + b] < best) {
                    best = kappa[a * k + b];
                    bi = a;
                    bj = b;
                }
        kept = {bi, bj};
        taken[bi] = taken[bj] = true;
    }

    while (kept.size() < ctx.cap) {
        std::size_t chosen = k;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j) {
            if (taken[j]) continue;
            double mean_kappa = 0.0;
            for (std::size_t h : kept) mean_kappa += kappa[j * k + h];
            mean_kappa /= static_cast<double>(kept.size());
            if (mean_kappa < best) {
                best = mean_kappa;
                chosen = j;
            }
        }
        kept.push_back(chosen);
        taken[chosen] = true;
    }
    return finish(ctx, std::move(kept));
}

PruneResult prune_kl(const Ensemble& e, const Dataset& d, const PruneConfig& cfg) {
    PruneContext ctx = make_context(e, d, cfg);
    const std::size_t k = ctx.size;
    const double n = static_cast<double>(ctx.pm.n_instances);

    // add-1 smoothed output distribution over {-1, +1} per member
    std::vector<double> p_pos(k);
    for (std::size_t j = 0; j < k; ++j) {
        double pos = 0.0;
        for (std::size_t i = 0; i < ctx.pm.n_instances; ++i)
            if (ctx.pm.at(j, i) > 0) pos += 1.0;
        p_pos[j] = (pos + 1.0) / (n + 2.0);
    }
    auto sym_kl = [&](std::size_t a, std::size_t b) {
        const double pa = p_pos[a], pb = p_pos[b];
        const double qa = 1.0 - pa, qb = 1.0 - pb;
        return pa * std::log(pa / pb) + qa * std::log(qa / qb) + pb * std::log(pb / pa) +
               qb * std::log(qb / qa);
    };

    std::vector<std::size_t> kept;
    std::vector<bool> taken(k, false);
    if (ctx.cap == 1) {
        kept.push_back(0);
        taken[0] = true;
    } else {
        std::size_t bi = 0, bj = 1;
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = a + 1; b < k; ++b)
                if (sym_kl(a, b) > best) {
                    best = sym_kl(a, b);
                    bi = a;
                    bj = b;
                }
        kept = {bi, bj};
        taken[bi] = taken[bj] = true;
    }
    while (kept.size() < ctx.cap) {
        std::size_t chosen = k;
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j) {
            if (taken[j]) continue;
            double total = 0.0;
            for (std::size_t h : kept) total += sym_kl(j, h);
            if (total > best) {
                best = total;
                chosen = j;
            }
        }
        kept.push_back(chosen);
        taken[chosen] = true;
    }
    return finish(ctx, std::move(kept));
}

PruneResult prune_oo(const Ensemble& e, const Dataset& d, const PruneConfig& cfg) {
    PruneContext ctx = make_context(e, d, cfg);
    const std::size_t k = ctx.size;
    const std::size_t n = ctx.pm.n_instances;

    // signature of member j: per-instance margins in {-1,+1}
    std::vector<double> avg(n, 0.0);
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < n; ++i)
            avg[i] += margin_individual(ctx.pm.at(j, i), ctx.pm.labels[i]) /
                      static_cast<double>(k);

    double avg_norm_sq = 0.0, dot_ones_avg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        avg_norm_sq += avg[i] * avg[i];
        dot_ones_avg += avg[i];
    }

    std::vector<double> ref(n, 1.0);
    if (avg_norm_sq > 0.0) {
        const double coeff = dot_ones_avg / avg_norm_sq;
        for (std::size_t i = 0; i < n; ++i) ref[i] -= coeff * avg[i];
    }
    double ref_norm_sq = 0.0;
    for (double v : ref) ref_norm_sq += v * v;

    if (ref_norm_sq < 1e-12) {
        PruneResult r = prune_es(e, d, cfg);
        r.note = "reference direction degenerate; fell back to training order";
        return r;
    }

    std::vector<std::pair<double, std::size_t>> projections;  // (-dot, index) for stable sort
    for (std::size_t j = 0; j < k; ++j) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            dot += margin_individual(ctx.pm.at(j, i), ctx.pm.labels[i]) * ref[i];
        if (dot > 0.0) projections.emplace_back(-dot, j);
    }
    std::sort(projections.begin(), projections.end());

    std::vector<std::size_t> kept;
    for (const auto& [neg_dot, j] : projections) {
        if (kept.size() == ctx.cap) break;
        kept.push_back(j);
    }
    if (kept.empty()) {
        PruneResult r = prune_es(e, d, cfg);
        r.note = "no member projects onto the reference direction; fell back to training order";
        return r;
    }
    return finish(ctx, std::move(kept));
}

PruneResult prune_drep(const Ensemble& e, const Dataset& d, const PruneConfig& cfg) {
    PruneContext ctx = make_context(e, d, cfg);
    const std::size_t k = ctx.size;
    const std::size_t n = ctx.pm.n_instances;
    const auto acc = member_accuracies(ctx.pm);

    std::size_t seed_member = 0;
    for (std::size_t j = 1; j < k; ++j)
        if (acc[j] > acc[seed_member]) seed_member = j;

    std::vector<std::size_t> kept{seed_member};
    std::vector<bool> taken(k, false);
    taken[seed_member] = true;
    double current_error = subset_error(ctx.pm, kept);

    while (kept.size() < ctx.cap) {
        // current vote vector of the selection
        std::vector<int> vote(n);
        for (std::size_t i = 0; i < n; ++i) {
            double pos = 0.0, neg = 0.0;
            const double w = 1.0 / static_cast<double>(kept.size());
            for (std::size_t j : kept) {
                if (ctx.pm.at(j, i) > 0)
                    pos += w;
                else
                    neg += w;
            }
            vote[i] = vote_from_sum(pos - neg);
        }

        std::vector<std::pair<double, std::size_t>> by_agreement;
        for (std::size_t j = 0; j < k; ++j) {
            if (taken[j]) continue;
            double agreement = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (vote[i] == 0)
                    agreement += 0.5;
                else if (ctx.pm.at(j, i) == vote[i])
                    agreement += 1.0;
            }
            by_agreement.emplace_back(agreement, j);
        }
        if (by_agreement.empty()) break;
        std::stable_sort(by_agreement.begin(), by_agreement.end(),
                         [](const auto& a, const auto& b) {
                             if (a.first != b.first) return a.first < b.first;
                             return a.second < b.second;
                         });

        const std::size_t candidates = std::min(
            by_agreement.size(),
            static_cast<std::size_t>(
                std::ceil(cfg.rho * static_cast<double>(by_agreement.size()))));

        std::size_t chosen = k;
        double best_error = std::numeric_limits<double>::infinity();
        std::vector<std::size_t> trial(kept);
        trial.push_back(0);
        for (std::size_t c = 0; c < candidates; ++c) {
            trial.back() = by_agreement[c].second;
            const double err = subset_error(ctx.pm, trial);
            if (err < best_error) {
                best_error = err;
                chosen = by_agreement[c].second;
            }
        }
        if (chosen == k || best_error >= current_error) break;  // no improvement
        kept.push_back(chosen);
        taken[chosen] = true;
        current_error = best_error;
    }
    return finish(ctx, std::move(kept));
}

PruneResult prune(const Ensemble& e, const Dataset& d, const PruneConfig& cfg) {
    if (cfg.method == PruneMethod::none) {
        e.check();
        PruneResult r;
        r.kept_indices.resize(e.members.size());
        std::iota(r.kept_indices.begin(), r.kept_indices.end(), 0);
        r.sub_ensemble = e;  // untouched, original weights
        return r;
    }
    switch (cfg.method) {
        case PruneMethod::es: return prune_es(e, d, cfg);
        case PruneMethod::kl: return prune_kl(e, d, cfg);
        case PruneMethod::kp: return prune_kp(e, d, cfg);
        case PruneMethod::oo: return prune_oo(e, d, cfg);
        case PruneMethod::drep: return prune_drep(e, d, cfg);
        case PruneMethod::epbd: return prune_epbd(e, d, cfg);
        default: throw DataError("unknown pruning method");
    }
}

std::string prune_result_json(const PruneResult& r, const PruneConfig& cfg) {
    nlohmann::ordered_json j;
    j["method"] = to_string(cfg.method);
    j["alpha"] = cfg.alpha;
    j["beta"] = cfg.beta;
    j["kept"] = r.kept_indices;
    j["trace"] = nlohmann::ordered_json::array();
    for (const auto& step : r.trace) {
        nlohmann::ordered_json s;
        s["iter"] = step.iteration;
        s["instance"] = step.instance;
        s["classifier"] = step.classifier;
        s["score"] = step.score;
        j["trace"].push_back(s);
    }
    if (!r.note.empty()) j["note"] = r.note;
    return j.dump();
}

}  // namespace divprune
