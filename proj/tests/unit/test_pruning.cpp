#include "doctest.h"

#include <algorithm>
#include <set>

#include "divprune/errors.hpp"
#include "divprune/pruning.hpp"
#include "divprune/rng.hpp"
#include "divprune/synthetic.hpp"

#include "../support/oracles.hpp"

using namespace divprune;

namespace {

Ensemble stumps(std::vector<Stump> models) {
    Ensemble e;
    for (std::size_t j = 0; j < models.size(); ++j)
        e.members.push_back(Classifier(models[j], "s" + std::to_string(j)));
    e.weights.assign(models.size(), 1.0 / static_cast<double>(models.size()));
    return e;
}

Dataset grid_1d(std::vector<double> xs, std::vector<int> ys) {
    Dataset d;
    d.n_features = 1;
    d.name = "grid";
    d.features = std::move(xs);
    for (int y : ys) d.labels.push_back(static_cast<std::int8_t>(y));
    return d;
}

PruneConfig config(PruneMethod m, double alpha = 0.6, double beta = 1.0) {
    PruneConfig cfg;
    cfg.method = m;
    cfg.alpha = alpha;
    cfg.beta = beta;
    return cfg;
}

void check_result_invariants(const PruneResult& r, std::size_t size, const PruneConfig& cfg) {
    std::set<std::size_t> seen(r.kept_indices.begin(), r.kept_indices.end());
    CHECK(seen.size() == r.kept_indices.size());
    for (std::size_t j : r.kept_indices) CHECK(j < size);
    CHECK(r.kept_indices.size() <= cfg.cap(size));
    CHECK(!r.kept_indices.empty());
    double total = 0.0;
    for (double w : r.sub_ensemble.weights) total += w;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

}  // namespace

TEST_CASE("epbd: identical classifiers come out in index order") {
    const Dataset d = grid_1d({1, 2, 3, 4}, {-1, -1, 1, 1});
    const Ensemble e = stumps({{0, 2.5, 1}, {0, 2.5, 1}, {0, 2.5, 1}, {0, 2.5, 1}, {0, 2.5, 1}});
    const PruneResult r = prune_epbd(e, d, config(PruneMethod::epbd));
    CHECK(r.kept_indices == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("epbd: the single correct classifier is chosen first, any beta") {
    // members 0 and 2 misclassify the hardest point (x=4, label +1)
    const Dataset d = grid_1d({1, 4}, {-1, 1});
    const Ensemble e = stumps({{0, 5.0, 1}, {0, 2.5, 1}, {0, 5.0, 1}});
    for (double beta : {0.0, 1.0, 10.0}) {
        const PruneResult r = prune_epbd(e, d, config(PruneMethod::epbd, 1.0, beta));
        REQUIRE(!r.trace.empty());
        CHECK(r.trace[0].classifier == 1);
    }
}

TEST_CASE("epbd: every member wrong on the argmin instance is a no-selection error") {
    const Dataset d = grid_1d({1, 4}, {1, 1});
    // both members predict -1 at x=1 (threshold above it); instance 0 has
    // mean margin -1 and nobody classifies it correctly
    const Ensemble e = stumps({{0, 2.0, 1}, {0, 3.0, 1}});
    CHECK_THROWS_AS(prune_epbd(e, d, config(PruneMethod::epbd, 1.0)), NoSelectionError);
}

TEST_CASE("epbd: alpha 1 on a coverable pool keeps the whole ensemble") {
    const Dataset d = make_two_gaussian(60, 2, 8.0, 3);
    const Ensemble e = train_bagging(d, 7, LearnerSpec{}, 5);
    const PruneResult r = prune_epbd(e, d, config(PruneMethod::epbd, 1.0));
    CHECK(r.kept_indices.size() == 7);
}

TEST_CASE("epbd: deterministic and trace-replayable on bagged ensembles") {
    const auto suite = benchmark_suite(11);
    const Dataset& d = suite[1];
    LearnerSpec trees{LearnerSpec::Kind::tree, 4};
    const Ensemble e = train_bagging(d, 21, trees, 23);
    const PruneConfig cfg = config(PruneMethod::epbd);

    const PruneResult a = prune_epbd(e, d, cfg);
    const PruneResult b = prune_epbd(e, d, cfg);
    CHECK(a.kept_indices == b.kept_indices);
    REQUIRE(a.trace.size() == a.kept_indices.size());

    const PredictionMatrix pm = prediction_matrix(e, d);
    CHECK(oracle::replay_epbd_trace(pm, a, cfg.alpha, cfg.beta, cfg.epsilon));
    check_result_invariants(a, 21, cfg);
}

TEST_CASE("es keeps the training-order prefix") {
    const Dataset d = make_two_gaussian(30, 2, 2.0, 3);
    const Ensemble e = train_bagging(d, 10, LearnerSpec{}, 5);
    CHECK(prune_es(e, d, config(PruneMethod::es, 0.5)).kept_indices ==
          std::vector<std::size_t>{0, 1, 2, 3, 4});
    CHECK(prune_es(e, d, config(PruneMethod::es, 1.0)).kept_indices.size() == 10);
    CHECK(prune_es(e, d, config(PruneMethod::es, 0.01)).kept_indices ==
          std::vector<std::size_t>{0});
}

TEST_CASE("pairwise kappa: identical vectors give 1, degenerate tables give 1") {
    std::vector<std::int8_t> a{1, -1, 1, 1};
    CHECK(pairwise_kappa(a, a) == doctest::Approx(1.0));
    std::vector<std::int8_t> all_pos{1, 1, 1, 1};
    CHECK(pairwise_kappa(all_pos, all_pos) == doctest::Approx(1.0));
    std::vector<std::int8_t> flipped{-1, 1, -1, -1};
    CHECK(pairwise_kappa(a, flipped) < 0.0);
}

TEST_CASE("kp: the complementary pair beats two identical members") {
    const Dataset d = grid_1d({1, 2, 3, 4}, {-1, -1, 1, 1});
    // members 0 and 1 identical, member 2 complementary to them
    const Ensemble e = stumps({{0, 2.5, 1}, {0, 2.5, 1}, {0, 2.5, -1}});
    const PruneResult r = prune_kp(e, d, config(PruneMethod::kp, 0.6));
    REQUIRE(r.kept_indices.size() == 2);
    // brute force over pairs: (0,2) and (1,2) tie at the minimum; the scan
    // order keeps (0,2)
    CHECK(r.kept_indices == std::vector<std::size_t>{0, 2});
}

TEST_CASE("kp: identical members fall back to index order, alpha 1 keeps all") {
    const Dataset d = grid_1d({1, 2, 3, 4}, {-1, -1, 1, 1});
    const Ensemble e = stumps({{0, 2.5, 1}, {0, 2.5, 1}, {0, 2.5, 1}, {0, 2.5, 1}});
    const PruneResult half = prune_kp(e, d, config(PruneMethod::kp, 0.5));
    CHECK(half.kept_indices == std::vector<std::size_t>{0, 1});
    const PruneResult all = prune_kp(e, d, config(PruneMethod::kp, 1.0));
    CHECK(all.kept_indices.size() == 4);
}

TEST_CASE("kl: constant +1 and constant -1 members are the extreme pair") {
    const Dataset d = grid_1d({1, 2, 3, 4}, {-1, -1, 1, 1});
    // member 0: constant +1; member 1: constant -1; members 2,3: mixed
    const Ensemble e = stumps({{0, 0.0, 1}, {0, 0.0, -1}, {0, 2.5, 1}, {0, 1.5, 1}});
    const PruneResult r = prune_kl(e, d, config(PruneMethod::kl, 0.5));
    REQUIRE(r.kept_indices.size() == 2);
    CHECK(std::set<std::size_t>(r.kept_indices.begin(), r.kept_indices.end()) ==
          std::set<std::size_t>{0, 1});
}

TEST_CASE("kl: identical members and alpha 1") {
    const Dataset d = grid_1d({1, 2, 3, 4}, {-1, -1, 1, 1});
    const Ensemble e = stumps({{0, 2.5, 1}, {0, 2.5, 1}, {0, 2.5, 1}});
    const PruneResult r = prune_kl(e, d, config(PruneMethod::kl, 1.0));
    CHECK(r.kept_indices.size() == 3);
    CHECK(r.kept_indices == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("oo: the everywhere-correct member is kept first") {
    const Dataset d = grid_1d({1, 2, 3, 4}, {-1, -1, 1, 1});
    const Ensemble e = stumps({{0, 3.5, 1}, {0, 2.5, 1}, {0, 1.5, 1}});
    const PruneResult r = prune_oo(e, d, config(PruneMethod::oo, 0.6));
    REQUIRE(!r.kept_indices.empty());
    CHECK(r.kept_indices[0] == 1);  // the zero-error member
    CHECK(r.kept_indices.size() <= 2);
}

TEST_CASE("oo: identical members trigger the training-order fallback") {
    const Dataset d = grid_1d({1, 2, 3, 4}, {-1, -1, 1, 1});
    const Ensemble e = stumps({{0, 2.5, 1}, {0, 2.5, 1}, {0, 2.5, 1}});
    const PruneResult r = prune_oo(e, d, config(PruneMethod::oo, 0.6));
    CHECK(r.kept_indices == std::vector<std::size_t>{0, 1});
    CHECK(!r.note.empty());
}

TEST_CASE("drep: a perfect member stops the selection immediately") {
    const Dataset d = grid_1d({1, 2, 3, 4}, {-1, -1, 1, 1});
    const Ensemble e = stumps({{0, 2.5, 1}, {0, 1.5, 1}, {0, 3.5, 1}});
    const PruneResult r = prune_drep(e, d, config(PruneMethod::drep, 1.0));
    CHECK(r.kept_indices == std::vector<std::size_t>{0});
}

TEST_CASE("drep: identical members stop at one") {
    const Dataset d = grid_1d({1, 2, 3, 4}, {-1, 1, -1, 1});
    const Ensemble e = stumps({{0, 0.5, 1}, {0, 0.5, 1}, {0, 0.5, 1}});
    const PruneResult r = prune_drep(e, d, config(PruneMethod::drep, 1.0));
    CHECK(r.kept_indices.size() == 1);
}

TEST_CASE("method none returns the untouched ensemble") {
    const Dataset d = make_two_gaussian(40, 2, 1.0, 3);
    const Ensemble e = train_adaboost(d, 5, LearnerSpec{});
    const PruneResult r = prune(e, d, config(PruneMethod::none));
    CHECK(r.kept_indices.size() == e.members.size());
    CHECK(r.sub_ensemble.weights == e.weights);
}

TEST_CASE("every pruner respects the invariants on real ensembles") {
    const auto suite = benchmark_suite(3);
    const Dataset& d = suite[0];
    LearnerSpec trees{LearnerSpec::Kind::tree, 4};
    const Ensemble e = train_bagging(d, 15, trees, 9);
    for (PruneMethod m : {PruneMethod::es, PruneMethod::kl, PruneMethod::kp, PruneMethod::oo,
                          PruneMethod::drep, PruneMethod::epbd}) {
        const PruneConfig cfg = config(m);
        const PruneResult r = prune(e, d, cfg);
        INFO("method ", to_string(m));
        check_result_invariants(r, 15, cfg);
        const PruneResult again = prune(e, d, cfg);
        CHECK(r.kept_indices == again.kept_indices);
    }
}

TEST_CASE("prune result serializes with its trace") {
    const Dataset d = grid_1d({1, 2, 3, 4}, {-1, -1, 1, 1});
    const Ensemble e = stumps({{0, 2.5, 1}, {0, 1.5, 1}, {0, 3.5, 1}});
    const PruneConfig cfg = config(PruneMethod::epbd, 0.7, 2.0);
    const PruneResult r = prune_epbd(e, d, cfg);
    const std::string j = prune_result_json(r, cfg);
    CHECK(j.find("\"method\":\"epbd\"") != std::string::npos);
    CHECK(j.find("\"alpha\":0.7") != std::string::npos);
    CHECK(j.find("\"trace\"") != std::string::npos);
    CHECK(j.find("\"instance\"") != std::string::npos);
}

TEST_CASE("prune config validation") {
    CHECK_THROWS_AS(config(PruneMethod::es, 0.0).validate(10), DataError);
    CHECK_THROWS_AS(config(PruneMethod::es, 1.5).validate(10), DataError);
    PruneConfig bad_rho = config(PruneMethod::drep);
    bad_rho.rho = 1.0;
    CHECK_THROWS_AS(bad_rho.validate(10), DataError);
    CHECK(config(PruneMethod::es, 0.01).cap(10) == 1);
    CHECK(config(PruneMethod::es, 0.6).cap(11) == 7);
}
