#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "divprune/dataset.hpp"
#include "divprune/errors.hpp"
#include "divprune/synthetic.hpp"

using namespace divprune;

namespace {

struct TempCsv {
    std::string path;
    explicit TempCsv(const std::string& content) {
        static int counter = 0;
        path = "test_dataset_" + std::to_string(counter++) + ".csv";
        std::ofstream out(path);
        out << content;
    }
    ~TempCsv() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("load_csv maps positive_label to +1 and the other value to -1") {
    TempCsv csv("a,b,label\n1.0,2.0,yes\n3.5,4.0,no\n0.5,1.5,yes\n2.0,0.0,no\n");
    const Dataset d = load_csv(csv.path, "label", "yes");
    REQUIRE(d.n_instances() == 4);
    REQUIRE(d.n_features == 2);
    CHECK(d.labels[0] == 1);
    CHECK(d.labels[1] == -1);
    CHECK(d.labels[2] == 1);
    CHECK(d.labels[3] == -1);
    CHECK(d.features[0] == doctest::Approx(1.0));
    CHECK(d.features[3] == doctest::Approx(4.0));
}

TEST_CASE("load_csv accepts a numeric label column index") {
    TempCsv csv("x,y,cls\n0.1,0.2,1\n0.3,0.4,-1\n");
    const Dataset d = load_csv(csv.path, "2", "1");
    CHECK(d.labels[0] == 1);
    CHECK(d.labels[1] == -1);
}

TEST_CASE("load_csv rejects three distinct label values") {
    TempCsv csv("x,label\n1,a\n2,b\n3,c\n");
    CHECK_THROWS_WITH_AS(load_csv(csv.path, "label", "a"),
                         doctest::Contains("3 distinct label values"), DataError);
}

TEST_CASE("load_csv rejects a missing feature cell, naming the location") {
    TempCsv csv("x,y,label\n1,2,a\n1,,b\n");
    CHECK_THROWS_WITH_AS(load_csv(csv.path, "label", "a"), doctest::Contains(":3"), DataError);
}

TEST_CASE("load_csv rejects non-numeric features") {
    TempCsv csv("x,label\noops,a\n2,b\n");
    CHECK_THROWS_WITH_AS(load_csv(csv.path, "label", "a"), doctest::Contains("non-numeric"),
                         DataError);
}

TEST_CASE("load_csv requires the positive label to occur") {
    TempCsv csv("x,label\n1,a\n2,b\n");
    CHECK_THROWS_AS(load_csv(csv.path, "label", "z"), DataError);
}

TEST_CASE("save_csv round-trips through load_csv") {
    const Dataset d = make_two_gaussian(20, 3, 2.0, 5);
    TempCsv csv("");
    save_csv(d, csv.path);
    const Dataset back = load_csv(csv.path, "label", "1");
    REQUIRE(back.n_instances() == d.n_instances());
    REQUIRE(back.n_features == d.n_features);
    for (std::size_t i = 0; i < d.n_instances(); ++i) CHECK(back.labels[i] == d.labels[i]);
    for (std::size_t i = 0; i < d.features.size(); ++i)
        CHECK(back.features[i] == d.features[i]);
}

TEST_CASE("split_kfold: n=10 k=5 gives five folds of two") {
    const Dataset d = make_two_gaussian(10, 2, 1.0, 3);
    const FoldPlan plan = split_kfold(d, 5, 42);
    std::vector<int> counts(5, 0);
    for (int f : plan.assignments) counts[static_cast<std::size_t>(f)]++;
    for (int c : counts) CHECK(c == 2);
}

TEST_CASE("split_kfold: n=11 k=5 gives sizes {3,2,2,2,2}") {
    const Dataset d = make_two_gaussian(11, 2, 1.0, 3);
    const FoldPlan plan = split_kfold(d, 5, 42);
    std::vector<int> counts(5, 0);
    for (int f : plan.assignments) counts[static_cast<std::size_t>(f)]++;
    std::multiset<int> sizes(counts.begin(), counts.end());
    CHECK(sizes == std::multiset<int>{2, 2, 2, 2, 3});
}

TEST_CASE("split_kfold is deterministic and stratified") {
    const Dataset d = make_two_gaussian(101, 2, 1.0, 9);
    const FoldPlan a = split_kfold(d, 5, 7);
    const FoldPlan b = split_kfold(d, 5, 7);
    CHECK(a.assignments == b.assignments);

    // every index appears in exactly one fold (assignments are total)
    REQUIRE(a.assignments.size() == d.n_instances());
    for (int f : a.assignments) {
        CHECK(f >= 0);
        CHECK(f < 5);
    }

    // per-fold class counts stay within one of each other
    std::vector<int> pos(5, 0), neg(5, 0);
    for (std::size_t i = 0; i < d.n_instances(); ++i)
        (d.labels[i] > 0 ? pos : neg)[static_cast<std::size_t>(a.assignments[i])]++;
    for (int f = 0; f < 5; ++f) {
        for (int g = 0; g < 5; ++g) {
            CHECK(std::abs(pos[f] - pos[g]) <= 1);
            CHECK(std::abs(neg[f] - neg[g]) <= 1);
        }
    }
}

TEST_CASE("split_kfold rejects k beyond the instance count") {
    const Dataset d = make_two_gaussian(4, 2, 1.0, 3);
    CHECK_THROWS_AS(split_kfold(d, 5, 1), DataError);
}

TEST_CASE("bootstrap_sample basics") {
    const Dataset one = make_two_gaussian(2, 1, 1.0, 3).subset({0});
    CHECK(bootstrap_sample(one, 5) == std::vector<std::size_t>{0});

    const Dataset d = make_two_gaussian(50, 2, 1.0, 3);
    const auto a = bootstrap_sample(d, 11);
    const auto b = bootstrap_sample(d, 11);
    CHECK(a == b);
    REQUIRE(a.size() == 50);
    for (std::size_t idx : a) CHECK(idx < 50);
}

TEST_CASE("bootstrap distinct fraction approaches 1 - 1/e") {
    const Dataset d = make_two_gaussian(1000, 2, 1.0, 3);
    double total = 0.0;
    const int runs = 100;
    for (int s = 0; s < runs; ++s) {
        const auto idx = bootstrap_sample(d, static_cast<std::uint64_t>(s));
        std::set<std::size_t> distinct(idx.begin(), idx.end());
        total += static_cast<double>(distinct.size()) / 1000.0;
    }
    CHECK(total / runs == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(0.05));
    CHECK(std::fabs(total / runs - 0.632) < 0.03);
}

TEST_CASE("two-gaussian generator is deterministic and balanced") {
    const Dataset a = make_two_gaussian(100, 3, 1.5, 21);
    const Dataset b = make_two_gaussian(100, 3, 1.5, 21);
    CHECK(a.features == b.features);
    CHECK(a.labels == b.labels);
    int pos = 0;
    for (auto y : a.labels) pos += y > 0;
    CHECK(pos == 50);
}

TEST_CASE("benchmark suite datasets validate and differ") {
    const auto suite = benchmark_suite(7);
    REQUIRE(suite.size() >= 6);
    std::set<std::string> names;
    for (const auto& d : suite) {
        d.validate();
        CHECK(d.n_instances() >= 200);
        names.insert(d.name);
        bool pos = false, neg = false;
        for (auto y : d.labels) (y > 0 ? pos : neg) = true;
        CHECK(pos);
        CHECK(neg);
    }
    CHECK(names.size() == suite.size());
}
