#include <doctest.h>

#include <cmath>
#include <vector>

#include "blockcd/eval.hpp"
#include "blockcd/rng.hpp"

using namespace blockcd;

namespace {

Labeling make(std::vector<int> l, int k) { return Labeling{std::move(l), k}; }

Labeling random_labeling(RandomSource& rng, int n, int k) {
    Labeling e;
    e.num_communities = k;
    e.labels.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) e.labels[static_cast<std::size_t>(i)] = rng.uniform_int(k);
    return e;
}

}  // namespace

TEST_CASE("contingency table") {
    auto t = ContingencyTable::build(make({0, 0, 1, 1}, 2), make({0, 1, 1, 1}, 2));
    CHECK(t.n == 4);
    CHECK(t.counts == std::vector<std::int64_t>{1, 1, 0, 2});
    CHECK(t.row_sums == std::vector<std::int64_t>{2, 2});
    CHECK(t.col_sums == std::vector<std::int64_t>{1, 3});
}

TEST_CASE("ari: identity and permutation give 1") {
    Labeling e = make({0, 1, 1, 0, 2, 2}, 3);
    CHECK(adjusted_rand(e, e) == doctest::Approx(1.0));
    Labeling p = make({2, 0, 0, 2, 1, 1}, 3);
    CHECK(adjusted_rand(e, p) == doctest::Approx(1.0));
    CHECK(nmi(e, p) == doctest::Approx(1.0));
}

TEST_CASE("ari: hand-checked small example") {
    // Partitions {01|23} vs {01|2|3}: pairs agreeing in both = 1 (the 01 pair).
    Labeling a = make({0, 0, 1, 1}, 2);
    Labeling b = make({0, 0, 1, 2}, 3);
    // sum_ij C(n_ij,2)=1; sum_i C(a_i,2)=2; sum_j C(b_j,2)=1; C(4,2)=6.
    // ari = (1 - 2*1/6) / (0.5*(2+1) - 2*1/6) = (2/3)/(7/6) = 4/7.
    CHECK(adjusted_rand(a, b) == doctest::Approx(4.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("ari: degenerate conventions") {
    // Both trivial (single block): 0/0 -> 1.
    CHECK(adjusted_rand(make({0, 0, 0}, 1), make({0, 0, 0}, 1)) == doctest::Approx(1.0));
    // Both all-singletons: 0/0 -> 1.
    CHECK(adjusted_rand(make({0, 1, 2}, 3), make({2, 1, 0}, 3)) == doctest::Approx(1.0));
    // One trivial, one not: denominator nonzero, index well defined.
    CHECK(adjusted_rand(make({0, 0, 0, 0}, 1), make({0, 0, 1, 1}, 2)) ==
          doctest::Approx(0.0));
}

TEST_CASE("nmi: conventions and hand value") {
    CHECK(nmi(make({0, 0, 0}, 1), make({0, 0, 0}, 1)) == doctest::Approx(1.0));
    CHECK(nmi(make({0, 0, 0}, 1), make({0, 1, 0}, 2)) == doctest::Approx(0.0));
    // Independent-looking split: I = 0 for the 2x2 uniform table.
    Labeling a = make({0, 0, 1, 1}, 2);
    Labeling b = make({0, 1, 0, 1}, 2);
    CHECK(nmi(a, b) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(nmi(a, a) == doctest::Approx(1.0));
}

TEST_CASE("properties: symmetry and permutation invariance") {
    RandomSource rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 5 + rng.uniform_int(60);
        Labeling a = random_labeling(rng, n, 2 + rng.uniform_int(3));
        Labeling b = random_labeling(rng, n, 2 + rng.uniform_int(3));
        CHECK(adjusted_rand(a, b) == doctest::Approx(adjusted_rand(b, a)).epsilon(1e-12));
        CHECK(nmi(a, b) == doctest::Approx(nmi(b, a)).epsilon(1e-12));
        CHECK(adjusted_rand(a, b) <= 1.0 + 1e-12);
        CHECK(nmi(a, b) >= -1e-12);
        CHECK(nmi(a, b) <= 1.0 + 1e-12);
        std::vector<int> perm(static_cast<std::size_t>(a.num_communities));
        for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
        rng.shuffle(perm);
        Labeling pa = a;
        for (auto& l : pa.labels) l = perm[static_cast<std::size_t>(l)];
        CHECK(adjusted_rand(pa, b) == doctest::Approx(adjusted_rand(a, b)).epsilon(1e-12));
        CHECK(nmi(pa, b) == doctest::Approx(nmi(a, b)).epsilon(1e-12));
    }
}

TEST_CASE("ari: independent partitions concentrate near zero") {
    RandomSource rng(77);
    const int n = 1000;
    double sum = 0.0;
    const int reps = 200;
    for (int r = 0; r < reps; ++r) {
        Labeling a = random_labeling(rng, n, 3);
        Labeling b = random_labeling(rng, n, 3);
        sum += adjusted_rand(a, b);
    }
    CHECK(std::abs(sum / reps) <= 0.02);
}
