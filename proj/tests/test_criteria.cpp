#include <doctest.h>

#include <cmath>
#include <vector>

#include "blockcd/criteria.hpp"
#include "blockcd/graph.hpp"
#include "blockcd/rng.hpp"

using namespace blockcd;

namespace {

Graph random_graph(RandomSource& rng, int n, double p) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            if (rng.bernoulli(p)) edges.emplace_back(i, j);
    return Graph::from_edges(n, edges);
}

Labeling random_labeling(RandomSource& rng, int n, int k) {
    Labeling e;
    e.num_communities = k;
    e.labels.resize(n);
    for (int i = 0; i < n; ++i) e.labels[i] = rng.uniform_int(k);
    return e;
}

}  // namespace

TEST_CASE("criterion names round-trip") {
    for (Criterion c : kAllCriteria) CHECK(parse_criterion(criterion_name(c)) == c);
    CHECK_THROWS(parse_criterion("nope"));
    CHECK(is_modularity(Criterion::erm));
    CHECK(is_modularity(Criterion::ngm));
    CHECK(!is_modularity(Criterion::bm));
    CHECK(!is_modularity(Criterion::dcbm));
}

TEST_CASE("single community scores zero for modularities") {
    RandomSource rng(3);
    Graph g = random_graph(rng, 20, 0.3);
    Labeling e{std::vector<int>(20, 0), 1};
    BlockStats s = block_stats(g, e);
    CHECK(evaluate(Criterion::erm, s) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(evaluate(Criterion::ngm, s) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("labeled path reference values") {
    Graph g = Graph::from_edges(3, {{0, 1}, {1, 2}});
    Labeling e{{0, 0, 1}, 2};
    BlockStats s = block_stats(g, e);
    // O = [[2,1],[1,0]], O_k = (3,1), n_k = (2,1), L = 4, n = 3.
    CHECK(evaluate(Criterion::erm, s) ==
          doctest::Approx(2.0 - (4.0 + 1.0) / 9.0 * 4.0).epsilon(1e-12));
    CHECK(evaluate(Criterion::ngm, s) ==
          doctest::Approx(-0.5).epsilon(1e-12));  // 2 - 9/4 - 1/4
    const double bm = 2.0 * std::log(2.0 / 4.0) + 2.0 * std::log(1.0 / 2.0);
    CHECK(evaluate(Criterion::bm, s) == doctest::Approx(bm).epsilon(1e-12));
    const double dcbm = 2.0 * std::log(2.0 / 9.0) + 2.0 * std::log(1.0 / 3.0);
    CHECK(evaluate(Criterion::dcbm, s) == doctest::Approx(-5.2053793708887675).epsilon(1e-12));
    CHECK(evaluate(Criterion::dcbm, s) == doctest::Approx(dcbm).epsilon(1e-12));
}

TEST_CASE("empty cells contribute zero to likelihoods") {
    // Two disjoint edges, separate communities: off-diagonal cells are 0.
    Graph g = Graph::from_edges(4, {{0, 1}, {2, 3}});
    Labeling e{{0, 0, 1, 1}, 2};
    BlockStats s = block_stats(g, e);
    CHECK(std::isfinite(evaluate(Criterion::bm, s)));
    CHECK(evaluate(Criterion::bm, s) ==
          doctest::Approx(4.0 * std::log(2.0 / 4.0)).epsilon(1e-12));
    CHECK(evaluate(Criterion::dcbm, s) ==
          doctest::Approx(4.0 * std::log(2.0 / 4.0)).epsilon(1e-12));
}

TEST_CASE("edgeless graph: modularities zero, likelihoods undefined") {
    Graph g = Graph::from_edges(5, {});
    Labeling e{{0, 1, 0, 1, 0}, 2};
    BlockStats s = block_stats(g, e);
    CHECK(evaluate(Criterion::erm, s) == doctest::Approx(0.0));
    CHECK_THROWS(evaluate(Criterion::ngm, s));
    CHECK_THROWS(evaluate(Criterion::dcbm, s));
    CHECK(evaluate(Criterion::bm, s) == doctest::Approx(0.0));
}

TEST_CASE("degree correction is the O_k/L substitution") {
    RandomSource rng(17);
    Graph g = random_graph(rng, 40, 0.15);
    Labeling e = random_labeling(rng, 40, 3);
    BlockStats s = block_stats(g, e);
    BlockStats sub = s;
    sub.sizes = s.degree_sums;
    sub.num_nodes = s.total_degree;
    CHECK(evaluate(Criterion::dcbm, s) ==
          doctest::Approx(evaluate(Criterion::bm, sub)).epsilon(1e-12));
    CHECK(evaluate(Criterion::ngm, s) ==
          doctest::Approx(evaluate(Criterion::erm, sub)).epsilon(1e-12));
}

TEST_CASE("modularities depend only on diagonal, margins, totals") {
    // Same O_kk, O_k, n_k, L but different off-diagonal placement.
    BlockStats a;
    a.num_communities = 3;
    a.num_nodes = 9;
    a.sizes = {3, 3, 3};
    a.edges = {4, 2, 0, 2, 4, 2, 0, 2, 4};
    BlockStats b = a;
    b.edges = {4, 0, 2, 4, 4, 0, 2, 0, 4};  // same diagonal and row sums
    for (BlockStats* s : {&a, &b}) {
        s->degree_sums.assign(3, 0);
        s->total_degree = 0;
        for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) s->degree_sums[static_cast<std::size_t>(k)] += s->o(k, l);
        for (auto d : s->degree_sums) s->total_degree += d;
    }
    CHECK(evaluate(Criterion::erm, a) == doctest::Approx(evaluate(Criterion::erm, b)));
    CHECK(evaluate(Criterion::ngm, a) == doctest::Approx(evaluate(Criterion::ngm, b)));
    CHECK(evaluate(Criterion::bm, a) != doctest::Approx(evaluate(Criterion::bm, b)));
}

TEST_CASE("isolated node switch between equal communities") {
    // erm change for moving an isolated node between size-s communities is -2L/n^2.
    Graph g = Graph::from_edges(7, {{0, 1}, {1, 2}, {3, 4}, {4, 5}});
    Labeling e{{0, 0, 0, 1, 1, 1, 1}, 2};  // node 6 isolated, in community 1
    BlockStats s = block_stats(g, e);
    StatsDelta d = apply_switch(s, g, e, 6, 0);
    const double L = static_cast<double>(s.total_degree);
    const double n = static_cast<double>(s.num_nodes);
    // Moving 6 to community 0 takes sizes (3,4) -> (4,3): diff of sum of squares
    // is (16+9)-(9+16)=0, so here craft the symmetric case explicitly.
    CHECK(evaluate_delta(Criterion::erm, s, d) == doctest::Approx(0.0).epsilon(1e-12));
    Labeling e2{{0, 0, 0, 1, 1, 1, 0}, 2};  // sizes (4,3), move 6: (3,4)
    BlockStats s2 = block_stats(g, e2);
    StatsDelta d2 = apply_switch(s2, g, e2, 6, 1);
    CHECK(evaluate_delta(Criterion::erm, s2, d2) == doctest::Approx(0.0).epsilon(1e-12));
    // Equal sizes s,s -> s-1,s+1 costs -2L/n^2 relative to... check directly:
    Graph g3 = Graph::from_edges(6, {{0, 1}, {3, 4}});
    Labeling e3{{0, 0, 0, 1, 1, 1}, 2};
    BlockStats s3 = block_stats(g3, e3);
    StatsDelta d3 = apply_switch(s3, g3, e3, 2, 1);  // node 2 isolated
    const double L3 = static_cast<double>(s3.total_degree);
    const double n3 = static_cast<double>(s3.num_nodes);
    CHECK(evaluate_delta(Criterion::erm, s3, d3) ==
          doctest::Approx(-2.0 * L3 / (n3 * n3)).epsilon(1e-12));
    (void)L;
    (void)n;
}

TEST_CASE("property: delta matches full recomputation") {
    RandomSource rng(99);
    for (int trial = 0; trial < 25; ++trial) {
        int n = 3 + rng.uniform_int(40);
        int k = 2 + rng.uniform_int(4);
        Graph g = random_graph(rng, n, 0.2);
        if (g.total_degree() == 0) continue;
        Labeling e = random_labeling(rng, n, k);
        BlockStats s = block_stats(g, e);
        for (int step = 0; step < 25; ++step) {
            int node = rng.uniform_int(n);
            int to = rng.uniform_int(k);
            StatsDelta d = apply_switch(s, g, e, node, to);
            for (Criterion c : kAllCriteria) {
                double before = evaluate(c, s);
                double delta = evaluate_delta(c, s, d);
                double gain = switch_gain(c, s, d.neighbor_counts, d.self_loop,
                                          d.from_label, d.to_label);
                BlockStats moved = s;
                apply_delta(moved, d);
                double after = evaluate(c, moved);
                REQUIRE(delta == doctest::Approx(after - before).epsilon(1e-9));
                REQUIRE(gain == doctest::Approx(delta).epsilon(1e-9));
            }
            apply_delta(s, d);
            e.labels[node] = to;
        }
    }
}

TEST_CASE("property: label permutation invariance") {
    RandomSource rng(42);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 5 + rng.uniform_int(30);
        Graph g = random_graph(rng, n, 0.25);
        if (g.total_degree() == 0) continue;
        Labeling e = random_labeling(rng, n, 4);
        std::vector<int> perm = {0, 1, 2, 3};
        rng.shuffle(perm);
        Labeling pe = e;
        for (auto& l : pe.labels) l = perm[static_cast<std::size_t>(l)];
        BlockStats s = block_stats(g, e), ps = block_stats(g, pe);
        for (Criterion c : kAllCriteria)
            CHECK(evaluate(c, s) == doctest::Approx(evaluate(c, ps)).epsilon(1e-12));
    }
}
