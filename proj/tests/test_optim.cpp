#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "blockcd/eval.hpp"
#include "blockcd/models.hpp"
#include "blockcd/optim.hpp"
#include "blockcd/rng.hpp"

using namespace blockcd;

namespace {

Graph two_triangles() {
    return Graph::from_edges(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
}

Graph random_graph(RandomSource& rng, int n, double p) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            if (rng.bernoulli(p)) edges.emplace_back(i, j);
    return Graph::from_edges(n, edges);
}

// Exact maximum over all K^n labelings (tiny n only).
double exhaustive_max(const Graph& g, int K, Criterion kind) {
    const int n = g.num_nodes();
    Labeling e;
    e.num_communities = K;
    e.labels.assign(static_cast<std::size_t>(n), 0);
    double best = -1e300;
    while (true) {
        best = std::max(best, evaluate(kind, block_stats(g, e)));
        int i = 0;
        while (i < n && ++e.labels[static_cast<std::size_t>(i)] == K) {
            e.labels[static_cast<std::size_t>(i)] = 0;
            ++i;
        }
        if (i == n) break;
    }
    return best;
}

}  // namespace

TEST_CASE("tabu recovers the two-triangle split") {
    Graph g = two_triangles();
    TabuConfig cfg;
    cfg.seed = 7;
    for (Criterion c : kAllCriteria) {
        auto res = tabu_search(g, 2, c, cfg);
        Labeling truth{{0, 0, 0, 1, 1, 1}, 2};
        CHECK(adjusted_rand(res.labeling, truth) == doctest::Approx(1.0));
        if (c == Criterion::ngm) {
            // O = [[6,0],[0,6]], L = 12: score = 6 - 2*36/12 = 6 - 6 ... = 6?
            // sum_k (O_kk - O_k^2/L) = 2*(6 - 36/12) = 6.
            CHECK(res.score == doctest::Approx(6.0).epsilon(1e-12));
            CHECK(res.score == doctest::Approx(exhaustive_max(g, 2, c)).epsilon(1e-12));
        }
    }
}

TEST_CASE("tabu: K = 1 is a constant labeling") {
    Graph g = two_triangles();
    TabuConfig cfg;
    auto res = tabu_search(g, 1, Criterion::erm, cfg);
    CHECK(res.labeling.num_communities == 1);
    CHECK(res.score == doctest::Approx(0.0));
    CHECK_THROWS(tabu_search(g, 7, Criterion::erm, cfg));  // K > n
}

TEST_CASE("tabu: deterministic in the seed, score matches its labeling") {
    RandomSource rng(2);
    Graph g = random_graph(rng, 40, 0.15);
    TabuConfig cfg;
    cfg.seed = 19;
    cfg.restarts = 3;
    for (Criterion c : kAllCriteria) {
        auto a = tabu_search(g, 3, c, cfg);
        auto b = tabu_search(g, 3, c, cfg);
        CHECK(a.labeling.labels == b.labeling.labels);
        CHECK(a.score == b.score);
        CHECK(a.score == doctest::Approx(evaluate(c, block_stats(g, a.labeling))).epsilon(1e-12));
        REQUIRE(!a.best_trace.empty());
        CHECK(std::is_sorted(a.best_trace.begin(), a.best_trace.end()));
        CHECK(a.best_trace.back() == doctest::Approx(a.score).epsilon(1e-12));
    }
}

TEST_CASE("tabu matches exhaustive search on small graphs") {
    RandomSource rng(55);
    int hits = 0, total = 0;
    for (int trial = 0; trial < 10; ++trial) {
        int n = 6 + rng.uniform_int(5);
        Graph g = random_graph(rng, n, 0.3);
        if (g.total_degree() == 0) continue;
        for (Criterion c : kAllCriteria) {
            TabuConfig cfg;
            cfg.seed = 100 + static_cast<std::uint64_t>(trial);
            cfg.restarts = 10;
            auto res = tabu_search(g, 2, c, cfg);
            ++total;
            if (res.score >= exhaustive_max(g, 2, c) - 1e-9) ++hits;
        }
    }
    CHECK(total >= 32);
    CHECK(hits >= total - 1);  // allow one miss across ~40 cases
}

TEST_CASE("modularity matrix action") {
    Graph g = two_triangles();
    const int n = g.num_nodes();
    // Dense oracle.
    auto dense_apply = [&](Criterion kind, const std::vector<double>& v) {
        const double L = static_cast<double>(g.total_degree());
        std::vector<double> out(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double b = g.has_edge(i, j) ? 1.0 : 0.0;
                if (kind == Criterion::ngm)
                    b -= static_cast<double>(g.degree(i)) * g.degree(j) / L;
                else
                    b -= L / static_cast<double>(n) / static_cast<double>(n);
                out[static_cast<std::size_t>(i)] += b * v[static_cast<std::size_t>(j)];
            }
        return out;
    };
    RandomSource rng(3);
    for (Criterion kind : {Criterion::erm, Criterion::ngm}) {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (auto& x : v) x = rng.uniform() - 0.5;
        auto fast = modularity_matrix_apply(g, kind, v);
        auto slow = dense_apply(kind, v);
        for (int i = 0; i < n; ++i)
            CHECK(fast[static_cast<std::size_t>(i)] ==
                  doctest::Approx(slow[static_cast<std::size_t>(i)]).epsilon(1e-12));
    }
    // The constant vector is in the kernel of the ngm matrix.
    std::vector<double> ones(static_cast<std::size_t>(n), 1.0);
    for (double y : modularity_matrix_apply(g, Criterion::ngm, ones))
        CHECK(y == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS(modularity_matrix_apply(g, Criterion::bm, ones));
}

TEST_CASE("spectral bisection splits the triangles") {
    Graph g = two_triangles();
    Labeling truth{{0, 0, 0, 1, 1, 1}, 2};
    for (Criterion kind : {Criterion::erm, Criterion::ngm}) {
        auto res = spectral_bisect(g, kind, 1e-10, 2000, 5);
        CHECK(res.converged);
        CHECK(res.labeling.num_communities == 2);
        CHECK(adjusted_rand(res.labeling, truth) == doctest::Approx(1.0));
    }
    auto a = spectral_bisect(g, Criterion::ngm, 1e-10, 2000, 5);
    auto b = spectral_bisect(g, Criterion::ngm, 1e-10, 2000, 5);
    CHECK(a.labeling.labels == b.labeling.labels);
}

TEST_CASE("spectral bisection recovers planted blocks") {
    DcbmParams p;
    p.K = 2;
    p.pi = {0.5, 0.5};
    p.P = {4.0, 1.0, 1.0, 4.0};
    p.rho = rho_for_expected_degree(30.0, 200, p);
    auto s = sample_network(p, 200, 8);
    auto res = spectral_bisect(s.graph, Criterion::ngm, 1e-8, 5000, 3);
    CHECK(adjusted_rand(res.labeling, s.truth) >= 0.9);
}

TEST_CASE("tabu solves a planted standard block model") {
    DcbmParams p;
    p.K = 2;
    p.pi = {0.5, 0.5};
    p.P = {4.0, 1.0, 1.0, 4.0};
    const int n = 300;
    p.rho = rho_for_expected_degree(40.0, n, p);
    TabuConfig cfg;
    cfg.restarts = 5;
    int good = 0;
    for (int rep = 0; rep < 3; ++rep) {
        auto s = sample_network(p, n, 600 + static_cast<std::uint64_t>(rep));
        cfg.seed = 40 + static_cast<std::uint64_t>(rep);
        auto res = tabu_search(s.graph, 2, Criterion::dcbm, cfg);
        if (adjusted_rand(res.labeling, s.truth) >= 0.95) ++good;
    }
    CHECK(good >= 2);
}
