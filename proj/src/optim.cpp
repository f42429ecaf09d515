#include "blockcd/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "blockcd/rng.hpp"

namespace blockcd {

TabuConfig TabuConfig::resolved(int n) const {
    TabuConfig c = *this;
    if (c.tenure <= 0) c.tenure = std::max(10, n / 100);
    if (c.max_iters <= 0) c.max_iters = 100LL * n;
    if (c.max_stall <= 0) c.max_stall = 5LL * n;
    c.max_stall = std::min(c.max_stall, c.max_iters);
    if (c.restarts < 1) c.restarts = 1;
    return c;
}

namespace {

struct RestartOutcome {
    Labeling labeling;
    double score = 0.0;
    std::vector<double> trace;
};

RestartOutcome run_restart(const Graph& g, int K, Criterion kind, const TabuConfig& cfg,
                           std::uint64_t seed) {
    const int n = g.num_nodes();
    RandomSource rng(seed);

    Labeling e;
    e.num_communities = K;
    e.labels.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) e.labels[static_cast<std::size_t>(i)] = rng.uniform_int(K);

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    BlockStats stats = block_stats(g, e);

    // Per-node neighbor community profile (self-loops excluded) kept in sync
    // with the current labeling; makes each move evaluation O(K).
    std::vector<std::int64_t> cnt(static_cast<std::size_t>(n) * K, 0);
    std::vector<char> loop(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        for (int j : g.neighbors(i)) {
            if (j == i)
                loop[static_cast<std::size_t>(i)] = 1;
            else
                ++cnt[static_cast<std::size_t>(i) * K + e.labels[static_cast<std::size_t>(j)]];
        }
    }

    double cur = evaluate(kind, stats);
    RestartOutcome out;
    out.labeling = e;
    out.score = cur;
    std::vector<std::int64_t> tabu_until(static_cast<std::size_t>(n),
                                         std::numeric_limits<std::int64_t>::min());

    double best = cur;
    std::int64_t stall = 0;
    for (std::int64_t iter = 0; iter < cfg.max_iters; ++iter) {
        double best_gain = -std::numeric_limits<double>::infinity();
        int best_node = -1, best_to = -1;
        double tabu_gain = -std::numeric_limits<double>::infinity();
        int tabu_node = -1, tabu_to = -1;
        for (int i : order) {
            const int f = e.labels[static_cast<std::size_t>(i)];
            const bool is_tabu = iter < tabu_until[static_cast<std::size_t>(i)];
            const std::span<const std::int64_t> row(cnt.data() + static_cast<std::size_t>(i) * K,
                                                    static_cast<std::size_t>(K));
            for (int t = 0; t < K; ++t) {
                if (t == f) continue;
                const double gain = switch_gain(kind, stats, row, loop[static_cast<std::size_t>(i)] != 0, f, t);
                if (is_tabu) {
                    if (gain > tabu_gain) {
                        tabu_gain = gain;
                        tabu_node = i;
                        tabu_to = t;
                    }
                    // Aspiration: admit a tabu move that beats the best seen.
                    if (!(cur + gain > best)) continue;
                }
                if (gain > best_gain) {
                    best_gain = gain;
                    best_node = i;
                    best_to = t;
                }
            }
        }
        if (best_node < 0) {
            // Everything tabu and nothing aspirational; fall back to the best
            // tabu move so the walk keeps moving.
            if (tabu_node < 0) break;
            best_gain = tabu_gain;
            best_node = tabu_node;
            best_to = tabu_to;
        }

        // Apply the move.
        const int f = e.labels[static_cast<std::size_t>(best_node)];
        StatsDelta d;
        d.node = best_node;
        d.from_label = f;
        d.to_label = best_to;
        d.self_loop = loop[static_cast<std::size_t>(best_node)] != 0;
        d.neighbor_counts.assign(cnt.begin() + static_cast<std::ptrdiff_t>(best_node) * K,
                                 cnt.begin() + static_cast<std::ptrdiff_t>(best_node + 1) * K);
        apply_delta(stats, d);
        for (int j : g.neighbors(best_node)) {
            if (j == best_node) continue;
            --cnt[static_cast<std::size_t>(j) * K + f];
            ++cnt[static_cast<std::size_t>(j) * K + best_to];
        }
        e.labels[static_cast<std::size_t>(best_node)] = best_to;
        tabu_until[static_cast<std::size_t>(best_node)] = iter + 1 + cfg.tenure;
        cur += best_gain;

        if (cur > best) {
            best = cur;
            out.labeling = e;
            stall = 0;
        } else {
            ++stall;
        }
        out.trace.push_back(best);
        if (stall >= cfg.max_stall) break;
    }
    // Exact score of the best labeling (accumulated gains carry round-off).
    out.score = evaluate(kind, block_stats(g, out.labeling));
    return out;
}

}  // namespace

SearchResult tabu_search(const Graph& g, int K, Criterion kind, const TabuConfig& raw_cfg) {
    const int n = g.num_nodes();
    if (K < 1) throw std::invalid_argument("tabu_search: K must be >= 1");
    if (K > n) throw std::invalid_argument("tabu_search: K exceeds node count");
    const TabuConfig cfg = raw_cfg.resolved(n);

    SearchResult result;
    if (K == 1) {
        result.labeling.num_communities = 1;
        result.labeling.labels.assign(static_cast<std::size_t>(n), 0);
        result.score = evaluate(kind, block_stats(g, result.labeling));
        return result;
    }

    bool have = false;
    for (int r = 0; r < cfg.restarts; ++r) {
        RestartOutcome out = run_restart(g, K, kind, cfg, derive_seed(cfg.seed, static_cast<std::uint64_t>(r)));
        if (!have || out.score > result.score) {
            have = true;
            result.labeling = std::move(out.labeling);
            result.score = out.score;
            result.best_trace = std::move(out.trace);
            result.best_restart = r;
        }
    }
    return result;
}

std::vector<double> modularity_matrix_apply(const Graph& g, Criterion kind,
                                            const std::vector<double>& v) {
    if (!is_modularity(kind))
        throw std::invalid_argument("modularity matrix defined for erm/ngm only");
    const int n = g.num_nodes();
    if (static_cast<int>(v.size()) != n)
        throw std::invalid_argument("modularity_matrix_apply: dimension mismatch");
    const double L = static_cast<double>(g.total_degree());
    if (kind == Criterion::ngm && L == 0.0)
        throw std::invalid_argument("criterion undefined on empty graph");

    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j : g.neighbors(i)) acc += v[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = acc;
    }
    if (kind == Criterion::ngm) {
        double dv = 0.0;
        for (int i = 0; i < n; ++i) dv += static_cast<double>(g.degree(i)) * v[static_cast<std::size_t>(i)];
        for (int i = 0; i < n; ++i)
            out[static_cast<std::size_t>(i)] -= static_cast<double>(g.degree(i)) * dv / L;
    } else {
        double sv = 0.0;
        for (double x : v) sv += x;
        const double c = L / (static_cast<double>(n) * static_cast<double>(n));
        for (double& x : out) x -= c * sv;
    }
    return out;
}

SearchResult spectral_bisect(const Graph& g, Criterion kind, double tol, int max_iters,
                             std::uint64_t seed) {
    const int n = g.num_nodes();
    if (n < 2) throw std::invalid_argument("spectral_bisect: need at least two nodes");
    if (!is_modularity(kind))
        throw std::invalid_argument("spectral bisection defined for erm/ngm only");

    // Gershgorin-style shift making the target eigenvalue of B + shift I the
    // dominant one: every row of |B| sums to at most 2 max_deg + L/n.
    int max_deg = 0;
    for (int i = 0; i < n; ++i) max_deg = std::max(max_deg, g.degree(i));
    const double shift =
        2.0 * static_cast<double>(max_deg) +
        static_cast<double>(g.total_degree()) / static_cast<double>(n) + 1.0;

    RandomSource rng(seed);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& x : v) x = rng.uniform() - 0.5;

    const auto normalize = [&](std::vector<double>& w) {
        double norm = 0.0;
        for (double x : w) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) return false;
        int pivot = 0;
        for (int i = 1; i < n; ++i)
            if (std::abs(w[static_cast<std::size_t>(i)]) >
                std::abs(w[static_cast<std::size_t>(pivot)]))
                pivot = i;
        const double sign = w[static_cast<std::size_t>(pivot)] < 0.0 ? -1.0 : 1.0;
        for (double& x : w) x *= sign / norm;
        return true;
    };
    normalize(v);

    bool converged = false;
    for (int iter = 0; iter < max_iters && !converged; ++iter) {
        std::vector<double> w = modularity_matrix_apply(g, kind, v);
        for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] += shift * v[static_cast<std::size_t>(i)];
        if (!normalize(w)) {
            for (double& x : w) x = rng.uniform() - 0.5;
            normalize(w);
        }
        double diff = 0.0;
        for (int i = 0; i < n; ++i)
            diff = std::max(diff, std::abs(w[static_cast<std::size_t>(i)] -
                                           v[static_cast<std::size_t>(i)]));
        v = std::move(w);
        if (diff < tol) converged = true;
    }

    SearchResult result;
    result.converged = converged;
    result.labeling.num_communities = 2;
    result.labeling.labels.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        result.labeling.labels[static_cast<std::size_t>(i)] =
            v[static_cast<std::size_t>(i)] >= 0.0 ? 0 : 1;
    result.score = evaluate(kind, block_stats(g, result.labeling));
    return result;
}

}  // namespace blockcd
