#pragma once

// Criterion maximization over labelings: tabu label-switching with restarts,
// and spectral bisection of the modularity matrix (K = 2 approximation).

#include <cstdint>
#include <vector>

#include "blockcd/criteria.hpp"
#include "blockcd/graph.hpp"

namespace blockcd {

struct TabuConfig {
    int tenure = 0;       // 0 -> max(10, n/100)
    std::int64_t max_iters = 0;  // 0 -> 100 n
    std::int64_t max_stall = 0;  // 0 -> 5 n
    int restarts = 20;
    std::uint64_t seed = 0;

    TabuConfig resolved(int n) const;  // fills the n-dependent defaults
};

struct SearchResult {
    Labeling labeling;
    double score = 0.0;
    std::vector<double> best_trace;  // best-ever score after each iteration
    int best_restart = 0;
    bool converged = true;  // spectral only; tabu always true
};

// Steepest-ascent tabu search: every iteration applies the best (node, label)
// move over non-tabu nodes (aspiration admits a tabu move that beats the best
// score seen), even when negative; best-ever labeling is returned, maximized
// over independent seeded restarts. Deterministic given the seed.
SearchResult tabu_search(const Graph& g, int K, Criterion kind, const TabuConfig& cfg);

// B v without materializing B, where B_ij = A_ij - d_i d_j / L (ngm) or
// A_ij - L/n^2 (erm). O(edges + n).
std::vector<double> modularity_matrix_apply(const Graph& g, Criterion kind,
                                            const std::vector<double>& v);

// Leading eigenvector of B by shifted power iteration; labels are its sign
// split (zeros go to the positive side). Sets converged = false when the
// iteration budget runs out.
SearchResult spectral_bisect(const Graph& g, Criterion kind, double tol, int max_iters,
                             std::uint64_t seed);

}  // namespace blockcd
