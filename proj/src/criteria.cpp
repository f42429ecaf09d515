#include "blockcd/criteria.hpp"

#include <cmath>
#include <stdexcept>

namespace blockcd {

std::string criterion_name(Criterion kind) {
    return kCriterionNames[static_cast<int>(kind)];
}

Criterion parse_criterion(const std::string& name) {
    for (Criterion c : kAllCriteria)
        if (name == criterion_name(c)) return c;
    throw std::invalid_argument("unknown criterion '" + name + "' (erm|ngm|bm|dcbm)");
}

bool is_modularity(Criterion kind) {
    return kind == Criterion::erm || kind == Criterion::ngm;
}

namespace {

inline double xlog_ratio(std::int64_t o, std::int64_t wa, std::int64_t wb) {
    if (o == 0) return 0.0;
    return static_cast<double>(o) *
           std::log(static_cast<double>(o) /
                    (static_cast<double>(wa) * static_cast<double>(wb)));
}

void require_edges(Criterion kind, const BlockStats& stats) {
    if (stats.total_degree == 0 && (kind == Criterion::ngm || kind == Criterion::dcbm))
        throw std::invalid_argument("criterion undefined on empty graph");
}

// sum_kl O_kl log(O_kl/(w_k w_l)); shared by bm (w = n_k) and dcbm (w = O_k).
double likelihood_score(const BlockStats& stats, const std::vector<std::int64_t>& w) {
    const int K = stats.num_communities;
    double total = 0.0;
    for (int k = 0; k < K; ++k)
        for (int l = 0; l < K; ++l)
            total += xlog_ratio(stats.o(k, l), w[static_cast<std::size_t>(k)],
                                w[static_cast<std::size_t>(l)]);
    return total;
}

}  // namespace

double evaluate(Criterion kind, const BlockStats& stats) {
    require_edges(kind, stats);
    const int K = stats.num_communities;
    switch (kind) {
        case Criterion::erm: {
            const double n2 = static_cast<double>(stats.num_nodes) *
                              static_cast<double>(stats.num_nodes);
            double total = 0.0;
            for (int k = 0; k < K; ++k) {
                const double nk = static_cast<double>(stats.sizes[static_cast<std::size_t>(k)]);
                total += static_cast<double>(stats.o(k, k)) -
                         nk * nk / n2 * static_cast<double>(stats.total_degree);
            }
            return total;
        }
        case Criterion::ngm: {
            const double L = static_cast<double>(stats.total_degree);
            double total = 0.0;
            for (int k = 0; k < K; ++k) {
                const double ok =
                    static_cast<double>(stats.degree_sums[static_cast<std::size_t>(k)]);
                total += static_cast<double>(stats.o(k, k)) - ok * ok / L;
            }
            return total;
        }
        case Criterion::bm:
            return likelihood_score(stats, stats.sizes);
        case Criterion::dcbm:
            return likelihood_score(stats, stats.degree_sums);
    }
    throw std::logic_error("unreachable");
}

namespace {

// Partial likelihood sum over all terms whose value changes when a node moves
// between communities f and t: rows f and t plus columns f and t. Relies on
// the symmetry of O.
double likelihood_partial(const BlockStats& stats, const std::vector<std::int64_t>& w, int f,
                          int t) {
    const int K = stats.num_communities;
    double rows = 0.0;
    for (int l = 0; l < K; ++l) {
        rows += xlog_ratio(stats.o(f, l), w[static_cast<std::size_t>(f)],
                           w[static_cast<std::size_t>(l)]);
        rows += xlog_ratio(stats.o(t, l), w[static_cast<std::size_t>(t)],
                           w[static_cast<std::size_t>(l)]);
    }
    const double overlap =
        xlog_ratio(stats.o(f, f), w[static_cast<std::size_t>(f)], w[static_cast<std::size_t>(f)]) +
        2.0 * xlog_ratio(stats.o(f, t), w[static_cast<std::size_t>(f)],
                         w[static_cast<std::size_t>(t)]) +
        xlog_ratio(stats.o(t, t), w[static_cast<std::size_t>(t)], w[static_cast<std::size_t>(t)]);
    return 2.0 * rows - overlap;
}

double likelihood_gain(const BlockStats& stats, bool degree_corrected,
                       std::span<const std::int64_t> cnt, bool self_loop, int f, int t) {
    // Build the post-move rows f and t and weights in place, take the partial
    // difference, then restore. const_cast-free: work on a scratch copy of
    // just the touched entries.
    const int K = stats.num_communities;
    const std::int64_t s = self_loop ? 1 : 0;
    const std::int64_t cf = cnt[static_cast<std::size_t>(f)];
    const std::int64_t ct = cnt[static_cast<std::size_t>(t)];
    std::int64_t contact = 0;
    for (int k = 0; k < K; ++k) contact += cnt[static_cast<std::size_t>(k)];

    const std::vector<std::int64_t>& w = degree_corrected ? stats.degree_sums : stats.sizes;
    const double before = likelihood_partial(stats, w, f, t);

    // Post-move values.
    auto new_of = [&](int l) -> std::int64_t {
        if (l == f) return stats.o(f, f) - 2 * cf - s;
        if (l == t) return stats.o(f, t) - ct + cf;
        return stats.o(f, l) - cnt[static_cast<std::size_t>(l)];
    };
    auto new_ot = [&](int l) -> std::int64_t {
        if (l == t) return stats.o(t, t) + 2 * ct + s;
        if (l == f) return stats.o(f, t) - ct + cf;
        return stats.o(t, l) + cnt[static_cast<std::size_t>(l)];
    };
    std::int64_t wf, wt;
    if (degree_corrected) {
        // The node's degree (contact + s) moves between the two margins.
        wf = stats.degree_sums[static_cast<std::size_t>(f)] - (contact + s);
        wt = stats.degree_sums[static_cast<std::size_t>(t)] + (contact + s);
    } else {
        wf = stats.sizes[static_cast<std::size_t>(f)] - 1;
        wt = stats.sizes[static_cast<std::size_t>(t)] + 1;
    }
    auto weight = [&](int l) -> std::int64_t {
        if (l == f) return wf;
        if (l == t) return wt;
        return w[static_cast<std::size_t>(l)];
    };

    double rows = 0.0;
    for (int l = 0; l < K; ++l) {
        rows += xlog_ratio(new_of(l), wf, weight(l));
        rows += xlog_ratio(new_ot(l), wt, weight(l));
    }
    const double overlap = xlog_ratio(new_of(f), wf, wf) + 2.0 * xlog_ratio(new_of(t), wf, wt) +
                           xlog_ratio(new_ot(t), wt, wt);
    return (2.0 * rows - overlap) - before;
}

}  // namespace

double switch_gain(Criterion kind, const BlockStats& stats,
                   std::span<const std::int64_t> neighbor_counts, bool self_loop,
                   int from_label, int to_label) {
    require_edges(kind, stats);
    if (from_label == to_label) return 0.0;
    const std::int64_t s = self_loop ? 1 : 0;
    const std::int64_t cf = neighbor_counts[static_cast<std::size_t>(from_label)];
    const std::int64_t ct = neighbor_counts[static_cast<std::size_t>(to_label)];
    switch (kind) {
        case Criterion::erm: {
            const double q = static_cast<double>(stats.total_degree) /
                             (static_cast<double>(stats.num_nodes) *
                              static_cast<double>(stats.num_nodes));
            const double nf = static_cast<double>(stats.sizes[static_cast<std::size_t>(from_label)]);
            const double nt = static_cast<double>(stats.sizes[static_cast<std::size_t>(to_label)]);
            const double diag = static_cast<double>(-2 * cf - s) + static_cast<double>(2 * ct + s);
            return diag - q * ((nf - 1) * (nf - 1) - nf * nf + (nt + 1) * (nt + 1) - nt * nt);
        }
        case Criterion::ngm: {
            std::int64_t contact = 0;
            for (std::int64_t c : neighbor_counts) contact += c;
            const double L = static_cast<double>(stats.total_degree);
            const double of =
                static_cast<double>(stats.degree_sums[static_cast<std::size_t>(from_label)]);
            const double ot =
                static_cast<double>(stats.degree_sums[static_cast<std::size_t>(to_label)]);
            const double dof = -static_cast<double>(contact + s);
            const double dot = static_cast<double>(contact + s);
            const double diag = static_cast<double>(-2 * cf - s) + static_cast<double>(2 * ct + s);
            return diag -
                   ((of + dof) * (of + dof) - of * of + (ot + dot) * (ot + dot) - ot * ot) / L;
        }
        case Criterion::bm:
            return likelihood_gain(stats, false, neighbor_counts, self_loop, from_label, to_label);
        case Criterion::dcbm:
            return likelihood_gain(stats, true, neighbor_counts, self_loop, from_label, to_label);
    }
    throw std::logic_error("unreachable");
}

double evaluate_delta(Criterion kind, const BlockStats& stats, const StatsDelta& delta) {
    if (delta.from_label < 0 || delta.from_label >= stats.num_communities ||
        delta.to_label < 0 || delta.to_label >= stats.num_communities ||
        static_cast<int>(delta.neighbor_counts.size()) != stats.num_communities)
        throw std::invalid_argument("evaluate_delta: delta does not match stats");
    return switch_gain(kind, stats, delta.neighbor_counts, delta.self_loop, delta.from_label,
                       delta.to_label);
}

}  // namespace blockcd
