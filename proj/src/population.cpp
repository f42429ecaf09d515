#include "blockcd/population.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace blockcd {

namespace {
constexpr double kTol = 1e-9;
}

void PopulationAssignment::check_valid() const {
    if (static_cast<int>(S.size()) != K * K * M || static_cast<int>(x.size()) != M ||
        static_cast<int>(joint.size()) != K * M)
        throw std::invalid_argument("population assignment: inconsistent dimensions");
    for (double v : S)
        if (v < -kTol) throw std::invalid_argument("population assignment: negative entry");
    for (int a = 0; a < K; ++a)
        for (int u = 0; u < M; ++u) {
            double col = 0.0;
            for (int k = 0; k < K; ++k) col += s(k, a, u);
            if (std::abs(col - joint[static_cast<std::size_t>(a) * M + u]) > kTol)
                throw std::invalid_argument(
                    "population assignment: column sums must equal the joint matrix");
        }
}

PopulationAssignment PopulationAssignment::diagonal(const DcbmParams& params) {
    PopulationAssignment d;
    d.K = params.K;
    d.x = params.theta.support();
    d.M = static_cast<int>(d.x.size());
    d.joint = params.joint_matrix();
    d.S.assign(static_cast<std::size_t>(d.K) * d.K * d.M, 0.0);
    for (int a = 0; a < d.K; ++a)
        for (int u = 0; u < d.M; ++u)
            d.s(a, a, u) = d.joint[static_cast<std::size_t>(a) * d.M + u];
    return d;
}

std::vector<double> population_H(const PopulationAssignment& S, const std::vector<double>& P) {
    const int K = S.K, M = S.M;
    if (static_cast<int>(P.size()) != K * K)
        throw std::invalid_argument("population_H: P must be K x K");
    // y_ka = sum_u x_u S_kau collapses the quadruple sum to K^4.
    std::vector<double> y(static_cast<std::size_t>(K) * K, 0.0);
    for (int k = 0; k < K; ++k)
        for (int a = 0; a < K; ++a)
            for (int u = 0; u < M; ++u)
                y[static_cast<std::size_t>(k) * K + a] += S.x[static_cast<std::size_t>(u)] * S.s(k, a, u);
    std::vector<double> H(static_cast<std::size_t>(K) * K, 0.0);
    for (int k = 0; k < K; ++k)
        for (int l = 0; l < K; ++l) {
            double total = 0.0;
            for (int a = 0; a < K; ++a)
                for (int b = 0; b < K; ++b)
                    total += P[static_cast<std::size_t>(a) * K + b] *
                             y[static_cast<std::size_t>(k) * K + a] *
                             y[static_cast<std::size_t>(l) * K + b];
            H[static_cast<std::size_t>(k) * K + l] = total;
        }
    return H;
}

std::vector<double> population_h(const PopulationAssignment& S) {
    std::vector<double> h(static_cast<std::size_t>(S.K), 0.0);
    for (int k = 0; k < S.K; ++k)
        for (int a = 0; a < S.K; ++a)
            for (int u = 0; u < S.M; ++u) h[static_cast<std::size_t>(k)] += S.s(k, a, u);
    return h;
}

namespace {

std::vector<std::int64_t> empirical_counts(const Labeling& e, const Labeling& c,
                                           const std::vector<double>& theta,
                                           const std::vector<double>& x) {
    const int K = e.num_communities, A = c.num_communities, M = static_cast<int>(x.size());
    if (e.size() != c.size() || e.labels.size() != theta.size())
        throw std::invalid_argument("empirical_R: length mismatch");
    if (A > K) throw std::invalid_argument("empirical_R: c uses more communities than e");
    std::vector<std::int64_t> counts(static_cast<std::size_t>(K) * K * M, 0);
    for (int i = 0; i < e.size(); ++i) {
        int u = -1;
        for (int v = 0; v < M; ++v)
            if (std::abs(theta[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(v)]) <
                1e-12) {
                u = v;
                break;
            }
        if (u < 0) throw std::invalid_argument("empirical_R: theta value not in support");
        const int k = e.labels[static_cast<std::size_t>(i)];
        const int a = c.labels[static_cast<std::size_t>(i)];
        ++counts[(static_cast<std::size_t>(k) * K + a) * M + u];
    }
    return counts;
}

}  // namespace

PopulationAssignment empirical_R(const Labeling& e, const Labeling& c,
                                 const std::vector<double>& theta,
                                 const std::vector<double>& x) {
    const int K = e.num_communities, M = static_cast<int>(x.size());
    const auto counts = empirical_counts(e, c, theta, x);
    PopulationAssignment R;
    R.K = K;
    R.M = M;
    R.x = x;
    R.S.resize(counts.size());
    const double inv_n = 1.0 / static_cast<double>(e.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        R.S[i] = static_cast<double>(counts[i]) * inv_n;
    R.joint.assign(static_cast<std::size_t>(K) * M, 0.0);
    for (int k = 0; k < K; ++k)
        for (int a = 0; a < K; ++a)
            for (int u = 0; u < M; ++u)
                R.joint[static_cast<std::size_t>(a) * M + u] += R.s(k, a, u);
    return R;
}

double population_criterion(Criterion kind, const PopulationAssignment& S,
                            const DcbmParams& params) {
    const int K = S.K;
    const auto H = population_H(S, params.P);
    const auto h = population_h(S);
    const auto xlog = [](double o, double wa, double wb) {
        return o > 0.0 ? o * std::log(o / (wa * wb)) : 0.0;
    };
    switch (kind) {
        case Criterion::erm: {
            double P0 = 0.0;
            for (int a = 0; a < K; ++a)
                for (int b = 0; b < K; ++b)
                    P0 += params.pi[static_cast<std::size_t>(a)] *
                          params.pi[static_cast<std::size_t>(b)] * params.p(a, b);
            double total = 0.0;
            for (int k = 0; k < K; ++k)
                total += H[static_cast<std::size_t>(k) * K + k] -
                         h[static_cast<std::size_t>(k)] * h[static_cast<std::size_t>(k)] * P0;
            return total;
        }
        case Criterion::ngm: {
            const double pt0 = population_quantities(params).P0_tilde;
            if (pt0 <= 0.0) throw std::invalid_argument("population ngm: P0_tilde is zero");
            double total = 0.0;
            for (int k = 0; k < K; ++k) {
                double hk = 0.0;
                for (int l = 0; l < K; ++l) hk += H[static_cast<std::size_t>(k) * K + l];
                total += H[static_cast<std::size_t>(k) * K + k] / pt0 - (hk / pt0) * (hk / pt0);
            }
            return total;
        }
        case Criterion::bm: {
            double total = 0.0;
            for (int k = 0; k < K; ++k)
                for (int l = 0; l < K; ++l) {
                    const double v = H[static_cast<std::size_t>(k) * K + l];
                    total += xlog(v, h[static_cast<std::size_t>(k)], h[static_cast<std::size_t>(l)]) - v;
                }
            return total;
        }
        case Criterion::dcbm: {
            std::vector<double> Hk(static_cast<std::size_t>(K), 0.0);
            for (int k = 0; k < K; ++k)
                for (int l = 0; l < K; ++l) Hk[static_cast<std::size_t>(k)] += H[static_cast<std::size_t>(k) * K + l];
            double total = 0.0;
            for (int k = 0; k < K; ++k)
                for (int l = 0; l < K; ++l) {
                    const double v = H[static_cast<std::size_t>(k) * K + l];
                    total += xlog(v, Hk[static_cast<std::size_t>(k)], Hk[static_cast<std::size_t>(l)]) - v;
                }
            return total;
        }
    }
    throw std::logic_error("unreachable");
}

ConditionReport check_ngm_condition(const DcbmParams& params) {
    const auto q = population_quantities(params);
    const int K = params.K;
    ConditionReport r;
    r.matrix = q.E_tilde;
    r.pass = true;
    for (int a = 0; a < K && r.pass; ++a)
        for (int b = 0; b < K && r.pass; ++b) {
            const double v = q.E_tilde[static_cast<std::size_t>(a) * K + b];
            if (a == b ? !(v > 0.0) : !(v < 0.0)) r.pass = false;
        }
    return r;
}

ConditionReport check_erm_condition(const DcbmParams& params) {
    if (params.theta.kind != ThetaSpec::Kind::constant_one)
        throw std::invalid_argument("erm condition defined for standard block model only");
    const int K = params.K;
    double P0 = 0.0;
    for (int a = 0; a < K; ++a)
        for (int b = 0; b < K; ++b)
            P0 += params.pi[static_cast<std::size_t>(a)] * params.pi[static_cast<std::size_t>(b)] *
                  params.p(a, b);
    ConditionReport r;
    r.matrix = {P0};
    r.pass = true;
    for (int a = 0; a < K && r.pass; ++a)
        for (int b = 0; b < K && r.pass; ++b) {
            if (a == b ? !(params.p(a, b) > P0) : !(params.p(a, b) < P0)) r.pass = false;
        }
    return r;
}

Prop1Report verify_proposition1(const DcbmParams& params, int n, std::uint64_t seed, int reps) {
    validate(params);
    const auto x = params.theta.support();
    const int K = params.K;
    const int M = static_cast<int>(x.size());

    // One draw of (c, theta), held fixed across replications.
    RandomSource latent_rng(derive_seed(seed, 0));
    Labeling c;
    c.num_communities = K;
    c.labels.resize(static_cast<std::size_t>(n));
    std::vector<double> theta(static_cast<std::size_t>(n));
    const auto joint = params.joint_matrix();
    for (int i = 0; i < n; ++i) {
        const int cell = latent_rng.categorical(joint);
        c.labels[static_cast<std::size_t>(i)] = cell / M;
        theta[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(cell % M)];
    }

    // Fixed labelings to test.
    std::vector<Labeling> labelings;
    labelings.push_back(c);
    {
        Labeling e = c;  // cyclic label shift
        for (int& l : e.labels) l = (l + 1) % K;
        labelings.push_back(e);
    }
    {
        Labeling e;  // round-robin by index
        e.num_communities = K;
        for (int i = 0; i < n; ++i) e.labels.push_back(i % K);
        labelings.push_back(e);
    }
    {
        Labeling e;  // contiguous blocks
        e.num_communities = K;
        for (int i = 0; i < n; ++i) e.labels.push_back(std::min(K - 1, i * K / n));
        labelings.push_back(e);
    }
    {
        Labeling e = c;  // truth with the first tenth perturbed
        for (int i = 0; i < n / 10 + 1; ++i)
            e.labels[static_cast<std::size_t>(i)] = (e.labels[static_cast<std::size_t>(i)] + 1) % K;
        labelings.push_back(e);
    }

    Prop1Report report;
    report.labelings = static_cast<int>(labelings.size());
    report.replications = reps;

    // Expected values H(R(e)) and the exact f = h(R) identity on counts.
    std::vector<std::vector<double>> expected;
    report.f_equals_h = true;
    for (const auto& e : labelings) {
        const auto R = empirical_R(e, c, theta, x);
        expected.push_back(population_H(R, params.P));
        std::vector<std::int64_t> nk(static_cast<std::size_t>(K), 0);
        for (int l : e.labels) ++nk[static_cast<std::size_t>(l)];
        const auto counts = empirical_counts(e, c, theta, x);
        for (int k = 0; k < K; ++k) {
            std::int64_t total = 0;
            for (int a = 0; a < K; ++a)
                for (int u = 0; u < M; ++u)
                    total += counts[(static_cast<std::size_t>(k) * K + a) * M + u];
            if (total != nk[static_cast<std::size_t>(k)]) report.f_equals_h = false;
        }
    }

    const double mu = static_cast<double>(n) * static_cast<double>(n) * params.rho;
    const std::size_t cells = static_cast<std::size_t>(K) * K;
    std::vector<std::vector<double>> sum(labelings.size(), std::vector<double>(cells, 0.0));
    std::vector<std::vector<double>> sumsq(labelings.size(), std::vector<double>(cells, 0.0));

    for (int rep = 0; rep < reps; ++rep) {
        RandomSource rng(derive_seed(seed, 1 + static_cast<std::uint64_t>(rep)));
        std::vector<std::pair<int, int>> edge_list;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const double p = theta[static_cast<std::size_t>(i)] *
                                 theta[static_cast<std::size_t>(j)] * params.rho *
                                 params.p(c.labels[static_cast<std::size_t>(i)],
                                          c.labels[static_cast<std::size_t>(j)]);
                if (p > 0.0 && rng.bernoulli(p)) edge_list.emplace_back(i, j);
            }
        const Graph g = Graph::from_edges(n, edge_list);
        for (std::size_t li = 0; li < labelings.size(); ++li) {
            const auto stats = block_stats(g, labelings[li]);
            for (std::size_t cell = 0; cell < cells; ++cell) {
                const double v = mu > 0.0 ? static_cast<double>(stats.edges[cell]) / mu
                                          : static_cast<double>(stats.edges[cell]);
                sum[li][cell] += v;
                sumsq[li][cell] += v * v;
            }
        }
    }

    for (std::size_t li = 0; li < labelings.size(); ++li) {
        for (std::size_t cell = 0; cell < cells; ++cell) {
            const double mean = sum[li][cell] / reps;
            const double target = mu > 0.0 ? expected[li][cell] : 0.0;
            const double var =
                std::max(0.0, (sumsq[li][cell] - sum[li][cell] * sum[li][cell] / reps) /
                                  std::max(1, reps - 1));
            const double se = std::sqrt(var / reps);
            double z;
            if (se == 0.0) {
                z = mean == target ? 0.0 : std::numeric_limits<double>::infinity();
            } else {
                z = (mean - target) / se;
            }
            report.max_abs_z = std::max(report.max_abs_z, std::abs(z));
        }
    }
    return report;
}

namespace {

// All length-K vectors of nonnegative ints summing to g, lexicographic.
void compositions(int g, int K, std::vector<int>& prefix, std::vector<std::vector<int>>& out) {
    if (K == 1) {
        prefix.push_back(g);
        out.push_back(prefix);
        prefix.pop_back();
        return;
    }
    for (int j = 0; j <= g; ++j) {
        prefix.push_back(j);
        compositions(g - j, K - 1, prefix, out);
        prefix.pop_back();
    }
}

}  // namespace

GridMaxResult brute_force_population_max(Criterion kind, const DcbmParams& params, int grid) {
    if (grid < 1) throw std::invalid_argument("grid resolution must be >= 1");
    const int K = params.K;
    const auto x = params.theta.support();
    const int M = static_cast<int>(x.size());
    const auto joint = params.joint_matrix();

    std::vector<std::vector<int>> comps;
    {
        std::vector<int> prefix;
        compositions(grid, K, prefix, comps);
    }
    const int columns = K * M;
    double points_estimate = 1.0;
    for (int i = 0; i < columns; ++i) points_estimate *= static_cast<double>(comps.size());
    if (points_estimate > 5e7)
        throw std::invalid_argument("grid oracle: combinatorial budget exceeded");

    PopulationAssignment S;
    S.K = K;
    S.M = M;
    S.x = x;
    S.joint = joint;
    S.S.assign(static_cast<std::size_t>(K) * K * M, 0.0);

    const auto fill_column = [&](int col, const std::vector<int>& comp) {
        const int a = col / M, u = col % M;
        const double mass = joint[static_cast<std::size_t>(a) * M + u];
        for (int k = 0; k < K; ++k)
            S.s(k, a, u) = mass * static_cast<double>(comp[static_cast<std::size_t>(k)]) /
                           static_cast<double>(grid);
    };

    GridMaxResult result;
    result.diagonal_value =
        population_criterion(kind, PopulationAssignment::diagonal(params), params);
    bool have_best = false;
    std::vector<double> best_S;
    std::vector<int> odometer(static_cast<std::size_t>(columns), 0);
    for (int col = 0; col < columns; ++col) fill_column(col, comps[0]);
    while (true) {
        ++result.points;
        const double value = population_criterion(kind, S, params);
        if (!have_best || value > result.value ||
            (value == result.value && S.S < best_S)) {
            have_best = true;
            result.value = value;
            best_S = S.S;
        }
        // advance odometer
        int col = columns - 1;
        while (col >= 0) {
            if (++odometer[static_cast<std::size_t>(col)] <
                static_cast<int>(comps.size())) {
                fill_column(col, comps[static_cast<std::size_t>(
                                     odometer[static_cast<std::size_t>(col)])]);
                break;
            }
            odometer[static_cast<std::size_t>(col)] = 0;
            fill_column(col, comps[0]);
            --col;
        }
        if (col < 0) break;
    }
    result.argmax = S;
    result.argmax.S = best_S;

    // Diagonal up to row permutation, within grid tolerance.
    std::vector<int> perm(static_cast<std::size_t>(K));
    std::iota(perm.begin(), perm.end(), 0);
    do {
        double dev = 0.0;
        for (int k = 0; k < K; ++k)
            for (int a = 0; a < K; ++a)
                for (int u = 0; u < M; ++u) {
                    const double target =
                        perm[static_cast<std::size_t>(k)] == a
                            ? joint[static_cast<std::size_t>(a) * M + u]
                            : 0.0;
                    dev = std::max(dev, std::abs(result.argmax.s(k, a, u) - target));
                }
        if (dev <= 1e-9) {
            result.is_diagonal = true;
            break;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return result;
}

}  // namespace blockcd
