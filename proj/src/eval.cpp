#include "blockcd/eval.hpp"

#include <cmath>
#include <stdexcept>

namespace blockcd {

ContingencyTable ContingencyTable::build(const Labeling& e1, const Labeling& e2) {
    if (e1.size() != e2.size())
        throw std::invalid_argument("partition metrics: labelings differ in length");
    e1.check_valid();
    e2.check_valid();
    ContingencyTable t;
    t.rows = e1.num_communities;
    t.cols = e2.num_communities;
    t.n = e1.size();
    t.counts.assign(static_cast<std::size_t>(t.rows) * t.cols, 0);
    t.row_sums.assign(static_cast<std::size_t>(t.rows), 0);
    t.col_sums.assign(static_cast<std::size_t>(t.cols), 0);
    for (int i = 0; i < e1.size(); ++i) {
        const int a = e1.labels[static_cast<std::size_t>(i)];
        const int b = e2.labels[static_cast<std::size_t>(i)];
        ++t.counts[static_cast<std::size_t>(a) * t.cols + b];
        ++t.row_sums[static_cast<std::size_t>(a)];
        ++t.col_sums[static_cast<std::size_t>(b)];
    }
    return t;
}

namespace {

double choose2(std::int64_t x) { return 0.5 * static_cast<double>(x) * static_cast<double>(x - 1); }

}  // namespace

double adjusted_rand(const Labeling& e1, const Labeling& e2) {
    const auto t = ContingencyTable::build(e1, e2);
    double sum_cells = 0.0, sum_rows = 0.0, sum_cols = 0.0;
    for (std::int64_t c : t.counts) sum_cells += choose2(c);
    for (std::int64_t r : t.row_sums) sum_rows += choose2(r);
    for (std::int64_t c : t.col_sums) sum_cols += choose2(c);
    const double pairs = choose2(t.n);
    if (pairs == 0.0) return 1.0;  // 0 or 1 nodes
    const double expected = sum_rows * sum_cols / pairs;
    const double max_index = 0.5 * (sum_rows + sum_cols);
    const double denom = max_index - expected;
    const double numer = sum_cells - expected;
    if (denom == 0.0) return numer == 0.0 ? 1.0 : 0.0;
    return numer / denom;
}

double nmi(const Labeling& e1, const Labeling& e2) {
    const auto t = ContingencyTable::build(e1, e2);
    const double n = static_cast<double>(t.n);
    if (t.n == 0) return 1.0;
    double h1 = 0.0, h2 = 0.0, mi = 0.0;
    for (std::int64_t r : t.row_sums)
        if (r > 0) {
            const double p = static_cast<double>(r) / n;
            h1 -= p * std::log(p);
        }
    for (std::int64_t c : t.col_sums)
        if (c > 0) {
            const double p = static_cast<double>(c) / n;
            h2 -= p * std::log(p);
        }
    if (h1 == 0.0 && h2 == 0.0) return 1.0;
    if (h1 == 0.0 || h2 == 0.0) return 0.0;
    for (int a = 0; a < t.rows; ++a)
        for (int b = 0; b < t.cols; ++b) {
            const std::int64_t c = t.counts[static_cast<std::size_t>(a) * t.cols + b];
            if (c == 0) continue;
            const double p = static_cast<double>(c) / n;
            const double pa = static_cast<double>(t.row_sums[static_cast<std::size_t>(a)]) / n;
            const double pb = static_cast<double>(t.col_sums[static_cast<std::size_t>(b)]) / n;
            mi += p * std::log(p / (pa * pb));
        }
    return mi / std::sqrt(h1 * h2);
}

}  // namespace blockcd
