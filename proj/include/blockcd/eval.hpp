#pragma once

// Partition-agreement metrics.

#include <cstdint>
#include <vector>

#include "blockcd/graph.hpp"

namespace blockcd {

struct ContingencyTable {
    int rows = 0, cols = 0;
    std::vector<std::int64_t> counts;      // rows*cols
    std::vector<std::int64_t> row_sums;
    std::vector<std::int64_t> col_sums;
    std::int64_t n = 0;

    static ContingencyTable build(const Labeling& e1, const Labeling& e2);
};

// Hubert-Arabie adjusted Rand index. 1 iff the partitions agree up to label
// permutation; when both partitions are trivial (all singletons or a single
// block) the 0/0 case is defined as 1.
double adjusted_rand(const Labeling& e1, const Labeling& e2);

// Normalized mutual information, geometric-mean normalization. Defined as 1
// when both entropies are 0, and 0 when exactly one is.
double nmi(const Labeling& e1, const Labeling& e2);

}  // namespace blockcd
