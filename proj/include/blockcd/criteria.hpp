#pragma once

// The four community-detection criteria, evaluated from block statistics.
//
//   erm:  sum_k ( O_kk - (n_k^2/n^2) L )
//   ngm:  sum_k ( O_kk - O_k^2 / L )
//   bm:   sum_kl O_kl log( O_kl / (n_k n_l) )
//   dcbm: sum_kl O_kl log( O_kl / (O_k O_l) )
//
// Natural logs; 0 log 0 == 0; scores are not divided by L. Empty communities
// contribute nothing. The degree-corrected forms are the uncorrected ones
// with O_k substituted for n_k and L for n.

#include <cstdint>
#include <span>
#include <string>

#include "blockcd/graph.hpp"

namespace blockcd {

enum class Criterion { erm, ngm, bm, dcbm };

constexpr const char* kCriterionNames[] = {"erm", "ngm", "bm", "dcbm"};
constexpr Criterion kAllCriteria[] = {Criterion::erm, Criterion::ngm, Criterion::bm,
                                      Criterion::dcbm};

std::string criterion_name(Criterion kind);
Criterion parse_criterion(const std::string& name);
bool is_modularity(Criterion kind);

double evaluate(Criterion kind, const BlockStats& stats);

// Score change from moving one node, computed from its neighborhood profile
// in O(K). `neighbor_counts` and `self_loop` are as in StatsDelta.
double switch_gain(Criterion kind, const BlockStats& stats,
                   std::span<const std::int64_t> neighbor_counts, bool self_loop,
                   int from_label, int to_label);

// evaluate(kind, stats + delta) - evaluate(kind, stats) without a full pass.
double evaluate_delta(Criterion kind, const BlockStats& stats, const StatsDelta& delta);

}  // namespace blockcd
