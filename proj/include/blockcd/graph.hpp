#pragma once

// Sparse undirected binary graph with optional self-loops, plus the block
// statistics (O, O_k, n_k, L, n) that every detection criterion reads.
//
// Conventions: a self-loop contributes 1 to its node's degree and 1 to the
// total degree L = sum_ij A_ij, so L = sum_i d_i = 2*(non-loop edges) + loops.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace blockcd {

class Graph {
public:
    Graph() = default;

    // Builds from an (unordered, possibly duplicated) edge list over nodes
    // 0..n-1. Duplicates collapse to a single binary edge; loops are kept.
    static Graph from_edges(int n, const std::vector<std::pair<int, int>>& edges);

    int num_nodes() const { return num_nodes_; }
    std::int64_t total_degree() const { return total_degree_; }  // L

    // Sorted adjacency row of i; contains i itself iff i has a self-loop.
    std::span<const int> neighbors(int i) const {
        return {adjacency_.data() + offsets_[static_cast<std::size_t>(i)],
                adjacency_.data() + offsets_[static_cast<std::size_t>(i) + 1]};
    }

    int degree(int i) const {
        return static_cast<int>(offsets_[static_cast<std::size_t>(i) + 1] -
                                offsets_[static_cast<std::size_t>(i)]);
    }

    bool has_edge(int i, int j) const;
    bool has_loop(int i) const { return has_edge(i, i); }

    // Non-loop edge count and loop count (L = 2*edges + loops).
    std::int64_t num_edges() const;
    std::int64_t num_loops() const;

private:
    int num_nodes_ = 0;
    std::int64_t total_degree_ = 0;
    std::vector<std::size_t> offsets_ = {0};
    std::vector<int> adjacency_;
};

struct Labeling {
    std::vector<int> labels;      // entries in [0, num_communities)
    int num_communities = 0;

    int size() const { return static_cast<int>(labels.size()); }
    void check_valid() const;  // throws on out-of-range entries
};

// Sufficient statistics for all four criteria.
struct BlockStats {
    int num_communities = 0;
    std::int64_t num_nodes = 0;                // n
    std::int64_t total_degree = 0;             // L
    std::vector<std::int64_t> edges;           // O, K*K row-major
    std::vector<std::int64_t> degree_sums;     // O_k = sum_l O_kl
    std::vector<std::int64_t> sizes;           // n_k

    std::int64_t o(int k, int l) const {
        return edges[static_cast<std::size_t>(k) * num_communities + l];
    }
    std::int64_t& o(int k, int l) {
        return edges[static_cast<std::size_t>(k) * num_communities + l];
    }
};

// Everything needed to move one node between communities and to undo it.
// neighbor_counts[k] is the number of non-loop neighbors of `node` carrying
// label k in the labeling the delta was computed against.
struct StatsDelta {
    int node = -1;
    int from_label = -1;
    int to_label = -1;
    std::vector<std::int64_t> neighbor_counts;
    bool self_loop = false;
};

BlockStats block_stats(const Graph& g, const Labeling& e);

// Delta for relabeling `node` from its current label (per `e`) to `to_label`.
// Touches only the node's neighborhood; does not modify stats or e.
StatsDelta apply_switch(const BlockStats& stats, const Graph& g, const Labeling& e,
                        int node, int to_label);

void apply_delta(BlockStats& stats, const StatsDelta& delta);
void revert_delta(BlockStats& stats, const StatsDelta& delta);

// --- ingestion ---------------------------------------------------------

struct LoadedGraph {
    Graph graph;
    std::vector<std::string> node_names;  // dense index -> original identifier
    std::optional<Labeling> true_labels;  // GML `value` fields, if all present
};

// Whitespace edge list; `#` comments; identifiers are arbitrary strings
// mapped to dense indices in first-appearance order.
LoadedGraph load_edge_list(std::istream& in);

// Minimal GML subset: graph [ node [ id N value V ] edge [ source A target B ] ].
LoadedGraph load_gml_subset(std::istream& in);

void write_edge_list(std::ostream& out, const Graph& g);

struct ComponentResult {
    Graph graph;
    std::vector<int> original_index;  // new index -> index in the input graph
};

// Induced subgraph on the largest connected component; ties broken by the
// component containing the smallest original node index.
ComponentResult largest_connected_component(const Graph& g);

std::vector<int> read_label_file(std::istream& in);
Labeling dense_labeling(const std::vector<int>& raw);

}  // namespace blockcd
