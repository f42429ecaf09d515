#include "blockcd/graph.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace blockcd {

Graph Graph::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    if (n < 0) throw std::invalid_argument("graph: negative node count");
    std::vector<std::vector<int>> rows(static_cast<std::size_t>(n));
    for (auto [a, b] : edges) {
        if (a < 0 || a >= n || b < 0 || b >= n)
            throw std::invalid_argument("graph: edge endpoint out of range");
        rows[static_cast<std::size_t>(a)].push_back(b);
        if (a != b) rows[static_cast<std::size_t>(b)].push_back(a);
    }
    Graph g;
    g.num_nodes_ = n;
    g.offsets_.assign(1, 0);
    g.offsets_.reserve(static_cast<std::size_t>(n) + 1);
    for (auto& row : rows) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
        g.adjacency_.insert(g.adjacency_.end(), row.begin(), row.end());
        g.offsets_.push_back(g.adjacency_.size());
    }
    g.total_degree_ = static_cast<std::int64_t>(g.adjacency_.size());
    return g;
}

bool Graph::has_edge(int i, int j) const {
    auto row = neighbors(i);
    return std::binary_search(row.begin(), row.end(), j);
}

std::int64_t Graph::num_loops() const {
    std::int64_t loops = 0;
    for (int i = 0; i < num_nodes_; ++i)
        if (has_loop(i)) ++loops;
    return loops;
}

std::int64_t Graph::num_edges() const { return (total_degree_ - num_loops()) / 2; }

void Labeling::check_valid() const {
    for (int l : labels)
        if (l < 0 || l >= num_communities)
            throw std::invalid_argument("labeling: label out of range");
}

BlockStats block_stats(const Graph& g, const Labeling& e) {
    if (e.size() != g.num_nodes())
        throw std::invalid_argument("block_stats: labeling length mismatch");
    e.check_valid();
    const int K = e.num_communities;
    BlockStats s;
    s.num_communities = K;
    s.num_nodes = g.num_nodes();
    s.total_degree = g.total_degree();
    s.edges.assign(static_cast<std::size_t>(K) * K, 0);
    s.degree_sums.assign(static_cast<std::size_t>(K), 0);
    s.sizes.assign(static_cast<std::size_t>(K), 0);
    for (int i = 0; i < g.num_nodes(); ++i) {
        const int k = e.labels[static_cast<std::size_t>(i)];
        ++s.sizes[static_cast<std::size_t>(k)];
        for (int j : g.neighbors(i)) ++s.o(k, e.labels[static_cast<std::size_t>(j)]);
    }
    for (int k = 0; k < K; ++k)
        for (int l = 0; l < K; ++l) s.degree_sums[static_cast<std::size_t>(k)] += s.o(k, l);
    return s;
}

StatsDelta apply_switch(const BlockStats& stats, const Graph& g, const Labeling& e,
                        int node, int to_label) {
    if (to_label < 0 || to_label >= stats.num_communities)
        throw std::invalid_argument("apply_switch: target label out of range");
    const int from = e.labels[static_cast<std::size_t>(node)];  // no-op when == to_label
    StatsDelta d;
    d.node = node;
    d.from_label = from;
    d.to_label = to_label;
    d.neighbor_counts.assign(static_cast<std::size_t>(stats.num_communities), 0);
    for (int j : g.neighbors(node)) {
        if (j == node) {
            d.self_loop = true;
        } else {
            ++d.neighbor_counts[static_cast<std::size_t>(e.labels[static_cast<std::size_t>(j)])];
        }
    }
    return d;
}

namespace {

void shift_node(BlockStats& s, const StatsDelta& d, int from, int to) {
    const int K = s.num_communities;
    const std::int64_t loop = d.self_loop ? 1 : 0;
    std::int64_t contact = 0;
    for (int k = 0; k < K; ++k) {
        const std::int64_t c = d.neighbor_counts[static_cast<std::size_t>(k)];
        contact += c;
        s.o(from, k) -= c;
        s.o(k, from) -= c;
        s.o(to, k) += c;
        s.o(k, to) += c;
    }
    s.o(from, from) -= loop;
    s.o(to, to) += loop;
    // The node carries its whole degree (contact + loop) from one margin to
    // the other; cross terms cancel in the row sums.
    s.degree_sums[static_cast<std::size_t>(from)] -= contact + loop;
    s.degree_sums[static_cast<std::size_t>(to)] += contact + loop;
    --s.sizes[static_cast<std::size_t>(from)];
    ++s.sizes[static_cast<std::size_t>(to)];
}

}  // namespace

void apply_delta(BlockStats& stats, const StatsDelta& delta) {
    shift_node(stats, delta, delta.from_label, delta.to_label);
}

void revert_delta(BlockStats& stats, const StatsDelta& delta) {
    shift_node(stats, delta, delta.to_label, delta.from_label);
}

namespace {

struct NameTable {
    std::unordered_map<std::string, int> index;
    std::vector<std::string> names;

    int intern(const std::string& name) {
        auto [it, inserted] = index.emplace(name, static_cast<int>(names.size()));
        if (inserted) names.push_back(name);
        return it->second;
    }
};

}  // namespace

LoadedGraph load_edge_list(std::istream& in) {
    NameTable table;
    std::vector<std::pair<int, int>> edges;
    std::string line;
    int line_no = 0;
    bool any = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string a, b, extra;
        if (!(ls >> a)) continue;         // blank line
        if (a[0] == '#') continue;        // comment
        any = true;
        if (!(ls >> b) || (ls >> extra))
            throw std::runtime_error("edge list: line " + std::to_string(line_no) +
                                     ": expected two tokens");
        const int ia = table.intern(a);
        const int ib = table.intern(b);
        edges.emplace_back(ia, ib);
    }
    if (!any) throw std::runtime_error("edge list: empty input");
    LoadedGraph out;
    out.graph = Graph::from_edges(static_cast<int>(table.names.size()), edges);
    out.node_names = std::move(table.names);
    return out;
}

namespace {

// GML tokens: brackets, bare words, numbers, quoted strings.
std::vector<std::string> gml_tokens(std::istream& in) {
    std::vector<std::string> tokens;
    char c;
    while (in.get(c)) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        if (c == '[' || c == ']') {
            tokens.emplace_back(1, c);
        } else if (c == '"') {
            std::string s = "\"";
            while (in.get(c) && c != '"') s += c;
            tokens.push_back(s);
        } else if (c == '#') {
            std::string skip;
            std::getline(in, skip);
        } else {
            std::string s(1, c);
            while (in.get(c) && !std::isspace(static_cast<unsigned char>(c)) && c != '[' &&
                   c != ']')
                s += c;
            if (c == '[' || c == ']') in.unget();
            tokens.push_back(s);
        }
    }
    return tokens;
}

}  // namespace

LoadedGraph load_gml_subset(std::istream& in) {
    const auto tokens = gml_tokens(in);
    std::unordered_map<long long, int> id_to_index;
    std::vector<std::string> names;
    std::vector<long long> node_values;
    std::vector<bool> has_value;
    std::vector<std::pair<int, int>> edges;

    std::size_t pos = 0;
    const auto at_end = [&] { return pos >= tokens.size(); };

    // Skips a scalar or a bracketed block following a key.
    std::function<void()> skip_value = [&] {
        if (at_end()) throw std::runtime_error("gml: truncated input");
        if (tokens[pos] == "[") {
            ++pos;
            while (!at_end() && tokens[pos] != "]") {
                ++pos;  // key
                skip_value();
            }
            if (at_end()) throw std::runtime_error("gml: unbalanced brackets");
            ++pos;
        } else {
            ++pos;
        }
    };

    const auto parse_int = [&](const std::string& key) -> long long {
        if (at_end() || tokens[pos] == "[" || tokens[pos] == "]")
            throw std::runtime_error("gml: expected number after '" + key + "'");
        return std::stoll(tokens[pos++]);
    };

    const auto parse_node = [&] {
        if (at_end() || tokens[pos] != "[") throw std::runtime_error("gml: node block expected");
        ++pos;
        long long id = -1, value = 0;
        bool saw_id = false, saw_value = false;
        while (!at_end() && tokens[pos] != "]") {
            const std::string key = tokens[pos++];
            if (key == "id") {
                id = parse_int(key);
                saw_id = true;
            } else if (key == "value") {
                value = parse_int(key);
                saw_value = true;
            } else {
                skip_value();
            }
        }
        if (at_end()) throw std::runtime_error("gml: unbalanced brackets");
        ++pos;
        if (!saw_id) throw std::runtime_error("gml: node without id");
        if (id_to_index.count(id)) throw std::runtime_error("gml: duplicate node id");
        id_to_index[id] = static_cast<int>(names.size());
        names.push_back(std::to_string(id));
        node_values.push_back(value);
        has_value.push_back(saw_value);
    };

    const auto parse_edge = [&] {
        if (at_end() || tokens[pos] != "[") throw std::runtime_error("gml: edge block expected");
        ++pos;
        long long source = -1, target = -1;
        bool saw_s = false, saw_t = false;
        while (!at_end() && tokens[pos] != "]") {
            const std::string key = tokens[pos++];
            if (key == "source") {
                source = parse_int(key);
                saw_s = true;
            } else if (key == "target") {
                target = parse_int(key);
                saw_t = true;
            } else {
                skip_value();
            }
        }
        if (at_end()) throw std::runtime_error("gml: unbalanced brackets");
        ++pos;
        if (!saw_s || !saw_t) throw std::runtime_error("gml: edge missing source/target");
        auto si = id_to_index.find(source);
        auto ti = id_to_index.find(target);
        if (si == id_to_index.end() || ti == id_to_index.end())
            throw std::runtime_error("gml: edge references unknown node id");
        edges.emplace_back(si->second, ti->second);
    };

    // Find the top-level `graph [` block.
    while (!at_end() && tokens[pos] != "graph") {
        ++pos;  // key
        skip_value();
    }
    if (at_end()) throw std::runtime_error("gml: no graph block");
    ++pos;
    if (at_end() || tokens[pos] != "[") throw std::runtime_error("gml: no graph block");
    ++pos;
    while (!at_end() && tokens[pos] != "]") {
        const std::string key = tokens[pos++];
        if (key == "node") {
            parse_node();
        } else if (key == "edge") {
            parse_edge();
        } else {
            skip_value();
        }
    }
    if (at_end()) throw std::runtime_error("gml: unbalanced brackets");

    LoadedGraph out;
    out.graph = Graph::from_edges(static_cast<int>(names.size()), edges);
    out.node_names = std::move(names);
    const bool all_values =
        !has_value.empty() && std::all_of(has_value.begin(), has_value.end(), [](bool b) { return b; });
    if (all_values) {
        // Map distinct values to dense labels in first-appearance order.
        std::unordered_map<long long, int> value_map;
        Labeling lab;
        lab.labels.reserve(node_values.size());
        for (long long v : node_values) {
            auto [it, inserted] = value_map.emplace(v, static_cast<int>(value_map.size()));
            lab.labels.push_back(it->second);
        }
        lab.num_communities = static_cast<int>(value_map.size());
        out.true_labels = std::move(lab);
    }
    return out;
}

void write_edge_list(std::ostream& out, const Graph& g) {
    for (int i = 0; i < g.num_nodes(); ++i)
        for (int j : g.neighbors(i))
            if (j >= i) out << i << ' ' << j << '\n';
}

ComponentResult largest_connected_component(const Graph& g) {
    const int n = g.num_nodes();
    std::vector<int> component(static_cast<std::size_t>(n), -1);
    int num_components = 0;
    std::vector<int> stack;
    std::vector<std::int64_t> size_of;
    for (int start = 0; start < n; ++start) {
        if (component[static_cast<std::size_t>(start)] != -1) continue;
        const int id = num_components++;
        size_of.push_back(0);
        stack.push_back(start);
        component[static_cast<std::size_t>(start)] = id;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            ++size_of[static_cast<std::size_t>(id)];
            for (int w : g.neighbors(v)) {
                if (component[static_cast<std::size_t>(w)] == -1) {
                    component[static_cast<std::size_t>(w)] = id;
                    stack.push_back(w);
                }
            }
        }
    }
    // Components are discovered in order of their smallest node index, so the
    // first component of maximal size wins ties.
    int best = 0;
    for (int c = 1; c < num_components; ++c)
        if (size_of[static_cast<std::size_t>(c)] > size_of[static_cast<std::size_t>(best)]) best = c;

    ComponentResult res;
    std::vector<int> new_index(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
        if (component[static_cast<std::size_t>(i)] == best) {
            new_index[static_cast<std::size_t>(i)] = static_cast<int>(res.original_index.size());
            res.original_index.push_back(i);
        }
    }
    std::vector<std::pair<int, int>> edges;
    for (int i : res.original_index)
        for (int j : g.neighbors(i))
            if (j >= i)
                edges.emplace_back(new_index[static_cast<std::size_t>(i)],
                                   new_index[static_cast<std::size_t>(j)]);
    res.graph = Graph::from_edges(static_cast<int>(res.original_index.size()), edges);
    return res;
}

std::vector<int> read_label_file(std::istream& in) {
    std::vector<int> raw;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        int v;
        std::string extra;
        if (!(ls >> v)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw std::runtime_error("label file: line " + std::to_string(line_no) +
                                     ": expected one integer");
        }
        if (ls >> extra)
            throw std::runtime_error("label file: line " + std::to_string(line_no) +
                                     ": expected one integer");
        raw.push_back(v);
    }
    return raw;
}

Labeling dense_labeling(const std::vector<int>& raw) {
    std::unordered_map<int, int> map;
    Labeling lab;
    lab.labels.reserve(raw.size());
    for (int v : raw) {
        auto [it, inserted] = map.emplace(v, static_cast<int>(map.size()));
        lab.labels.push_back(it->second);
    }
    lab.num_communities = static_cast<int>(map.size());
    return lab;
}

}  // namespace blockcd
