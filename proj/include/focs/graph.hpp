#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace focs {

using NodeId = std::uint32_t;
using EdgeCount = std::uint64_t;

enum class GraphMode { unipartite, bipartite };

// Thrown for malformed input files; carries the offending line number.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Undirected multigraph in CSR form. Edge multiplicities are first-class
// integers; a self-loop of multiplicity c contributes 2c to the degree.
// Bipartite graphs place side U at ids [0, num_u) and side V at
// [num_u, num_u + num_v); edges only cross sides and self-loops cannot occur.
// Immutable after construction, so concurrent read-only use is safe.
class SparseGraph {
public:
    struct Neighbor {
        NodeId node;
        std::uint32_t multiplicity;
    };

    GraphMode mode() const { return mode_; }
    bool is_bipartite() const { return mode_ == GraphMode::bipartite; }
    NodeId num_nodes() const { return static_cast<NodeId>(offsets_.size() - 1); }
    NodeId num_u() const { return num_u_; }
    NodeId num_v() const { return num_v_; }
    // true for V-side ids of a bipartite graph
    bool on_side_v(NodeId u) const { return is_bipartite() && u >= num_u_; }

    EdgeCount num_edges() const { return total_degree_ / 2; }
    EdgeCount total_degree() const { return total_degree_; }
    EdgeCount degree(NodeId u) const { return degrees_[u]; }

    std::span<const Neighbor> neighbors(NodeId u) const {
        return {adjacency_.data() + offsets_[u], adjacency_.data() + offsets_[u + 1]};
    }

    // Multiplicity of edge (u, v); 0 when absent. O(log deg(u)).
    std::uint32_t multiplicity(NodeId u, NodeId v) const;
    std::uint32_t self_loops(NodeId u) const { return is_bipartite() ? 0 : multiplicity(u, u); }

    const std::string& label(NodeId u) const { return labels_[u]; }
    // Dense id for a label, or throws std::out_of_range.
    NodeId node_by_label(const std::string& label) const;
    bool has_label(const std::string& label) const { return label_to_id_.count(label) > 0; }

    void check_node(NodeId u) const {
        if (u >= num_nodes()) throw std::out_of_range("node id " + std::to_string(u) + " out of range");
    }

private:
    friend class GraphBuilder;
    GraphMode mode_ = GraphMode::unipartite;
    NodeId num_u_ = 0;
    NodeId num_v_ = 0;
    EdgeCount total_degree_ = 0;
    std::vector<std::size_t> offsets_;
    std::vector<Neighbor> adjacency_;
    std::vector<EdgeCount> degrees_;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, NodeId> label_to_id_;
};

// Accumulates edges (repeats sum their multiplicities) and freezes them into
// a SparseGraph. Node count is fixed up front; labels default to the decimal
// id ("u:i"/"v:j" locals for bipartite).
class GraphBuilder {
public:
    GraphBuilder(GraphMode mode, NodeId num_u, NodeId num_v = 0);

    NodeId num_nodes() const { return num_u_ + num_v_; }
    void add_edge(NodeId u, NodeId v, std::uint32_t multiplicity = 1);
    void set_label(NodeId u, std::string label);

    SparseGraph build();

private:
    GraphMode mode_;
    NodeId num_u_;
    NodeId num_v_;
    std::unordered_map<std::uint64_t, std::uint64_t> edge_mult_;
    std::vector<std::string> labels_;
};

// A candidate community. Unipartite: any node subset. Bipartite: node ids
// from both sides (the U/V side-sets are recovered from the id ranges).
// Ids are kept sorted and duplicate-free.
struct Community {
    std::vector<NodeId> nodes;

    Community() = default;
    explicit Community(std::vector<NodeId> ids);

    std::size_t size() const { return nodes.size(); }
    bool contains(NodeId u) const;
    // Side-set sizes for a bipartite host graph.
    std::size_t size_u(const SparseGraph& g) const;
    std::size_t size_v(const SparseGraph& g) const { return size() - size_u(g); }

    // Throws std::invalid_argument when ids are out of range or (bipartite)
    // a side constraint is broken by construction elsewhere.
    void validate(const SparseGraph& g) const;
};

// --- degree queries (all read-only) ---

// d_S = sum of degrees over S.
EdgeCount subset_degree(const SparseGraph& g, std::span<const NodeId> s);

// d_u(S): edge multiplicities from u into S; a self-loop at u counts 2 when
// u is in S. S must be sorted.
EdgeCount degree_into(const SparseGraph& g, NodeId u, std::span<const NodeId> s);

// d_S(T) = sum over u in S of d_u(T). T must be sorted.
EdgeCount cross_degree(const SparseGraph& g, std::span<const NodeId> s, std::span<const NodeId> t);

// --- file formats ---
//
// Edge list: whitespace-separated "u v [multiplicity]", '#' comments.
// Bipartite files either prefix every id with "u:"/"v:" or start with a
// header "%bipartite nu nv" and use global integer ids (V side offset by nu).
// An optional "%nodes n" header fixes the unipartite node count and makes ids
// dense integers. "%label <id> <label>" lines carry non-canonical labels.
SparseGraph load_edge_list(const std::string& path, GraphMode mode);
SparseGraph read_edge_list(std::istream& in, GraphMode mode);
void save_edge_list(const SparseGraph& g, const std::string& path);
void write_edge_list(const SparseGraph& g, std::ostream& out);

// Community files: one community per line, ids are node labels ('#' comments).
std::vector<Community> load_communities(const std::string& path, const SparseGraph& g);
std::vector<Community> read_communities(std::istream& in, const SparseGraph& g);
void write_communities(const std::vector<Community>& communities, const SparseGraph& g, std::ostream& out);

}  // namespace focs
