#include "focs/graph.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace focs {

namespace {

std::uint64_t edge_key(NodeId a, NodeId b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

std::uint32_t SparseGraph::multiplicity(NodeId u, NodeId v) const {
    check_node(u);
    check_node(v);
    auto nbrs = neighbors(u);
    auto it = std::lower_bound(nbrs.begin(), nbrs.end(), v,
                               [](const Neighbor& n, NodeId x) { return n.node < x; });
    return (it != nbrs.end() && it->node == v) ? it->multiplicity : 0;
}

NodeId SparseGraph::node_by_label(const std::string& label) const {
    auto it = label_to_id_.find(label);
    if (it == label_to_id_.end()) throw std::out_of_range("unknown node label '" + label + "'");
    return it->second;
}

GraphBuilder::GraphBuilder(GraphMode mode, NodeId num_u, NodeId num_v)
    : mode_(mode), num_u_(num_u), num_v_(num_v) {
    if (mode == GraphMode::unipartite && num_v != 0)
        throw std::invalid_argument("unipartite graph cannot have a V side");
    labels_.resize(num_nodes());
}

void GraphBuilder::add_edge(NodeId u, NodeId v, std::uint32_t multiplicity) {
    if (u >= num_nodes() || v >= num_nodes()) throw std::out_of_range("edge endpoint out of range");
    if (multiplicity < 1) throw std::invalid_argument("edge multiplicity must be >= 1");
    if (mode_ == GraphMode::bipartite) {
        const bool u_on_v = u >= num_u_;
        const bool v_on_v = v >= num_u_;
        if (u_on_v == v_on_v) throw std::invalid_argument("bipartite edge must join the two sides");
    }
    edge_mult_[edge_key(u, v)] += multiplicity;
}

void GraphBuilder::set_label(NodeId u, std::string label) {
    if (u >= num_nodes()) throw std::out_of_range("node id out of range");
    labels_[u] = std::move(label);
}

SparseGraph GraphBuilder::build() {
    SparseGraph g;
    g.mode_ = mode_;
    g.num_u_ = num_u_;
    g.num_v_ = num_v_;
    const NodeId n = num_nodes();

    std::vector<std::size_t> counts(n, 0);
    for (const auto& [key, mult] : edge_mult_) {
        const NodeId a = static_cast<NodeId>(key >> 32);
        const NodeId b = static_cast<NodeId>(key & 0xffffffffu);
        counts[a]++;
        if (b != a) counts[b]++;
    }
    g.offsets_.assign(n + 1, 0);
    for (NodeId u = 0; u < n; ++u) g.offsets_[u + 1] = g.offsets_[u] + counts[u];
    g.adjacency_.resize(g.offsets_[n]);

    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& [key, mult] : edge_mult_) {
        const NodeId a = static_cast<NodeId>(key >> 32);
        const NodeId b = static_cast<NodeId>(key & 0xffffffffu);
        const auto m = static_cast<std::uint32_t>(mult);
        g.adjacency_[cursor[a]++] = {b, m};
        if (b != a) g.adjacency_[cursor[b]++] = {a, m};
    }
    for (NodeId u = 0; u < n; ++u) {
        std::sort(g.adjacency_.begin() + g.offsets_[u], g.adjacency_.begin() + g.offsets_[u + 1],
                  [](const SparseGraph::Neighbor& x, const SparseGraph::Neighbor& y) { return x.node < y.node; });
    }

    g.degrees_.assign(n, 0);
    for (NodeId u = 0; u < n; ++u) {
        EdgeCount d = 0;
        for (const auto& nb : g.neighbors(u)) d += (nb.node == u ? 2ull : 1ull) * nb.multiplicity;
        g.degrees_[u] = d;
        g.total_degree_ += d;
    }

    g.labels_ = std::move(labels_);
    for (NodeId u = 0; u < n; ++u) {
        if (g.labels_[u].empty()) {
            if (mode_ == GraphMode::bipartite) {
                g.labels_[u] = u < num_u_ ? "u:" + std::to_string(u)
                                          : "v:" + std::to_string(u - num_u_);
            } else {
                g.labels_[u] = std::to_string(u);
            }
        }
    }
    for (NodeId u = 0; u < n; ++u) {
        if (!g.label_to_id_.emplace(g.labels_[u], u).second)
            throw std::invalid_argument("duplicate node label '" + g.labels_[u] + "'");
    }
    return g;
}

Community::Community(std::vector<NodeId> ids) : nodes(std::move(ids)) {
    std::sort(nodes.begin(), nodes.end());
    if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end())
        throw std::invalid_argument("community contains duplicate node ids");
}

bool Community::contains(NodeId u) const {
    return std::binary_search(nodes.begin(), nodes.end(), u);
}

std::size_t Community::size_u(const SparseGraph& g) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), g.num_u());
    return static_cast<std::size_t>(it - nodes.begin());
}

void Community::validate(const SparseGraph& g) const {
    for (NodeId u : nodes) g.check_node(u);
}

EdgeCount subset_degree(const SparseGraph& g, std::span<const NodeId> s) {
    EdgeCount total = 0;
    for (NodeId u : s) {
        g.check_node(u);
        total += g.degree(u);
    }
    return total;
}

EdgeCount degree_into(const SparseGraph& g, NodeId u, std::span<const NodeId> s) {
    g.check_node(u);
    for (NodeId v : s) g.check_node(v);
    EdgeCount total = 0;
    for (const auto& nb : g.neighbors(u)) {
        if (std::binary_search(s.begin(), s.end(), nb.node))
            total += (nb.node == u ? 2ull : 1ull) * nb.multiplicity;
    }
    return total;
}

EdgeCount cross_degree(const SparseGraph& g, std::span<const NodeId> s, std::span<const NodeId> t) {
    EdgeCount total = 0;
    for (NodeId u : s) total += degree_into(g, u, t);
    return total;
}

namespace {

struct Token {
    std::string text;
    bool side_v = false;     // "v:" prefix seen
    bool prefixed = false;   // either prefix seen
};

Token split_prefix(const std::string& raw) {
    Token t;
    if (raw.rfind("u:", 0) == 0) {
        t.text = raw.substr(2);
        t.prefixed = true;
    } else if (raw.rfind("v:", 0) == 0) {
        t.text = raw.substr(2);
        t.prefixed = true;
        t.side_v = true;
    } else {
        t.text = raw;
    }
    return t;
}

bool parse_u64(const std::string& s, std::uint64_t& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

std::uint32_t parse_multiplicity(const std::string& s, std::size_t lineno) {
    // Negative and fractional weights are rejected outright: the null model
    // counts stubs, so there is nothing sensible to round to.
    if (!s.empty() && (s[0] == '-' || s.find('.') != std::string::npos))
        throw ParseError("edge multiplicity must be a positive integer, got '" + s + "'", lineno);
    std::uint64_t m = 0;
    if (!parse_u64(s, m) || m < 1 || m > UINT32_MAX)
        throw ParseError("edge multiplicity must be a positive integer, got '" + s + "'", lineno);
    return static_cast<std::uint32_t>(m);
}

struct RawEdge {
    NodeId a;
    NodeId b;
    std::uint32_t mult;
};

}  // namespace

SparseGraph read_edge_list(std::istream& in, GraphMode mode) {
    std::string line;
    std::size_t lineno = 0;

    bool header_seen = false;
    bool saw_edge = false;
    std::uint64_t header_nu = 0, header_nv = 0;

    // Prefix-mode bipartite files get side-local ids first; V ids are offset
    // once the U-side count is known.
    std::unordered_map<std::string, NodeId> ids_u, ids_v;
    std::vector<std::string> labels_u, labels_v;
    std::vector<std::pair<NodeId, std::string>> label_lines;
    std::vector<RawEdge> edges;           // header mode: global ids
    struct PrefixEdge { NodeId u_local, v_local; std::uint32_t mult; };
    std::vector<PrefixEdge> prefix_edges; // prefix/unipartite mode: side-local ids
    bool prefix_mode = false;

    auto intern = [](std::unordered_map<std::string, NodeId>& ids, std::vector<std::string>& labels,
                     const std::string& label) {
        auto [it, inserted] = ids.emplace(label, static_cast<NodeId>(labels.size()));
        if (inserted) labels.push_back(label);
        return it->second;
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok0;
        if (!(ls >> tok0)) continue;

        if (tok0[0] == '%') {
            if (saw_edge) throw ParseError("header line after edge data", lineno);
            if (tok0 == "%bipartite") {
                if (mode != GraphMode::bipartite)
                    throw ParseError("%bipartite header in a unipartite load", lineno);
                if (!(ls >> header_nu >> header_nv) || header_nu == 0 || header_nv == 0)
                    throw ParseError("expected '%bipartite nu nv'", lineno);
                header_seen = true;
            } else if (tok0 == "%nodes") {
                if (mode != GraphMode::unipartite)
                    throw ParseError("%nodes header in a bipartite load", lineno);
                if (!(ls >> header_nu) || header_nu == 0)
                    throw ParseError("expected '%nodes n'", lineno);
                header_seen = true;
            } else if (tok0 == "%label") {
                std::uint64_t id = 0;
                std::string id_tok, label;
                if (!(ls >> id_tok >> label) || !parse_u64(id_tok, id))
                    throw ParseError("expected '%label <id> <label>'", lineno);
                label_lines.emplace_back(static_cast<NodeId>(id), label);
            } else {
                throw ParseError("unknown header '" + tok0 + "'", lineno);
            }
            std::string extra;
            if (ls >> extra) throw ParseError("trailing token '" + extra + "' in header", lineno);
            continue;
        }

        std::string tok1, tok2, extra;
        if (!(ls >> tok1)) throw ParseError("expected 'u v [multiplicity]'", lineno);
        std::uint32_t mult = 1;
        if (ls >> tok2) mult = parse_multiplicity(tok2, lineno);
        if (ls >> extra) throw ParseError("trailing token '" + extra + "'", lineno);

        Token a = split_prefix(tok0), b = split_prefix(tok1);
        saw_edge = true;

        if (mode == GraphMode::unipartite) {
            if (a.prefixed || b.prefixed)
                throw ParseError("side prefix in a unipartite edge list", lineno);
            if (header_seen) {
                std::uint64_t ua = 0, ub = 0;
                if (!parse_u64(a.text, ua) || !parse_u64(b.text, ub))
                    throw ParseError("ids must be integers when a %nodes header is present", lineno);
                if (ua >= header_nu || ub >= header_nu)
                    throw ParseError("node id exceeds declared node count", lineno);
                prefix_edges.push_back({static_cast<NodeId>(ua), static_cast<NodeId>(ub), mult});
            } else {
                NodeId ia = intern(ids_u, labels_u, tok0);
                NodeId ib = intern(ids_u, labels_u, tok1);
                prefix_edges.push_back({ia, ib, mult});
            }
            continue;
        }

        // bipartite
        if (header_seen) {
            if (a.prefixed || b.prefixed)
                throw ParseError("mixing side prefixes with a %bipartite header", lineno);
            std::uint64_t ga = 0, gb = 0;
            if (!parse_u64(a.text, ga) || !parse_u64(b.text, gb))
                throw ParseError("ids must be integers when a %bipartite header is present", lineno);
            const std::uint64_t n_total = header_nu + header_nv;
            if (ga >= n_total || gb >= n_total)
                throw ParseError("node id exceeds declared node count", lineno);
            if ((ga < header_nu) == (gb < header_nu))
                throw ParseError("bipartite edge joins two nodes on the same side", lineno);
            edges.push_back({static_cast<NodeId>(ga), static_cast<NodeId>(gb), mult});
        } else {
            if (!a.prefixed || !b.prefixed)
                throw ParseError("bipartite ids need 'u:'/'v:' prefixes (or a %bipartite header)", lineno);
            if (a.side_v == b.side_v)
                throw ParseError("bipartite edge joins two nodes on the same side", lineno);
            prefix_mode = true;
            const Token& ut = a.side_v ? b : a;
            const Token& vt = a.side_v ? a : b;
            NodeId iu = intern(ids_u, labels_u, "u:" + ut.text);
            NodeId iv = intern(ids_v, labels_v, "v:" + vt.text);
            prefix_edges.push_back({iu, iv, mult});
        }
    }
    if (in.bad()) throw std::runtime_error("I/O error while reading edge list");

    if (mode == GraphMode::bipartite && !header_seen && !prefix_mode && !saw_edge)
        throw ParseError("empty bipartite edge list (no header, no edges)", 0);

    GraphBuilder builder = [&] {
        if (mode == GraphMode::unipartite) {
            const NodeId n = header_seen ? static_cast<NodeId>(header_nu)
                                         : static_cast<NodeId>(labels_u.size());
            return GraphBuilder(GraphMode::unipartite, n);
        }
        if (header_seen)
            return GraphBuilder(GraphMode::bipartite, static_cast<NodeId>(header_nu),
                                static_cast<NodeId>(header_nv));
        return GraphBuilder(GraphMode::bipartite, static_cast<NodeId>(labels_u.size()),
                            static_cast<NodeId>(labels_v.size()));
    }();

    if (!header_seen) {
        for (NodeId i = 0; i < labels_u.size(); ++i) builder.set_label(i, labels_u[i]);
        const NodeId nu = static_cast<NodeId>(labels_u.size());
        for (NodeId i = 0; i < labels_v.size(); ++i) builder.set_label(nu + i, labels_v[i]);
    }
    for (auto& [id, label] : label_lines) {
        if (id >= builder.num_nodes()) throw std::runtime_error("%label id out of range");
        builder.set_label(id, label);
    }

    const NodeId nu_final = mode == GraphMode::bipartite && !header_seen
                                ? static_cast<NodeId>(labels_u.size())
                                : 0;
    for (const auto& e : prefix_edges) {
        if (mode == GraphMode::bipartite)
            builder.add_edge(e.u_local, nu_final + e.v_local, e.mult);
        else
            builder.add_edge(e.u_local, e.v_local, e.mult);
    }
    for (const auto& e : edges) builder.add_edge(e.a, e.b, e.mult);
    return builder.build();
}

SparseGraph load_edge_list(const std::string& path, GraphMode mode) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open edge list '" + path + "'");
    return read_edge_list(in, mode);
}

void write_edge_list(const SparseGraph& g, std::ostream& out) {
    if (g.is_bipartite())
        out << "%bipartite " << g.num_u() << ' ' << g.num_v() << '\n';
    else
        out << "%nodes " << g.num_nodes() << '\n';
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
        const std::string canonical = g.is_bipartite()
                                          ? (u < g.num_u() ? "u:" + std::to_string(u)
                                                           : "v:" + std::to_string(u - g.num_u()))
                                          : std::to_string(u);
        if (g.label(u) != canonical) out << "%label " << u << ' ' << g.label(u) << '\n';
    }
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
        for (const auto& nb : g.neighbors(u)) {
            if (nb.node < u) continue;
            out << u << ' ' << nb.node;
            if (nb.multiplicity != 1) out << ' ' << nb.multiplicity;
            out << '\n';
        }
    }
}

void save_edge_list(const SparseGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_edge_list(g, out);
    if (!out) throw std::runtime_error("error writing '" + path + "'");
}

std::vector<Community> read_communities(std::istream& in, const SparseGraph& g) {
    std::vector<Community> result;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<NodeId> ids;
        std::string tok;
        while (ls >> tok) {
            if (!g.has_label(tok)) throw ParseError("unknown node label '" + tok + "'", lineno);
            ids.push_back(g.node_by_label(tok));
        }
        if (ids.empty()) continue;
        std::sort(ids.begin(), ids.end());
        if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
            throw ParseError("duplicate node in community", lineno);
        Community c;
        c.nodes = std::move(ids);
        result.push_back(std::move(c));
    }
    if (in.bad()) throw std::runtime_error("I/O error while reading communities");
    return result;
}

std::vector<Community> load_communities(const std::string& path, const SparseGraph& g) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open community file '" + path + "'");
    return read_communities(in, g);
}

void write_communities(const std::vector<Community>& communities, const SparseGraph& g,
                       std::ostream& out) {
    for (const auto& c : communities) {
        for (std::size_t i = 0; i < c.nodes.size(); ++i) {
            if (i) out << ' ';
            out << g.label(c.nodes[i]);
        }
        out << '\n';
    }
}

}  // namespace focs
