#include "focs/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace focs {

void Partition::validate(const SparseGraph& g) const {
    if (assignment.size() != g.num_nodes())
        throw std::invalid_argument("partition does not cover the graph");
    std::vector<bool> seen(num_communities, false);
    for (auto c : assignment) {
        if (c >= num_communities) throw std::invalid_argument("community index out of range");
        seen[c] = true;
    }
    for (bool s : seen)
        if (!s) throw std::invalid_argument("community indices are not dense");
}

std::vector<Community> Partition::communities() const {
    std::vector<Community> groups(num_communities);
    for (NodeId u = 0; u < assignment.size(); ++u)
        groups[assignment[u]].nodes.push_back(u);
    return groups;  // node ids ascend per group by construction
}

double modularity(const SparseGraph& g, const Partition& partition) {
    if (g.num_nodes() == 0 || g.total_degree() == 0)
        throw std::invalid_argument("modularity needs a nonempty graph");
    partition.validate(g);

    const double two_m = static_cast<double>(g.total_degree());
    std::vector<EdgeCount> internal_stubs(partition.num_communities, 0);
    std::vector<EdgeCount> volume(partition.num_communities, 0);
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
        const auto c = partition.assignment[u];
        volume[c] += g.degree(u);
        for (const auto& nb : g.neighbors(u)) {
            if (partition.assignment[nb.node] != c) continue;
            internal_stubs[c] += (nb.node == u ? 2ull : 1ull) * nb.multiplicity;
        }
    }
    double q = 0.0;
    for (std::uint32_t c = 0; c < partition.num_communities; ++c) {
        const double vol = static_cast<double>(volume[c]) / two_m;
        q += static_cast<double>(internal_stubs[c]) / two_m - vol * vol;
    }
    return q;
}

namespace {

// One Louvain level: greedy modularity moves until a full sweep makes none.
// Returns the dense community assignment; `moved_any` reports whether the
// level changed anything at all.
std::vector<std::uint32_t> local_moves(const SparseGraph& g, Rng& rng, bool& moved_any) {
    const NodeId n = g.num_nodes();
    const double two_m = static_cast<double>(g.total_degree());
    std::vector<std::uint32_t> comm(n);
    std::iota(comm.begin(), comm.end(), 0u);
    std::vector<double> comm_volume(n, 0.0);
    for (NodeId u = 0; u < n; ++u) comm_volume[u] = static_cast<double>(g.degree(u));

    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), 0u);

    // scratch: weight of u's edges into each touched community
    std::vector<double> weight_to(n, 0.0);
    std::vector<std::uint32_t> touched;

    moved_any = false;
    bool moved = true;
    // sweep cap guards against floating-point gain cycles
    for (int sweep = 0; moved && sweep < 1000; ++sweep) {
        moved = false;
        rng.shuffle(order);
        for (NodeId u : order) {
            const std::uint32_t home = comm[u];
            touched.clear();
            weight_to[home] = 0.0;
            touched.push_back(home);
            for (const auto& nb : g.neighbors(u)) {
                if (nb.node == u) continue;  // self-loops move with u; no effect on the choice
                const std::uint32_t c = comm[nb.node];
                if (weight_to[c] == 0.0 && c != home) touched.push_back(c);
                weight_to[c] += static_cast<double>(nb.multiplicity);
            }

            const double k_u = static_cast<double>(g.degree(u));
            comm_volume[home] -= k_u;

            // gain of joining c, up to constants: w(u->c) - k_u*vol(c)/2m
            std::uint32_t best = home;
            double best_gain = weight_to[home] - k_u * comm_volume[home] / two_m;
            for (const std::uint32_t c : touched) {
                if (c == home) continue;
                const double gain = weight_to[c] - k_u * comm_volume[c] / two_m;
                if (gain > best_gain) {
                    best_gain = gain;
                    best = c;
                }
            }

            comm_volume[best] += k_u;
            comm[u] = best;
            if (best != home) {
                moved = true;
                moved_any = true;
            }
            for (const std::uint32_t c : touched) weight_to[c] = 0.0;
        }
    }

    // renumber densely, keeping first-appearance order by node id
    std::vector<std::uint32_t> dense(n, UINT32_MAX);
    std::uint32_t next = 0;
    for (NodeId u = 0; u < n; ++u) {
        if (dense[comm[u]] == UINT32_MAX) dense[comm[u]] = next++;
        comm[u] = dense[comm[u]];
    }
    return comm;
}

SparseGraph aggregate(const SparseGraph& g, const std::vector<std::uint32_t>& comm,
                      std::uint32_t num_comms) {
    GraphBuilder builder(GraphMode::unipartite, num_comms);
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
        for (const auto& nb : g.neighbors(u)) {
            if (nb.node < u) continue;  // each undirected edge once
            builder.add_edge(comm[u], comm[nb.node], nb.multiplicity);
        }
    }
    return builder.build();
}

}  // namespace

Partition louvain(const SparseGraph& g, std::uint64_t seed) {
    if (g.is_bipartite())
        throw std::invalid_argument("louvain runs on unipartite graphs; use extraction instead");
    if (g.num_nodes() == 0 || g.total_degree() == 0)
        throw std::invalid_argument("louvain needs a nonempty graph");

    Rng rng(seed);
    // node -> community on the original graph, composed across levels
    std::vector<std::uint32_t> flat(g.num_nodes());
    std::iota(flat.begin(), flat.end(), 0u);

    SparseGraph level = g;
    std::uint64_t level_index = 0;
    while (true) {
        Rng level_rng = rng.split(level_index++);
        bool moved_any = false;
        const std::vector<std::uint32_t> comm = local_moves(level, level_rng, moved_any);
        const std::uint32_t num_comms = 1 + *std::max_element(comm.begin(), comm.end());
        for (auto& c : flat) c = comm[c];
        if (!moved_any || num_comms == level.num_nodes()) break;
        level = aggregate(level, comm, num_comms);
    }

    Partition p;
    p.assignment = std::move(flat);
    p.num_communities = 1 + *std::max_element(p.assignment.begin(), p.assignment.end());
    return p;
}

namespace {

struct BipartiteQualityState {
    const SparseGraph& g;
    std::vector<std::uint8_t> in_c;
    std::vector<EdgeCount> toward;  // d_w(C on the opposite side)
    std::size_t size_u = 0, size_v = 0;
    EdgeCount deg_u = 0, deg_v = 0;   // subset degrees of C_U / C_V
    EdgeCount internal = 0;           // edges inside the block, with multiplicity
    double m_total;

    BipartiteQualityState(const SparseGraph& graph, const Community& community)
        : g(graph), in_c(graph.num_nodes(), 0), toward(graph.num_nodes(), 0),
          m_total(static_cast<double>(graph.num_edges())) {
        for (NodeId u : community.nodes) in_c[u] = 1;
        for (NodeId u : community.nodes) {
            if (g.on_side_v(u)) {
                ++size_v;
                deg_v += g.degree(u);
            } else {
                ++size_u;
                deg_u += g.degree(u);
            }
        }
        for (NodeId u : community.nodes)
            for (const auto& nb : g.neighbors(u)) toward[nb.node] += nb.multiplicity;
        for (NodeId u : community.nodes)
            if (!g.on_side_v(u)) internal += toward[u];
    }

    double quality() const {
        return quality_of(internal, deg_u, deg_v, size_u, size_v);
    }

    double quality_of(EdgeCount internal_, EdgeCount deg_u_, EdgeCount deg_v_, std::size_t su,
                      std::size_t sv) const {
        return (static_cast<double>(internal_) -
                static_cast<double>(deg_u_) * static_cast<double>(deg_v_) / m_total) /
               std::sqrt(static_cast<double>(su) * static_cast<double>(sv));
    }

    // Quality after toggling node w in or out; NaN when the toggle would
    // empty a side.
    double toggled_quality(NodeId w) const {
        const bool side_v = g.on_side_v(w);
        const bool inside = in_c[w] != 0;
        const std::int64_t sign = inside ? -1 : +1;
        const std::size_t su = size_u + (!side_v ? sign : 0);
        const std::size_t sv = size_v + (side_v ? sign : 0);
        if (su == 0 || sv == 0) return std::numeric_limits<double>::quiet_NaN();
        const EdgeCount new_internal = internal + sign * static_cast<std::int64_t>(toward[w]);
        const EdgeCount new_deg_u = deg_u + (!side_v ? sign * static_cast<std::int64_t>(g.degree(w)) : 0);
        const EdgeCount new_deg_v = deg_v + (side_v ? sign * static_cast<std::int64_t>(g.degree(w)) : 0);
        return quality_of(new_internal, new_deg_u, new_deg_v, su, sv);
    }

    void toggle(NodeId w) {
        const bool side_v = g.on_side_v(w);
        const bool entering = in_c[w] == 0;
        const std::int64_t sign = entering ? +1 : -1;
        internal += sign * static_cast<std::int64_t>(toward[w]);
        if (side_v) {
            deg_v += sign * static_cast<std::int64_t>(g.degree(w));
            size_v += sign;
        } else {
            deg_u += sign * static_cast<std::int64_t>(g.degree(w));
            size_u += sign;
        }
        for (const auto& nb : g.neighbors(w))
            toward[nb.node] += sign * static_cast<std::int64_t>(nb.multiplicity);
        in_c[w] = entering ? 1 : 0;
    }

    Community community() const {
        Community c;
        for (NodeId u = 0; u < g.num_nodes(); ++u)
            if (in_c[u]) c.nodes.push_back(u);
        return c;
    }
};

void require_bipartite_community(const SparseGraph& g, const Community& community) {
    if (!g.is_bipartite()) throw std::invalid_argument("graph is not bipartite");
    community.validate(g);
    const std::size_t su = community.size_u(g);
    if (su == 0 || su == community.size())
        throw std::invalid_argument("bipartite community needs members on both sides");
}

}  // namespace

double bipartite_quality(const SparseGraph& g, const Community& community) {
    require_bipartite_community(g, community);
    BipartiteQualityState state(g, community);
    return state.quality();
}

double bipartite_toggle_gain(const SparseGraph& g, const Community& community, NodeId w) {
    require_bipartite_community(g, community);
    g.check_node(w);
    BipartiteQualityState state(g, community);
    return state.toggled_quality(w) - state.quality();
}

Community anneal_extract(const SparseGraph& g, const Community& seed_community,
                         std::size_t max_iterations, Rng& rng) {
    require_bipartite_community(g, seed_community);
    BipartiteQualityState state(g, seed_community);

    std::vector<NodeId> candidates;
    std::vector<double> gains;
    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
        const double q = state.quality();
        candidates.clear();
        gains.clear();
        double total_gain = 0.0;
        for (NodeId w = 0; w < g.num_nodes(); ++w) {
            const double q_new = state.toggled_quality(w);
            if (std::isnan(q_new)) continue;
            const double gain = q_new - q;
            if (gain > 0.0) {
                candidates.push_back(w);
                gains.push_back(gain);
                total_gain += gain;
            }
        }
        if (candidates.empty()) break;

        // move choice proportional to gain
        double r = rng.uniform() * total_gain;
        std::size_t pick = 0;
        for (; pick + 1 < gains.size(); ++pick) {
            r -= gains[pick];
            if (r < 0.0) break;
        }
        state.toggle(candidates[pick]);
    }
    return state.community();
}

}  // namespace focs
