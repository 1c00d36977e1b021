#include "focs/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace focs {

void DegreeSequenceSpec::validate() const {
    if (n < 2) throw std::invalid_argument("degree sequence needs n >= 2");
    if (d_min < 1) throw std::invalid_argument("d_min must be >= 1");
    if (d_max < d_min) throw std::invalid_argument("d_max must be >= d_min");
}

void LfrSpec::validate() const {
    if (community_min < 3) throw std::invalid_argument("community_min must be >= 3");
    if (community_max < community_min)
        throw std::invalid_argument("community_max must be >= community_min");
    if (community_max > n) throw std::invalid_argument("community_max exceeds n");
    if (mu < 0.0 || mu > 1.0) throw std::invalid_argument("mu must lie in [0,1]");
    DegreeSequenceSpec ds = degree_spec;
    ds.n = n;
    ds.validate();
}

std::vector<std::uint32_t> sample_degrees(const DegreeSequenceSpec& spec, Rng& rng) {
    spec.validate();
    const std::size_t values = spec.d_max - spec.d_min + 1;
    std::vector<double> cumulative(values);
    double total = 0.0;
    for (std::size_t i = 0; i < values; ++i) {
        total += std::pow(static_cast<double>(spec.d_min + i), spec.exponent);
        cumulative[i] = total;
    }

    std::vector<std::uint32_t> degrees(spec.n);
    for (auto& d : degrees) {
        const double r = rng.uniform() * total;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
        const std::size_t idx = std::min<std::size_t>(it - cumulative.begin(), values - 1);
        d = spec.d_min + static_cast<std::uint32_t>(idx);
    }

    std::uint64_t sum = std::accumulate(degrees.begin(), degrees.end(), std::uint64_t{0});
    if (sum % 2 == 1) {
        std::vector<std::size_t> can_grow;
        for (std::size_t i = 0; i < degrees.size(); ++i)
            if (degrees[i] < spec.d_max) can_grow.push_back(i);
        if (can_grow.empty())
            throw std::invalid_argument("infeasible degree range: odd total and every degree at d_max");
        degrees[can_grow[rng.uniform_index(can_grow.size())]] += 1;
    }
    return degrees;
}

SparseGraph configuration_model(const std::vector<std::uint32_t>& degrees, Rng& rng) {
    std::uint64_t sum = std::accumulate(degrees.begin(), degrees.end(), std::uint64_t{0});
    if (sum % 2 == 1) throw std::invalid_argument("configuration model needs an even degree sum");

    std::vector<NodeId> stubs;
    stubs.reserve(sum);
    for (std::size_t u = 0; u < degrees.size(); ++u)
        stubs.insert(stubs.end(), degrees[u], static_cast<NodeId>(u));
    rng.shuffle(stubs);

    GraphBuilder builder(GraphMode::unipartite, static_cast<NodeId>(degrees.size()));
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) builder.add_edge(stubs[i], stubs[i + 1]);
    return builder.build();
}

namespace {

// Pair up a stub pool uniformly at random into edges on the builder.
void match_stubs(GraphBuilder& builder, std::vector<NodeId>& stubs, Rng& rng) {
    rng.shuffle(stubs);
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) builder.add_edge(stubs[i], stubs[i + 1]);
}

}  // namespace

LfrResult lfr_like(const LfrSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);

    // Community sizes drawn uniformly until n is tiled; a remainder smaller
    // than community_min is absorbed by the last community.
    std::vector<std::size_t> sizes;
    std::size_t remaining = spec.n;
    while (remaining > 0) {
        if (remaining < spec.community_min && !sizes.empty()) {
            sizes.back() += remaining;
            remaining = 0;
        } else if (remaining <= spec.community_max) {
            sizes.push_back(remaining);
            remaining = 0;
        } else {
            const std::size_t s =
                spec.community_min + rng.uniform_index(spec.community_max - spec.community_min + 1);
            sizes.push_back(s);
            remaining -= s;
        }
    }

    std::vector<Community> ground_truth(sizes.size());
    std::vector<std::uint32_t> community_of(spec.n);
    {
        NodeId next = 0;
        for (std::size_t c = 0; c < sizes.size(); ++c) {
            for (std::size_t i = 0; i < sizes[c]; ++i) {
                ground_truth[c].nodes.push_back(next);
                community_of[next] = static_cast<std::uint32_t>(c);
                ++next;
            }
        }
    }

    DegreeSequenceSpec ds = spec.degree_spec;
    ds.n = spec.n;
    const std::vector<std::uint32_t> degrees = sample_degrees(ds, rng);

    // Stochastic rounding keeps the expected external fraction at exactly mu.
    std::vector<std::uint32_t> external(spec.n);
    for (std::size_t u = 0; u < spec.n; ++u) {
        const double want = spec.mu * degrees[u];
        auto ext = static_cast<std::uint32_t>(want);
        if (rng.uniform() < want - static_cast<double>(ext)) ++ext;
        external[u] = std::min(ext, degrees[u]);
    }

    LfrResult result;
    GraphBuilder builder(GraphMode::unipartite, static_cast<NodeId>(spec.n));

    std::vector<NodeId> pool;
    for (std::size_t c = 0; c < sizes.size(); ++c) {
        pool.clear();
        std::uint64_t internal_sum = 0;
        for (NodeId u : ground_truth[c].nodes) internal_sum += degrees[u] - external[u];
        if (internal_sum % 2 == 1) {
            // move one internal stub of a uniformly chosen member out
            std::vector<NodeId> holders;
            for (NodeId u : ground_truth[c].nodes)
                if (degrees[u] > external[u]) holders.push_back(u);
            NodeId victim = holders[rng.uniform_index(holders.size())];
            external[victim] += 1;
            result.parity_moved_stubs += 1;
        }
        for (NodeId u : ground_truth[c].nodes)
            pool.insert(pool.end(), degrees[u] - external[u], u);
        result.internally_matched_stubs += pool.size();
        match_stubs(builder, pool, rng);
    }

    pool.clear();
    for (std::size_t u = 0; u < spec.n; ++u)
        pool.insert(pool.end(), external[u], static_cast<NodeId>(u));
    match_stubs(builder, pool, rng);

    result.graph = builder.build();
    result.ground_truth = std::move(ground_truth);
    return result;
}

PlantedBlock planted_bipartite_block(NodeId num_u, NodeId num_v, NodeId block_u, NodeId block_v,
                                     double p_in, double p_out, Rng& rng) {
    if (num_u == 0 || num_v == 0) throw std::invalid_argument("sides must be nonempty");
    if (block_u > num_u || block_v > num_v) throw std::invalid_argument("block exceeds side size");
    for (double p : {p_in, p_out})
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("probabilities must lie in [0,1]");

    GraphBuilder builder(GraphMode::bipartite, num_u, num_v);
    for (NodeId u = 0; u < num_u; ++u) {
        for (NodeId v = 0; v < num_v; ++v) {
            const double p = (u < block_u && v < block_v) ? p_in : p_out;
            if (rng.uniform() < p) builder.add_edge(u, num_u + v);
        }
    }

    PlantedBlock result{builder.build(), {}};
    for (NodeId u = 0; u < block_u; ++u) result.planted.nodes.push_back(u);
    for (NodeId v = 0; v < block_v; ++v) result.planted.nodes.push_back(num_u + v);
    return result;
}

double mixing_fraction(const SparseGraph& g, const std::vector<Community>& communities) {
    std::vector<std::uint32_t> community_of(g.num_nodes(), UINT32_MAX);
    for (std::size_t c = 0; c < communities.size(); ++c)
        for (NodeId u : communities[c].nodes) community_of[u] = static_cast<std::uint32_t>(c);

    double total = 0.0;
    std::size_t counted = 0;
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
        if (g.degree(u) == 0) continue;
        EdgeCount out = 0;
        for (const auto& nb : g.neighbors(u))
            if (community_of[nb.node] != community_of[u]) out += nb.multiplicity;
        total += static_cast<double>(out) / static_cast<double>(g.degree(u));
        ++counted;
    }
    return counted == 0 ? 0.0 : total / static_cast<double>(counted);
}

}  // namespace focs
