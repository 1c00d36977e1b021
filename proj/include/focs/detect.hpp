#pragma once

#include <cstdint>
#include <vector>

#include "focs/graph.hpp"
#include "focs/rng.hpp"

namespace focs {

// Disjoint exhaustive node assignment with dense community indices.
struct Partition {
    std::vector<std::uint32_t> assignment;  // node id -> community index
    std::uint32_t num_communities = 0;

    void validate(const SparseGraph& g) const;
    // Materialize as sorted node-id groups, ordered by community index.
    std::vector<Community> communities() const;
};

// Newman-Girvan modularity with the stub convention used everywhere else
// (self-loops contribute 2 to both internal stubs and degree).
double modularity(const SparseGraph& g, const Partition& partition);

// Two-phase Louvain with seeded node-order shuffles; resolution fixed at 1.
// Returns a partition on the original node ids. Unipartite graphs only.
Partition louvain(const SparseGraph& g, std::uint64_t seed);

// Community quality for bipartite extraction:
//   (1/sqrt(|C_U||C_V|)) * sum_{u in C_U, v in C_V} (A_uv - d_u d_v / m)
// with m the total edge count. The square-root scaling keeps trivial
// accretion from inflating the score.
double bipartite_quality(const SparseGraph& g, const Community& community);

// Quality change from toggling w's membership in `community`; NaN when the
// toggle would empty a side. This is exactly the gain the extractor samples.
double bipartite_toggle_gain(const SparseGraph& g, const Community& community, NodeId w);

// Greedy stochastic extraction: every round scores the quality gain of
// toggling each node's membership, drops non-positive gains, samples one
// move proportionally to its gain, and stops when no positive gain remains
// or after max_iterations moves.
Community anneal_extract(const SparseGraph& g, const Community& seed_community,
                         std::size_t max_iterations, Rng& rng);

inline std::size_t default_anneal_iterations(const SparseGraph& g) { return 10u * g.num_nodes(); }

}  // namespace focs
