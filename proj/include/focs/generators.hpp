#pragma once

#include <cstdint>
#include <vector>

#include "focs/graph.hpp"
#include "focs/rng.hpp"

namespace focs {

// Power-law degree sequence on a bounded range.
struct DegreeSequenceSpec {
    std::size_t n = 0;
    double exponent = -2.0;  // weight of degree d is d^exponent
    std::uint32_t d_min = 1;
    std::uint32_t d_max = 1;

    void validate() const;
};

// Planted-partition benchmark in the stub-split style: per node, a mu
// fraction of stubs is matched globally, the rest inside its community.
struct LfrSpec {
    std::size_t n = 0;
    double mu = 0.0;
    std::uint32_t community_min = 3;
    std::uint32_t community_max = 3;
    DegreeSequenceSpec degree_spec;
    std::uint64_t seed = 0;

    void validate() const;
};

struct LfrResult {
    SparseGraph graph;
    std::vector<Community> ground_truth;
    // Stubs moved from a community's internal pool to the external pool to
    // fix odd internal parity.
    std::uint64_t parity_moved_stubs = 0;
    // Total stubs matched inside communities (zero at mu = 1).
    std::uint64_t internally_matched_stubs = 0;
};

// n degrees in [d_min, d_max] with probability proportional to d^exponent.
// An odd total is fixed by incrementing one uniformly chosen node whose
// degree can still grow within the range.
std::vector<std::uint32_t> sample_degrees(const DegreeSequenceSpec& spec, Rng& rng);

// Uniform random stub matching; self-loops and multi-edges are kept, since
// rejecting them would bias the calibration null. Degree sum must be even.
SparseGraph configuration_model(const std::vector<std::uint32_t>& degrees, Rng& rng);

// Approximate LFR-style generator (documented simplification: fixed uniform
// community sizes, stochastic stub split, no rewiring pass).
LfrResult lfr_like(const LfrSpec& spec);

// Bipartite Bernoulli graph with one planted dense block. Returns the graph
// and the planted community.
struct PlantedBlock {
    SparseGraph graph;
    Community planted;
};
PlantedBlock planted_bipartite_block(NodeId num_u, NodeId num_v, NodeId block_u, NodeId block_v,
                                     double p_in, double p_out, Rng& rng);

// Mean over nodes of the fraction of their edges leaving their own
// community; the realized mixing of a generated benchmark.
double mixing_fraction(const SparseGraph& g, const std::vector<Community>& communities);

}  // namespace focs
