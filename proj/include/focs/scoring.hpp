#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "focs/graph.hpp"
#include "focs/rng.hpp"
#include "focs/stats.hpp"

namespace focs {

// One scoring job: community significance against the conditional
// configuration-model null, with randomized-draw resampling.
struct ScoreRequest {
    const SparseGraph* graph = nullptr;
    Community community;
    double test_fraction = 0.25;  // p in (0,1]
    std::uint32_t resamples = 31; // R
    std::uint64_t seed = 0;

    void validate() const;
};

enum class StopReason : std::uint8_t {
    none,                 // ran all ceil(p*|C|) iterations
    community_exhausted,  // removal would empty the community
    side_exhausted,       // removal would empty one bipartite side
    empty_complement,     // C covers the whole graph; score is 1 by definition
};

struct IterationRecord {
    NodeId worst_node = 0;
    // Upper-tail randomized draw of the worst node's in-community degree;
    // this is what the minimum-order-statistic CDF consumes.
    double log_tail_draw = 0.0;
    double log_f = 0.0;           // ln f(C) for this iteration
    std::uint64_t order_count = 0;  // m = |exterior| + 1

    friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

struct RunTrace {
    std::vector<IterationRecord> iterations;
    StopReason stop = StopReason::none;
    double log_min = 0.0;  // the run's running minimum, ln scale

    friend bool operator==(const RunTrace&, const RunTrace&) = default;
};

struct ScoreReport {
    double neg_log10_score = 0.0;            // -log10 of the median run minimum
    std::vector<double> per_run_log_scores;  // R minima, ln scale
    std::vector<RunTrace> traces;            // R traces
    std::size_t community_size = 0;
    std::size_t tested_count = 0;            // k = ceil(p*|C|)

    bool significant_at(double alpha) const;

    friend bool operator==(const ScoreReport&, const ScoreReport&) = default;
};

// Null parameters for an exterior node u: its stubs are re-assigned without
// replacement over the broken stubs of the community boundary and exterior.
// K = d_C(C'), M = d_{C'}(C'), n = d_u, with K + M = d_{C'} exactly.
// u must lie outside C; C must be nonempty and proper.
HypergeomParams null_params_unipartite(const SparseGraph& g, std::span<const NodeId> community,
                                       NodeId u);

// Bipartite analogue; u's side is implied by its id. For a U-side node,
// K = d_{C_V}(C_U'), M = d_{C_V'}(C_U'), n = d_u (and mirrored for side V).
HypergeomParams null_params_bipartite(const SparseGraph& g, const Community& community, NodeId u);

// Lower-tail randomized p-value of an in-community node's connectivity: the
// community is shrunk by u, u joins the exterior, and the draw is taken on
// the cdf step of its observed in-degree. Small values mark poorly attached
// ("worst") members. Consumes one uniform.
double node_gscore(const SparseGraph& g, const Community& community, NodeId u, Rng& rng);

// One pass of the iterative test: k = ceil(p*|C|) rounds of
// worst-node identification, order-statistic scoring, and removal, keeping
// the running minimum. `debug_recompute` re-derives every null parameter set
// from scratch and aborts on any mismatch with the incremental state.
RunTrace focs_single_run(const SparseGraph& g, const Community& community, double test_fraction,
                         Rng& rng, bool debug_recompute = false);

// Full scoring: R independent runs on split sub-streams, lower-median of the
// run minima, reported as -log10. Deterministic for a fixed seed.
ScoreReport focs_score(const ScoreRequest& request);

struct PartitionScoreOptions {
    double test_fraction = 0.25;
    std::uint32_t resamples = 31;
    std::uint64_t seed = 0;
    std::size_t min_size = 2;  // communities with size <= min_size are skipped
    unsigned threads = 1;
};

struct CommunityScore {
    std::size_t index = 0;
    std::size_t size = 0;
    std::optional<ScoreReport> report;  // empty = skipped (size <= min_size)
};

// Scores every community in a collection (disjointness not required).
// Work fans out over `threads` workers; each community gets the sub-stream
// split(seed, index), so results are independent of scheduling.
std::vector<CommunityScore> score_partition(const SparseGraph& g,
                                            const std::vector<Community>& communities,
                                            const PartitionScoreOptions& options);

// Fraction of non-skipped communities with raw score below alpha.
double significant_fraction(const std::vector<CommunityScore>& scores, double alpha);

}  // namespace focs
