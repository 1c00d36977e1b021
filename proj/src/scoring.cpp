#include "focs/scoring.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace focs {

namespace {

constexpr double kLn10 = 2.302585092994045684;

std::vector<NodeId> without(std::span<const NodeId> sorted, NodeId u) {
    std::vector<NodeId> out;
    out.reserve(sorted.size() - 1);
    for (NodeId v : sorted)
        if (v != u) out.push_back(v);
    return out;
}

// Incremental aggregates behind the per-iteration null parameters. All
// quantities are stub counts, so updates are exact integer arithmetic.
class ScoringState {
public:
    ScoringState(const SparseGraph& g, const Community& community)
        : g_(g), members_(community.nodes), in_community_(g.num_nodes(), 0), in_degree_(g.num_nodes(), 0) {
        for (NodeId u : members_) in_community_[u] = 1;
        for (NodeId u : members_) {
            if (g_.is_bipartite() && g_.on_side_v(u)) ++size_v_;
            else ++size_u_;
        }
        // One pass over member adjacencies fills d_v(C) for every node
        // (self-loops of members count twice, matching the degree convention).
        for (NodeId u : members_) {
            for (const auto& nb : g_.neighbors(u))
                in_degree_[nb.node] += (nb.node == u ? 2ull : 1ull) * nb.multiplicity;
        }
        if (g_.is_bipartite()) {
            for (NodeId u : members_) (g_.on_side_v(u) ? deg_cv_ : deg_cu_) += g_.degree(u);
            for (NodeId u : members_)
                if (!g_.on_side_v(u)) internal_stubs_ += in_degree_[u];  // each cross pair once
            for (NodeId u = 0; u < g_.num_u(); ++u) total_deg_u_ += g_.degree(u);
            total_deg_v_ = g_.total_degree() - total_deg_u_;
        } else {
            for (NodeId u : members_) deg_cu_ += g_.degree(u);
            for (NodeId u : members_) internal_stubs_ += in_degree_[u];  // d_C(C), loops twice
        }
    }

    const std::vector<NodeId>& members() const { return members_; }
    std::size_t size() const { return members_.size(); }
    std::size_t size_u() const { return size_u_; }
    std::size_t size_v() const { return size_v_; }
    std::size_t exterior_count() const { return g_.num_nodes() - members_.size(); }

    // Null parameters and observed in-degree for member u, evaluated on the
    // community shrunk by u (u joins the exterior pool).
    struct MemberEval {
        HypergeomParams params;
        std::uint64_t observed = 0;
    };

    MemberEval evaluate(NodeId u) const {
        MemberEval ev;
        const EdgeCount deg = g_.degree(u);
        if (g_.is_bipartite()) {
            const bool side_v = g_.on_side_v(u);
            ev.observed = in_degree_[u];  // d_u of the opposite side-set, unaffected by the shrink
            const EdgeCount target_deg = side_v ? deg_cu_ : deg_cv_;
            const EdgeCount own_side_deg = side_v ? deg_cv_ : deg_cu_;
            const EdgeCount own_side_total = side_v ? total_deg_v_ : total_deg_u_;
            const EdgeCount k = target_deg - (internal_stubs_ - in_degree_[u]);
            const EdgeCount pool = own_side_total - (own_side_deg - deg);
            ev.params = {k, pool - k, deg};
        } else {
            const EdgeCount loop_stubs = 2ull * g_.self_loops(u);
            ev.observed = in_degree_[u] - loop_stubs;
            const EdgeCount shrunk_deg = deg_cu_ - deg;
            const EdgeCount shrunk_internal = internal_stubs_ - ev.observed - in_degree_[u];
            const EdgeCount k = shrunk_deg - shrunk_internal;
            const EdgeCount pool = g_.total_degree() - shrunk_deg;
            ev.params = {k, pool - k, deg};
        }
        return ev;
    }

    void remove(NodeId u) {
        if (g_.is_bipartite()) {
            const bool side_v = g_.on_side_v(u);
            internal_stubs_ -= in_degree_[u];
            (side_v ? deg_cv_ : deg_cu_) -= g_.degree(u);
            (side_v ? size_v_ : size_u_) -= 1;
            for (const auto& nb : g_.neighbors(u)) in_degree_[nb.node] -= nb.multiplicity;
        } else {
            const EdgeCount loop_stubs = 2ull * g_.self_loops(u);
            internal_stubs_ -= (in_degree_[u] - loop_stubs) + in_degree_[u];
            deg_cu_ -= g_.degree(u);
            size_u_ -= 1;
            for (const auto& nb : g_.neighbors(u))
                in_degree_[nb.node] -= (nb.node == u ? 2ull : 1ull) * nb.multiplicity;
        }
        in_community_[u] = 0;
        members_.erase(std::lower_bound(members_.begin(), members_.end(), u));
    }

    Community current() const {
        Community c;
        c.nodes = members_;
        return c;
    }

private:
    const SparseGraph& g_;
    std::vector<NodeId> members_;  // sorted
    std::vector<std::uint8_t> in_community_;
    std::vector<EdgeCount> in_degree_;  // d_u(C) (unipartite) or d_u(opposite side-set)
    std::size_t size_u_ = 0;
    std::size_t size_v_ = 0;
    EdgeCount deg_cu_ = 0;           // subset degree of C (unipartite) or of C_U
    EdgeCount deg_cv_ = 0;           // subset degree of C_V (bipartite only)
    EdgeCount internal_stubs_ = 0;   // d_C(C) (unipartite) or d_{C_U}(C_V)
    EdgeCount total_deg_u_ = 0;      // bipartite side totals
    EdgeCount total_deg_v_ = 0;
};

void validate_community(const SparseGraph& g, const Community& community) {
    if (community.nodes.empty()) throw std::invalid_argument("community is empty");
    community.validate(g);
    if (g.is_bipartite()) {
        const std::size_t su = community.size_u(g);
        if (su == 0 || su == community.size())
            throw std::invalid_argument("bipartite community needs members on both sides");
    }
}

}  // namespace

void ScoreRequest::validate() const {
    if (!graph) throw std::invalid_argument("score request has no graph");
    validate_community(*graph, community);
    if (!(test_fraction > 0.0 && test_fraction <= 1.0))
        throw std::invalid_argument("test fraction must be in (0,1]");
    if (resamples < 1) throw std::invalid_argument("resamples must be >= 1");
}

bool ScoreReport::significant_at(double alpha) const {
    return neg_log10_score > -std::log10(alpha);
}

HypergeomParams null_params_unipartite(const SparseGraph& g, std::span<const NodeId> community,
                                       NodeId u) {
    g.check_node(u);
    if (community.empty()) throw std::invalid_argument("community is empty");
    if (community.size() >= g.num_nodes())
        throw std::invalid_argument("community covers the whole graph");
    if (std::binary_search(community.begin(), community.end(), u))
        throw std::invalid_argument("node is inside the community; shrink it first");
    const EdgeCount deg_c = subset_degree(g, community);
    const EdgeCount internal = cross_degree(g, community, community);
    const EdgeCount k = deg_c - internal;
    const EdgeCount deg_comp = g.total_degree() - deg_c;
    return {k, deg_comp - k, g.degree(u)};
}

HypergeomParams null_params_bipartite(const SparseGraph& g, const Community& community, NodeId u) {
    if (!g.is_bipartite()) throw std::invalid_argument("graph is not bipartite");
    g.check_node(u);
    community.validate(g);
    if (community.contains(u))
        throw std::invalid_argument("node is inside the community; shrink it first");
    const std::size_t split = community.size_u(g);
    std::span<const NodeId> cu(community.nodes.data(), split);
    std::span<const NodeId> cv(community.nodes.data() + split, community.size() - split);
    const bool side_v = g.on_side_v(u);
    if ((side_v ? g.num_v() - cv.size() : g.num_u() - cu.size()) == 0)
        throw std::invalid_argument("no exterior on the node's side");

    EdgeCount total_deg_u = 0;
    for (NodeId w = 0; w < g.num_u(); ++w) total_deg_u += g.degree(w);
    const EdgeCount total_deg_v = g.total_degree() - total_deg_u;

    const EdgeCount internal = cross_degree(g, cu, cv);
    const EdgeCount target_deg = side_v ? subset_degree(g, cu) : subset_degree(g, cv);
    const EdgeCount own_deg = side_v ? subset_degree(g, cv) : subset_degree(g, cu);
    const EdgeCount own_total = side_v ? total_deg_v : total_deg_u;
    const EdgeCount k = target_deg - internal;
    const EdgeCount pool = own_total - own_deg;
    return {k, pool - k, g.degree(u)};
}

double node_gscore(const SparseGraph& g, const Community& community, NodeId u, Rng& rng) {
    validate_community(g, community);
    if (!community.contains(u)) throw std::invalid_argument("node is not a community member");
    if (community.size() < 2) throw std::invalid_argument("cannot shrink a single-node community");
    Community shrunk;
    shrunk.nodes = without(community.nodes, u);
    HypergeomParams params;
    std::uint64_t observed = 0;
    if (g.is_bipartite()) {
        // the shrunk community may lose its last member on u's side; the
        // null parameters stay well defined (only the opposite side enters)
        params = null_params_bipartite(g, shrunk, u);
        const std::size_t split = shrunk.size_u(g);
        std::span<const NodeId> all(shrunk.nodes);
        observed = degree_into(g, u, g.on_side_v(u) ? all.subspan(0, split) : all.subspan(split));
    } else {
        params = null_params_unipartite(g, shrunk.nodes, u);
        observed = degree_into(g, u, shrunk.nodes);
    }
    return randomized_cdf_draw(observed, params, rng);
}

RunTrace focs_single_run(const SparseGraph& g, const Community& community, double test_fraction,
                         Rng& rng, bool debug_recompute) {
    validate_community(g, community);
    if (!(test_fraction > 0.0 && test_fraction <= 1.0))
        throw std::invalid_argument("test fraction must be in (0,1]");

    RunTrace trace;
    trace.log_min = 0.0;  // ln 1

    if (community.size() == g.num_nodes()) {
        // Nothing to compare against: exterior empty, score stays 1.
        trace.stop = StopReason::empty_complement;
        return trace;
    }

    ScoringState state(g, community);
    const std::size_t k =
        static_cast<std::size_t>(std::ceil(test_fraction * static_cast<double>(community.size())));
    trace.iterations.reserve(k);

    for (std::size_t iter = 0; iter < k; ++iter) {
        if (!g.is_bipartite() && state.size() == 1) {
            trace.stop = StopReason::community_exhausted;
            break;
        }

        // One shared draw per candidate: the lower-tail value orders the
        // members (worst = smallest), its complement feeds the order
        // statistic. Working with the complement directly keeps both exact.
        NodeId worst = 0;
        double worst_tail = kNegInf;
        bool first = true;
        for (NodeId u : state.members()) {
            auto ev = state.evaluate(u);
            if (debug_recompute) {
                const std::vector<NodeId> shrunk = without(state.members(), u);
                HypergeomParams fresh;
                if (g.is_bipartite()) {
                    Community c;
                    c.nodes = shrunk;
                    fresh = null_params_bipartite(g, c, u);
                } else {
                    fresh = null_params_unipartite(g, shrunk, u);
                }
                if (fresh.successes != ev.params.successes || fresh.failures != ev.params.failures ||
                    fresh.draws != ev.params.draws)
                    throw std::logic_error("incremental null parameters diverged from recomputation");
            }
            const double tail = randomized_tail_draw_log(ev.observed, ev.params, rng).ln;
            if (first || tail > worst_tail) {
                worst = u;
                worst_tail = tail;
                first = false;
            }
        }

        if (g.is_bipartite()) {
            const bool side_v = g.on_side_v(worst);
            if ((side_v ? state.size_v() : state.size_u()) == 1) {
                trace.stop = StopReason::side_exhausted;
                break;
            }
        }

        const std::uint64_t m = state.exterior_count() + 1;
        const double log_f = min_uniform_logcdf(LogProb::from_ln(worst_tail), m).ln;
        trace.iterations.push_back({worst, worst_tail, log_f, m});
        trace.log_min = std::min(trace.log_min, log_f);
        state.remove(worst);
    }
    return trace;
}

ScoreReport focs_score(const ScoreRequest& request) {
    request.validate();
    const SparseGraph& g = *request.graph;

    ScoreReport report;
    report.community_size = request.community.size();
    report.tested_count = static_cast<std::size_t>(
        std::ceil(request.test_fraction * static_cast<double>(request.community.size())));

    Rng root(request.seed);
    report.per_run_log_scores.reserve(request.resamples);
    report.traces.reserve(request.resamples);
    for (std::uint32_t r = 0; r < request.resamples; ++r) {
        Rng run_rng = root.split(r);
        RunTrace trace = focs_single_run(g, request.community, request.test_fraction, run_rng);
        report.per_run_log_scores.push_back(trace.log_min);
        report.traces.push_back(std::move(trace));
    }

    std::vector<double> sorted = report.per_run_log_scores;
    std::sort(sorted.begin(), sorted.end());
    const double median_ln = sorted[(sorted.size() - 1) / 2];  // lower median for even R
    report.neg_log10_score = -median_ln / kLn10;
    return report;
}

std::vector<CommunityScore> score_partition(const SparseGraph& g,
                                            const std::vector<Community>& communities,
                                            const PartitionScoreOptions& options) {
    std::vector<CommunityScore> out(communities.size());
    const Rng root(options.seed);

    auto score_one = [&](std::size_t i) {
        CommunityScore& cs = out[i];
        cs.index = i;
        cs.size = communities[i].size();
        if (cs.size <= options.min_size) return;  // skip marker
        ScoreRequest req;
        req.graph = &g;
        req.community = communities[i];
        req.test_fraction = options.test_fraction;
        req.resamples = options.resamples;
        req.seed = root.split(i).key();
        cs.report = focs_score(req);
    };

    const unsigned workers = std::max(1u, options.threads);
    if (workers == 1 || communities.size() <= 1) {
        for (std::size_t i = 0; i < communities.size(); ++i) score_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= communities.size()) return;
                    score_one(i);
                }
            });
        }
        for (auto& t : pool) t.join();
    }
    return out;
}

double significant_fraction(const std::vector<CommunityScore>& scores, double alpha) {
    std::size_t scored = 0, significant = 0;
    for (const auto& cs : scores) {
        if (!cs.report) continue;
        ++scored;
        if (cs.report->significant_at(alpha)) ++significant;
    }
    return scored == 0 ? 0.0 : static_cast<double>(significant) / static_cast<double>(scored);
}

}  // namespace focs
