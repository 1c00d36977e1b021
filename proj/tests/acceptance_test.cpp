// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Every threshold is pinned here, not configurable.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "focs/detect.hpp"
#include "focs/generators.hpp"
#include "focs/graph.hpp"
#include "focs/rng.hpp"
#include "focs/scoring.hpp"
#include "focs/stats.hpp"
#include "oracles.hpp"

using namespace focs;

namespace {

int g_failures = 0;

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const clock::time_point start = clock::now();
    return std::chrono::duration<double>(clock::now() - start).count();
}

struct Timer {
    double begin = now_seconds();
    double elapsed() const { return now_seconds() - begin; }
};

void report(int criterion, bool pass, const std::string& what, const std::string& detail,
            double seconds) {
    if (!pass) ++g_failures;
    std::printf("%s criterion %d: %s (%s; %.1f s)\n", pass ? "PASS" : "FAIL", criterion,
                what.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
}

std::string fmt(const char* format, ...) {
    char buf[256];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

ScoreReport score_community(const SparseGraph& g, const Community& c, std::uint64_t seed,
                            std::uint32_t resamples = 31, double p = 0.25) {
    ScoreRequest req;
    req.graph = &g;
    req.community = c;
    req.test_fraction = p;
    req.resamples = resamples;
    req.seed = seed;
    return focs_score(req);
}

constexpr double kAlphaNegLog10 = 1.3010299956639812;  // -log10(0.05)

// --- criterion 1 -----------------------------------------------------------

void criterion_1() {
    Timer timer;
    Rng rng(101);
    double max_err = 0.0;
    bool pass = true;

    auto check_params = [&](const HypergeomParams& p) {
        double cdf = 0.0;
        for (std::uint64_t x = p.support_min(); x <= p.support_max(); ++x) {
            const double expected = oracles::hypergeom_pmf_enumerated(
                static_cast<unsigned>(p.successes), static_cast<unsigned>(p.failures),
                static_cast<unsigned>(p.draws), static_cast<unsigned>(x));
            cdf += expected;
            const double pmf_err = std::fabs(hypergeom_logpmf(x, p).prob() - expected);
            const double cdf_err = std::fabs(hypergeom_logcdf(x, p).prob() - cdf);
            max_err = std::max({max_err, pmf_err, cdf_err});
            if (pmf_err > 1e-12 || cdf_err > 1e-12) pass = false;
        }
    };

    // 200 random parameter sets with K+M <= 12
    for (int trial = 0; trial < 200; ++trial) {
        const std::uint64_t k = rng.uniform_index(13);
        const std::uint64_t m = rng.uniform_index(13 - k);
        if (k + m == 0) continue;
        check_params({k, m, rng.uniform_index(k + m) + 1});
    }

    // the bipartite parameterization on random graphs, same enumeration
    int checked = 0;
    while (checked < 200) {
        const auto g = oracles::random_bipartite(rng, 4, 4, 1 + rng.uniform_index(5));
        Community c(std::vector<NodeId>{0, 1, 4, 5});
        const NodeId u = static_cast<NodeId>(rng.uniform() < 0.5 ? 2 : 6);
        const auto p = null_params_bipartite(g, c, u);
        if (p.successes + p.failures > 12 || p.draws == 0) continue;
        check_params(p);
        ++checked;
    }

    const bool in_time = timer.elapsed() < 10.0;
    report(1, pass && in_time, "hypergeometric pmf/cdf match exhaustive stub enumeration",
           fmt("max abs error %.2e, limit 1e-12", max_err), timer.elapsed());
}

// --- criterion 2 -----------------------------------------------------------

void criterion_2() {
    Timer timer;
    const std::size_t reps = 300;
    const Rng root(202);
    std::size_t significant = 0;

    for (std::size_t r = 0; r < reps; ++r) {
        Rng job = root.split(r);
        while (true) {
            DegreeSequenceSpec spec{100, -2.0, 10, 50};
            const auto degrees = sample_degrees(spec, job);
            const auto g = configuration_model(degrees, job);
            const auto partition = louvain(g, job.next_u64());
            const auto communities = partition.communities();
            std::vector<std::size_t> eligible;
            for (std::size_t i = 0; i < communities.size(); ++i)
                if (communities[i].size() > 2) eligible.push_back(i);
            if (eligible.empty()) continue;
            const auto& community = communities[eligible[job.uniform_index(eligible.size())]];
            const auto rep = score_community(g, community, job.next_u64());
            if (rep.neg_log10_score > kAlphaNegLog10) ++significant;
            break;
        }
    }

    const double fraction = static_cast<double>(significant) / static_cast<double>(reps);
    const bool in_time = timer.elapsed() < 300.0;
    report(2, fraction <= 0.08 && in_time,
           "null calibration is conservative on configuration-model graphs",
           fmt("fraction significant %.4f, limit 0.08", fraction), timer.elapsed());
}

// --- criterion 3 -----------------------------------------------------------

void criterion_3() {
    Timer timer;
    const std::vector<double> grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    const std::size_t nets_per_mu = 3;
    const Rng root(303);

    std::vector<double> means(grid.size(), 0.0);
    double mu01_significant = 0.0, mu01_total = 0.0;

    for (std::size_t m = 0; m < grid.size(); ++m) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t rep = 0; rep < nets_per_mu; ++rep) {
            LfrSpec spec;
            spec.n = 1000;
            spec.mu = grid[m];
            spec.community_min = 10;
            spec.community_max = 50;
            spec.degree_spec = {1000, -2.0, 10, 50};
            spec.seed = root.split(m, rep).key();
            const auto result = lfr_like(spec);
            Rng score_rng = root.split(m, rep).split(1);
            for (std::size_t c = 0; c < result.ground_truth.size(); ++c) {
                const auto rep_score =
                    score_community(result.graph, result.ground_truth[c], score_rng.split(c).key());
                sum += rep_score.neg_log10_score;
                ++count;
                if (m == 0) {
                    mu01_total += 1.0;
                    if (rep_score.neg_log10_score > kAlphaNegLog10) mu01_significant += 1.0;
                }
            }
        }
        means[m] = sum / static_cast<double>(count);
    }

    bool nonincreasing = true;
    for (std::size_t m = 0; m + 1 < means.size(); ++m)
        if (means[m + 1] > means[m]) nonincreasing = false;
    const double ratio = means.front() / means.back();
    const double mu01_rate = mu01_significant / mu01_total;
    const bool in_time = timer.elapsed() < 900.0;

    report(3, nonincreasing && ratio >= 10.0 && mu01_rate >= 0.9 && in_time,
           "power decays monotonically in the mixing parameter",
           fmt("means %.2f..%.2f nonincreasing=%d ratio %.1f, mu=0.1 significant %.2f",
               means.front(), means.back(), nonincreasing ? 1 : 0, ratio, mu01_rate),
           timer.elapsed());
}

// --- criterion 4 -----------------------------------------------------------

void criterion_4() {
    Timer timer;
    const auto g = load_edge_list(std::string(FOCS_DATA_DIR) + "/karate.edges", GraphMode::unipartite);
    const auto partition = louvain(g, 1);
    const double q = modularity(g, partition);

    PartitionScoreOptions opts;
    opts.seed = 404;
    const auto scores = score_partition(g, partition.communities(), opts);
    std::size_t significant = 0;
    for (const auto& cs : scores)
        if (cs.report && cs.report->significant_at(0.05)) ++significant;

    const bool pass = partition.num_communities >= 3 && partition.num_communities <= 5 &&
                      q >= 0.38 && significant <= 2 && timer.elapsed() < 5.0;
    report(4, pass, "karate pipeline matches the published summary",
           fmt("%u communities, modularity %.3f, %zu significant", partition.num_communities, q,
               significant),
           timer.elapsed());
}

// --- criterion 5 -----------------------------------------------------------

void criterion_5() {
    Timer timer;
    Rng rng(505);
    bool pass = true;
    std::string failure = "all invariants held";

    for (int trial = 0; trial < 500 && pass; ++trial) {
        const bool bipartite = trial % 4 == 3;
        SparseGraph g = bipartite
                            ? oracles::random_bipartite(rng, 5 + rng.uniform_index(10),
                                                        5 + rng.uniform_index(10),
                                                        10 + rng.uniform_index(40))
                            : oracles::random_multigraph(rng, 6 + rng.uniform_index(30),
                                                         8 + rng.uniform_index(50));
        std::vector<NodeId> ids;
        if (bipartite) {
            const NodeId su = 1 + rng.uniform_index(std::max<NodeId>(1, g.num_u() - 1));
            const NodeId sv = 1 + rng.uniform_index(std::max<NodeId>(1, g.num_v() - 1));
            for (NodeId u = 0; u < su; ++u) ids.push_back(u);
            for (NodeId v = 0; v < sv; ++v) ids.push_back(g.num_u() + v);
        } else {
            const NodeId size = 2 + rng.uniform_index(g.num_nodes() / 2);
            for (NodeId u = 0; u < size; ++u) ids.push_back(u);
        }
        Community c(std::move(ids));
        const double p = std::vector<double>{0.25, 0.5, 1.0}[rng.uniform_index(3)];
        const std::uint64_t seed = rng.next_u64();

        const std::size_t k =
            static_cast<std::size_t>(std::ceil(p * static_cast<double>(c.size())));
        Rng run_rng(seed);
        const auto trace = focs_single_run(g, c, p, run_rng, /*debug_recompute=*/true);

        if (trace.stop == StopReason::none && trace.iterations.size() != k) {
            pass = false;
            failure = fmt("trace length %zu != k=%zu without a stop marker",
                          trace.iterations.size(), k);
        }
        if (trace.stop != StopReason::none && trace.iterations.size() >= k) {
            pass = false;
            failure = "stop marker recorded but the trace is full-length";
        }
        double running = 0.0;
        for (std::size_t i = 0; i < trace.iterations.size() && pass; ++i) {
            running = std::min(running, trace.iterations[i].log_f);
            if (trace.log_min > trace.iterations[i].log_f) {
                pass = false;
                failure = "running minimum exceeds an iteration score";
            }
            if (i > 0 &&
                trace.iterations[i].order_count != trace.iterations[i - 1].order_count + 1) {
                pass = false;
                failure = "order-statistic count did not increment by one";
            }
        }
        if (pass && !trace.iterations.empty() &&
            trace.iterations.front().order_count != g.num_nodes() - c.size() + 1) {
            pass = false;
            failure = "initial order-statistic count is not |exterior|+1";
        }
        if (pass && trace.log_min != running) {
            pass = false;
            failure = "reported minimum is not the running minimum";
        }

        ScoreRequest req;
        req.graph = &g;
        req.community = c;
        req.test_fraction = p;
        req.resamples = 5;
        req.seed = seed;
        if (pass && !(focs_score(req) == focs_score(req))) {
            pass = false;
            failure = "same seed produced different reports";
        }
    }

    const bool in_time = timer.elapsed() < 120.0;
    report(5, pass && in_time, "iterative-test contract suite over 500 random instances", failure,
           timer.elapsed());
}

// --- criterion 6 -----------------------------------------------------------

void criterion_6() {
    Timer timer;
    const Rng root(606);

    int recovered_and_significant = 0;
    for (int run = 0; run < 20; ++run) {
        Rng gen = root.split(run, 0);
        auto planted = planted_bipartite_block(100, 100, 15, 15, 0.5, 0.02, gen);
        std::vector<NodeId> seed_ids;
        for (NodeId u = 0; u < 7; ++u) seed_ids.push_back(u);           // 7 U-side block nodes
        for (NodeId v = 100; v < 106; ++v) seed_ids.push_back(v);       // 6 V-side block nodes
        Community seed(std::move(seed_ids));
        Rng anneal_rng = root.split(run, 1);
        const auto out = anneal_extract(planted.graph, seed,
                                        default_anneal_iterations(planted.graph), anneal_rng);
        const double jac = oracles::jaccard(out.nodes, planted.planted.nodes);
        const auto rep = score_community(planted.graph, out, root.split(run, 2).key());
        if (jac >= 0.8 && rep.neg_log10_score > kAlphaNegLog10) ++recovered_and_significant;
    }

    int null_nonsignificant = 0;
    for (int run = 0; run < 20; ++run) {
        Rng gen = root.split(run, 10);
        auto null_graph = planted_bipartite_block(100, 100, 15, 15, 0.02, 0.02, gen);
        std::vector<NodeId> seed_ids;
        for (NodeId u = 0; u < 7; ++u) seed_ids.push_back(u);
        for (NodeId v = 100; v < 106; ++v) seed_ids.push_back(v);
        Community seed(std::move(seed_ids));
        Rng anneal_rng = root.split(run, 11);
        const auto out = anneal_extract(null_graph.graph, seed,
                                        default_anneal_iterations(null_graph.graph), anneal_rng);
        const auto rep = score_community(null_graph.graph, out, root.split(run, 12).key());
        if (rep.neg_log10_score <= kAlphaNegLog10) ++null_nonsignificant;
    }

    const bool in_time = timer.elapsed() < 300.0;
    report(6,
           recovered_and_significant >= 16 && null_nonsignificant >= 18 && in_time,
           "planted bipartite blocks are recovered and nulls stay quiet",
           fmt("recovered+significant %d/20 (need 16), null non-significant %d/20 (need 18)",
               recovered_and_significant, null_nonsignificant),
           timer.elapsed());
}

// --- criterion 7 -----------------------------------------------------------

void criterion_7() {
    Timer setup_timer;
    Rng rng(707);
    DegreeSequenceSpec spec{7300, -2.0, 9, 45};
    const auto degrees = sample_degrees(spec, rng);
    const auto g = configuration_model(degrees, rng);
    const auto partition = louvain(g, 7);
    const auto communities = partition.communities();

    Timer timer;
    PartitionScoreOptions opts;
    opts.seed = 77;
    opts.threads = 1;
    const auto scores = score_partition(g, communities, opts);
    const double elapsed = timer.elapsed();

    std::size_t scored = 0;
    for (const auto& cs : scores)
        if (cs.report) ++scored;

    report(7, elapsed <= 30.0 && scored > 0, "chess-scale partition scores within budget",
           fmt("%zu communities on %u nodes / %llu edges in %.1f s (limit 30)", scored,
               g.num_nodes(), static_cast<unsigned long long>(g.num_edges()), elapsed),
           setup_timer.elapsed());
}

// --- criterion 8 -----------------------------------------------------------

void criterion_8() {
    Timer timer;
    LfrSpec spec;
    spec.n = 1000;
    spec.mu = 0.2;
    spec.community_min = 10;
    spec.community_max = 50;
    spec.degree_spec = {1000, -2.0, 10, 50};
    spec.seed = 808;
    const auto result = lfr_like(spec);

    std::vector<double> cvs;
    const Rng root(808);
    for (std::size_t c = 0; c < result.ground_truth.size(); ++c) {
        double sum = 0.0, sum_sq = 0.0;
        const int runs = 30;
        for (int r = 0; r < runs; ++r) {
            const auto rep =
                score_community(result.graph, result.ground_truth[c], root.split(c, r).key());
            sum += rep.neg_log10_score;
            sum_sq += rep.neg_log10_score * rep.neg_log10_score;
        }
        const double mean = sum / runs;
        const double var = std::max(0.0, sum_sq / runs - mean * mean);
        cvs.push_back(mean > 0.0 ? std::sqrt(var) / mean : 0.0);
    }
    std::sort(cvs.begin(), cvs.end());
    const double median_cv = cvs[(cvs.size() - 1) / 2];

    report(8, median_cv < 0.5, "score stability across reseeded runs",
           fmt("median coefficient of variation %.3f over %zu communities, limit 0.5", median_cv,
               cvs.size()),
           timer.elapsed());
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    if (g_failures == 0) std::printf("all 8 acceptance criteria passed\n");
    else std::printf("%d acceptance criteria FAILED\n", g_failures);
    return g_failures;
}
