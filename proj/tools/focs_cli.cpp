#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "focs/detect.hpp"
#include "focs/generators.hpp"
#include "focs/graph.hpp"
#include "focs/rng.hpp"
#include "focs/scoring.hpp"
#include "focs/stats.hpp"

namespace {

using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitConfigError = 2;

struct CommonOptions {
    std::string graph_path;
    std::string communities_path;
    bool bipartite = false;
    double p = 0.25;
    std::uint32_t resamples = 31;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    std::string out_path;
    unsigned threads = 0;  // 0 = unset, falls back to FOCS_THREADS then 1
};

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("FOCS_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return 1;
}

// Writes to the named file, or stdout for an empty path.
class OutputSink {
public:
    explicit OutputSink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw std::runtime_error("cannot open '" + path + "' for writing");
        }
        stream().precision(12);
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

std::string csv_score(const std::optional<focs::ScoreReport>& report) {
    if (!report) return "na,na";
    std::ostringstream os;
    os << report->neg_log10_score;
    return os.str();
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

// Run fn(i) for i in [0, count) on a deterministic-output worker pool.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

json report_to_json(const focs::SparseGraph& g, const focs::CommunityScore& cs, double alpha) {
    json j;
    j["index"] = cs.index;
    j["size"] = cs.size;
    if (!cs.report) {
        j["skipped"] = true;
        return j;
    }
    const auto& r = *cs.report;
    j["skipped"] = false;
    j["tested_count"] = r.tested_count;
    j["neg_log10_score"] = r.neg_log10_score;
    j["significant"] = r.significant_at(alpha);
    j["per_run_neg_log10"] = json::array();
    constexpr double kLn10 = 2.302585092994045684;
    for (double ln : r.per_run_log_scores) j["per_run_neg_log10"].push_back(-ln / kLn10);
    j["runs"] = json::array();
    for (const auto& trace : r.traces) {
        json run;
        switch (trace.stop) {
            case focs::StopReason::none: run["stop"] = "none"; break;
            case focs::StopReason::community_exhausted: run["stop"] = "community_exhausted"; break;
            case focs::StopReason::side_exhausted: run["stop"] = "side_exhausted"; break;
            case focs::StopReason::empty_complement: run["stop"] = "empty_complement"; break;
        }
        run["iterations"] = json::array();
        for (const auto& it : trace.iterations) {
            run["iterations"].push_back({{"node", g.label(it.worst_node)},
                                         {"neg_log10_tail_draw", -it.log_tail_draw / kLn10},
                                         {"neg_log10_f", -it.log_f / kLn10},
                                         {"m", it.order_count}});
        }
        j["runs"].push_back(std::move(run));
    }
    return j;
}

int cmd_score(const CommonOptions& opts, const std::string& json_out) {
    const auto mode = opts.bipartite ? focs::GraphMode::bipartite : focs::GraphMode::unipartite;
    const focs::SparseGraph g = focs::load_edge_list(opts.graph_path, mode);
    const std::vector<focs::Community> communities = focs::load_communities(opts.communities_path, g);

    focs::PartitionScoreOptions pso;
    pso.test_fraction = opts.p;
    pso.resamples = opts.resamples;
    pso.seed = opts.seed;
    pso.threads = resolve_threads(opts.threads);
    const auto scores = focs::score_partition(g, communities, pso);

    OutputSink sink(opts.out_path);
    auto& out = sink.stream();
    out << "community_index,size,tested_count,neg_log10_score,significant_at_alpha\n";
    std::size_t significant = 0, scored = 0;
    for (const auto& cs : scores) {
        out << cs.index << ',' << cs.size << ',';
        if (cs.report) {
            ++scored;
            const bool sig = cs.report->significant_at(opts.alpha);
            significant += sig ? 1 : 0;
            out << cs.report->tested_count << ',' << cs.report->neg_log10_score << ',' << (sig ? 1 : 0)
                << '\n';
        } else {
            out << 0 << ",na,na\n";
        }
    }
    std::cerr << "scored " << scored << " of " << scores.size() << " communities; " << significant
              << " significant at alpha=" << opts.alpha << "\n";

    if (!json_out.empty()) {
        json j;
        j["alpha"] = opts.alpha;
        j["p"] = opts.p;
        j["resamples"] = opts.resamples;
        j["seed"] = opts.seed;
        j["communities"] = json::array();
        for (const auto& cs : scores) j["communities"].push_back(report_to_json(g, cs, opts.alpha));
        std::ofstream jf(json_out);
        if (!jf) throw std::runtime_error("cannot open '" + json_out + "' for writing");
        jf << j.dump(2) << '\n';
    }
    return kExitOk;
}

int cmd_detect(const CommonOptions& opts) {
    const focs::SparseGraph g = focs::load_edge_list(opts.graph_path, focs::GraphMode::unipartite);
    const focs::Partition partition = focs::louvain(g, opts.seed);
    OutputSink sink(opts.out_path);
    focs::write_communities(partition.communities(), g, sink.stream());
    std::cerr << "louvain: " << partition.num_communities
              << " communities, modularity=" << focs::modularity(g, partition) << "\n";
    return kExitOk;
}

int cmd_extract(const CommonOptions& opts, std::size_t max_iterations) {
    const focs::SparseGraph g = focs::load_edge_list(opts.graph_path, focs::GraphMode::bipartite);
    const auto seeds = focs::load_communities(opts.communities_path, g);
    if (seeds.empty()) throw std::runtime_error("seed community file is empty");
    const std::size_t iters = max_iterations > 0 ? max_iterations : focs::default_anneal_iterations(g);

    OutputSink sink(opts.out_path);
    focs::Rng rng(opts.seed);
    std::vector<focs::Community> extracted;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        focs::Rng sub = rng.split(i);
        extracted.push_back(focs::anneal_extract(g, seeds[i], iters, sub));
        std::cerr << "seed " << i << ": |C_U|=" << extracted.back().size_u(g)
                  << " |C_V|=" << extracted.back().size_v(g)
                  << " quality=" << focs::bipartite_quality(g, extracted.back()) << "\n";
    }
    focs::write_communities(extracted, g, sink.stream());
    return kExitOk;
}

struct GenerateOptions {
    std::string model = "config";
    std::size_t n = 100;
    double exponent = -2.0;
    std::uint32_t d_min = 10;
    std::uint32_t d_max = 50;
    double mu = 0.2;
    std::uint32_t c_min = 10;
    std::uint32_t c_max = 50;
    std::uint32_t nu = 100, nv = 100, block_u = 15, block_v = 15;
    double p_in = 0.5, p_out = 0.02;
};

int cmd_generate(const CommonOptions& opts, const GenerateOptions& gen) {
    if (opts.out_path.empty()) throw std::invalid_argument("generate requires --out <prefix>");
    focs::Rng rng(opts.seed);

    const std::string edges_path = opts.out_path + ".edges";
    const std::string cmty_path = opts.out_path + ".cmty";

    if (gen.model == "config") {
        focs::DegreeSequenceSpec spec{gen.n, gen.exponent, gen.d_min, gen.d_max};
        const auto degrees = focs::sample_degrees(spec, rng);
        const auto g = focs::configuration_model(degrees, rng);
        focs::save_edge_list(g, edges_path);
        std::cerr << "wrote " << edges_path << " (" << g.num_nodes() << " nodes, " << g.num_edges()
                  << " edges)\n";
    } else if (gen.model == "lfr") {
        focs::LfrSpec spec;
        spec.n = gen.n;
        spec.mu = gen.mu;
        spec.community_min = gen.c_min;
        spec.community_max = gen.c_max;
        spec.degree_spec = {gen.n, gen.exponent, gen.d_min, gen.d_max};
        spec.seed = opts.seed;
        const auto result = focs::lfr_like(spec);
        focs::save_edge_list(result.graph, edges_path);
        std::ofstream cf(cmty_path);
        if (!cf) throw std::runtime_error("cannot open '" + cmty_path + "' for writing");
        focs::write_communities(result.ground_truth, result.graph, cf);
        std::cerr << "wrote " << edges_path << " and " << cmty_path << " ("
                  << result.ground_truth.size() << " communities, parity moves "
                  << result.parity_moved_stubs << ")\n";
    } else if (gen.model == "bipartite-block") {
        const auto result = focs::planted_bipartite_block(gen.nu, gen.nv, gen.block_u, gen.block_v,
                                                          gen.p_in, gen.p_out, rng);
        focs::save_edge_list(result.graph, edges_path);
        std::ofstream cf(cmty_path);
        if (!cf) throw std::runtime_error("cannot open '" + cmty_path + "' for writing");
        focs::write_communities({result.planted}, result.graph, cf);
        std::cerr << "wrote " << edges_path << " and " << cmty_path << "\n";
    } else {
        throw std::invalid_argument("unknown model '" + gen.model + "'");
    }
    return kExitOk;
}

struct NullBenchRow {
    double neg_log10 = 0.0;
    std::size_t community_size = 0;
    double wall_ms = 0.0;
};

int cmd_null_bench(const CommonOptions& opts, std::size_t reps, const GenerateOptions& gen) {
    if (reps < 1) throw std::invalid_argument("--reps must be >= 1");
    const focs::Rng root(opts.seed);
    std::vector<NullBenchRow> rows(reps);

    parallel_for(reps, resolve_threads(opts.threads), [&](std::size_t r) {
        const auto start = std::chrono::steady_clock::now();
        focs::Rng job = root.split(r);
        while (true) {
            focs::DegreeSequenceSpec spec{gen.n, gen.exponent, gen.d_min, gen.d_max};
            const auto degrees = focs::sample_degrees(spec, job);
            const auto g = focs::configuration_model(degrees, job);
            const auto partition = focs::louvain(g, job.next_u64());
            const auto communities = partition.communities();
            std::vector<std::size_t> eligible;
            for (std::size_t i = 0; i < communities.size(); ++i)
                if (communities[i].size() > 2) eligible.push_back(i);
            if (eligible.empty()) continue;  // regenerate; the stream keeps advancing

            focs::ScoreRequest req;
            req.graph = &g;
            req.community = communities[eligible[job.uniform_index(eligible.size())]];
            req.test_fraction = opts.p;
            req.resamples = opts.resamples;
            req.seed = job.next_u64();
            const auto report = focs::focs_score(req);
            rows[r] = {report.neg_log10_score, req.community.size(), elapsed_ms(start)};
            return;
        }
    });

    // ascending raw score = descending -log10; pair with i/(reps+1)
    std::sort(rows.begin(), rows.end(),
              [](const NullBenchRow& a, const NullBenchRow& b) { return a.neg_log10 > b.neg_log10; });
    OutputSink sink(opts.out_path);
    auto& out = sink.stream();
    out << "rank,quantile,neg_log10_score,community_size,wall_ms\n";
    std::size_t significant = 0;
    const double threshold = -std::log10(opts.alpha);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].neg_log10 > threshold) ++significant;
        out << (i + 1) << ',' << static_cast<double>(i + 1) / static_cast<double>(reps + 1) << ','
            << rows[i].neg_log10 << ',' << rows[i].community_size << ',' << rows[i].wall_ms << '\n';
    }
    std::cerr << "fraction significant at alpha=" << opts.alpha << ": "
              << static_cast<double>(significant) / static_cast<double>(reps) << "\n";
    return kExitOk;
}

int cmd_power_bench(const CommonOptions& opts, const std::vector<double>& mu_grid, std::size_t reps,
                    const GenerateOptions& gen) {
    if (reps < 1) throw std::invalid_argument("--reps must be >= 1");
    if (mu_grid.empty()) throw std::invalid_argument("--mu-grid must be nonempty");
    for (double mu : mu_grid)
        if (mu < 0.0 || mu > 1.0) throw std::invalid_argument("mu values must lie in [0,1]");

    struct Cell {
        double sum_neg_log10 = 0.0;
        std::size_t communities = 0;
        std::size_t significant = 0;
        double wall_ms = 0.0;
    };
    std::vector<Cell> cells(mu_grid.size() * reps);
    const focs::Rng root(opts.seed);
    const double threshold = -std::log10(opts.alpha);

    parallel_for(cells.size(), resolve_threads(opts.threads), [&](std::size_t idx) {
        const std::size_t mu_idx = idx / reps;
        const std::size_t rep = idx % reps;
        const auto start = std::chrono::steady_clock::now();

        focs::LfrSpec spec;
        spec.n = gen.n;
        spec.mu = mu_grid[mu_idx];
        spec.community_min = gen.c_min;
        spec.community_max = gen.c_max;
        spec.degree_spec = {gen.n, gen.exponent, gen.d_min, gen.d_max};
        spec.seed = root.split(mu_idx, rep).key();
        const auto result = focs::lfr_like(spec);

        Cell& cell = cells[idx];
        focs::Rng score_rng = root.split(mu_idx, rep).split(1);
        for (std::size_t c = 0; c < result.ground_truth.size(); ++c) {
            focs::ScoreRequest req;
            req.graph = &result.graph;
            req.community = result.ground_truth[c];
            req.test_fraction = opts.p;
            req.resamples = opts.resamples;
            req.seed = score_rng.split(c).key();
            const auto report = focs::focs_score(req);
            cell.sum_neg_log10 += report.neg_log10_score;
            cell.communities += 1;
            if (report.neg_log10_score > threshold) cell.significant += 1;
        }
        cell.wall_ms = elapsed_ms(start);
    });

    OutputSink sink(opts.out_path);
    auto& out = sink.stream();
    out << "mu,networks,communities,mean_neg_log10_score,frac_significant,wall_ms\n";
    for (std::size_t m = 0; m < mu_grid.size(); ++m) {
        Cell total;
        for (std::size_t r = 0; r < reps; ++r) {
            const Cell& c = cells[m * reps + r];
            total.sum_neg_log10 += c.sum_neg_log10;
            total.communities += c.communities;
            total.significant += c.significant;
            total.wall_ms += c.wall_ms;
        }
        out << mu_grid[m] << ',' << reps << ',' << total.communities << ','
            << total.sum_neg_log10 / static_cast<double>(total.communities) << ','
            << static_cast<double>(total.significant) / static_cast<double>(total.communities) << ','
            << total.wall_ms << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Significance scoring of optimized network communities against "
                 "conditional configuration-model nulls"};
    app.require_subcommand(1);

    CommonOptions opts;
    GenerateOptions gen;
    GenerateOptions null_gen;   // n=100, power-law(-2) on [10,50]
    GenerateOptions power_gen;  // n=1000, community sizes [10,50]
    power_gen.n = 1000;
    std::string json_out;
    std::size_t reps_null = 300;
    std::size_t reps_power = 5;
    std::size_t max_iterations = 0;
    std::vector<double> mu_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

    auto add_common = [&](CLI::App* sub, bool needs_graph, bool needs_communities) {
        auto* g = sub->add_option("--graph", opts.graph_path, "edge-list file");
        if (needs_graph) g->required();
        auto* c = sub->add_option("--communities", opts.communities_path, "community file");
        if (needs_communities) c->required();
        sub->add_flag("--bipartite", opts.bipartite, "treat the graph as bipartite");
        sub->add_option("--p", opts.p, "tested fraction of each community")
            ->check(CLI::Range(1e-9, 1.0));
        sub->add_option("--resamples", opts.resamples, "resampling runs per community")
            ->check(CLI::PositiveNumber);
        sub->add_option("--alpha", opts.alpha, "significance threshold")
            ->check(CLI::Range(1e-12, 1.0));
        sub->add_option("--seed", opts.seed, "random seed");
        sub->add_option("--out", opts.out_path, "output path (stdout when omitted)");
        sub->add_option("--threads", opts.threads, "worker threads (FOCS_THREADS fallback)");
    };

    auto* score = app.add_subcommand("score", "score communities against the null");
    add_common(score, true, true);
    score->add_option("--json-out", json_out, "also write full reports with traces as JSON");

    auto* detect = app.add_subcommand("detect", "Louvain partition of a unipartite graph");
    add_common(detect, true, false);

    auto* extract = app.add_subcommand("extract", "optimize bipartite seed communities");
    add_common(extract, true, true);
    extract->add_option("--max-iterations", max_iterations, "anneal move budget (default 10*n)");

    auto* generate = app.add_subcommand("generate", "emit benchmark graphs and ground truth");
    add_common(generate, false, false);
    generate->add_option("--model", gen.model, "config | lfr | bipartite-block");
    generate->add_option("--n", gen.n, "node count");
    generate->add_option("--exponent", gen.exponent, "degree power-law exponent");
    generate->add_option("--d-min", gen.d_min, "minimum degree");
    generate->add_option("--d-max", gen.d_max, "maximum degree");
    generate->add_option("--mu", gen.mu, "mixing parameter");
    generate->add_option("--c-min", gen.c_min, "minimum community size");
    generate->add_option("--c-max", gen.c_max, "maximum community size");
    generate->add_option("--nu", gen.nu, "bipartite U-side size");
    generate->add_option("--nv", gen.nv, "bipartite V-side size");
    generate->add_option("--block-u", gen.block_u, "planted block U size");
    generate->add_option("--block-v", gen.block_v, "planted block V size");
    generate->add_option("--p-in", gen.p_in, "in-block edge probability");
    generate->add_option("--p-out", gen.p_out, "background edge probability");

    auto* null_bench = app.add_subcommand("null-bench", "calibration on configuration-model graphs");
    add_common(null_bench, false, false);
    null_bench->add_option("--reps", reps_null, "repetitions");
    null_bench->add_option("--n", null_gen.n, "node count");
    null_bench->add_option("--exponent", null_gen.exponent, "degree power-law exponent");
    null_bench->add_option("--d-min", null_gen.d_min, "minimum degree");
    null_bench->add_option("--d-max", null_gen.d_max, "maximum degree");

    auto* power_bench = app.add_subcommand("power-bench", "detection power across the mu grid");
    add_common(power_bench, false, false);
    power_bench->add_option("--reps", reps_power, "networks per mu");
    power_bench->add_option("--mu-grid", mu_grid, "mu values")->delimiter(',');
    power_bench->add_option("--n", power_gen.n, "node count");
    power_bench->add_option("--exponent", power_gen.exponent, "degree power-law exponent");
    power_bench->add_option("--d-min", power_gen.d_min, "minimum degree");
    power_bench->add_option("--d-max", power_gen.d_max, "maximum degree");
    power_bench->add_option("--c-min", power_gen.c_min, "minimum community size");
    power_bench->add_option("--c-max", power_gen.c_max, "maximum community size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (score->parsed()) return cmd_score(opts, json_out);
        if (detect->parsed()) return cmd_detect(opts);
        if (extract->parsed()) return cmd_extract(opts, max_iterations);
        if (generate->parsed()) return cmd_generate(opts, gen);
        if (null_bench->parsed()) return cmd_null_bench(opts, reps_null, null_gen);
        if (power_bench->parsed()) return cmd_power_bench(opts, mu_grid, reps_power, power_gen);
    } catch (const focs::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitConfigError;
}
