// gwca: command-line driver for synthetic data generation, training,
// retrieval evaluation, ablations and the numerical self-check.
//
// Exit codes: 0 success, 1 self-check failure, 2 usage or input error,
// 3 numerical failure (solver breakdown, model/data dimension mismatch).

#include "gwca/ablation.hpp"
#include "gwca/check.hpp"
#include "gwca/error.hpp"
#include "gwca/io.hpp"
#include "gwca/parallel.hpp"
#include "gwca/retrieval.hpp"
#include "gwca/solver.hpp"
#include "gwca/synth.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <unordered_map>

namespace fs = std::filesystem;
using namespace gwca;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

std::vector<std::size_t> parse_list(const std::string& text, const char* what) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const long long v = std::stoll(item, &used);
            if (used != item.size() || v < 1) throw std::invalid_argument(item);
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw ConfigError(std::string("bad ") + what + " entry '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError(std::string(what) + " list is empty");
    return out;
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& text) {
    const auto dots = text.find("..");
    try {
        if (dots == std::string::npos) {
            const auto v = static_cast<std::size_t>(std::stoul(text));
            return {v, v};
        }
        return {static_cast<std::size_t>(std::stoul(text.substr(0, dots))),
                static_cast<std::size_t>(std::stoul(text.substr(dots + 2)))};
    } catch (const std::exception&) {
        throw ConfigError("bad node range '" + text + "' (expected MIN..MAX)");
    }
}

void require_file(const std::string& path, const char* what) {
    if (!fs::is_regular_file(path)) throw ConfigError(std::string(what) + " not found: " + path);
}

void require_parent_dir(const std::string& path) {
    const auto parent = fs::path(path).parent_path();
    if (!parent.empty() && !fs::is_directory(parent)) {
        throw ConfigError("output directory does not exist: " + parent.string());
    }
}

struct SynthArgs {
    SynthConfig cfg;
    std::string nodes = "20..40";
    std::string out;
};

int cmd_synth(SynthArgs& args) {
    std::tie(args.cfg.min_nodes, args.cfg.max_nodes) = parse_range(args.nodes);
    args.cfg.validate();
    const auto set = generate_pairs(args.cfg);
    const std::size_t files = write_synthetic(set, args.out);
    std::cout << "wrote " << files << " graph files (" << set.train.size() << " train pairs, " << set.test.size()
              << " test pairs) to " << args.out << "\n";
    return kExitOk;
}

struct TrainArgs {
    std::string manifest;
    std::string out;
    std::size_t order = 2;
    bool no_fusion = false;
    double reg = kDefaultRegularization;
    std::size_t channels = 0;
    std::size_t threads = 0;
};

int cmd_train(const TrainArgs& args) {
    require_file(args.manifest, "manifest");
    require_parent_dir(args.out);
    if (args.order < 1) throw ConfigError("--order must be at least 1");
    if (!(args.reg > 0.0)) throw ConfigError("--reg must be positive");
    const auto data = load_pairs(args.manifest);
    if (data.pairs.empty()) throw ConfigError("manifest " + args.manifest + " lists no pairs");

    const FeatureLift lift{args.order, !args.no_fusion};
    const auto cm = accumulate(data.pairs, lift, args.threads);
    const std::size_t max_r = std::min<std::size_t>(cm.c1.rows(), cm.c2.rows());
    if (args.channels > max_r) {
        throw ConfigError("--channels " + std::to_string(args.channels) + " exceeds min(D1, D2) = " +
                          std::to_string(max_r));
    }
    const auto model = solve(cm, args.reg, args.channels);
    save_model(args.out, model);

    std::printf("trained on %zu pairs: order %zu, fusion %s, D1 %td, D2 %td, channels %zu\n", cm.pair_count,
                lift.order, lift.fusion ? "on" : "off", cm.c1.rows(), cm.c2.rows(), model.channels());
    std::printf("rho_1 = %.9f  rho_%zu = %.9f\n", model.rho(0), model.channels(),
                model.rho(model.rho.size() - 1));
    std::printf("rho[:%zu] =", std::min<std::size_t>(8, model.channels()));
    for (Eigen::Index j = 0; j < std::min<Eigen::Index>(8, model.rho.size()); ++j) std::printf(" %.6f", model.rho(j));
    std::printf("\nmodel written to %s\n", args.out.c_str());
    return kExitOk;
}

struct RetrieveArgs {
    std::string model;
    std::string queries;
    std::string corpus;
    std::string distance = "w2";
    std::string topk = "1,5,10";
    std::string out;
    std::size_t threads = 0;
};

int cmd_retrieve(const RetrieveArgs& args) {
    require_file(args.model, "model");
    require_file(args.queries, "query manifest");
    const std::string corpus_path = args.corpus.empty() ? args.queries : args.corpus;
    require_file(corpus_path, "corpus manifest");
    if (!args.out.empty()) require_parent_dir(args.out);
    const auto mode = parse_distance_mode(args.distance);
    const auto ks = parse_list(args.topk, "--topk");

    const auto model = load_model(args.model);
    const auto qset = load_pairs(args.queries);
    const auto cset = load_pairs(corpus_path);
    if (qset.pairs.empty()) throw ConfigError("query manifest lists no pairs");
    if (cset.pairs.empty()) throw ConfigError("corpus manifest lists no pairs");

    std::unordered_map<std::string, std::size_t> corpus_index;
    std::vector<Graph> corpus;
    for (std::size_t i = 0; i < cset.pairs.size(); ++i) {
        corpus_index.emplace(cset.ids[i], i);
        corpus.push_back(cset.pairs[i].second);
    }
    std::vector<Graph> queries;
    std::vector<std::size_t> truth;
    for (std::size_t i = 0; i < qset.pairs.size(); ++i) {
        const auto it = corpus_index.find(qset.ids[i]);
        if (it == corpus_index.end()) {
            throw ConfigError("ground truth for query '" + qset.ids[i] + "' is absent from the corpus");
        }
        queries.push_back(qset.pairs[i].first);
        truth.push_back(it->second);
    }

    const auto results = retrieve(model, queries, corpus, truth, mode, args.threads);
    if (!args.out.empty()) {
        std::string lines;
        for (std::size_t i = 0; i < results.size(); ++i) {
            lines += result_to_json(qset.ids[i], results[i], cset.ids).dump();
            lines += '\n';
        }
        write_atomic(args.out, lines);
    }
    const auto report = recall_at_k(results, ks);
    std::printf("queries %zu  corpus %zu  distance %s\n", report.query_count, corpus.size(),
                std::string(to_string(mode)).c_str());
    for (const auto& [k, v] : report.r_at) std::printf("R@%zu = %.4f\n", k, v);
    return kExitOk;
}

struct CheckArgs {
    CheckOptions opts;
    std::string failure_dir = ".";
};

int cmd_check(CheckArgs& args) {
    if (args.opts.trials < 1) throw ConfigError("--trials must be at least 1");
    args.opts.failure_dir = args.failure_dir;
    const auto results = run_checks(args.opts);
    bool ok = true;
    for (const auto& r : results) {
        std::printf("%-20s %s  instances %6zu  worst %.3e  tol %.0e  %.3fs\n", r.name.c_str(),
                    r.passed ? "PASS" : "FAIL", r.instances, r.worst, r.tolerance, r.seconds);
        if (!r.passed) {
            ok = false;
            std::printf("  failing instance written to %s\n",
                        (fs::path(args.failure_dir) / ("check_failure_" + r.name + ".json")).string().c_str());
        }
    }
    std::printf("%s\n", ok ? "all properties passed" : "some properties FAILED");
    return ok ? kExitOk : kExitCheckFailed;
}

struct AblateArgs {
    std::string train;
    std::string test;
    std::string orders = "1,2,3,4";
    std::string channels;
    bool no_fusion = false;
    double reg = kDefaultRegularization;
    std::string topk = "1,5,10";
    std::string distance = "w2";
    std::string csv;
    std::size_t threads = 0;
};

int cmd_ablate(const AblateArgs& args) {
    require_file(args.train, "training manifest");
    require_file(args.test, "test manifest");
    if (!args.csv.empty()) require_parent_dir(args.csv);
    AblationConfig cfg;
    cfg.orders = parse_list(args.orders, "--orders");
    if (!args.channels.empty()) cfg.channels = parse_list(args.channels, "--channels");
    cfg.fusion = !args.no_fusion;
    cfg.reg = args.reg;
    cfg.ks = parse_list(args.topk, "--topk");
    cfg.mode = parse_distance_mode(args.distance);
    cfg.threads = args.threads;
    const auto train = load_pairs(args.train);
    const auto test = load_pairs(args.test);
    if (train.pairs.empty() || test.pairs.empty()) throw ConfigError("ablation needs nonempty manifests");

    const auto rows = run_ablation(train.pairs, test.pairs, cfg);
    write_ablation_table(std::cout, rows, cfg.ks);
    if (!args.csv.empty()) {
        std::ostringstream csv;
        write_ablation_csv(csv, rows, cfg.ks);
        write_atomic(args.csv, csv.str());
    }
    return kExitOk;
}

struct EmbedArgs {
    std::string input;
    std::string out;
    std::optional<double> threshold;
    std::optional<std::size_t> top_m;
};

int cmd_embed(const EmbedArgs& args) {
    require_file(args.input, "embedding file");
    require_parent_dir(args.out);
    EmbeddingGraphConfig cfg{args.threshold, args.top_m};
    cfg.validate();
    const Graph g = build_embedding_graph(read_embeddings(args.input), cfg);
    write_graph_file(args.out, g);
    std::size_t edges = 0;
    for (Eigen::Index i = 0; i < g.adjacency().rows(); ++i) {
        for (Eigen::Index j = i + 1; j < g.adjacency().cols(); ++j) edges += g.adjacency()(i, j) > 0.0;
    }
    std::printf("graph with %zu nodes and %zu edges written to %s\n", g.size(), edges, args.out.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph Wasserstein correlation analysis: train and evaluate cross-view graph retrieval.\n"
                 "Defaults (order 2 with fusion, at most 240 channels) follow the best settings of the\n"
                 "original MovieGraphs ablations and may not be optimal for other data."};
    app.require_subcommand(1);
    const std::size_t default_threads = default_thread_count();

    SynthArgs synth;
    auto* sc = app.add_subcommand("synth", "Generate correlated synthetic graph pairs");
    sc->add_option("--pairs", synth.cfg.pair_count, "Training pairs")->capture_default_str();
    sc->add_option("--test-pairs", synth.cfg.test_pair_count, "Held-out pairs sharing the same mixing")
        ->capture_default_str();
    sc->add_option("--nodes", synth.nodes, "Node count range MIN..MAX")->capture_default_str();
    sc->add_option("--d1", synth.cfg.d1, "View-1 feature dimension")->capture_default_str();
    sc->add_option("--d2", synth.cfg.d2, "View-2 feature dimension")->capture_default_str();
    sc->add_option("--noise", synth.cfg.noise, "Std-dev of view-2 feature noise")->capture_default_str();
    sc->add_option("--density", synth.cfg.edge_density, "Edge probability in (0, 1]")->capture_default_str();
    std::string mixing = "gaussian";
    sc->add_option("--mixing", mixing, "Cross-view mixing matrix: gaussian | identity")->capture_default_str();
    sc->add_option("--seed", synth.cfg.seed, "Random seed")->capture_default_str();
    sc->add_option("--out", synth.out, "Output directory")->required();

    TrainArgs train;
    train.threads = default_threads;
    auto* tc = app.add_subcommand("train", "Fit projections on a pairs manifest");
    tc->add_option("--manifest", train.manifest, "Training pairs manifest (JSON lines)")->required();
    tc->add_option("--out", train.out, "Model JSON output path")->required();
    tc->add_option("--order", train.order, "Polynomial terms K (powers 0..K-1)")->capture_default_str();
    tc->add_flag("--no-fusion", train.no_fusion, "Use only the L^(K-1) term instead of fusing all orders");
    tc->add_option("--reg", train.reg, "Ridge factor, scaled by tr(C)/D per view")->capture_default_str();
    tc->add_option("--channels", train.channels, "Projection channels (0 = min(D1, D2, 240))")
        ->capture_default_str();
    tc->add_option("--threads", train.threads, "Worker threads (env GWCA_THREADS)")->capture_default_str();

    RetrieveArgs ret;
    ret.threads = default_threads;
    auto* rc = app.add_subcommand("retrieve", "Rank a corpus for every query and report Recall@K");
    rc->add_option("--model", ret.model, "Model JSON")->required();
    rc->add_option("--queries", ret.queries, "Query manifest (view-1 graphs)")->required();
    rc->add_option("--corpus", ret.corpus, "Corpus manifest (view-2 graphs); defaults to --queries");
    rc->add_option("--distance", ret.distance, "w2 | w2-weighted | cosine")->capture_default_str();
    rc->add_option("--topk", ret.topk, "Comma-separated recall cutoffs")->capture_default_str();
    rc->add_option("--out", ret.out, "JSON-lines ranking output");
    rc->add_option("--threads", ret.threads, "Worker threads (env GWCA_THREADS)")->capture_default_str();

    CheckArgs check;
    auto* cc = app.add_subcommand("check", "Run the numerical invariant suite");
    cc->add_option("--seed", check.opts.seed, "Random seed")->capture_default_str();
    cc->add_option("--trials", check.opts.trials, "Instances per property")->capture_default_str();
    cc->add_option("--failure-dir", check.failure_dir, "Directory for failing instances")->capture_default_str();
    cc->add_flag("--inject-fault", check.opts.inject_fault, "Testing aid: corrupt K_Sigma1 before checking")
        ->group("");

    AblateArgs ablate;
    ablate.threads = default_threads;
    auto* ac = app.add_subcommand("ablate", "Recall as a function of order and channel count");
    ac->add_option("--train", ablate.train, "Training manifest")->required();
    ac->add_option("--test", ablate.test, "Test manifest")->required();
    ac->add_option("--orders", ablate.orders, "Comma-separated orders K")->capture_default_str();
    ac->add_option("--channels", ablate.channels, "Comma-separated channel counts (default: all)");
    ac->add_flag("--no-fusion", ablate.no_fusion, "Disable order fusion");
    ac->add_option("--reg", ablate.reg, "Ridge factor")->capture_default_str();
    ac->add_option("--topk", ablate.topk, "Comma-separated recall cutoffs")->capture_default_str();
    ac->add_option("--distance", ablate.distance, "w2 | w2-weighted | cosine")->capture_default_str();
    ac->add_option("--csv", ablate.csv, "Also write the table as CSV");
    ac->add_option("--threads", ablate.threads, "Worker threads (env GWCA_THREADS)")->capture_default_str();

    EmbedArgs embed;
    auto* ec = app.add_subcommand("embed", "Build a similarity graph from per-node embeddings");
    ec->add_option("--input", embed.input, "Embeddings as JSON or headerless CSV")->required();
    ec->add_option("--out", embed.out, "Graph JSON output path")->required();
    ec->add_option("--threshold", embed.threshold, "Connect when cosine similarity exceeds this");
    ec->add_option("--top-m", embed.top_m, "Connect each node to its m most similar nodes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*sc) {
            synth.cfg.mixing = parse_mixing(mixing);
            return cmd_synth(synth);
        }
        if (*tc) return cmd_train(train);
        if (*rc) return cmd_retrieve(ret);
        if (*cc) return cmd_check(check);
        if (*ac) return cmd_ablate(ablate);
        if (*ec) return cmd_embed(embed);
    } catch (const SolverError& e) {
        std::cerr << "error: solver failed on " << e.what() << "\n";
        return kExitNumerical;
    } catch (const DimensionMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
