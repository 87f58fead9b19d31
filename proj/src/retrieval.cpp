#include "gwca/retrieval.hpp"

#include "gwca/error.hpp"
#include "gwca/parallel.hpp"

#include <algorithm>
#include <string>

namespace gwca {

DistanceMode parse_distance_mode(std::string_view name) {
    if (name == "w2") return DistanceMode::w2;
    if (name == "w2-weighted") return DistanceMode::w2_weighted;
    if (name == "cosine") return DistanceMode::cosine;
    throw ConfigError("unknown distance mode '" + std::string(name) + "' (expected w2, w2-weighted or cosine)");
}

std::string_view to_string(DistanceMode mode) {
    switch (mode) {
        case DistanceMode::w2: return "w2";
        case DistanceMode::w2_weighted: return "w2-weighted";
        case DistanceMode::cosine: return "cosine";
    }
    return "w2";
}

namespace {

double cosine_distance(const Vector& a, const Vector& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) return 1.0;
    return 1.0 - a.dot(b) / (na * nb);
}

std::vector<double> channel_weights(const CorrelationModel& model, DistanceMode mode) {
    if (mode != DistanceMode::w2_weighted) return {};
    std::vector<double> w(model.channels());
    for (std::size_t j = 0; j < w.size(); ++j) {
        const double r = model.rho(static_cast<Eigen::Index>(j));
        w[j] = r * r;
    }
    return w;
}

}  // namespace

double pairwise_distance(const CorrelationModel& model, const Graph& q, const Graph& c, DistanceMode mode) {
    const auto [qp, cp] = pad_pair(q, c);
    const Matrix zq = project(model, qp, View::first);
    const Matrix zc = project(model, cp, View::second);
    if (mode == DistanceMode::cosine) {
        return cosine_distance(zq.colwise().mean().transpose(), zc.colwise().mean().transpose());
    }
    std::vector<SignalStats> sq;
    std::vector<SignalStats> sc;
    for (Eigen::Index j = 0; j < zq.cols(); ++j) {
        sq.push_back(signal_stats(zq.col(j)));
        sc.push_back(signal_stats(zc.col(j)));
    }
    const auto weights = channel_weights(model, mode);
    return multichannel_w2(sq, sc, weights);
}

ProjectedSummary summarize(const CorrelationModel& model, const Graph& g, View view) {
    const Matrix z = project(model, g, view);
    ProjectedSummary s;
    s.nodes = g.size();
    s.pooled = z.colwise().mean().transpose();
    s.channels.reserve(static_cast<std::size_t>(z.cols()));
    for (Eigen::Index j = 0; j < z.cols(); ++j) s.channels.push_back(signal_stats(z.col(j)));
    return s;
}

double summary_distance(const CorrelationModel& model, const ProjectedSummary& q, const ProjectedSummary& c,
                        DistanceMode mode) {
    // Zero padding rescales the pooled vector uniformly, so cosine ignores it.
    if (mode == DistanceMode::cosine) return cosine_distance(q.pooled, c.pooled);
    const std::size_t n = std::max(q.nodes, c.nodes);
    const bool weighted = mode == DistanceMode::w2_weighted;
    double total = 0.0;
    for (std::size_t j = 0; j < q.channels.size(); ++j) {
        const double d = w2_gaussian(padded_stats(q.channels[j], n), padded_stats(c.channels[j], n));
        if (weighted) {
            const double r = model.rho(static_cast<Eigen::Index>(j));
            total += r * r * d;
        } else {
            total += d;
        }
    }
    return total;
}

namespace {

std::vector<RankedItem> rank_summaries(const CorrelationModel& model, const ProjectedSummary& q,
                                       std::span<const ProjectedSummary> corpus, DistanceMode mode) {
    std::vector<RankedItem> items(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) items[i] = {i, summary_distance(model, q, corpus[i], mode)};
    std::sort(items.begin(), items.end(), [](const RankedItem& a, const RankedItem& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return a.corpus_index < b.corpus_index;
    });
    return items;
}

}  // namespace

std::vector<RankedItem> rank(const CorrelationModel& model, const Graph& q, std::span<const Graph> corpus,
                             DistanceMode mode) {
    if (corpus.empty()) throw ConfigError("cannot rank against an empty corpus");
    std::vector<ProjectedSummary> cs;
    cs.reserve(corpus.size());
    for (const auto& c : corpus) cs.push_back(summarize(model, c, View::second));
    return rank_summaries(model, summarize(model, q, View::first), cs, mode);
}

std::vector<RetrievalResult> retrieve(const CorrelationModel& model, std::span<const Graph> queries,
                                      std::span<const Graph> corpus, std::span<const std::size_t> truth,
                                      DistanceMode mode, std::size_t threads) {
    if (corpus.empty()) throw ConfigError("cannot rank against an empty corpus");
    if (truth.size() != queries.size()) throw DimensionMismatch("one ground-truth index per query is required");
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] >= corpus.size()) {
            throw ConfigError("ground truth of query " + std::to_string(i) + " is not in the corpus");
        }
    }
    std::vector<ProjectedSummary> cs(corpus.size());
    parallel_for(corpus.size(), threads, [&](std::size_t i) { cs[i] = summarize(model, corpus[i], View::second); });

    std::vector<RetrievalResult> out(queries.size());
    parallel_for(queries.size(), threads, [&](std::size_t i) {
        out[i].ranked = rank_summaries(model, summarize(model, queries[i], View::first), cs, mode);
        out[i].truth = truth[i];
    });
    return out;
}

std::size_t truth_rank(const RetrievalResult& result) {
    for (std::size_t i = 0; i < result.ranked.size(); ++i) {
        if (result.ranked[i].corpus_index == result.truth) return i + 1;
    }
    throw ConfigError("ground truth " + std::to_string(result.truth) + " is absent from the ranked corpus");
}

RecallReport recall_at_k(std::span<const RetrievalResult> results, std::span<const std::size_t> ks) {
    RecallReport report;
    report.query_count = results.size();
    std::vector<std::size_t> ranks;
    ranks.reserve(results.size());
    for (const auto& r : results) ranks.push_back(truth_rank(r));
    for (std::size_t k : ks) {
        if (k == 0) throw ConfigError("recall cutoff must be at least 1");
        const auto hits = std::count_if(ranks.begin(), ranks.end(), [k](std::size_t r) { return r <= k; });
        report.r_at[k] = results.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(results.size());
    }
    return report;
}

}  // namespace gwca
