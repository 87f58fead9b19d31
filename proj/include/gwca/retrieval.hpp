#pragma once

#include "gwca/solver.hpp"
#include "gwca/wasserstein.hpp"

#include <map>
#include <span>
#include <string_view>
#include <vector>

namespace gwca {

/// How a query/corpus pair is scored after projection.
///
/// - w2: sum over channels of the squared Gaussian 2-Wasserstein distance.
/// - w2_weighted: the same sum with channel j weighted by rho_j^2.
/// - cosine: 1 - cos between the node-averaged projected vectors.
enum class DistanceMode { w2, w2_weighted, cosine };

DistanceMode parse_distance_mode(std::string_view name);
std::string_view to_string(DistanceMode mode);

/// Distance between query `q` (view 1) and corpus item `c` (view 2). The
/// pair is zero-padded to a common node count before projection.
double pairwise_distance(const CorrelationModel& model, const Graph& q, const Graph& c,
                         DistanceMode mode = DistanceMode::w2);

/// Per-channel statistics of one projected graph. Enough to score it
/// against any other graph, padding included, without re-projecting.
struct ProjectedSummary {
    std::vector<SignalStats> channels;
    Vector pooled;  ///< node-averaged projection (unpadded)
    std::size_t nodes = 0;
};

ProjectedSummary summarize(const CorrelationModel& model, const Graph& g, View view);

double summary_distance(const CorrelationModel& model, const ProjectedSummary& q, const ProjectedSummary& c,
                        DistanceMode mode);

struct RankedItem {
    std::size_t corpus_index = 0;
    double distance = 0.0;
};

struct RetrievalResult {
    std::vector<RankedItem> ranked;  ///< ascending distance, ties by index
    std::size_t truth = 0;
};

/// Full ranking of `corpus` against one query.
std::vector<RankedItem> rank(const CorrelationModel& model, const Graph& q, std::span<const Graph> corpus,
                             DistanceMode mode = DistanceMode::w2);

/// Ranks every query against the corpus. `truth[i]` is the corpus index
/// matching query i. Queries run in parallel; output follows input order.
std::vector<RetrievalResult> retrieve(const CorrelationModel& model, std::span<const Graph> queries,
                                      std::span<const Graph> corpus, std::span<const std::size_t> truth,
                                      DistanceMode mode = DistanceMode::w2, std::size_t threads = 1);

struct RecallReport {
    std::map<std::size_t, double> r_at;
    std::size_t query_count = 0;
};

/// 1-based position of the ground truth in a result; throws if absent.
std::size_t truth_rank(const RetrievalResult& result);

RecallReport recall_at_k(std::span<const RetrievalResult> results, std::span<const std::size_t> ks);

}  // namespace gwca
