#pragma once

#include "gwca/retrieval.hpp"

#include <ostream>
#include <vector>

namespace gwca {

/// Keeps the first `channels` projection pairs of a model.
CorrelationModel truncate(const CorrelationModel& model, std::size_t channels);

struct AblationConfig {
    std::vector<std::size_t> orders{1, 2, 3, 4};
    std::vector<std::size_t> channels;  ///< empty: use every available channel once
    bool fusion = true;
    double reg = kDefaultRegularization;
    std::vector<std::size_t> ks{1, 5, 10};
    DistanceMode mode = DistanceMode::w2;
    std::size_t threads = 1;
};

struct AblationRow {
    std::size_t order = 0;
    bool fusion = true;
    std::size_t channels = 0;
    RecallReport recall;
};

/// Trains one model per order on `train`, then evaluates recall on `test`
/// (view 1 queries against view 2 corpus, pair i matches pair i) for every
/// channel count. Channel counts larger than a model supports are skipped.
std::vector<AblationRow> run_ablation(std::span<const GraphPair> train, std::span<const GraphPair> test,
                                      const AblationConfig& cfg);

void write_ablation_table(std::ostream& os, std::span<const AblationRow> rows, std::span<const std::size_t> ks);
void write_ablation_csv(std::ostream& os, std::span<const AblationRow> rows, std::span<const std::size_t> ks);

}  // namespace gwca
