#include "gwca/ablation.hpp"

#include "gwca/error.hpp"

#include <cstdio>
#include <numeric>

namespace gwca {

CorrelationModel truncate(const CorrelationModel& model, std::size_t channels) {
    if (channels == 0 || channels > model.channels()) throw ConfigError("invalid channel count for truncation");
    CorrelationModel out = model;
    const auto r = static_cast<Eigen::Index>(channels);
    out.w1 = model.w1.leftCols(r);
    out.w2 = model.w2.leftCols(r);
    out.rho = model.rho.head(r);
    return out;
}

std::vector<AblationRow> run_ablation(std::span<const GraphPair> train, std::span<const GraphPair> test,
                                      const AblationConfig& cfg) {
    if (test.empty()) throw ConfigError("ablation needs at least one test pair");
    std::vector<Graph> queries;
    std::vector<Graph> corpus;
    for (const auto& p : test) {
        queries.push_back(p.first);
        corpus.push_back(p.second);
    }
    std::vector<std::size_t> truth(test.size());
    std::iota(truth.begin(), truth.end(), std::size_t{0});

    std::vector<AblationRow> rows;
    for (std::size_t order : cfg.orders) {
        const FeatureLift lift{order, cfg.fusion};
        const auto cm = accumulate(train, lift, cfg.threads);
        const auto full = solve(cm, cfg.reg, std::min<std::size_t>(cm.c1.rows(), cm.c2.rows()));
        std::vector<std::size_t> dims = cfg.channels;
        if (dims.empty()) dims.push_back(std::min(full.channels(), kDefaultChannelCap));
        for (std::size_t r : dims) {
            if (r == 0 || r > full.channels()) continue;
            const auto model = truncate(full, r);
            const auto results = retrieve(model, queries, corpus, truth, cfg.mode, cfg.threads);
            rows.push_back({order, cfg.fusion, r, recall_at_k(results, cfg.ks)});
        }
    }
    return rows;
}

void write_ablation_table(std::ostream& os, std::span<const AblationRow> rows, std::span<const std::size_t> ks) {
    char buf[64];
    os << "order  fusion  channels";
    for (auto k : ks) {
        std::snprintf(buf, sizeof buf, "  %6s", ("R@" + std::to_string(k)).c_str());
        os << buf;
    }
    os << '\n';
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%5zu  %6s  %8zu", row.order, row.fusion ? "yes" : "no", row.channels);
        os << buf;
        for (auto k : ks) {
            std::snprintf(buf, sizeof buf, "  %6.3f", row.recall.r_at.at(k));
            os << buf;
        }
        os << '\n';
    }
}

void write_ablation_csv(std::ostream& os, std::span<const AblationRow> rows, std::span<const std::size_t> ks) {
    os << "order,fusion,channels";
    for (auto k : ks) os << ",r_at_" << k;
    os << '\n';
    char buf[32];
    for (const auto& row : rows) {
        os << row.order << ',' << (row.fusion ? 1 : 0) << ',' << row.channels;
        for (auto k : ks) {
            std::snprintf(buf, sizeof buf, ",%.6f", row.recall.r_at.at(k));
            os << buf;
        }
        os << '\n';
    }
}

}  // namespace gwca
