#pragma once

#include "gwca/retrieval.hpp"
#include "gwca/solver.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace gwca {

using json = nlohmann::json;

// Graph files: {"n": N, "edges": [[i, j, w], ...], "features": [[...], ...]}
// with 0-based i < j, w > 0, one edge per undirected pair.
json graph_to_json(const Graph& g);
Graph graph_from_json(const json& j);
Graph read_graph_file(const std::filesystem::path& path);
void write_graph_file(const std::filesystem::path& path, const Graph& g);

/// One line of a pairs manifest: {"id": str, "view1": path, "view2": path}.
struct ManifestEntry {
    std::string id;
    std::string view1;
    std::string view2;
};

/// Reads a JSON-lines manifest. Relative view paths are resolved against
/// the manifest's directory.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);

struct PairSet {
    std::vector<std::string> ids;
    std::vector<GraphPair> pairs;
};

PairSet load_pairs(const std::filesystem::path& manifest);

/// Embeddings as JSON {"embeddings": [[...], ...]} or headerless CSV, one
/// node per row. The format is chosen by the first non-blank character.
Matrix read_embeddings(const std::filesystem::path& path);

json model_to_json(const CorrelationModel& model);
CorrelationModel model_from_json(const json& j);
CorrelationModel load_model(const std::filesystem::path& path);
void save_model(const std::filesystem::path& path, const CorrelationModel& model);

/// {"query": id, "ranked": [[corpus_id, dist], ...], "truth": id}
json result_to_json(const std::string& query_id, const RetrievalResult& result,
                    const std::vector<std::string>& corpus_ids);

/// Writes `content` to a sibling temporary file and renames it over `path`,
/// so readers never observe a partial file.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_text(const std::filesystem::path& path);

}  // namespace gwca
