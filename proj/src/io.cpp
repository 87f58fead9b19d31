#include "gwca/io.hpp"

#include "gwca/error.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace gwca {

namespace {

json matrix_rows(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_rows(const json& rows, const char* what) {
    if (!rows.is_array()) throw ConfigError(std::string(what) + " must be an array of rows");
    const auto n = static_cast<Eigen::Index>(rows.size());
    if (n == 0) return Matrix(0, 0);
    if (!rows[0].is_array()) throw ConfigError(std::string(what) + " rows must be arrays");
    const auto d = static_cast<Eigen::Index>(rows[0].size());
    Matrix m(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) {
            throw ConfigError(std::string(what) + " row " + std::to_string(i) + " has the wrong length");
        }
        for (Eigen::Index j = 0; j < d; ++j) {
            const auto& v = row[static_cast<std::size_t>(j)];
            if (!v.is_number()) throw ConfigError(std::string(what) + " entries must be numbers");
            m(i, j) = v.get<double>();
        }
    }
    return m;
}

json parse_json(const std::string& text, const std::filesystem::path& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source.string() + ": " + e.what());
    }
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    static std::atomic<unsigned> counter{0};
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw ConfigError("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw ConfigError("cannot move output into place at " + path.string());
    }
}

json graph_to_json(const Graph& g) {
    const Matrix& a = g.adjacency();
    json edges = json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
            if (a(i, j) > 0.0) edges.push_back(json::array({i, j, a(i, j)}));
        }
    }
    return json{{"n", g.size()}, {"edges", std::move(edges)}, {"features", matrix_rows(g.features())}};
}

Graph graph_from_json(const json& j) {
    if (!j.is_object() || !j.contains("n") || !j.contains("edges") || !j.contains("features")) {
        throw ConfigError("graph JSON needs fields n, edges and features");
    }
    if (!j["n"].is_number_integer() || j["n"].get<long long>() < 1) {
        throw ConfigError("graph field n must be a positive integer");
    }
    const auto n = static_cast<Eigen::Index>(j["n"].get<long long>());
    Matrix a = Matrix::Zero(n, n);
    if (!j["edges"].is_array()) throw ConfigError("graph field edges must be an array");
    for (const auto& e : j["edges"]) {
        if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() || !e[1].is_number_integer() ||
            !e[2].is_number()) {
            throw ConfigError("each edge must be [i, j, w]");
        }
        const auto u = e[0].get<long long>();
        const auto v = e[1].get<long long>();
        const double w = e[2].get<double>();
        if (u < 0 || v >= n || u >= v) {
            throw InvalidGraph("edge [" + std::to_string(u) + ", " + std::to_string(v) +
                               "] must satisfy 0 <= i < j < n");
        }
        if (!(w > 0.0) || !std::isfinite(w)) throw InvalidGraph("edge weights must be finite and positive");
        if (a(u, v) != 0.0) throw InvalidGraph("duplicate edge [" + std::to_string(u) + ", " + std::to_string(v) + "]");
        a(u, v) = w;
        a(v, u) = w;
    }
    Matrix x = matrix_from_rows(j["features"], "features");
    return Graph(std::move(a), std::move(x));
}

Graph read_graph_file(const std::filesystem::path& path) {
    try {
        return graph_from_json(parse_json(read_text(path), path));
    } catch (const InvalidGraph& e) {
        throw InvalidGraph(path.string() + ": " + e.what());
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        if (msg.rfind(path.string(), 0) == 0) throw;
        throw ConfigError(path.string() + ": " + msg);
    }
}

void write_graph_file(const std::filesystem::path& path, const Graph& g) {
    write_atomic(path, graph_to_json(g).dump() + "\n");
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
    const std::string text = read_text(path);
    const auto base = path.parent_path();
    std::vector<ManifestEntry> entries;
    std::istringstream lines(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (!j.is_object() || !j.contains("id") || !j.contains("view1") || !j.contains("view2") ||
            !j["id"].is_string() || !j["view1"].is_string() || !j["view2"].is_string()) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": manifest lines need string fields id, view1, view2");
        }
        auto resolve = [&](const std::string& p) {
            const std::filesystem::path fp(p);
            return (fp.is_absolute() ? fp : base / fp).string();
        };
        entries.push_back({j["id"].get<std::string>(), resolve(j["view1"]), resolve(j["view2"])});
    }
    return entries;
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries) {
    std::string out;
    for (const auto& e : entries) {
        out += json{{"id", e.id}, {"view1", e.view1}, {"view2", e.view2}}.dump();
        out += '\n';
    }
    write_atomic(path, out);
}

PairSet load_pairs(const std::filesystem::path& manifest) {
    PairSet set;
    for (const auto& e : read_manifest(manifest)) {
        set.ids.push_back(e.id);
        set.pairs.emplace_back(read_graph_file(e.view1), read_graph_file(e.view2));
    }
    return set;
}

Matrix read_embeddings(const std::filesystem::path& path) {
    const std::string text = read_text(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) throw ConfigError(path.string() + ": empty embedding file");
    if (text[first] == '{') {
        const json j = parse_json(text, path);
        if (!j.contains("embeddings")) throw ConfigError(path.string() + ": missing field embeddings");
        return matrix_from_rows(j["embeddings"], "embeddings");
    }
    std::vector<std::vector<double>> rows;
    std::istringstream lines(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": inconsistent column count");
        }
        rows.push_back(std::move(row));
    }
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t k = 0; k < rows[i].size(); ++k) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
        }
    }
    return m;
}

json model_to_json(const CorrelationModel& model) {
    json rho = json::array();
    for (Eigen::Index j = 0; j < model.rho.size(); ++j) rho.push_back(model.rho(j));
    return json{{"order", model.lift.order},
                {"fusion", model.lift.fusion},
                {"reg", model.reg},
                {"channels", model.channels()},
                {"rho", std::move(rho)},
                {"w1", matrix_rows(model.w1)},
                {"w2", matrix_rows(model.w2)},
                {"d1", model.d1},
                {"d2", model.d2}};
}

CorrelationModel model_from_json(const json& j) {
    for (const char* key : {"order", "fusion", "reg", "channels", "rho", "w1", "w2", "d1", "d2"}) {
        if (!j.contains(key)) throw ConfigError(std::string("model JSON is missing field ") + key);
    }
    CorrelationModel m;
    try {
        m.lift.order = j["order"].get<std::size_t>();
        m.lift.fusion = j["fusion"].get<bool>();
        m.reg = j["reg"].get<double>();
        m.d1 = j["d1"].get<std::size_t>();
        m.d2 = j["d2"].get<std::size_t>();
        const auto rho = j["rho"].get<std::vector<double>>();
        m.rho = Eigen::Map<const Vector>(rho.data(), static_cast<Eigen::Index>(rho.size()));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed model JSON: ") + e.what());
    }
    m.w1 = matrix_from_rows(j["w1"], "w1");
    m.w2 = matrix_from_rows(j["w2"], "w2");
    const auto r = static_cast<Eigen::Index>(j["channels"].get<std::size_t>());
    if (m.lift.order < 1 || m.rho.size() != r || m.w1.cols() != r || m.w2.cols() != r ||
        m.w1.rows() != static_cast<Eigen::Index>(m.lift.lifted_dim(m.d1)) ||
        m.w2.rows() != static_cast<Eigen::Index>(m.lift.lifted_dim(m.d2))) {
        throw ConfigError("model JSON has inconsistent shapes");
    }
    return m;
}

CorrelationModel load_model(const std::filesystem::path& path) {
    const json j = parse_json(read_text(path), path);
    return model_from_json(j);
}

void save_model(const std::filesystem::path& path, const CorrelationModel& model) {
    write_atomic(path, model_to_json(model).dump(2) + "\n");
}

json result_to_json(const std::string& query_id, const RetrievalResult& result,
                    const std::vector<std::string>& corpus_ids) {
    json ranked = json::array();
    for (const auto& item : result.ranked) {
        ranked.push_back(json::array({corpus_ids.at(item.corpus_index), item.distance}));
    }
    return json{{"query", query_id}, {"ranked", std::move(ranked)}, {"truth", corpus_ids.at(result.truth)}};
}

}  // namespace gwca
