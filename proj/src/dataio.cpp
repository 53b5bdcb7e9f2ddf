#include "topo/dataio.hpp"

#include "topo/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

namespace topo {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'T', 'P', 'C', '1'};
constexpr std::uint16_t kVersion = 1;
constexpr std::size_t kHeader = 4 + 2 + 4 + 4;
constexpr const char* kSchema = "topo-disentangle/1";

template <typename T>
void put_le(std::string& out, T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

template <typename T>
T get_le(const std::string& in, std::size_t at) {
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<unsigned char>(in[at + i])) << (8 * i);
    return v;
}

std::string read_all(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path.string(), 0, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

// Finite doubles only; JSON has no inf/nan.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& bytes) {
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    fs::create_directories(dir);
    const fs::path tmp = dir / (path.filename().string() + ".tmp" + std::to_string(std::random_device{}()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError(tmp.string(), 0, "cannot create file");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            out.close();
            fs::remove(tmp);
            throw FormatError(tmp.string(), 0, "write failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw FormatError(path.string(), 0, "rename failed: " + ec.message());
    }
}

void write_cloud(const PointCloud& cloud, const fs::path& path) {
    const auto& p = cloud.points();
    std::string out;
    out.reserve(kHeader + static_cast<std::size_t>(p.size()) * 4);
    out.append(kMagic, 4);
    put_le<std::uint16_t>(out, kVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(p.rows()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(p.cols()));
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        const auto f = static_cast<float>(p.data()[i]);
        if (!std::isfinite(f)) throw ParameterError("coordinate does not fit in float32: " + std::to_string(p.data()[i]));
        put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(f));
    }
    write_file_atomic(path, out);
}

PointCloud read_cloud(const fs::path& path) {
    const std::string file = path.string();
    const std::string in = read_all(path);
    if (in.size() < kHeader) throw FormatError(file, in.size(), "truncated header");
    if (std::memcmp(in.data(), kMagic, 4) != 0) throw FormatError(file, 0, "bad magic");
    const auto version = get_le<std::uint16_t>(in, 4);
    if (version != kVersion) throw FormatError(file, 4, "unsupported version " + std::to_string(version));
    const auto rows = get_le<std::uint32_t>(in, 6);
    const auto cols = get_le<std::uint32_t>(in, 10);
    if (rows < 2 || cols < 1) throw FormatError(file, 6, "need at least 2 rows and 1 column");
    const std::uint64_t expected = kHeader + std::uint64_t{rows} * cols * 4;
    if (in.size() != expected) {
        throw FormatError(file, std::min<std::uint64_t>(in.size(), expected),
                          "payload has " + std::to_string(in.size() - kHeader) + " bytes, expected " +
                              std::to_string(expected - kHeader));
    }
    RowMatrix m(rows, cols);
    for (std::size_t i = 0; i < std::size_t{rows} * cols; ++i) {
        const std::size_t at = kHeader + 4 * i;
        const float f = std::bit_cast<float>(get_le<std::uint32_t>(in, at));
        if (!std::isfinite(f)) throw FormatError(file, at, "non-finite value");
        m.data()[i] = f;
    }
    return PointCloud(std::move(m));
}

PointCloud import_csv(const fs::path& path) {
    const std::string file = path.string();
    std::ifstream in(path);
    if (!in) throw FormatError(file, 0, "cannot open file");
    std::vector<double> values;
    std::size_t cols = 0, rows = 0, offset = 0;
    bool first = true;
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t line_offset = offset;
        offset += line.size() + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        std::vector<double> row;
        std::string tok;
        bool numeric = true;
        while (ss >> tok) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(tok, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tok.size()) {
                numeric = false;
                break;
            }
            if (!std::isfinite(v)) throw FormatError(file, line_offset, "non-finite value '" + tok + "'");
            row.push_back(v);
        }
        if (!numeric) {
            if (first) {
                first = false;
                continue;
            }
            throw FormatError(file, line_offset, "non-numeric field on line " + std::to_string(rows + 1));
        }
        first = false;
        if (cols == 0) cols = row.size();
        if (row.size() != cols) {
            throw FormatError(file, line_offset,
                              "row has " + std::to_string(row.size()) + " fields, expected " + std::to_string(cols));
        }
        values.insert(values.end(), row.begin(), row.end());
        ++rows;
    }
    if (rows < 2 || cols == 0) throw FormatError(file, offset, "need at least 2 numeric rows");
    RowMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    std::copy(values.begin(), values.end(), m.data());
    return PointCloud(std::move(m));
}

void write_dataset(const ConditionedDataset& dataset, const fs::path& manifest) {
    dataset.validate();
    const fs::path dir = manifest.has_parent_path() ? manifest.parent_path() : fs::path(".");
    json axes = json::array();
    for (const auto& axis : dataset.axes) {
        json values = json::array();
        for (std::size_t k = 0; k < axis.values.size(); ++k) {
            const fs::path rel = fs::path("clouds") / ("axis" + std::to_string(axis.id) + "_value" + std::to_string(k) + ".tpc");
            write_cloud(axis.values[k], dir / rel);
            values.push_back({{"id", k}, {"cloud_path", rel.generic_string()}});
        }
        axes.push_back({{"id", axis.id}, {"name", axis.name}, {"values", std::move(values)}});
    }
    const json doc = {{"schema", kSchema},
                      {"provenance", dataset.provenance},
                      {"axes", std::move(axes)},
                      {"embedding", {{"kind", dataset.embedding_kind}, {"dim", dataset.dim()}}}};
    write_file_atomic(manifest, doc.dump(2) + "\n");
}

ConditionedDataset read_dataset(const fs::path& manifest) {
    const std::string file = manifest.string();
    const std::string text = read_all(manifest);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(file, e.byte, e.what());
    }
    auto fail = [&](const std::string& what) -> FormatError { return FormatError(file, 0, what); };
    auto field = [&](const json& obj, const char* key, json::value_t type, const std::string& where) -> const json& {
        if (!obj.is_object() || !obj.contains(key)) throw fail(where + ": missing '" + key + "'");
        const json& v = obj.at(key);
        const bool ok = type == json::value_t::number_unsigned ? v.is_number_unsigned() : v.type() == type;
        if (!ok) throw fail(where + ": '" + key + "' has the wrong type");
        return v;
    };
    using vt = json::value_t;
    if (field(doc, "schema", vt::string, "manifest").get<std::string>() != kSchema) {
        throw fail("unsupported schema '" + doc["schema"].get<std::string>() + "'");
    }
    ConditionedDataset ds;
    ds.provenance = field(doc, "provenance", vt::string, "manifest").get<std::string>();
    const json& emb = field(doc, "embedding", vt::object, "manifest");
    ds.embedding_kind = field(emb, "kind", vt::string, "embedding").get<std::string>();
    const auto dim = field(emb, "dim", vt::number_unsigned, "embedding").get<std::size_t>();

    // Validate the whole document before loading any cloud.
    const fs::path dir = manifest.has_parent_path() ? manifest.parent_path() : fs::path(".");
    std::vector<std::vector<fs::path>> paths;
    for (const json& a : field(doc, "axes", vt::array, "manifest")) {
        const std::string where = "axis " + std::to_string(ds.axes.size());
        ConditionedAxis axis;
        axis.id = field(a, "id", vt::number_unsigned, where).get<std::size_t>();
        axis.name = field(a, "name", vt::string, where).get<std::string>();
        const json& vals = field(a, "values", vt::array, where);
        std::vector<fs::path> vp(vals.size());
        std::vector<bool> seen(vals.size(), false);
        for (const json& v : vals) {
            const auto id = field(v, "id", vt::number_unsigned, where + " value").get<std::size_t>();
            if (id >= vals.size() || seen[id]) throw fail(where + ": value ids must be dense from 0");
            seen[id] = true;
            const fs::path rel = field(v, "cloud_path", vt::string, where + " value").get<std::string>();
            vp[id] = rel.is_absolute() ? rel : dir / rel;
        }
        paths.push_back(std::move(vp));
        ds.axes.push_back(std::move(axis));
    }
    if (ds.axes.empty()) throw fail("manifest has no axes");
    std::vector<bool> seen(ds.axes.size(), false);
    for (const auto& axis : ds.axes) {
        if (axis.id >= ds.axes.size() || seen[axis.id]) throw fail("axis ids must be dense from 0");
        seen[axis.id] = true;
    }
    if (ds.provenance != "generated" && ds.provenance != "real") throw fail("unknown provenance '" + ds.provenance + "'");

    for (std::size_t a = 0; a < ds.axes.size(); ++a) {
        for (const auto& p : paths[a]) {
            PointCloud cloud = read_cloud(p);
            if (cloud.dim() != dim) {
                throw FormatError(p.string(), 10, "cloud has " + std::to_string(cloud.dim()) + " columns, manifest says " +
                                                      std::to_string(dim));
            }
            ds.axes[a].values.push_back(std::move(cloud));
        }
    }
    try {
        ds.validate();
    } catch (const Error& e) {
        throw fail(e.what());
    }
    return ds;
}

std::string report_json(const ScoreReport& r, const ScoreConfig& config) {
    json warnings = json::array();
    for (const auto& w : r.warnings) warnings.push_back(w);
    json variance = json::array();
    for (double v : r.variance) variance.push_back(number(v));
    const json doc = {
        {"mu", number(r.mu)},
        {"mu_sup", r.mu_sup ? number(*r.mu_sup) : json(nullptr)},
        {"c", r.c},
        {"rho_in", number(r.rho_in)},
        {"rho_out", number(r.rho_out)},
        {"m_prime", to_json(r.m_prime)},
        {"assignments", {{"rows", r.assignments.row_labels}, {"cols", r.assignments.col_labels}}},
        {"warnings", std::move(warnings)},
        {"similarity",
         {{"distances", to_json(r.m.distances)},
          {"similarities", to_json(r.m.similarities)},
          {"row_axes", r.m.row_axes},
          {"col_axes", r.m.col_axes},
          {"sigma", number(r.m.sigma)},
          {"degenerate", r.m.degenerate}}},
        {"config",
         {{"gamma", config.rlt.gamma},
          {"l0", config.rlt.l0},
          {"n", config.rlt.n},
          {"i_max", config.rlt.i_max},
          {"epsilon", config.ot.epsilon},
          {"tau", number(config.ot.tau)},
          {"max_iter", config.ot.max_iter},
          {"barycenter_max_iter", config.ot.barycenter_max_iter},
          {"tol", config.ot.tol},
          {"sigma_mode", config.similarity.mode == SigmaMode::fixed ? "fixed" : "median"},
          {"sigma", config.similarity.sigma},
          {"c_max", config.c_max},
          {"seed", config.seed}}},
        {"diagnostics",
         {{"variance", std::move(variance)},
          {"ot_iterations", r.m.ot_iterations},
          {"ot_last_delta", number(r.m.ot_last_delta)}}},
    };
    return doc.dump(2) + "\n";
}

std::string matrix_csv(const Matrix& m) {
    std::string out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out += ',';
            out += json(m(i, j)).dump();
        }
        out += '\n';
    }
    return out;
}

std::string heatmap_pgm(const Matrix& s, std::size_t cell) {
    if (cell == 0) throw ParameterError("heatmap cell size must be positive");
    const std::size_t w = static_cast<std::size_t>(s.cols()) * cell, h = static_cast<std::size_t>(s.rows()) * cell;
    std::string out = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const double v = std::clamp(s(static_cast<Eigen::Index>(y / cell), static_cast<Eigen::Index>(x / cell)), 0.0, 1.0);
            out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * (1.0 - v)))));
        }
    }
    return out;
}

}  // namespace topo
