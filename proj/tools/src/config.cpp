#include "netcpd_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>

#include "netcpd/errors.hpp"

namespace netcpd::cli {
namespace {

using nlohmann::json;

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

void check_object(const json& node, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!node.is_object()) {
        throw ConfigError("'" + (path.empty() ? std::string("<root>") : path) + "' must be an object");
    }
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& item : node.items()) {
        if (!keys.contains(item.key())) {
            throw ConfigError("unknown key '" + join(path, item.key()) + "'");
        }
    }
}

std::size_t get_size(const json& node, const std::string& path) {
    if (!node.is_number_unsigned() && !(node.is_number_integer() && node.get<std::int64_t>() >= 0)) {
        throw ConfigError("'" + path + "' must be a non-negative integer");
    }
    return node.get<std::size_t>();
}

std::uint64_t get_u64(const json& node, const std::string& path) {
    if (!node.is_number_unsigned() && !(node.is_number_integer() && node.get<std::int64_t>() >= 0)) {
        throw ConfigError("'" + path + "' must be a non-negative integer");
    }
    return node.get<std::uint64_t>();
}

double get_double(const json& node, const std::string& path) {
    if (!node.is_number()) {
        throw ConfigError("'" + path + "' must be a number");
    }
    const double value = node.get<double>();
    if (!std::isfinite(value)) {
        throw ConfigError("'" + path + "' must be finite");
    }
    return value;
}

std::string get_string(const json& node, const std::string& path) {
    if (!node.is_string()) {
        throw ConfigError("'" + path + "' must be a string");
    }
    return node.get<std::string>();
}

template <class T, class Fn>
std::vector<T> get_array(const json& node, const std::string& path, Fn&& element) {
    if (!node.is_array()) {
        throw ConfigError("'" + path + "' must be an array");
    }
    std::vector<T> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
        out.push_back(element(node[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::vector<std::vector<double>> get_matrix(const json& node, const std::string& path) {
    return get_array<std::vector<double>>(node, path, [](const json& row, const std::string& p) {
        return get_array<double>(row, p, get_double);
    });
}

void require(bool condition, const std::string& path, const std::string& message) {
    if (!condition) {
        throw ConfigError("'" + path + "' " + message);
    }
}

SegmentSpec parse_segment(const json& node, const std::string& path) {
    check_object(node, path, {"end", "p", "blocks", "matrix"});
    SegmentSpec seg;
    require(node.contains("end"), path + ".end", "is required");
    seg.end = get_size(node["end"], path + ".end");
    int kinds = 0;
    if (node.contains("p")) {
        seg.p = get_double(node["p"], path + ".p");
        require(*seg.p >= 0.0 && *seg.p <= 1.0, path + ".p", "must lie in [0, 1]");
        ++kinds;
    }
    if (node.contains("blocks")) {
        const json& blocks = node["blocks"];
        const std::string bp = path + ".blocks";
        check_object(blocks, bp, {"sizes", "probs"});
        require(blocks.contains("sizes") && blocks.contains("probs"), bp, "needs 'sizes' and 'probs'");
        seg.block_sizes = get_array<std::size_t>(blocks["sizes"], bp + ".sizes", get_size);
        seg.block_probs = get_matrix(blocks["probs"], bp + ".probs");
        ++kinds;
    }
    if (node.contains("matrix")) {
        seg.matrix = get_matrix(node["matrix"], path + ".matrix");
        ++kinds;
    }
    require(kinds == 1, path, "needs exactly one of 'p', 'blocks' or 'matrix'");
    return seg;
}

ModelSpec parse_model(const json& node, const std::string& path) {
    check_object(node, path, {"kind", "n", "T", "segments", "kappa", "rho", "alpha", "rank", "side"});
    ModelSpec spec;
    require(node.contains("kind"), path + ".kind", "is required");
    const std::string kind = get_string(node["kind"], path + ".kind");
    if (kind == "piecewise") {
        spec.kind = ModelKind::piecewise;
    } else if (kind == "hard_detect") {
        spec.kind = ModelKind::hard_detect;
    } else if (kind == "hard_localize") {
        spec.kind = ModelKind::hard_localize;
    } else {
        throw ConfigError("'" + path + ".kind' must be piecewise, hard_detect or hard_localize; got '" + kind + "'");
    }
    require(node.contains("n"), path + ".n", "is required");
    require(node.contains("T"), path + ".T", "is required");
    spec.n = get_size(node["n"], path + ".n");
    spec.T = get_size(node["T"], path + ".T");
    require(spec.n >= 2, path + ".n", "must be at least 2");
    require(spec.T >= 1, path + ".T", "must be at least 1");

    auto forbid = [&](std::initializer_list<const char*> keys) {
        for (const char* key : keys) {
            require(!node.contains(key), join(path, key), "does not apply to model kind '" + kind + "'");
        }
    };
    if (spec.kind == ModelKind::piecewise) {
        forbid({"kappa", "rho", "alpha", "rank", "side"});
        require(node.contains("segments"), path + ".segments", "is required");
        spec.segments = get_array<SegmentSpec>(node["segments"], path + ".segments", parse_segment);
        require(!spec.segments.empty(), path + ".segments", "must not be empty");
        require(spec.segments.back().end == spec.T, path + ".segments", "must end at T");
        return spec;
    }
    forbid({"segments"});
    if (spec.kind == ModelKind::hard_detect) {
        forbid({"rank", "side"});
    }
    for (const char* key : {"kappa", "rho", "alpha"}) {
        require(node.contains(key), join(path, key), "is required");
    }
    spec.kappa = get_size(node["kappa"], path + ".kappa");
    spec.rho = get_double(node["rho"], path + ".rho");
    spec.alpha = get_double(node["alpha"], path + ".alpha");
    require(spec.kappa >= 1 && spec.kappa < spec.T, path + ".kappa", "must lie in [1, T)");
    require(spec.rho > 0.0 && spec.rho < 1.0, path + ".rho", "must lie in (0, 1)");
    require(spec.alpha >= 0.0, path + ".alpha", "must be >= 0");
    require(spec.rho * (1.0 + spec.alpha) <= 1.0, path + ".alpha", "makes rho * (1 + alpha) exceed 1");
    if (spec.kind == ModelKind::hard_localize) {
        if (node.contains("rank")) {
            spec.rank = get_size(node["rank"], path + ".rank");
        }
        require(spec.rank >= 1 && spec.rank <= spec.n, path + ".rank", "must lie in [1, n]");
        if (node.contains("side")) {
            const std::string side = get_string(node["side"], path + ".side");
            if (side == "early") {
                spec.side = ChangeSide::early;
            } else if (side == "late") {
                spec.side = ChangeSide::late;
            } else {
                throw ConfigError("'" + path + ".side' must be early or late");
            }
        }
    }
    return spec;
}

ThetaGrid parse_theta_grid(const json& node, const std::string& path) {
    check_object(node, path, {"min", "max", "points"});
    ThetaGrid grid;
    if (node.contains("min")) {
        grid.min = get_double(node["min"], path + ".min");
    }
    if (node.contains("max")) {
        grid.max = get_double(node["max"], path + ".max");
    }
    if (node.contains("points")) {
        grid.points = get_size(node["points"], path + ".points");
    }
    require(grid.min > 0.0 && grid.max > grid.min, path, "needs 0 < min < max");
    require(grid.points >= 2, path + ".points", "must be at least 2");
    return grid;
}

HarnessSpec parse_harness(const json& node, const std::string& path) {
    check_object(node, path, {"replicates", "target_type_i", "theta_grid", "null"});
    HarnessSpec spec;
    if (node.contains("replicates")) {
        spec.replicates = get_size(node["replicates"], path + ".replicates");
        require(spec.replicates >= 1, path + ".replicates", "must be at least 1");
    }
    if (node.contains("target_type_i")) {
        spec.target_type_i = get_double(node["target_type_i"], path + ".target_type_i");
        require(spec.target_type_i > 0.0 && spec.target_type_i < 1.0, path + ".target_type_i",
                "must lie in (0, 1)");
    }
    if (node.contains("theta_grid")) {
        spec.theta_grid = parse_theta_grid(node["theta_grid"], path + ".theta_grid");
    }
    if (node.contains("null")) {
        spec.null_model = parse_model(node["null"], path + ".null");
    }
    return spec;
}

void parse_detector(const json& node, const std::string& path, RunConfig& cfg) {
    check_object(node, path,
                 {"algorithm", "kappa", "lambda_range", "mu", "zeta", "theta_mu", "M", "spectral_tol", "degree_scope",
                  "merge_proximity"});
    DetectorConfig& d = cfg.detector;
    if (node.contains("algorithm")) {
        const std::string name = get_string(node["algorithm"], path + ".algorithm");
        cfg.algorithm = parse_algorithm(name);
        require(cfg.algorithm.has_value(), path + ".algorithm", "must be window or wbs");
    }
    if (node.contains("kappa")) {
        d.kappa = get_size(node["kappa"], path + ".kappa");
        require(d.kappa >= 2, path + ".kappa", "must be at least 2");
    }
    if (node.contains("lambda_range")) {
        d.lambda_range = get_array<std::size_t>(node["lambda_range"], path + ".lambda_range", get_size);
        for (std::size_t w : d.lambda_range) {
            require(w >= 3 && w <= d.kappa, path + ".lambda_range", "entries must lie in [3, kappa]");
        }
    }
    if (node.contains("mu")) {
        d.mu = get_double(node["mu"], path + ".mu");
        require(d.mu > 0.0, path + ".mu", "must be positive");
    }
    if (node.contains("zeta")) {
        d.zeta = get_double(node["zeta"], path + ".zeta");
        require(d.zeta >= 0.0, path + ".zeta", "must be >= 0");
    }
    if (node.contains("theta_mu")) {
        d.theta_mu = get_double(node["theta_mu"], path + ".theta_mu");
        require(d.theta_mu >= 0.0, path + ".theta_mu", "must be >= 0");
    }
    if (node.contains("M")) {
        d.M = get_size(node["M"], path + ".M");
        require(d.M >= 1, path + ".M", "must be at least 1");
    }
    if (node.contains("spectral_tol")) {
        d.spectral_tol = get_double(node["spectral_tol"], path + ".spectral_tol");
        require(d.spectral_tol > 0.0, path + ".spectral_tol", "must be positive");
    }
    if (node.contains("degree_scope")) {
        const std::string scope = get_string(node["degree_scope"], path + ".degree_scope");
        if (scope == "interval") {
            d.degree_scope = DegreeScope::interval;
        } else if (scope == "global") {
            d.degree_scope = DegreeScope::global;
        } else {
            throw ConfigError("'" + path + ".degree_scope' must be interval or global");
        }
    }
    if (node.contains("merge_proximity")) {
        d.merge_proximity = get_size(node["merge_proximity"], path + ".merge_proximity");
    }
}

SweepGrid parse_sweep(const json& node, const std::string& path) {
    check_object(node, path, {"alphas", "rhos", "kappas", "n", "T"});
    SweepGrid grid;
    for (const char* key : {"alphas", "rhos", "kappas", "n", "T"}) {
        require(node.contains(key), join(path, key), "is required");
    }
    grid.alphas = get_array<double>(node["alphas"], path + ".alphas", get_double);
    grid.rhos = get_array<double>(node["rhos"], path + ".rhos", get_double);
    grid.kappas = get_array<std::size_t>(node["kappas"], path + ".kappas", get_size);
    grid.n = get_size(node["n"], path + ".n");
    grid.T = get_size(node["T"], path + ".T");
    require(!grid.alphas.empty() && !grid.rhos.empty() && !grid.kappas.empty(), path,
            "needs non-empty alphas, rhos and kappas");
    require(grid.n >= 3, path + ".n", "must be at least 3");
    for (double a : grid.alphas) {
        require(a >= 0.0, path + ".alphas", "entries must be >= 0");
    }
    for (double r : grid.rhos) {
        require(r > 0.0 && r < 1.0, path + ".rhos", "entries must lie in (0, 1)");
        for (double a : grid.alphas) {
            require(r * (1.0 + a) <= 1.0, path + ".alphas", "makes rho * (1 + alpha) exceed 1");
        }
    }
    for (std::size_t k : grid.kappas) {
        require(k >= 3 && k < grid.T, path + ".kappas", "entries must lie in [3, T)");
    }
    return grid;
}

}  // namespace

ProbabilitySequence ModelSpec::build(std::uint64_t seed) const {
    try {
        switch (kind) {
            case ModelKind::hard_detect:
                return hard_instance_detect(n, T, kappa, rho, alpha, seed);
            case ModelKind::hard_localize:
                return hard_instance_localize(n, T, kappa, rho, alpha, rank, side, seed);
            case ModelKind::piecewise:
                break;
        }
        std::vector<Segment> built;
        for (const SegmentSpec& s : segments) {
            if (s.p) {
                built.push_back({ProbabilityMatrix::erdos_renyi(n, *s.p), s.end});
            } else if (s.block_sizes) {
                ProbabilityMatrix m = ProbabilityMatrix::block_model(*s.block_sizes, *s.block_probs);
                if (m.node_count() != n) {
                    throw ConfigError("block sizes of the segment ending at " + std::to_string(s.end) +
                                      " do not sum to n");
                }
                built.push_back({std::move(m), s.end});
            } else {
                const auto& rows = *s.matrix;
                Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
                for (std::size_t i = 0; i < rows.size(); ++i) {
                    if (rows[i].size() != rows.size()) {
                        throw ConfigError("segment matrix ending at " + std::to_string(s.end) + " is not square");
                    }
                    for (std::size_t j = 0; j < rows.size(); ++j) {
                        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
                    }
                }
                if (rows.size() != n) {
                    throw ConfigError("segment matrix ending at " + std::to_string(s.end) + " is not n x n");
                }
                built.push_back({ProbabilityMatrix(std::move(m)), s.end});
            }
        }
        return ProbabilitySequence(std::move(built));
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
}

std::uint64_t RunConfig::require_seed(const std::string& command) const {
    if (!seed) {
        throw ConfigError("'seed' is required by " + command);
    }
    return *seed;
}

const ModelSpec& RunConfig::require_model(const std::string& command) const {
    if (!model) {
        throw ConfigError("'model' is required by " + command);
    }
    return *model;
}

RunConfig parse_run_config(const json& doc) {
    check_object(doc, "", {"seed", "model", "detector", "harness", "sweep", "output"});
    RunConfig cfg;
    if (doc.contains("seed")) {
        cfg.seed = get_u64(doc["seed"], "seed");
    }
    if (doc.contains("model")) {
        cfg.model = parse_model(doc["model"], "model");
    }
    if (doc.contains("detector")) {
        parse_detector(doc["detector"], "detector", cfg);
    }
    if (doc.contains("harness")) {
        cfg.harness = parse_harness(doc["harness"], "harness");
    }
    if (doc.contains("sweep")) {
        cfg.sweep = parse_sweep(doc["sweep"], "sweep");
    }
    if (doc.contains("output")) {
        cfg.output = get_string(doc["output"], "output");
    }
    return cfg;
}

json load_config_files(const std::vector<std::string>& paths) {
    json merged = json::object();
    for (const std::string& path : paths) {
        std::ifstream in(path);
        if (!in) {
            throw ConfigError("cannot open config " + path);
        }
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError("config " + path + " is not valid JSON: " + e.what());
        }
        if (!doc.is_object()) {
            throw ConfigError("config " + path + " must be a JSON object");
        }
        merged.merge_patch(doc);
    }
    return merged;
}

}  // namespace netcpd::cli
