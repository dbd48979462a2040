#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "netcpd/detectors.hpp"
#include "netcpd/harness.hpp"
#include "netcpd/model.hpp"

namespace netcpd::cli {

/// Bad or inconsistent configuration; maps to exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ModelKind { piecewise, hard_detect, hard_localize };

struct SegmentSpec {
    std::size_t end = 0;
    /// Exactly one of these describes the segment's matrix.
    std::optional<double> p;
    std::optional<std::vector<std::size_t>> block_sizes;
    std::optional<std::vector<std::vector<double>>> block_probs;
    std::optional<std::vector<std::vector<double>>> matrix;
};

struct ModelSpec {
    ModelKind kind = ModelKind::piecewise;
    std::size_t n = 0;
    std::size_t T = 0;
    std::vector<SegmentSpec> segments;
    std::size_t kappa = 0;
    double rho = 0.0;
    double alpha = 0.0;
    std::size_t rank = 1;
    ChangeSide side = ChangeSide::early;

    /// The seed only matters for the hard instances (random sign vectors).
    ProbabilitySequence build(std::uint64_t seed) const;
};

struct HarnessSpec {
    std::size_t replicates = 200;
    double target_type_i = 0.05;
    ThetaGrid theta_grid;
    /// Null model for calibration; defaults to the top-level model.
    std::optional<ModelSpec> null_model;
};

struct RunConfig {
    std::optional<std::uint64_t> seed;
    std::optional<ModelSpec> model;
    DetectorConfig detector;
    std::optional<Algorithm> algorithm;
    HarnessSpec harness;
    std::optional<SweepGrid> sweep;
    std::optional<std::string> output;

    std::uint64_t require_seed(const std::string& command) const;
    const ModelSpec& require_model(const std::string& command) const;
};

/// Parses a merged JSON document. Unknown keys and out-of-range values
/// raise ConfigError naming the offending key.
RunConfig parse_run_config(const nlohmann::json& doc);

/// Reads each file and merges them left to right with JSON merge-patch.
nlohmann::json load_config_files(const std::vector<std::string>& paths);

}  // namespace netcpd::cli
