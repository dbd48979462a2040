#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "netcpd/detectors.hpp"
#include "netcpd/graph.hpp"
#include "netcpd/model.hpp"

namespace netcpd {

/// Builds a model from a per-replicate seed (the seed may be ignored).
using ModelFactory = std::function<ProbabilitySequence(std::uint64_t seed)>;

/// Runs a detector on one sample. The seed is the detector's own randomness.
using DetectorFn = std::function<DetectionReport(const AdjacencySequence& seq, std::uint64_t seed)>;

/// Plugs a configured library detector into DetectorFn; cfg.seed is replaced
/// per call and cfg.workers is forced to 1.
DetectorFn make_detector(Algorithm algorithm, DetectorConfig cfg);

struct RiskEstimate {
    double type_i = 0.0;
    double type_ii = 0.0;
    double pi_hat = 0.0;
    std::size_t replicates = 0;
    double ci_half_width = 0.0;
};

struct LocalizationResult {
    bool matched = false;
    /// Empty when the counts differ.
    std::optional<std::size_t> max_abs_error;
    std::vector<std::size_t> per_point_errors;
};

LocalizationResult localization_error(const std::vector<std::size_t>& estimated,
                                      const std::vector<std::size_t>& truth, std::size_t tolerance);
LocalizationResult localization_error(const DetectionReport& report, const ProbabilitySequence& truth,
                                      std::size_t tolerance);

struct HarnessOptions {
    std::size_t replicates = 200;
    std::uint64_t seed = 0;
    /// 0 means all hardware threads.
    unsigned workers = 1;
};

/// Seeds used for replicate `replicate` of arm `arm` (0 null, 1 alternative).
struct ReplicateSeeds {
    std::uint64_t model = 0;
    std::uint64_t sample = 0;
    std::uint64_t detector = 0;
};
ReplicateSeeds replicate_seeds(std::uint64_t base, std::size_t replicate, std::size_t arm);

/// Per-replicate outcome of a risk run.
struct RiskRun {
    RiskEstimate risk;
    std::vector<std::size_t> null_counts;
    std::vector<DetectionReport> alt_reports;
    std::vector<std::vector<std::size_t>> alt_truth;

    /// Fraction of alternative runs whose estimate matches the truth within tolerance.
    double localized_rate(std::size_t tolerance) const;
};

RiskEstimate risk_from_counts(std::size_t false_alarms, std::size_t misses, std::size_t replicates);

RiskRun run_risk(const ModelFactory& null_gen, const ModelFactory& alt_gen, const DetectorFn& detector,
                 const HarnessOptions& opts);

RiskEstimate estimate_risk(const ModelFactory& null_gen, const ModelFactory& alt_gen, const DetectorFn& detector,
                           const HarnessOptions& opts);
RiskEstimate estimate_risk(const ModelFactory& null_gen, const ModelFactory& alt_gen, Algorithm algorithm,
                           const DetectorConfig& cfg, const HarnessOptions& opts);

/// Geometric grid of candidate theta_mu values.
struct ThetaGrid {
    double min = 1e-3;
    double max = 1e3;
    std::size_t points = 241;

    double at(std::size_t index) const;
};

struct CalibrationResult {
    double theta_mu = 0.0;
    double type_i = 0.0;
    std::size_t grid_index = 0;
    /// Per-replicate critical values: replicate r raises an alarm iff theta_mu < critical[r].
    std::vector<double> critical;
};

/// Fraction of critical values strictly above theta.
double type_i_at(const std::vector<double>& critical, double theta);

/// Per-replicate critical theta values on samples of the null model.
std::vector<double> null_critical_values(const ModelFactory& null_gen, Algorithm algorithm, const DetectorConfig& cfg,
                                         const HarnessOptions& opts);

/// Smallest grid theta_mu whose empirical type-I error on the null model is
/// at most target_type_i. Throws CalibrationError when even the grid maximum
/// is not enough.
CalibrationResult calibrate_theta(const ModelFactory& null_gen, Algorithm algorithm, const DetectorConfig& cfg,
                                  double target_type_i, const HarnessOptions& opts, const ThetaGrid& grid = {});

struct SweepGrid {
    std::vector<double> alphas;
    std::vector<double> rhos;
    std::vector<std::size_t> kappas;
    std::size_t n = 0;
    std::size_t T = 0;
};

struct SweepRow {
    double alpha = 0.0;
    double rho = 0.0;
    std::size_t kappa = 0;
    std::size_t cushion = 0;
    double signal = 0.0;
    double sparsity = 0.0;
    /// signal / sqrt(sparsity / cushion).
    double boundary_ratio = 0.0;
    RiskEstimate risk;
    double localized_rate = 0.0;
    double seconds = 0.0;
};

/// One risk estimate per (rho, kappa, alpha) cell, alpha ascending within
/// each (rho, kappa) block. The null is Erdos-Renyi(rho); the alternative is
/// hard_instance_detect with the cell's parameters. The detector runs with
/// kappa set to the cell's kappa. Every cell reuses the same replicate seeds.
std::vector<SweepRow> phase_sweep(const SweepGrid& grid, Algorithm algorithm, const DetectorConfig& cfg,
                                  const HarnessOptions& opts);

}  // namespace netcpd
