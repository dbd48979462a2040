#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "netcpd/graph.hpp"

namespace netcpd {

enum class IntervalKind { deterministic_grid, random_wbs };

/// Scan intervals, each an (start, end] layer range.
struct IntervalSet {
    std::vector<LayerRange> intervals;
    /// Nominal window length; 0 for random sets.
    std::size_t window = 0;
    IntervalKind kind = IntervalKind::deterministic_grid;
};

/// Grid with starts (l - 1) * floor(window / 3) for l = 1 .. ceil(3T / window) - 2
/// and ends min(start + window, T). Requires 3 <= window <= T.
IntervalSet build_grid(std::size_t T, std::size_t window);

/// M intervals [s, e] with s, e drawn independently and uniformly from
/// {1, .., T}, redrawing the pair until e > s.
IntervalSet draw_wbs_intervals(std::size_t T, std::size_t M, std::uint64_t seed);

enum class Algorithm { window, wbs };
std::string_view to_string(Algorithm algorithm);
std::optional<Algorithm> parse_algorithm(std::string_view name);

/// Which layers the trimming degrees are averaged over.
enum class DegreeScope { interval, global };

struct DetectorConfig {
    /// Cushion: largest window for the window scan, minimum interval length for WBS.
    std::size_t kappa = 0;
    /// Window lengths for the window scan; empty means kappa, kappa - 1, .., 3.
    std::vector<std::size_t> lambda_range;
    double mu = 1.0;
    double zeta = 1.0;
    /// Threshold multiplier; has no default and must be calibrated.
    double theta_mu = std::numeric_limits<double>::quiet_NaN();
    /// Number of random WBS intervals.
    std::size_t M = 200;
    std::uint64_t seed = 0;
    double spectral_tol = 1e-8;
    DegreeScope degree_scope = DegreeScope::interval;
    /// Merge radius for the window scan; defaults to floor(max window / 3).
    std::optional<std::size_t> merge_proximity;
    /// Threads used inside one detector call; 0 means all hardware threads.
    unsigned workers = 1;

    /// Windows of the sweep in descending order.
    std::vector<std::size_t> windows() const;

    /// Throws InvalidArgument on any violated constraint. When require_theta
    /// is false theta_mu may be unset (used for calibration).
    void validate(Algorithm algorithm, std::size_t T, bool require_theta = true) const;
};

struct Detection {
    /// Estimated change point: last layer of the old regime (1-based).
    std::size_t tau_hat = 0;
    std::size_t window = 0;
    LayerRange interval;
    double stat = 0.0;
    double threshold = 0.0;
};

struct DetectionReport {
    Algorithm algorithm = Algorithm::window;
    std::vector<Detection> detections;
    std::size_t estimated_K = 0;
    DetectorConfig config;

    std::vector<std::size_t> change_points() const;
};

/// Groups detections whose tau_hat values chain within `proximity` of each
/// other and keeps one per group: smallest window, then largest
/// stat / threshold, then smallest tau_hat. Output sorted by tau_hat.
std::vector<Detection> merge_detections(std::vector<Detection> raw, std::size_t proximity);

/// Window-based scan over every grid interval of every window length.
DetectionReport detect_window(const AdjacencySequence& seq, const DetectorConfig& cfg);

/// Wild binary segmentation over M intervals drawn from cfg.seed.
DetectionReport detect_wbs(const AdjacencySequence& seq, const DetectorConfig& cfg);

/// Wild binary segmentation over a caller-supplied interval family.
DetectionReport detect_wbs(const AdjacencySequence& seq, const DetectorConfig& cfg, const IntervalSet& intervals);

DetectionReport detect(const AdjacencySequence& seq, const DetectorConfig& cfg, Algorithm algorithm);

/// The detector reports at least one change point exactly when
/// cfg.theta_mu < critical_theta(seq, cfg, algorithm). This is the largest
/// stat / (threshold at theta_mu = 1) over all intervals the top level of
/// the procedure examines; 0 when every statistic is 0.
double critical_theta(const AdjacencySequence& seq, const DetectorConfig& cfg, Algorithm algorithm);

}  // namespace netcpd
