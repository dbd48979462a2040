#include "netcpd/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "netcpd/cusum.hpp"
#include "netcpd/degrees.hpp"
#include "netcpd/errors.hpp"
#include "netcpd/parallel.hpp"
#include "netcpd/random.hpp"

namespace netcpd {
namespace {

constexpr std::uint64_t kWbsDrawTag = 0x77627364;      // "wbsd"
constexpr std::uint64_t kSpectralTag = 0x73706563;     // "spec"

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

SpectralOptions spectral_options(const DetectorConfig& cfg) {
    SpectralOptions opts;
    opts.tol = cfg.spectral_tol;
    opts.seed = derive_seed(cfg.seed, {kSpectralTag});
    return opts;
}

// Everything the detectors need about one scanned interval.
struct IntervalScan {
    LayerRange interval;
    std::size_t window = 0;
    bool scanned = false;
    std::size_t tau_hat = 0;
    double stat = 0.0;
    // Threshold value at theta_mu = 1; the real threshold is theta_mu * base.
    double base = 0.0;

    double ratio() const {
        if (base > 0.0) {
            return stat / base;
        }
        return stat > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    bool fires(double theta) const { return scanned && stat > theta * base; }
};

// Trims the gamma highest-degree vertices of `degrees` inside `interval` and
// scans it with the given cushion.
void scan_one(const AdjacencySequence& seq, std::span<const double> degrees, std::size_t gamma,
              std::size_t cushion, const SpectralOptions& spectral, IntervalScan& out) {
    const std::size_t length = out.interval.length();
    if (length < 2 || length <= 2 * cushion) {
        return;
    }
    const auto removed = highest_degree_vertices(degrees, gamma);
    const AdjacencySequence trimmed = remove_vertices(seq, out.interval, removed);
    const ScanResult scan = scan_interval(trimmed, {0, length}, cushion, spectral);
    out.scanned = true;
    out.tau_hat = out.interval.start + scan.offset;
    out.stat = scan.stat;
}

std::vector<IntervalScan> scan_window_grid(const AdjacencySequence& seq, const DetectorConfig& cfg) {
    const std::size_t T = seq.layer_count();
    const std::size_t n = seq.node_count();
    const DegreeProfile global = degree_profile(seq, seq.full_range(), cfg.mu);
    const SpectralOptions spectral = spectral_options(cfg);

    struct Task {
        std::size_t window;
        std::size_t gamma;
        std::size_t grid_size;
    };
    std::vector<IntervalScan> scans;
    std::vector<Task> tasks;
    for (std::size_t window : cfg.windows()) {
        if (window > T) {
            continue;
        }
        const IntervalSet grid = build_grid(T, window);
        const std::size_t L = grid.intervals.size();
        const std::size_t gamma = gamma_count(cfg.mu, n, L, window, global.global_mean, epsilon_mu(n, L));
        for (const LayerRange& interval : grid.intervals) {
            IntervalScan s;
            s.interval = interval;
            s.window = window;
            scans.push_back(s);
            tasks.push_back({window, gamma, L});
        }
    }

    parallel_for(scans.size(), cfg.workers, [&](std::size_t i) {
        IntervalScan& s = scans[i];
        const Task& task = tasks[i];
        std::vector<double> local;
        std::span<const double> degrees = global.per_vertex;
        if (cfg.degree_scope == DegreeScope::interval) {
            local = degree_profile(seq, s.interval, cfg.mu).per_vertex;
            degrees = local;
        }
        scan_one(seq, degrees, task.gamma, task.window / 3, spectral, s);
        // Truncated trailing intervals are thresholded at their actual length.
        s.base = threshold(1.0, cfg.zeta, global.global_mean, s.interval.length(), task.grid_size, n).value;
    });
    return scans;
}

std::vector<IntervalScan> scan_wbs_family(const AdjacencySequence& seq, const DetectorConfig& cfg,
                                          const IntervalSet& family) {
    const std::size_t n = seq.node_count();
    const std::size_t M = family.intervals.size();
    const std::size_t cushion = cfg.kappa / 3;
    const SpectralOptions spectral = spectral_options(cfg);
    std::vector<double> global_degrees;
    if (cfg.degree_scope == DegreeScope::global) {
        global_degrees = degree_profile(seq, seq.full_range(), cfg.mu).per_vertex;
    }

    std::vector<IntervalScan> scans(M);
    parallel_for(M, cfg.workers, [&](std::size_t m) {
        IntervalScan& s = scans[m];
        s.interval = family.intervals[m];
        s.window = s.interval.length();
        if (s.interval.length() < cfg.kappa) {
            return;
        }
        const DegreeProfile local = degree_profile(seq, s.interval, cfg.mu);
        const std::size_t gamma =
            gamma_count(cfg.mu, n, M, cfg.kappa, local.global_mean, epsilon_mu(n, M));
        std::span<const double> degrees = local.per_vertex;
        if (cfg.degree_scope == DegreeScope::global) {
            degrees = global_degrees;
        }
        scan_one(seq, degrees, gamma, cushion, spectral, s);
        s.base = threshold(1.0, cfg.zeta, local.global_mean, cfg.kappa, M, n).value;
    });
    return scans;
}

void check_family(const IntervalSet& family, std::size_t T) {
    if (family.intervals.empty()) {
        throw InvalidArgument("WBS needs at least one interval");
    }
    for (const LayerRange& r : family.intervals) {
        if (r.start < 1 || r.end <= r.start || r.end > T) {
            throw InvalidArgument("WBS interval [" + std::to_string(r.start) + ", " + std::to_string(r.end) +
                                  "] must satisfy 1 <= s < e <= T = " + std::to_string(T));
        }
    }
}

// Recursion over (s, e], with s and e in the 1-based WBS convention.
void wbs_recurse(const std::vector<IntervalScan>& scans, const DetectorConfig& cfg, std::size_t s, std::size_t e,
                 std::vector<Detection>& out) {
    if (e < s || e - s < cfg.kappa) {
        return;
    }
    const IntervalScan* best = nullptr;
    for (const IntervalScan& scan : scans) {
        const LayerRange& r = scan.interval;
        if (r.start < s || r.end > e || r.length() < cfg.kappa) {
            continue;
        }
        if (!scan.fires(cfg.theta_mu)) {
            continue;
        }
        if (best == nullptr || scan.stat > best->stat) {
            best = &scan;
        }
    }
    if (best == nullptr) {
        return;
    }
    const std::size_t u0 = best->tau_hat;
    wbs_recurse(scans, cfg, s, u0, out);
    out.push_back({u0, best->window, best->interval, best->stat, cfg.theta_mu * best->base});
    wbs_recurse(scans, cfg, u0 + 1, e, out);
}

DetectionReport make_report(Algorithm algorithm, std::vector<Detection> detections, const DetectorConfig& cfg) {
    DetectionReport report;
    report.algorithm = algorithm;
    report.detections = std::move(detections);
    report.estimated_K = report.detections.size();
    report.config = cfg;
    return report;
}

std::size_t default_proximity(const DetectorConfig& cfg, std::size_t T) {
    if (cfg.merge_proximity) {
        return *cfg.merge_proximity;
    }
    std::size_t largest = 0;
    for (std::size_t w : cfg.windows()) {
        if (w <= T) {
            largest = std::max(largest, w);
        }
    }
    return largest / 3;
}

}  // namespace

IntervalSet build_grid(std::size_t T, std::size_t window) {
    if (window < 3 || window > T) {
        throw InvalidArgument("build_grid needs 3 <= window <= T; got window = " + std::to_string(window) +
                              ", T = " + std::to_string(T));
    }
    const std::size_t count = ceil_div(3 * T, window) - 2;
    const std::size_t stride = window / 3;
    IntervalSet set;
    set.window = window;
    set.kind = IntervalKind::deterministic_grid;
    set.intervals.reserve(count);
    for (std::size_t l = 0; l < count; ++l) {
        const std::size_t start = l * stride;
        set.intervals.push_back({start, std::min(start + window, T)});
    }
    return set;
}

IntervalSet draw_wbs_intervals(std::size_t T, std::size_t M, std::uint64_t seed) {
    if (T < 2) {
        throw InvalidArgument("WBS intervals need T >= 2");
    }
    if (M == 0) {
        throw InvalidArgument("WBS needs M >= 1");
    }
    Rng rng(seed);
    IntervalSet set;
    set.kind = IntervalKind::random_wbs;
    set.intervals.reserve(M);
    while (set.intervals.size() < M) {
        const std::size_t s = 1 + rng.below(T);
        const std::size_t e = 1 + rng.below(T);
        if (e > s) {
            set.intervals.push_back({s, e});
        }
    }
    return set;
}

std::string_view to_string(Algorithm algorithm) {
    return algorithm == Algorithm::window ? "window" : "wbs";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
    if (name == "window") {
        return Algorithm::window;
    }
    if (name == "wbs") {
        return Algorithm::wbs;
    }
    return std::nullopt;
}

std::vector<std::size_t> DetectorConfig::windows() const {
    std::vector<std::size_t> out = lambda_range;
    if (out.empty()) {
        for (std::size_t w = kappa; w >= 3; --w) {
            out.push_back(w);
        }
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void DetectorConfig::validate(Algorithm algorithm, std::size_t T, bool require_theta) const {
    if (!(mu > 0.0)) {
        throw InvalidArgument("mu must be positive");
    }
    if (!(zeta >= 0.0) || !std::isfinite(zeta)) {
        throw InvalidArgument("zeta must be finite and >= 0");
    }
    if (require_theta && !(theta_mu >= 0.0)) {
        throw InvalidArgument("theta_mu is not set; calibrate it first");
    }
    if (!(spectral_tol > 0.0)) {
        throw InvalidArgument("spectral_tol must be positive");
    }
    if (algorithm == Algorithm::window) {
        if (T < 3) {
            throw InvalidArgument("the window detector needs T >= 3; got T = " + std::to_string(T));
        }
        if (kappa < 3) {
            throw InvalidArgument("kappa must be >= 3 for the window detector");
        }
        for (std::size_t w : lambda_range) {
            if (w < 3 || w > kappa) {
                throw InvalidArgument("lambda_range entries must lie in [3, kappa]; got " + std::to_string(w));
            }
        }
    } else {
        if (kappa < 2 || kappa > T) {
            throw InvalidArgument("WBS needs 2 <= kappa <= T; got kappa = " + std::to_string(kappa) +
                                  ", T = " + std::to_string(T));
        }
        if (M == 0) {
            throw InvalidArgument("WBS needs M >= 1");
        }
    }
}

std::vector<std::size_t> DetectionReport::change_points() const {
    std::vector<std::size_t> out;
    out.reserve(detections.size());
    for (const Detection& d : detections) {
        out.push_back(d.tau_hat);
    }
    return out;
}

std::vector<Detection> merge_detections(std::vector<Detection> raw, std::size_t proximity) {
    std::sort(raw.begin(), raw.end(), [](const Detection& a, const Detection& b) {
        if (a.tau_hat != b.tau_hat) {
            return a.tau_hat < b.tau_hat;
        }
        if (a.window != b.window) {
            return a.window < b.window;
        }
        return a.interval < b.interval;
    });
    auto ratio = [](const Detection& d) {
        if (d.threshold > 0.0) {
            return d.stat / d.threshold;
        }
        return d.stat > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    };
    auto better = [&](const Detection& a, const Detection& b) {
        if (a.window != b.window) {
            return a.window < b.window;
        }
        const double ra = ratio(a);
        const double rb = ratio(b);
        if (ra != rb) {
            return ra > rb;
        }
        return a.tau_hat < b.tau_hat;
    };

    std::vector<Detection> merged;
    std::size_t i = 0;
    while (i < raw.size()) {
        std::size_t best = i;
        std::size_t j = i + 1;
        while (j < raw.size() && raw[j].tau_hat - raw[j - 1].tau_hat <= proximity) {
            if (better(raw[j], raw[best])) {
                best = j;
            }
            ++j;
        }
        merged.push_back(raw[best]);
        i = j;
    }
    // Representatives of adjacent clusters keep tau_hat order.
    std::sort(merged.begin(), merged.end(),
              [](const Detection& a, const Detection& b) { return a.tau_hat < b.tau_hat; });
    return merged;
}

DetectionReport detect_window(const AdjacencySequence& seq, const DetectorConfig& cfg) {
    cfg.validate(Algorithm::window, seq.layer_count());
    const auto scans = scan_window_grid(seq, cfg);
    std::vector<Detection> raw;
    for (const IntervalScan& s : scans) {
        if (s.fires(cfg.theta_mu)) {
            raw.push_back({s.tau_hat, s.window, s.interval, s.stat, cfg.theta_mu * s.base});
        }
    }
    return make_report(Algorithm::window, merge_detections(std::move(raw), default_proximity(cfg, seq.layer_count())),
                       cfg);
}

DetectionReport detect_wbs(const AdjacencySequence& seq, const DetectorConfig& cfg) {
    cfg.validate(Algorithm::wbs, seq.layer_count());
    return detect_wbs(seq, cfg, draw_wbs_intervals(seq.layer_count(), cfg.M, derive_seed(cfg.seed, {kWbsDrawTag})));
}

DetectionReport detect_wbs(const AdjacencySequence& seq, const DetectorConfig& cfg, const IntervalSet& intervals) {
    const std::size_t T = seq.layer_count();
    DetectorConfig effective = cfg;
    effective.M = intervals.intervals.size();
    effective.validate(Algorithm::wbs, T);
    check_family(intervals, T);
    const auto scans = scan_wbs_family(seq, effective, intervals);
    std::vector<Detection> found;
    wbs_recurse(scans, effective, 1, T, found);
    return make_report(Algorithm::wbs, std::move(found), effective);
}

DetectionReport detect(const AdjacencySequence& seq, const DetectorConfig& cfg, Algorithm algorithm) {
    return algorithm == Algorithm::window ? detect_window(seq, cfg) : detect_wbs(seq, cfg);
}

double critical_theta(const AdjacencySequence& seq, const DetectorConfig& cfg, Algorithm algorithm) {
    const std::size_t T = seq.layer_count();
    cfg.validate(algorithm, T, false);
    std::vector<IntervalScan> scans;
    if (algorithm == Algorithm::window) {
        scans = scan_window_grid(seq, cfg);
    } else {
        const IntervalSet family = draw_wbs_intervals(T, cfg.M, derive_seed(cfg.seed, {kWbsDrawTag}));
        scans = scan_wbs_family(seq, cfg, family);
        // Only intervals inside the top-level segment (1, T] take part in the first split.
        if (T - 1 < cfg.kappa) {
            return 0.0;
        }
    }
    double best = 0.0;
    for (const IntervalScan& s : scans) {
        if (s.scanned) {
            best = std::max(best, s.ratio());
        }
    }
    return best;
}

}  // namespace netcpd
