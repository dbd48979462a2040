#include "netcpd/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <string>

#include "netcpd/errors.hpp"
#include "netcpd/parallel.hpp"
#include "netcpd/random.hpp"

namespace netcpd {
namespace {

constexpr std::uint64_t kModelTag = 1;
constexpr std::uint64_t kSampleTag = 2;
constexpr std::uint64_t kDetectorTag = 3;

std::size_t abs_diff(std::size_t a, std::size_t b) { return a > b ? a - b : b - a; }

void check_replicates(const HarnessOptions& opts) {
    if (opts.replicates == 0) {
        throw InvalidArgument("at least one replicate is required");
    }
}

}  // namespace

DetectorFn make_detector(Algorithm algorithm, DetectorConfig cfg) {
    cfg.workers = 1;
    return [algorithm, cfg](const AdjacencySequence& seq, std::uint64_t seed) {
        DetectorConfig local = cfg;
        local.seed = seed;
        return detect(seq, local, algorithm);
    };
}

LocalizationResult localization_error(const std::vector<std::size_t>& estimated,
                                      const std::vector<std::size_t>& truth, std::size_t tolerance) {
    LocalizationResult out;
    if (estimated.size() != truth.size()) {
        return out;
    }
    std::vector<std::size_t> a = estimated;
    std::vector<std::size_t> b = truth;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t worst = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        out.per_point_errors.push_back(abs_diff(a[i], b[i]));
        worst = std::max(worst, out.per_point_errors.back());
    }
    out.max_abs_error = worst;
    out.matched = worst <= tolerance;
    return out;
}

LocalizationResult localization_error(const DetectionReport& report, const ProbabilitySequence& truth,
                                      std::size_t tolerance) {
    return localization_error(report.change_points(), truth.change_points(), tolerance);
}

ReplicateSeeds replicate_seeds(std::uint64_t base, std::size_t replicate, std::size_t arm) {
    return {derive_seed(base, {replicate, arm, kModelTag}), derive_seed(base, {replicate, arm, kSampleTag}),
            derive_seed(base, {replicate, arm, kDetectorTag})};
}

double RiskRun::localized_rate(std::size_t tolerance) const {
    if (alt_reports.empty()) {
        return 0.0;
    }
    std::size_t hits = 0;
    for (std::size_t r = 0; r < alt_reports.size(); ++r) {
        if (localization_error(alt_reports[r].change_points(), alt_truth[r], tolerance).matched) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(alt_reports.size());
}

RiskEstimate risk_from_counts(std::size_t false_alarms, std::size_t misses, std::size_t replicates) {
    if (replicates == 0) {
        throw InvalidArgument("at least one replicate is required");
    }
    const double r = static_cast<double>(replicates);
    RiskEstimate est;
    est.replicates = replicates;
    est.type_i = static_cast<double>(false_alarms) / r;
    est.type_ii = static_cast<double>(misses) / r;
    est.pi_hat = est.type_i + est.type_ii;
    const double variance = est.type_i * (1.0 - est.type_i) / r + est.type_ii * (1.0 - est.type_ii) / r;
    est.ci_half_width = 1.96 * std::sqrt(variance);
    return est;
}

RiskRun run_risk(const ModelFactory& null_gen, const ModelFactory& alt_gen, const DetectorFn& detector,
                 const HarnessOptions& opts) {
    check_replicates(opts);
    const std::size_t R = opts.replicates;
    RiskRun run;
    run.null_counts.resize(R);
    run.alt_reports.resize(R);
    run.alt_truth.resize(R);

    parallel_for(2 * R, opts.workers, [&](std::size_t job) {
        const std::size_t r = job / 2;
        const std::size_t arm = job % 2;
        const ReplicateSeeds seeds = replicate_seeds(opts.seed, r, arm);
        const ProbabilitySequence model = arm == 0 ? null_gen(seeds.model) : alt_gen(seeds.model);
        const AdjacencySequence sample = sample_mirgram(model, seeds.sample);
        DetectionReport report = detector(sample, seeds.detector);
        if (arm == 0) {
            run.null_counts[r] = report.estimated_K;
        } else {
            run.alt_truth[r] = model.change_points();
            run.alt_reports[r] = std::move(report);
        }
    });

    std::size_t false_alarms = 0;
    std::size_t misses = 0;
    for (std::size_t r = 0; r < R; ++r) {
        false_alarms += run.null_counts[r] >= 1 ? 1 : 0;
        misses += run.alt_reports[r].estimated_K == 0 ? 1 : 0;
    }
    run.risk = risk_from_counts(false_alarms, misses, R);
    return run;
}

RiskEstimate estimate_risk(const ModelFactory& null_gen, const ModelFactory& alt_gen, const DetectorFn& detector,
                           const HarnessOptions& opts) {
    return run_risk(null_gen, alt_gen, detector, opts).risk;
}

RiskEstimate estimate_risk(const ModelFactory& null_gen, const ModelFactory& alt_gen, Algorithm algorithm,
                           const DetectorConfig& cfg, const HarnessOptions& opts) {
    return estimate_risk(null_gen, alt_gen, make_detector(algorithm, cfg), opts);
}

double ThetaGrid::at(std::size_t index) const {
    if (points < 2) {
        return min;
    }
    const double frac = static_cast<double>(index) / static_cast<double>(points - 1);
    return min * std::pow(max / min, frac);
}

double type_i_at(const std::vector<double>& critical, double theta) {
    if (critical.empty()) {
        return 0.0;
    }
    const auto alarms = std::count_if(critical.begin(), critical.end(), [&](double c) { return theta < c; });
    return static_cast<double>(alarms) / static_cast<double>(critical.size());
}

std::vector<double> null_critical_values(const ModelFactory& null_gen, Algorithm algorithm, const DetectorConfig& cfg,
                                         const HarnessOptions& opts) {
    check_replicates(opts);
    DetectorConfig local = cfg;
    local.workers = 1;
    std::vector<double> critical(opts.replicates);
    parallel_for(opts.replicates, opts.workers, [&](std::size_t r) {
        const ReplicateSeeds seeds = replicate_seeds(opts.seed, r, 0);
        const ProbabilitySequence model = null_gen(seeds.model);
        const AdjacencySequence sample = sample_mirgram(model, seeds.sample);
        DetectorConfig rep = local;
        rep.seed = seeds.detector;
        critical[r] = critical_theta(sample, rep, algorithm);
    });
    return critical;
}

CalibrationResult calibrate_theta(const ModelFactory& null_gen, Algorithm algorithm, const DetectorConfig& cfg,
                                  double target_type_i, const HarnessOptions& opts, const ThetaGrid& grid) {
    if (!(target_type_i > 0.0 && target_type_i < 1.0)) {
        throw InvalidArgument("target type-I error must lie in (0, 1)");
    }
    if (!(grid.min > 0.0 && grid.max > grid.min) || grid.points < 2) {
        throw InvalidArgument("theta grid needs 0 < min < max and at least two points");
    }
    CalibrationResult result;
    result.critical = null_critical_values(null_gen, algorithm, cfg, opts);
    const auto& critical = result.critical;

    const double top = type_i_at(critical, grid.at(grid.points - 1));
    if (top > target_type_i) {
        std::ostringstream msg;
        msg << "type-I error " << top << " at theta_mu = " << grid.max << " still exceeds target " << target_type_i
            << "; largest null critical value is " << *std::max_element(critical.begin(), critical.end());
        throw CalibrationError(msg.str());
    }
    // type_i_at is nonincreasing in theta, so bisect on the grid index.
    std::size_t lo = 0;
    std::size_t hi = grid.points - 1;
    if (type_i_at(critical, grid.at(lo)) <= target_type_i) {
        hi = lo;
    }
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (type_i_at(critical, grid.at(mid)) <= target_type_i) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if (hi > 0 && type_i_at(critical, grid.at(hi - 1)) <= target_type_i) {
        throw CalibrationError("type-I error is not monotone on the theta grid");
    }
    result.grid_index = hi;
    result.theta_mu = grid.at(hi);
    result.type_i = type_i_at(critical, result.theta_mu);
    return result;
}

std::vector<SweepRow> phase_sweep(const SweepGrid& grid, Algorithm algorithm, const DetectorConfig& cfg,
                                  const HarnessOptions& opts) {
    if (grid.alphas.empty() || grid.rhos.empty() || grid.kappas.empty()) {
        throw InvalidArgument("phase sweep grid must be non-empty in every dimension");
    }
    check_replicates(opts);
    std::vector<double> alphas = grid.alphas;
    std::sort(alphas.begin(), alphas.end());

    std::vector<SweepRow> rows;
    for (double rho : grid.rhos) {
        for (std::size_t kappa : grid.kappas) {
            DetectorConfig local = cfg;
            local.kappa = kappa;
            local.validate(algorithm, grid.T);
            const DetectorFn detector = make_detector(algorithm, local);
            const std::size_t n = grid.n;
            const std::size_t T = grid.T;
            const ModelFactory null_gen = [n, T, rho](std::uint64_t) {
                return ProbabilitySequence::constant(ProbabilityMatrix::erdos_renyi(n, rho), T);
            };
            for (double alpha : alphas) {
                const auto started = std::chrono::steady_clock::now();
                const ModelFactory alt_gen = [n, T, kappa, rho, alpha](std::uint64_t seed) {
                    return hard_instance_detect(n, T, kappa, rho, alpha, seed);
                };
                SweepRow row;
                row.alpha = alpha;
                row.rho = rho;
                row.kappa = kappa;
                const GroundTruth truth = ground_truth(alt_gen(replicate_seeds(opts.seed, 0, 1).model));
                row.cushion = truth.cushion;
                row.signal = truth.signal;
                row.sparsity = truth.sparsity;
                row.boundary_ratio =
                    truth.sparsity > 0.0 ? truth.signal / std::sqrt(truth.sparsity / static_cast<double>(truth.cushion))
                                         : 0.0;
                const RiskRun run = run_risk(null_gen, alt_gen, detector, opts);
                row.risk = run.risk;
                row.localized_rate = run.localized_rate(kappa);
                row.seconds =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
                rows.push_back(row);
            }
        }
    }
    return rows;
}

}  // namespace netcpd
