#include <benchmark/benchmark.h>

#include <random>

#include "netcpd/cusum.hpp"
#include "netcpd/degrees.hpp"
#include "netcpd/detectors.hpp"
#include "netcpd/model.hpp"
#include "netcpd/spectral.hpp"

using namespace netcpd;

namespace {

Eigen::MatrixXd random_symmetric(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            m(i, j) = m(j, i) = normal(gen);
        }
    }
    return m;
}

AdjacencySequence er_sequence(std::size_t n, std::size_t T, double p) {
    return sample_mirgram(ProbabilitySequence::constant(ProbabilityMatrix::erdos_renyi(n, p), T), 1);
}

void BM_SpectralNorm(benchmark::State& state) {
    const Eigen::MatrixXd m = random_symmetric(state.range(0), 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(spectral_norm(m));
    }
}
BENCHMARK(BM_SpectralNorm)->Arg(20)->Arg(100)->Arg(400);

void BM_DenseEigenSolver(benchmark::State& state) {
    const Eigen::MatrixXd m = random_symmetric(state.range(0), 7);
    for (auto _ : state) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
        benchmark::DoNotOptimize(solver.eigenvalues().cwiseAbs().maxCoeff());
    }
}
BENCHMARK(BM_DenseEigenSolver)->Arg(20)->Arg(100)->Arg(400);

void BM_ScanInterval(benchmark::State& state) {
    const auto window = static_cast<std::size_t>(state.range(0));
    const auto seq = er_sequence(100, window, 0.1);
    const auto trimmed = trim(seq, seq.full_range(), 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(scan_interval(trimmed, trimmed.full_range(), window / 3));
    }
}
BENCHMARK(BM_ScanInterval)->Arg(9)->Arg(15)->Arg(30);

void BM_DetectWindow(benchmark::State& state) {
    const auto seq = er_sequence(static_cast<std::size_t>(state.range(0)), 60, 0.1);
    DetectorConfig cfg;
    cfg.kappa = 15;
    cfg.theta_mu = 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(detect_window(seq, cfg));
    }
}
BENCHMARK(BM_DetectWindow)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_DetectWbs(benchmark::State& state) {
    const auto seq = er_sequence(100, 60, 0.1);
    DetectorConfig cfg;
    cfg.kappa = 9;
    cfg.M = static_cast<std::size_t>(state.range(0));
    cfg.theta_mu = 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(detect_wbs(seq, cfg));
    }
}
BENCHMARK(BM_DetectWbs)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
