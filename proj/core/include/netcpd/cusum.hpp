#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "netcpd/graph.hpp"
#include "netcpd/spectral.hpp"

namespace netcpd {

/// phi(z) = z log z - z + 1 on [1, inf). Throws DomainError for z < 1.
double phi(double z);

/// Inverse of phi on [0, inf), found by bracketed Newton iteration so that
/// |phi(z) - y| <= tol * max(1, y). Throws DomainError for y < 0.
double phi_inverse(double y, double tol = 1e-12);

/// Constants controlling trimming depth and the detection margin.
struct PsiTriple {
    double epsilon_mu = 0.0;
    double psi_mu = 1.0;
    double eta = 1.0;
};

/// True when log|L| lies in (1, n), the regime where the log-log branch of
/// the epsilon/Psi/Gamma formulas applies.
bool log_log_regime(std::size_t num_intervals, std::size_t n);

/// epsilon_mu for n vertices and |L| intervals. Depends only on (n, |L|):
/// 1/6 outside the log-log regime, (2 eta - 2) / (6 eta - 3) with
/// eta = log n / log log |L| inside it.
double epsilon_mu(std::size_t n, std::size_t num_intervals);

/// (epsilon_mu, Psi_mu, eta) for the given window (Lambda ^ kappa) and
/// population max expected degree pop_frakd. Throws DegenerateModelError
/// when pop_frakd == 0.
PsiTriple psi_triple(double mu, std::size_t n, std::size_t num_intervals, std::size_t window, double pop_frakd);

/// Number of high-degree vertices to zero out before forming CUSUMs, capped
/// at n and never below 1. d_bar is the sample mean degree. Throws DomainError unless
/// 0 < epsilon < 1/3.
std::size_t gamma_count(double mu, std::size_t n, std::size_t num_intervals, std::size_t window, double d_bar,
                        double epsilon);

/// CUSUM matrix of a (pre-trimmed) sequence at relative offset t_rel
/// inside interval (start, start + L]:
///   sqrt((t/L)(1 - t/L)) * (mean of first t layers - mean of last L - t).
/// Requires 1 <= t_rel <= L - 1.
Eigen::MatrixXd cusum(const AdjacencySequence& trimmed, LayerRange interval, std::size_t t_rel);

struct ScanResult {
    /// Offset t_rel (relative to interval.start) of the largest CUSUM norm.
    std::size_t offset = 0;
    /// Spectral norm of the CUSUM at that offset.
    double stat = 0.0;
};

/// Maximizes ||cusum(t)|| over t_rel in (cushion, L - cushion]; ties go to
/// the smallest offset. Throws InvalidArgument if that range is empty.
ScanResult scan_interval(const AdjacencySequence& trimmed, LayerRange interval, std::size_t cushion,
                         const SpectralOptions& spectral = {});

struct ThresholdSpec {
    double theta_mu = 0.0;
    double zeta = 0.0;
    double value = 0.0;
};

/// theta_mu * sqrt((d_bar / window) * (zeta + 6 + log|L| / log n)).
ThresholdSpec threshold(double theta_mu, double zeta, double d_bar, std::size_t window, std::size_t num_intervals,
                        std::size_t n);

}  // namespace netcpd
