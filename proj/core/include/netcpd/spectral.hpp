#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

namespace netcpd {

struct SpectralOptions {
    /// Relative accuracy of the returned norm.
    double tol = 1e-10;
    std::size_t max_iterations = 1000;
    /// Seed of the Lanczos start vector.
    std::uint64_t seed = 0x5eed5eedULL;
};

/// Spectral norm max_i |lambda_i(m)| of a real symmetric matrix, computed by
/// Lanczos iteration with full reorthogonalization. Deterministic for a given
/// options.seed.
///
/// Throws InvalidArgument for non-square or non-symmetric input and
/// ConvergenceError if both ends of the spectrum have not converged within
/// options.max_iterations steps.
double spectral_norm(const Eigen::MatrixXd& m, const SpectralOptions& options = {});

namespace detail {
/// Same as spectral_norm without the O(n^2) symmetry check.
/// No symmetry check. When warm_start is non-null and holds n entries it is
/// blended into the random start vector; on return it holds the sum of the
/// two extreme Ritz vectors, ready for a nearby matrix.
double spectral_norm_symmetric(const Eigen::MatrixXd& m, const SpectralOptions& options,
                               Eigen::VectorXd* warm_start = nullptr);
}  // namespace detail

}  // namespace netcpd
