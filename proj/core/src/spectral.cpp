#include "netcpd/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "netcpd/errors.hpp"
#include "netcpd/random.hpp"

namespace netcpd {
namespace {

struct RitzBounds {
    std::vector<double> vector_lowest;
    std::vector<double> vector_highest;
    double lowest = 0.0;
    double highest = 0.0;
    double residual_lowest = 0.0;
    double residual_highest = 0.0;

    double norm() const { return std::max(std::abs(lowest), std::abs(highest)); }
};

// The Ritz helpers below work on the k x k Lanczos tridiagonal with
// diagonal alpha and off-diagonal beta[0 .. k-2].

// Number of eigenvalues strictly below x (Sturm count via LDL^T pivots).
std::size_t sturm_count(const std::vector<double>& alpha, const std::vector<double>& beta, double x,
                        double pivmin) {
    std::size_t count = 0;
    double d = 1.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        const double off = i == 0 ? 0.0 : beta[i - 1] * beta[i - 1] / d;
        d = alpha[i] - x - off;
        if (std::abs(d) < pivmin) {
            d = -pivmin;
        }
        if (d < 0.0) {
            ++count;
        }
    }
    return count;
}

// Largest eigenvalue of the tridiagonal, approached from above. `hi` must
// exceed every eigenvalue and `lo` must not. A short bisection gets close,
// then Newton on det(T - xI) finishes: above the largest root the
// determinant is convex, so Newton decreases monotonically onto it. Returns
// a value x with x >= lambda_max up to rounding.
double largest_eigenvalue(const std::vector<double>& alpha, const std::vector<double>& beta, double lo, double hi,
                          double pivmin) {
    constexpr double kEps = std::numeric_limits<double>::epsilon();
    const std::size_t k = alpha.size();
    while (hi - lo > 1e-3 * (std::abs(lo) + std::abs(hi)) + pivmin) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (sturm_count(alpha, beta, mid, pivmin) == k) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    double x = hi;
    for (int iter = 0; iter < 100; ++iter) {
        // d/dx log|det(T - xI)| from the LDL^T pivots and their derivatives.
        double d = 1.0;
        double dd = 0.0;
        double slope = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            double next_dd = -1.0;
            double off = 0.0;
            if (i > 0) {
                const double b2 = beta[i - 1] * beta[i - 1];
                off = b2 / d;
                next_dd += b2 * dd / (d * d);
            }
            d = alpha[i] - x - off;
            dd = next_dd;
            if (!(d < 0.0)) {
                // x is no longer above the spectrum; rounding noise.
                return x;
            }
            slope += dd / d;
        }
        if (!(slope > 0.0)) {
            return x;
        }
        const double step = 1.0 / slope;
        const double candidate = x - step;
        if (!(candidate < x) || candidate < lo) {
            return x;
        }
        if (sturm_count(alpha, beta, candidate, pivmin) != k) {
            // Rounding pushed the step past the root; finish by bisection.
            lo = std::max(lo, candidate);
            while (x - lo > 4.0 * kEps * std::abs(x) + pivmin) {
                const double mid = 0.5 * (lo + x);
                if (mid <= lo || mid >= x) {
                    break;
                }
                if (sturm_count(alpha, beta, mid, pivmin) == k) {
                    x = mid;
                } else {
                    lo = mid;
                }
            }
            return x;
        }
        x = candidate;
        if (step <= 4.0 * kEps * std::abs(x) + pivmin) {
            return x;
        }
    }
    return x;
}

// Unit eigenvector for the eigenvalue next to the shift sigma, by two steps
// of inverse iteration. sigma must lie outside the spectrum so T - sigma I is
// definite and needs no pivoting.
std::vector<double> tridiagonal_eigenvector(const std::vector<double>& alpha, const std::vector<double>& beta, double sigma) {
    const std::size_t k = alpha.size();
    std::vector<double> d(k);
    std::vector<double> l(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        d[i] = alpha[i] - sigma;
        if (i > 0) {
            l[i] = beta[i - 1] / d[i - 1];
            d[i] -= l[i] * beta[i - 1];
        }
        if (d[i] == 0.0) {
            d[i] = std::numeric_limits<double>::min();
        }
    }
    std::vector<double> y(k, 1.0 / std::sqrt(static_cast<double>(k)));
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = 1; i < k; ++i) {
            y[i] -= l[i] * y[i - 1];
        }
        for (std::size_t i = 0; i < k; ++i) {
            y[i] /= d[i];
        }
        for (std::size_t i = k - 1; i-- > 0;) {
            y[i] -= l[i + 1] * y[i + 1];
        }
        double norm = 0.0;
        for (double v : y) {
            norm = std::max(norm, std::abs(v));
        }
        for (double& v : y) {
            v /= norm;
        }
        double sq = 0.0;
        for (double v : y) {
            sq += v * v;
        }
        for (double& v : y) {
            v /= std::sqrt(sq);
        }
    }
    return y;
}

// Extreme Ritz pairs. Residual of a Ritz pair is beta_next times the last
// component of its eigenvector.
RitzBounds ritz_bounds(const std::vector<double>& alpha, const std::vector<double>& beta, double beta_next) {
    const std::size_t k = alpha.size();
    RitzBounds out;
    if (k == 1) {
        out.lowest = out.highest = alpha[0];
        out.residual_lowest = out.residual_highest = beta_next;
        out.vector_lowest = out.vector_highest = {1.0};
        return out;
    }
    // Gershgorin interval.
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double scale = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double radius = (i > 0 ? std::abs(beta[i - 1]) : 0.0) + (i + 1 < k ? std::abs(beta[i]) : 0.0);
        lo = std::min(lo, alpha[i] - radius);
        hi = std::max(hi, alpha[i] + radius);
        scale = std::max({scale, std::abs(alpha[i]), radius});
    }
    const double pivmin = std::max(scale, 1.0) * std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    const double pad = 2.0 * std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300) + pivmin;
    lo -= pad;
    hi += pad;

    out.highest = largest_eigenvalue(alpha, beta, lo, hi, pivmin);
    std::vector<double> negated(k);
    std::transform(alpha.begin(), alpha.end(), negated.begin(), [](double a) { return -a; });
    out.lowest = -largest_eigenvalue(negated, beta, -hi, -lo, pivmin);
    out.vector_lowest = tridiagonal_eigenvector(alpha, beta, out.lowest - pad);
    out.vector_highest = tridiagonal_eigenvector(alpha, beta, out.highest + pad);
    out.residual_lowest = beta_next * std::abs(out.vector_lowest.back());
    out.residual_highest = beta_next * std::abs(out.vector_highest.back());
    return out;
}

}  // namespace

double spectral_norm(const Eigen::MatrixXd& m, const SpectralOptions& options) {
    if (m.rows() != m.cols()) {
        throw InvalidArgument("spectral_norm needs a square matrix");
    }
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = j + 1; i < m.rows(); ++i) {
            if (m(i, j) != m(j, i)) {
                throw InvalidArgument("spectral_norm needs a symmetric matrix; entries (" + std::to_string(i) +
                                      ", " + std::to_string(j) + ") differ");
            }
        }
    }
    return detail::spectral_norm_symmetric(m, options);
}

namespace detail {

double spectral_norm_symmetric(const Eigen::MatrixXd& m, const SpectralOptions& options,
                               Eigen::VectorXd* warm_start) {
    if (!(options.tol > 0.0)) {
        throw InvalidArgument("spectral tolerance must be positive");
    }
    const Eigen::Index n = m.rows();
    if (n == 0) {
        return 0.0;
    }
    if (n == 1) {
        return std::abs(m(0, 0));
    }

    const std::size_t cap =
        std::min<std::size_t>(static_cast<std::size_t>(n), std::max<std::size_t>(options.max_iterations, 1));

    std::uint64_t state = options.seed;
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v(i) = 2.0 * static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53 - 1.0;
    }
    v.normalize();
    if (warm_start != nullptr && warm_start->size() == n && warm_start->allFinite()) {
        const double norm = warm_start->norm();
        if (norm > 0.0) {
            // Keep the random part at full weight so no eigenvector is starved.
            v += *warm_start / norm;
            v.normalize();
        }
    }

    // Basis grows in blocks so large n does not preallocate n x cap.
    Eigen::Index capacity = std::min<Eigen::Index>(n, 32);
    Eigen::MatrixXd basis(n, capacity);
    basis.col(0) = v;

    std::vector<double> alpha;
    std::vector<double> beta;
    Eigen::VectorXd w(n);
    Eigen::VectorXd h;
    double scale = 0.0;
    constexpr double kBreakdown = 64.0 * std::numeric_limits<double>::epsilon();
    std::size_t next_check = 4;
    std::size_t last_check = 0;
    double last_residual = 0.0;

    auto finish = [&](const RitzBounds& ritz) {
        if (warm_start != nullptr) {
            const auto k = static_cast<Eigen::Index>(alpha.size());
            const Eigen::Map<const Eigen::VectorXd> low(ritz.vector_lowest.data(), k);
            const Eigen::Map<const Eigen::VectorXd> high(ritz.vector_highest.data(), k);
            *warm_start = basis.leftCols(k) * (low + high);
        }
        return ritz.norm();
    };

    for (std::size_t j = 0; j < cap; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        w.noalias() = m * basis.col(jj);
        const double a = basis.col(jj).dot(w);
        alpha.push_back(a);
        w -= a * basis.col(jj);
        if (j > 0) {
            w -= beta[j - 1] * basis.col(jj - 1);
        }
        // Full reorthogonalization, repeated once if it removed most of w.
        for (int pass = 0; pass < 2; ++pass) {
            const double before = w.norm();
            h.noalias() = basis.leftCols(jj + 1).transpose() * w;
            w.noalias() -= basis.leftCols(jj + 1) * h;
            if (w.norm() > 0.5 * before) {
                break;
            }
        }
        const double b = w.norm();
        scale = std::max({scale, std::abs(a), b});

        const bool invariant = b <= kBreakdown * scale;
        const bool last = j + 1 == cap;
        if (invariant || last || j + 1 >= next_check) {
            const RitzBounds ritz = ritz_bounds(alpha, beta, invariant ? 0.0 : b);
            const double norm = ritz.norm();
            // A breakdown or a full Krylov basis spans an invariant subspace;
            // its Ritz values are exact.
            if (invariant || (last && cap == static_cast<std::size_t>(n))) {
                return finish(ritz);
            }
            const double residual = std::max(ritz.residual_lowest, ritz.residual_highest);
            if (norm > 0.0 && residual <= options.tol * norm) {
                return finish(ritz);
            }
            if (last) {
                throw ConvergenceError("spectral_norm did not converge in " + std::to_string(cap) +
                                           " Lanczos steps; last estimate " + std::to_string(norm),
                                       norm, cap);
            }
            // Residuals shrink roughly geometrically; aim the next check at
            // the predicted convergence step, at most 8 steps ahead.
            std::size_t ahead = 4;
            if (last_check > 0 && residual > 0.0 && last_residual > residual && norm > 0.0) {
                const double rate = std::log(residual / last_residual) / static_cast<double>(j + 1 - last_check);
                const double steps = std::log(options.tol * norm / residual) / rate;
                ahead = static_cast<std::size_t>(std::clamp(std::ceil(steps), 1.0, 8.0));
            }
            last_check = j + 1;
            last_residual = residual;
            next_check = j + 1 + ahead;
        }

        beta.push_back(b);
        if (jj + 1 >= capacity) {
            capacity = std::min<Eigen::Index>(n, capacity * 2);
            basis.conservativeResize(Eigen::NoChange, capacity);
        }
        basis.col(jj + 1) = w / b;
    }
    // Unreachable: the loop returns or throws on its last step.
    return 0.0;
}

}  // namespace detail
}  // namespace netcpd
