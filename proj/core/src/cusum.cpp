#include "netcpd/cusum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "netcpd/errors.hpp"

namespace netcpd {

double phi(double z) {
    if (!(z >= 1.0)) {
        throw DomainError("phi is defined on [1, inf); got z = " + std::to_string(z));
    }
    if (std::isinf(z)) {
        return z;
    }
    const double w = z - 1.0;
    return z * std::log1p(w) - w;
}

double phi_inverse(double y, double tol) {
    if (!(y >= 0.0)) {
        throw DomainError("phi_inverse is defined on [0, inf); got y = " + std::to_string(y));
    }
    if (!(tol > 0.0)) {
        throw InvalidArgument("phi_inverse tolerance must be positive");
    }
    if (y == 0.0) {
        return 1.0;
    }
    if (std::isinf(y)) {
        return y;
    }

    double lo = 1.0;
    double hi = 1.0 + std::max(1.0, y);
    while (phi(hi) < y) {
        lo = hi;
        hi *= 2.0;
    }

    double z = 0.5 * (lo + hi);
    constexpr double kEps = std::numeric_limits<double>::epsilon();
    for (int iter = 0; iter < 400; ++iter) {
        const double f = phi(z) - y;
        if (f == 0.0) {
            break;
        }
        if (f > 0.0) {
            hi = z;
        } else {
            lo = z;
        }
        // phi'(z) = log z; fall back to bisection when Newton leaves the bracket.
        double next = z - f / std::log(z);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        if (std::abs(next - z) <= 2.0 * kEps * z || hi - lo <= 2.0 * kEps * hi) {
            z = next;
            break;
        }
        z = next;
    }
    const double residual = std::abs(phi(z) - y);
    if (residual > tol * std::max(1.0, y)) {
        throw ConvergenceError("phi_inverse residual " + std::to_string(residual) + " above tolerance", z, 400);
    }
    return z;
}

bool log_log_regime(std::size_t num_intervals, std::size_t n) {
    const double log_l = std::log(static_cast<double>(num_intervals));
    return log_l > 1.0 && log_l < static_cast<double>(n);
}

double epsilon_mu(std::size_t n, std::size_t num_intervals) {
    if (n < 3) {
        throw InvalidArgument("epsilon_mu needs n >= 3");
    }
    if (num_intervals == 0) {
        throw InvalidArgument("epsilon_mu needs at least one interval");
    }
    if (!log_log_regime(num_intervals, n)) {
        return 1.0 / 6.0;
    }
    const double eta = std::log(static_cast<double>(n)) / std::log(std::log(static_cast<double>(num_intervals)));
    return (2.0 * eta - 2.0) / (6.0 * eta - 3.0);
}

PsiTriple psi_triple(double mu, std::size_t n, std::size_t num_intervals, std::size_t window, double pop_frakd) {
    if (!(mu > 0.0)) {
        throw InvalidArgument("mu must be positive");
    }
    if (n < 3 || num_intervals == 0 || window == 0) {
        throw InvalidArgument("psi_triple needs n >= 3, |L| >= 1 and window >= 1");
    }
    if (!(pop_frakd > 0.0)) {
        throw DegenerateModelError("psi_triple needs a positive max expected degree");
    }
    const double log_l = std::log(static_cast<double>(num_intervals));
    const double scale = static_cast<double>(window) * pop_frakd;
    PsiTriple out;
    if (log_log_regime(num_intervals, n)) {
        const double log_log_l = std::log(log_l);
        out.eta = std::log(static_cast<double>(n)) / log_log_l;
        out.epsilon_mu = (2.0 * out.eta - 2.0) / (6.0 * out.eta - 3.0);
        const double numerator = std::max(log_log_l / scale, 3.0);
        out.psi_mu = phi_inverse(numerator / (2.0 / 3.0 - 2.0 * out.epsilon_mu));
    } else {
        out.eta = 1.0;
        out.epsilon_mu = 1.0 / 6.0;
        const double numerator = std::max(2.0 * log_l, 3.0 * scale);
        out.psi_mu = phi_inverse(numerator / ((1.0 / 3.0 - out.epsilon_mu) * scale));
    }
    return out;
}

std::size_t gamma_count(double mu, std::size_t n, std::size_t num_intervals, std::size_t window, double d_bar,
                        double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0 / 3.0)) {
        throw DomainError("gamma_count needs epsilon in (0, 1/3); got " + std::to_string(epsilon));
    }
    if (!(mu > 0.0) || !(d_bar >= 0.0)) {
        throw InvalidArgument("gamma_count needs mu > 0 and d_bar >= 0");
    }
    if (num_intervals == 0 || window == 0) {
        throw InvalidArgument("gamma_count needs |L| >= 1 and window >= 1");
    }
    const double log_l = std::log(static_cast<double>(num_intervals));
    const double degree_term = 3.0 * static_cast<double>(window) * d_bar / (1.0 + std::sqrt(4.0 * mu));
    double rate = 0.0;
    double bracket = 0.0;
    if (log_log_regime(num_intervals, n)) {
        rate = 3.0 * epsilon / (2.0 - 6.0 * epsilon);
        bracket = std::max(std::log(log_l), degree_term);
    } else {
        rate = 3.0 * epsilon / (1.0 - 3.0 * epsilon);
        bracket = std::max(2.0 * log_l, degree_term);
    }
    // exp(-x) > 0 for every finite x, so the ceiling is at least 1 even when exp underflows.
    const double value = std::max(1.0, std::ceil(25.0 * static_cast<double>(n) / 4.0 * std::exp(-rate * bracket)));
    if (value >= static_cast<double>(n)) {
        return n;
    }
    return static_cast<std::size_t>(value);
}

namespace {

void check_interval(const AdjacencySequence& seq, LayerRange interval) {
    check_range(seq, interval);
    if (interval.length() < 2) {
        throw InvalidArgument("a CUSUM interval needs at least two layers");
    }
}

Eigen::MatrixXd interval_sum(const AdjacencySequence& seq, std::size_t first, std::size_t last) {
    const auto n = static_cast<Eigen::Index>(seq.node_count());
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t t = first; t < last; ++t) {
        seq.layer(t).add_to(acc);
    }
    return acc;
}

double cusum_weight(std::size_t t, std::size_t length) {
    const double frac = static_cast<double>(t) / static_cast<double>(length);
    return std::sqrt(frac * (1.0 - frac));
}

}  // namespace

Eigen::MatrixXd cusum(const AdjacencySequence& trimmed, LayerRange interval, std::size_t t_rel) {
    check_interval(trimmed, interval);
    const std::size_t length = interval.length();
    if (t_rel < 1 || t_rel >= length) {
        throw InvalidArgument("CUSUM offset " + std::to_string(t_rel) + " outside [1, " +
                              std::to_string(length - 1) + "]");
    }
    const std::size_t split = interval.start + t_rel;
    const Eigen::MatrixXd left = interval_sum(trimmed, interval.start, split);
    const Eigen::MatrixXd right = interval_sum(trimmed, split, interval.end);
    return cusum_weight(t_rel, length) *
           (left / static_cast<double>(t_rel) - right / static_cast<double>(length - t_rel));
}

ScanResult scan_interval(const AdjacencySequence& trimmed, LayerRange interval, std::size_t cushion,
                         const SpectralOptions& spectral) {
    check_interval(trimmed, interval);
    const std::size_t length = interval.length();
    const std::size_t first = cushion + 1;
    const std::size_t last = std::min(length > cushion ? length - cushion : 0, length - 1);
    if (first > last) {
        throw InvalidArgument("empty scan range: interval of " + std::to_string(length) + " layers with cushion " +
                              std::to_string(cushion));
    }

    const Eigen::MatrixXd total = interval_sum(trimmed, interval.start, interval.end);
    Eigen::MatrixXd left = interval_sum(trimmed, interval.start, interval.start + first - 1);
    Eigen::MatrixXd g(total.rows(), total.cols());

    ScanResult best{first, -1.0};
    Eigen::VectorXd warm;
    for (std::size_t t = first; t <= last; ++t) {
        trimmed.layer(interval.start + t - 1).add_to(left);
        const double w = cusum_weight(t, length);
        g.noalias() = (w / static_cast<double>(t)) * left - (w / static_cast<double>(length - t)) * (total - left);
        const double stat = detail::spectral_norm_symmetric(g, spectral, &warm);
        if (stat > best.stat) {
            best = {t, stat};
        }
    }
    return best;
}

ThresholdSpec threshold(double theta_mu, double zeta, double d_bar, std::size_t window, std::size_t num_intervals,
                        std::size_t n) {
    if (!(theta_mu >= 0.0) || !(zeta >= 0.0) || !(d_bar >= 0.0)) {
        throw InvalidArgument("threshold needs theta_mu, zeta, d_bar >= 0");
    }
    if (window == 0 || num_intervals == 0 || n < 2) {
        throw InvalidArgument("threshold needs window >= 1, |L| >= 1 and n >= 2");
    }
    const double log_ratio = std::log(static_cast<double>(num_intervals)) / std::log(static_cast<double>(n));
    const double value =
        theta_mu * std::sqrt(d_bar / static_cast<double>(window) * (zeta + 6.0 + log_ratio));
    return {theta_mu, zeta, value};
}

}  // namespace netcpd
