#include "netcpd/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "netcpd/errors.hpp"
#include "netcpd/random.hpp"
#include "netcpd/spectral.hpp"

namespace netcpd {

ProbabilityMatrix::ProbabilityMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
    if (values_.rows() != values_.cols()) {
        throw InvalidArgument("probability matrix must be square");
    }
    const Eigen::Index n = values_.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (values_(i, i) != 0.0) {
            throw InvalidArgument("probability matrix diagonal entry " + std::to_string(i) + " is nonzero");
        }
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double x = values_(i, j);
            if (x != values_(j, i)) {
                throw InvalidArgument("probability matrix is not symmetric at (" + std::to_string(i) + ", " +
                                      std::to_string(j) + ")");
            }
            if (!(x >= 0.0 && x <= 1.0)) {
                throw InvalidArgument("probability " + std::to_string(x) + " at (" + std::to_string(i) + ", " +
                                      std::to_string(j) + ") is outside [0, 1]");
            }
        }
    }
}

ProbabilityMatrix ProbabilityMatrix::erdos_renyi(std::size_t n, double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidArgument("edge probability " + std::to_string(p) + " is outside [0, 1]");
    }
    const auto nn = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(nn, nn, p);
    m.diagonal().setZero();
    return ProbabilityMatrix(std::move(m));
}

ProbabilityMatrix ProbabilityMatrix::block_model(const std::vector<std::size_t>& sizes,
                                                 const std::vector<std::vector<double>>& probs) {
    if (sizes.empty() || probs.size() != sizes.size()) {
        throw InvalidArgument("block model needs one probability row per block");
    }
    std::vector<std::size_t> block_of;
    for (std::size_t b = 0; b < sizes.size(); ++b) {
        if (probs[b].size() != sizes.size()) {
            throw InvalidArgument("block probability matrix must be square");
        }
        block_of.insert(block_of.end(), sizes[b], b);
    }
    const auto n = static_cast<Eigen::Index>(block_of.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i != j) {
                m(i, j) = probs[block_of[static_cast<std::size_t>(i)]][block_of[static_cast<std::size_t>(j)]];
            }
        }
    }
    return ProbabilityMatrix(std::move(m));
}

double ProbabilityMatrix::max_entry() const { return values_.size() == 0 ? 0.0 : values_.maxCoeff(); }

double ProbabilityMatrix::max_row_sum() const {
    return values_.size() == 0 ? 0.0 : values_.rowwise().sum().maxCoeff();
}

ProbabilityMatrix ProbabilityMatrix::scaled(double c) const {
    if (!(c >= 0.0 && c <= 1.0)) {
        throw InvalidArgument("scale factor must lie in [0, 1]");
    }
    return ProbabilityMatrix(values_ * c);
}

ProbabilitySequence::ProbabilitySequence(std::vector<Segment> segments) : segments_(std::move(segments)) {
    if (segments_.empty()) {
        throw InvalidArgument("a probability sequence needs at least one segment");
    }
    const std::size_t n = segments_.front().matrix.node_count();
    std::size_t previous_end = 0;
    for (std::size_t k = 0; k < segments_.size(); ++k) {
        const Segment& s = segments_[k];
        if (s.matrix.node_count() != n) {
            throw InvalidArgument("segment " + std::to_string(k + 1) + " has a different node count");
        }
        if (s.end <= previous_end) {
            throw InvalidArgument("segment ends must be strictly increasing; segment " + std::to_string(k + 1) +
                                  " ends at " + std::to_string(s.end));
        }
        if (k > 0 && s.matrix == segments_[k - 1].matrix) {
            throw InvalidArgument("segments " + std::to_string(k) + " and " + std::to_string(k + 1) +
                                  " are identical; merge them");
        }
        previous_end = s.end;
    }
}

ProbabilitySequence ProbabilitySequence::constant(ProbabilityMatrix matrix, std::size_t T) {
    std::vector<Segment> segments;
    segments.push_back({std::move(matrix), T});
    return ProbabilitySequence(std::move(segments));
}

std::vector<std::size_t> ProbabilitySequence::change_points() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k + 1 < segments_.size(); ++k) {
        out.push_back(segments_[k].end);
    }
    return out;
}

const ProbabilityMatrix& ProbabilitySequence::matrix_at(std::size_t t) const {
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](std::size_t layer, const Segment& s) { return layer < s.end; });
    if (it == segments_.end()) {
        throw InvalidArgument("layer index " + std::to_string(t) + " beyond T");
    }
    return it->matrix;
}

ProbabilitySequence ProbabilitySequence::scaled(double c) const {
    if (!(c > 0.0 && c <= 1.0)) {
        throw InvalidArgument("scale factor must lie in (0, 1]");
    }
    std::vector<Segment> out;
    out.reserve(segments_.size());
    for (const Segment& s : segments_) {
        out.push_back({s.matrix.scaled(c), s.end});
    }
    return ProbabilitySequence(std::move(out));
}

GroundTruth ground_truth(const ProbabilitySequence& q) {
    GroundTruth truth;
    truth.change_points = q.change_points();
    const auto& segments = q.segments();

    std::size_t previous = 0;
    truth.cushion = q.layer_count();
    for (const Segment& s : segments) {
        truth.cushion = std::min(truth.cushion, s.end - previous);
        previous = s.end;
        truth.sparsity = std::max(truth.sparsity, s.matrix.max_entry());
        truth.pop_frakd = std::max(truth.pop_frakd, s.matrix.max_row_sum());
    }
    truth.pop_d = static_cast<double>(q.node_count()) * truth.sparsity;

    if (segments.size() > 1) {
        truth.signal = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k + 1 < segments.size(); ++k) {
            const Eigen::MatrixXd jump = segments[k + 1].matrix.values() - segments[k].matrix.values();
            truth.signal = std::min(truth.signal, spectral_norm(jump));
            truth.frobenius_jumps.push_back(jump.norm());
        }
    }
    return truth;
}

AdjacencySequence sample_mirgram(const ProbabilitySequence& q, std::uint64_t seed) {
    const std::size_t n = q.node_count();
    const std::size_t T = q.layer_count();
    Rng rng(seed);
    std::vector<GraphLayer> layers;
    layers.reserve(T);
    for (std::size_t t = 0; t < T; ++t) {
        const ProbabilityMatrix& p = q.matrix_at(t);
        std::vector<Edge> edges;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (rng.bernoulli(p(i, j))) {
                    edges.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
                }
            }
        }
        layers.emplace_back(n, std::move(edges));
    }
    return AdjacencySequence(n, std::move(layers));
}

namespace {

void check_hard_instance(std::size_t n, std::size_t T, std::size_t kappa, double rho, double alpha) {
    if (n < 2) {
        throw InvalidArgument("hard instance needs n >= 2");
    }
    if (kappa == 0 || kappa >= T) {
        throw InvalidArgument("hard instance needs 0 < kappa < T");
    }
    if (!(rho > 0.0 && rho < 1.0)) {
        throw InvalidArgument("hard instance needs rho in (0, 1), got " + std::to_string(rho));
    }
    if (!(alpha >= 0.0)) {
        throw InvalidArgument("hard instance needs alpha >= 0, got " + std::to_string(alpha));
    }
}

// Theta_0 + alpha * rho * pattern with the diagonal zeroed; no clamping.
ProbabilityMatrix perturbed(double rho, double alpha, const Eigen::MatrixXd& pattern) {
    const Eigen::Index n = pattern.rows();
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(n, n, rho) + (alpha * rho) * pattern;
    m.diagonal().setZero();
    const double lo = m.minCoeff();
    const double hi = m.maxCoeff();
    if (lo < 0.0 || hi > 1.0) {
        std::ostringstream msg;
        msg << "perturbed probabilities leave [0, 1] (range [" << lo << ", " << hi << "]) for alpha = " << alpha
            << ", rho = " << rho;
        throw InvalidArgument(msg.str());
    }
    return ProbabilityMatrix(std::move(m));
}

Eigen::VectorXd rademacher_vector(Rng& rng, std::size_t n) {
    Eigen::VectorXd u(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        u(i) = rng.rademacher();
    }
    return u;
}

}  // namespace

ProbabilitySequence hard_instance_detect(std::size_t n, std::size_t T, std::size_t kappa, double rho, double alpha,
                                         std::uint64_t seed) {
    check_hard_instance(n, T, kappa, rho, alpha);
    const ProbabilityMatrix base = ProbabilityMatrix::erdos_renyi(n, rho);
    if (alpha == 0.0) {
        return ProbabilitySequence::constant(base, T);
    }
    Rng rng(seed);
    const Eigen::VectorXd u = rademacher_vector(rng, n);
    std::vector<Segment> segments;
    segments.push_back({perturbed(rho, alpha, u * u.transpose()), kappa});
    segments.push_back({base, T});
    return ProbabilitySequence(std::move(segments));
}

ProbabilitySequence hard_instance_localize(std::size_t n, std::size_t T, std::size_t kappa, double rho, double alpha,
                                           std::size_t rank, ChangeSide side, std::uint64_t seed) {
    check_hard_instance(n, T, kappa, rho, alpha);
    if (rank == 0 || rank > n) {
        throw InvalidArgument("rank must lie in [1, n]");
    }
    const ProbabilityMatrix base = ProbabilityMatrix::erdos_renyi(n, rho);
    const std::size_t tau = side == ChangeSide::early ? kappa : T - kappa;
    if (alpha == 0.0) {
        return ProbabilitySequence::constant(base, T);
    }

    constexpr int kMaxAttempts = 100;
    Rng rng(seed);
    const auto nn = static_cast<Eigen::Index>(n);
    const auto rr = static_cast<Eigen::Index>(rank);
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        Eigen::MatrixXd factors(nn, rr);
        for (Eigen::Index i = 0; i < rr; ++i) {
            factors.col(i) = rademacher_vector(rng, n);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(factors);
        if (lu.rank() != rr) {
            continue;
        }
        Eigen::MatrixXd pattern = Eigen::MatrixXd::Zero(nn, nn);
        double weight = 1.0;
        for (Eigen::Index i = 0; i < rr; ++i) {
            weight /= 3.0;
            pattern.noalias() += weight * factors.col(i) * factors.col(i).transpose();
        }
        ProbabilityMatrix shifted = perturbed(rho, alpha, pattern);
        std::vector<Segment> segments;
        if (side == ChangeSide::early) {
            segments.push_back({std::move(shifted), tau});
            segments.push_back({base, T});
        } else {
            segments.push_back({base, tau});
            segments.push_back({std::move(shifted), T});
        }
        return ProbabilitySequence(std::move(segments));
    }
    throw InvalidArgument("could not draw " + std::to_string(rank) + " linearly independent sign vectors in " +
                          std::to_string(kMaxAttempts) + " attempts");
}

}  // namespace netcpd
