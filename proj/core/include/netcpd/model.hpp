#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "netcpd/graph.hpp"

namespace netcpd {

/// Edge-probability matrix: symmetric, zero diagonal, entries in [0, 1].
class ProbabilityMatrix {
public:
    /// Validates the invariants; throws InvalidArgument naming the first
    /// offending entry.
    explicit ProbabilityMatrix(Eigen::MatrixXd values);

    /// p on every off-diagonal entry.
    static ProbabilityMatrix erdos_renyi(std::size_t n, double p);

    /// Stochastic block model: vertices are assigned to consecutive blocks
    /// of the given sizes; probs[a][b] is the edge probability between
    /// blocks a and b (must be symmetric).
    static ProbabilityMatrix block_model(const std::vector<std::size_t>& sizes,
                                         const std::vector<std::vector<double>>& probs);

    std::size_t node_count() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    const Eigen::MatrixXd& values() const noexcept { return values_; }
    double operator()(std::size_t i, std::size_t j) const {
        return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

    double max_entry() const;
    double max_row_sum() const;
    ProbabilityMatrix scaled(double c) const;

    friend bool operator==(const ProbabilityMatrix& a, const ProbabilityMatrix& b) {
        return a.values_.rows() == b.values_.rows() && a.values_ == b.values_;
    }

private:
    Eigen::MatrixXd values_;
};

/// A constant stretch of layers ending (inclusively, 1-based) at `end`.
struct Segment {
    ProbabilityMatrix matrix;
    std::size_t end;
};

/// Piecewise-constant sequence of expected adjacency matrices.
/// Segment ends are the change points tau_1 < ... < tau_K followed by T.
class ProbabilitySequence {
public:
    /// Requires strictly increasing ends with the last equal to T, a common
    /// node count, and adjacent segments that differ in at least one entry.
    explicit ProbabilitySequence(std::vector<Segment> segments);

    /// A single segment of T identical layers.
    static ProbabilitySequence constant(ProbabilityMatrix matrix, std::size_t T);

    std::size_t node_count() const noexcept { return segments_.front().matrix.node_count(); }
    std::size_t layer_count() const noexcept { return segments_.back().end; }
    const std::vector<Segment>& segments() const noexcept { return segments_; }
    std::size_t change_count() const noexcept { return segments_.size() - 1; }
    std::vector<std::size_t> change_points() const;

    /// Matrix in force at 0-based layer index t.
    const ProbabilityMatrix& matrix_at(std::size_t t) const;

    ProbabilitySequence scaled(double c) const;

private:
    std::vector<Segment> segments_;
};

/// Model-level functionals used to state detectability.
struct GroundTruth {
    std::vector<std::size_t> change_points;
    /// Minimum gap between successive change points, boundaries included.
    std::size_t cushion = 0;
    /// Minimum spectral norm of the jump across a change point; 0 if none.
    double signal = 0.0;
    /// Largest edge probability.
    double sparsity = 0.0;
    /// n * sparsity.
    double pop_d = 0.0;
    /// Largest expected degree over vertices and layers.
    double pop_frakd = 0.0;
    /// Frobenius norm of each jump.
    std::vector<double> frobenius_jumps;
};

GroundTruth ground_truth(const ProbabilitySequence& q);

/// Independent Bernoulli edges per layer, one uniform draw per pair i < j in
/// layer-major, row-major order. Deterministic given seed.
AdjacencySequence sample_mirgram(const ProbabilitySequence& q, std::uint64_t seed);

/// kappa layers of rho (J - I) + alpha rho (U U^T with zero diagonal) for a
/// Rademacher vector U, then T - kappa layers of rho (J - I). alpha = 0 gives
/// the constant sequence.
ProbabilitySequence hard_instance_detect(std::size_t n, std::size_t T, std::size_t kappa, double rho,
                                         double alpha, std::uint64_t seed);

enum class ChangeSide { early, late };

/// Two-segment instance with perturbation alpha rho sum_i 3^-i U_i U_i^T
/// (zero diagonal), U_1..U_rank Rademacher and conditioned on full rank.
/// early: perturbed layers first and the change at kappa;
/// late: base layers first and the change at T - kappa.
ProbabilitySequence hard_instance_localize(std::size_t n, std::size_t T, std::size_t kappa, double rho,
                                           double alpha, std::size_t rank, ChangeSide side,
                                           std::uint64_t seed);

}  // namespace netcpd
