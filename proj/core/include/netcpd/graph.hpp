#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace netcpd {

/// Undirected edge with u < v (0-based vertex ids).
struct Edge {
    std::uint32_t u = 0;
    std::uint32_t v = 0;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Layer interval (start, end] in 1-based layer numbering, i.e. 0-based
/// layer indices start .. end-1. Matches the (T_l, T_l + window] intervals
/// used by the scanning procedures.
struct LayerRange {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t length() const noexcept { return end > start ? end - start : 0; }
    bool empty() const noexcept { return end <= start; }

    friend auto operator<=>(const LayerRange&, const LayerRange&) = default;
};

/// One observed binary graph, stored as a sorted edge list. The dense
/// adjacency it represents is symmetric with a zero diagonal by construction.
class GraphLayer {
public:
    GraphLayer() = default;
    explicit GraphLayer(std::size_t n) : n_(n) {}

    /// Normalizes each edge to u < v and sorts. Self-loops, out-of-range
    /// vertices and duplicate edges are rejected with InvalidArgument.
    GraphLayer(std::size_t n, std::vector<Edge> edges);

    std::size_t node_count() const noexcept { return n_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    std::span<const Edge> edges() const noexcept { return edges_; }

    bool has_edge(std::size_t u, std::size_t v) const;
    std::vector<std::size_t> degrees() const;
    std::size_t max_degree() const;
    double density() const;

    Eigen::MatrixXd to_dense() const;

    /// acc += weight * A, touching only the stored edges.
    void add_to(Eigen::MatrixXd& acc, double weight = 1.0) const;

    /// Copy of this layer without any edge incident to a flagged vertex.
    GraphLayer without_vertices(const std::vector<bool>& removed) const;

    friend bool operator==(const GraphLayer&, const GraphLayer&) = default;

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
};

/// T binary layers on a shared vertex set of size n.
class AdjacencySequence {
public:
    /// Requires at least one layer and a common node count.
    AdjacencySequence(std::size_t n, std::vector<GraphLayer> layers);

    std::size_t node_count() const noexcept { return n_; }
    std::size_t layer_count() const noexcept { return layers_.size(); }
    const GraphLayer& layer(std::size_t index) const { return layers_.at(index); }
    std::span<const GraphLayer> layers() const noexcept { return layers_; }
    LayerRange full_range() const noexcept { return {0, layers_.size()}; }
    std::size_t total_edges() const;

    /// Layers start+1 .. end as a new sequence.
    AdjacencySequence slice(LayerRange range) const;

    /// Relabels vertex v as permutation[v] in every layer.
    AdjacencySequence permuted(std::span<const std::size_t> permutation) const;

    /// Same sequence with layer order reversed.
    AdjacencySequence reversed() const;

    friend bool operator==(const AdjacencySequence&, const AdjacencySequence&) = default;

private:
    std::size_t n_;
    std::vector<GraphLayer> layers_;
};

/// Throws InvalidArgument unless range is non-empty and within [0, T].
void check_range(const AdjacencySequence& seq, LayerRange range);

}  // namespace netcpd
