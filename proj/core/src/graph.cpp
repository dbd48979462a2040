#include "netcpd/graph.hpp"

#include <algorithm>
#include <string>

#include "netcpd/errors.hpp"

namespace netcpd {

GraphLayer::GraphLayer(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    for (Edge& e : edges_) {
        if (e.u == e.v) {
            throw InvalidArgument("self-loop at vertex " + std::to_string(e.u));
        }
        if (e.u > e.v) {
            std::swap(e.u, e.v);
        }
        if (e.v >= n_) {
            throw InvalidArgument("edge endpoint " + std::to_string(e.v) +
                                  " out of range for n = " + std::to_string(n_));
        }
    }
    std::sort(edges_.begin(), edges_.end());
    auto dup = std::adjacent_find(edges_.begin(), edges_.end());
    if (dup != edges_.end()) {
        throw InvalidArgument("duplicate edge {" + std::to_string(dup->u) + ", " +
                              std::to_string(dup->v) + "}");
    }
}

bool GraphLayer::has_edge(std::size_t u, std::size_t v) const {
    if (u == v || u >= n_ || v >= n_) {
        return false;
    }
    if (u > v) {
        std::swap(u, v);
    }
    Edge key{static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v)};
    return std::binary_search(edges_.begin(), edges_.end(), key);
}

std::vector<std::size_t> GraphLayer::degrees() const {
    std::vector<std::size_t> deg(n_, 0);
    for (const Edge& e : edges_) {
        ++deg[e.u];
        ++deg[e.v];
    }
    return deg;
}

std::size_t GraphLayer::max_degree() const {
    auto deg = degrees();
    return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

double GraphLayer::density() const {
    if (n_ < 2) {
        return 0.0;
    }
    return static_cast<double>(edges_.size()) / (0.5 * static_cast<double>(n_) * static_cast<double>(n_ - 1));
}

Eigen::MatrixXd GraphLayer::to_dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    add_to(m);
    return m;
}

void GraphLayer::add_to(Eigen::MatrixXd& acc, double weight) const {
    for (const Edge& e : edges_) {
        acc(e.u, e.v) += weight;
        acc(e.v, e.u) += weight;
    }
}

GraphLayer GraphLayer::without_vertices(const std::vector<bool>& removed) const {
    GraphLayer out(n_);
    out.edges_.reserve(edges_.size());
    for (const Edge& e : edges_) {
        if (!removed[e.u] && !removed[e.v]) {
            out.edges_.push_back(e);
        }
    }
    return out;
}

AdjacencySequence::AdjacencySequence(std::size_t n, std::vector<GraphLayer> layers)
    : n_(n), layers_(std::move(layers)) {
    if (layers_.empty()) {
        throw InvalidArgument("an adjacency sequence needs at least one layer");
    }
    for (std::size_t t = 0; t < layers_.size(); ++t) {
        if (layers_[t].node_count() != n_) {
            throw InvalidArgument("layer " + std::to_string(t + 1) + " has " +
                                  std::to_string(layers_[t].node_count()) + " nodes, expected " +
                                  std::to_string(n_));
        }
    }
}

std::size_t AdjacencySequence::total_edges() const {
    std::size_t total = 0;
    for (const auto& layer : layers_) {
        total += layer.edge_count();
    }
    return total;
}

AdjacencySequence AdjacencySequence::slice(LayerRange range) const {
    check_range(*this, range);
    std::vector<GraphLayer> out(layers_.begin() + static_cast<std::ptrdiff_t>(range.start),
                                layers_.begin() + static_cast<std::ptrdiff_t>(range.end));
    return AdjacencySequence(n_, std::move(out));
}

AdjacencySequence AdjacencySequence::permuted(std::span<const std::size_t> permutation) const {
    if (permutation.size() != n_) {
        throw InvalidArgument("permutation size does not match node count");
    }
    std::vector<bool> seen(n_, false);
    for (std::size_t p : permutation) {
        if (p >= n_ || seen[p]) {
            throw InvalidArgument("not a permutation");
        }
        seen[p] = true;
    }
    std::vector<GraphLayer> out;
    out.reserve(layers_.size());
    for (const auto& layer : layers_) {
        std::vector<Edge> edges;
        edges.reserve(layer.edge_count());
        for (const Edge& e : layer.edges()) {
            edges.push_back({static_cast<std::uint32_t>(permutation[e.u]),
                             static_cast<std::uint32_t>(permutation[e.v])});
        }
        out.emplace_back(n_, std::move(edges));
    }
    return AdjacencySequence(n_, std::move(out));
}

AdjacencySequence AdjacencySequence::reversed() const {
    std::vector<GraphLayer> out(layers_.rbegin(), layers_.rend());
    return AdjacencySequence(n_, std::move(out));
}

void check_range(const AdjacencySequence& seq, LayerRange range) {
    if (range.empty()) {
        throw InvalidArgument("empty layer range (" + std::to_string(range.start) + ", " +
                              std::to_string(range.end) + "]");
    }
    if (range.end > seq.layer_count()) {
        throw InvalidArgument("layer range (" + std::to_string(range.start) + ", " +
                              std::to_string(range.end) + "] exceeds T = " +
                              std::to_string(seq.layer_count()));
    }
}

}  // namespace netcpd
