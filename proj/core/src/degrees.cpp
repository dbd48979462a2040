#include "netcpd/degrees.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "netcpd/errors.hpp"

namespace netcpd {

DegreeProfile degree_profile(const AdjacencySequence& seq, LayerRange range, double mu) {
    check_range(seq, range);
    if (!(mu > 0.0)) {
        throw InvalidArgument("mu must be positive");
    }
    const std::size_t n = seq.node_count();
    std::vector<std::size_t> counts(n, 0);
    for (std::size_t t = range.start; t < range.end; ++t) {
        for (const Edge& e : seq.layer(t).edges()) {
            ++counts[e.u];
            ++counts[e.v];
        }
    }
    const double layers = static_cast<double>(range.length());
    DegreeProfile profile;
    profile.per_vertex.resize(n);
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        profile.per_vertex[i] = static_cast<double>(counts[i]) / layers;
        total += counts[i];
    }
    profile.global_mean = n == 0 ? 0.0 : static_cast<double>(total) / (static_cast<double>(n) * layers);
    profile.normalized = profile.global_mean / (1.0 + std::sqrt(4.0 * mu));
    return profile;
}

std::vector<std::size_t> highest_degree_vertices(std::span<const double> degrees, std::size_t gamma) {
    const std::size_t n = degrees.size();
    if (gamma > n) {
        throw InvalidArgument("cannot trim " + std::to_string(gamma) + " of " + std::to_string(n) +
                              " vertices");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(gamma), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (degrees[a] != degrees[b]) {
                              return degrees[a] > degrees[b];
                          }
                          return a < b;
                      });
    order.resize(gamma);
    std::sort(order.begin(), order.end());
    return order;
}

AdjacencySequence remove_vertices(const AdjacencySequence& seq, LayerRange range,
                                  std::span<const std::size_t> vertices) {
    check_range(seq, range);
    std::vector<bool> removed(seq.node_count(), false);
    for (std::size_t v : vertices) {
        if (v >= seq.node_count()) {
            throw InvalidArgument("vertex " + std::to_string(v) + " out of range");
        }
        removed[v] = true;
    }
    std::vector<GraphLayer> layers;
    layers.reserve(range.length());
    for (std::size_t t = range.start; t < range.end; ++t) {
        layers.push_back(seq.layer(t).without_vertices(removed));
    }
    return AdjacencySequence(seq.node_count(), std::move(layers));
}

AdjacencySequence trim(const AdjacencySequence& seq, LayerRange range, std::size_t gamma) {
    check_range(seq, range);
    if (gamma > seq.node_count()) {
        throw InvalidArgument("gamma = " + std::to_string(gamma) + " exceeds n = " +
                              std::to_string(seq.node_count()));
    }
    if (gamma == 0) {
        return seq.slice(range);
    }
    // mu only affects the normalized mean, which is not used here.
    const DegreeProfile profile = degree_profile(seq, range, 1.0);
    const auto removed = highest_degree_vertices(profile.per_vertex, gamma);
    return remove_vertices(seq, range, removed);
}

}  // namespace netcpd
