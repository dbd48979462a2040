#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "netcpd/graph.hpp"

namespace netcpd {

/// Time-averaged degrees over a layer range.
struct DegreeProfile {
    /// D_i: edges at vertex i per layer.
    std::vector<double> per_vertex;
    /// D-bar: mean of per_vertex, i.e. edges per node per layer.
    double global_mean = 0.0;
    /// D-bar / (1 + sqrt(4 mu)).
    double normalized = 0.0;
};

DegreeProfile degree_profile(const AdjacencySequence& seq, LayerRange range, double mu);

/// The gamma vertices of largest degree; among equal degrees the lower
/// index wins. Result is sorted ascending.
std::vector<std::size_t> highest_degree_vertices(std::span<const double> degrees,
                                                 std::size_t gamma);

/// Restriction of seq to range with every edge incident to one of the given
/// vertices removed. Vertex ids are preserved (rows are zeroed, not deleted).
AdjacencySequence remove_vertices(const AdjacencySequence& seq, LayerRange range,
                                  std::span<const std::size_t> vertices);

/// Restriction of seq to range with the gamma highest-degree vertices
/// (degrees measured over the same range) zeroed out.
AdjacencySequence trim(const AdjacencySequence& seq, LayerRange range, std::size_t gamma);

}  // namespace netcpd
