#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "netcpd/graph.hpp"

namespace netcpd::cli {

/// Malformed input data (edge lists); maps to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Text format: a header `netcpd-layers v1 n=<n> T=<T>`, then one `t i j`
/// line per edge with 1-based layer and vertex indices and i < j. Blank
/// lines and `#` comments are ignored.
AdjacencySequence read_edge_list(std::istream& in, const std::string& source = "<stream>");
AdjacencySequence read_edge_list_file(const std::string& path);

/// Edges are written in (t, i, j) order, so equal sequences give equal bytes.
void write_edge_list(std::ostream& out, const AdjacencySequence& seq);
void write_edge_list_file(const std::string& path, const AdjacencySequence& seq);

/// %.12g formatting used by every table the CLI writes.
std::string format_number(double value);

}  // namespace netcpd::cli
