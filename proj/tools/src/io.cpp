#include "netcpd_cli/io.hpp"

#include <charconv>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string_view>
#include <tuple>
#include <vector>

namespace netcpd::cli {
namespace {

std::string_view strip(std::string_view line) {
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
        line = line.substr(0, hash);
    }
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = line.find_last_not_of(" \t\r");
    return line.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < line.size()) {
        const auto start = line.find_first_not_of(" \t", pos);
        if (start == std::string_view::npos) {
            break;
        }
        const auto end = line.find_first_of(" \t", start);
        out.push_back(line.substr(start, end == std::string_view::npos ? end : end - start));
        pos = end == std::string_view::npos ? line.size() : end;
    }
    return out;
}

bool parse_size(std::string_view text, std::size_t& value) {
    const auto* begin = text.data();
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    return ec == std::errc{} && ptr == end && !text.empty();
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& message) {
    throw InputError(source + ":" + std::to_string(line) + ": " + message);
}

}  // namespace

AdjacencySequence read_edge_list(std::istream& in, const std::string& source) {
    std::string raw;
    std::size_t line_no = 0;
    std::size_t n = 0;
    std::size_t T = 0;
    bool have_header = false;
    std::vector<std::vector<Edge>> edges;
    std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;

    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = strip(raw);
        if (line.empty()) {
            continue;
        }
        const auto fields = split_ws(line);
        if (!have_header) {
            if (fields.size() != 4 || fields[0] != "netcpd-layers" || fields[1] != "v1" ||
                fields[2].substr(0, 2) != "n=" || fields[3].substr(0, 2) != "T=" ||
                !parse_size(fields[2].substr(2), n) || !parse_size(fields[3].substr(2), T)) {
                fail(source, line_no, "expected header 'netcpd-layers v1 n=<n> T=<T>'");
            }
            if (T == 0) {
                fail(source, line_no, "T must be at least 1");
            }
            if (n > std::numeric_limits<std::uint32_t>::max()) {
                fail(source, line_no, "n is too large");
            }
            edges.resize(T);
            have_header = true;
            continue;
        }
        std::size_t t = 0;
        std::size_t i = 0;
        std::size_t j = 0;
        if (fields.size() != 3 || !parse_size(fields[0], t) || !parse_size(fields[1], i) ||
            !parse_size(fields[2], j)) {
            fail(source, line_no, "expected an edge line 't i j' of three non-negative integers");
        }
        if (t < 1 || t > T) {
            fail(source, line_no, "layer " + std::to_string(t) + " outside [1, " + std::to_string(T) + "]");
        }
        if (i < 1 || j > n || i >= j) {
            fail(source, line_no, "vertices must satisfy 1 <= i < j <= " + std::to_string(n) + "; got " +
                                      std::to_string(i) + " " + std::to_string(j));
        }
        if (!seen.emplace(t, i, j).second) {
            fail(source, line_no, "duplicate edge " + std::to_string(t) + " " + std::to_string(i) + " " +
                                      std::to_string(j));
        }
        edges[t - 1].push_back({static_cast<std::uint32_t>(i - 1), static_cast<std::uint32_t>(j - 1)});
    }
    if (!have_header) {
        fail(source, line_no, "missing header 'netcpd-layers v1 n=<n> T=<T>'");
    }
    std::vector<GraphLayer> layers;
    layers.reserve(T);
    for (auto& layer : edges) {
        layers.emplace_back(n, std::move(layer));
    }
    return AdjacencySequence(n, std::move(layers));
}

AdjacencySequence read_edge_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open " + path);
    }
    return read_edge_list(in, path);
}

void write_edge_list(std::ostream& out, const AdjacencySequence& seq) {
    out << "netcpd-layers v1 n=" << seq.node_count() << " T=" << seq.layer_count() << '\n';
    for (std::size_t t = 0; t < seq.layer_count(); ++t) {
        for (const Edge& e : seq.layer(t).edges()) {
            out << t + 1 << ' ' << e.u + 1 << ' ' << e.v + 1 << '\n';
        }
    }
}

void write_edge_list_file(const std::string& path, const AdjacencySequence& seq) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot write " + path);
    }
    write_edge_list(out, seq);
    if (!out) {
        throw InputError("write failed for " + path);
    }
}

std::string format_number(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.12g", value);
    return buffer;
}

}  // namespace netcpd::cli
