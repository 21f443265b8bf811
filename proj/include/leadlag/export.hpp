#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "leadlag/inference.hpp"

namespace leadlag {

enum class ExportFormat { dot, graphml, json };

struct ExportOptions {
    /// Merge m->n and n->m into one undirected edge (meaningful for synchronous, lag 0, MI networks).
    bool collapse_symmetric = false;
};

[[nodiscard]] std::string network_to_dot(const DirectedNetwork& net, const ExportOptions& options = {});
[[nodiscard]] std::string network_to_graphml(const DirectedNetwork& net, const ExportOptions& options = {});
[[nodiscard]] nlohmann::json network_to_json(const DirectedNetwork& net, const ExportOptions& options = {});

/// Inverse of network_to_json for directed exports. Throws ParseError on malformed input.
[[nodiscard]] DirectedNetwork network_from_json(const nlohmann::json& j);

/// Nodes and edges are written in lexicographic order so output is diff-stable.
/// Throws InputError if the file cannot be written.
void export_network(const DirectedNetwork& net, ExportFormat format, const std::filesystem::path& path,
                    const ExportOptions& options = {});

[[nodiscard]] const char* extension(ExportFormat f);
[[nodiscard]] ExportFormat export_format_from_string(const std::string& s);

}  // namespace leadlag
