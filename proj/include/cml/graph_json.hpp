#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "cml/graph.hpp"

namespace cml {

/// {"p": int, "names": [..], "edges": [[i, j, mark_i, mark_j], ..]} with marks "t" | "a" | "c".
nlohmann::json graph_to_json(const MixedGraph& g);
MixedGraph graph_from_json(const nlohmann::json& doc);

/// Canonical text form: two-space indented, trailing newline.
std::string dump_graph(const MixedGraph& g);
MixedGraph parse_graph(const std::string& text);

MixedGraph read_graph_file(const std::filesystem::path& path);
void write_graph_file(const std::filesystem::path& path, const MixedGraph& g);

/// Reads a graph file that must describe a DAG.
Dag read_dag_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace cml
