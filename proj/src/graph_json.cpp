#include "cml/graph_json.hpp"

#include <fstream>
#include <sstream>

namespace cml {

nlohmann::json graph_to_json(const MixedGraph& g) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : g.edges())
        edges.push_back({e.i, e.j, std::string(1, mark_code(e.at_i)), std::string(1, mark_code(e.at_j))});
    return {{"p", g.size()}, {"names", g.names()}, {"edges", std::move(edges)}};
}

MixedGraph graph_from_json(const nlohmann::json& doc) {
    try {
        if (!doc.is_object()) throw ParseError("graph document must be an object");
        for (const auto& [key, _] : doc.items())
            if (key != "p" && key != "names" && key != "edges") throw ParseError("unknown graph key '" + key + "'");
        int p = doc.at("p").get<int>();
        std::vector<std::string> names;
        if (doc.contains("names")) names = doc.at("names").get<std::vector<std::string>>();
        MixedGraph g(p, std::move(names));
        for (const auto& e : doc.at("edges")) {
            if (!e.is_array() || e.size() != 4) throw ParseError("edge entries must be [i, j, mark_i, mark_j]");
            int i = e[0].get<int>(), j = e[1].get<int>();
            auto mi = e[2].get<std::string>(), mj = e[3].get<std::string>();
            if (mi.size() != 1 || mj.size() != 1) throw ParseError("marks must be one of \"t\", \"a\", \"c\"");
            if (g.adjacent(i, j)) throw ParseError("duplicate edge in graph document");
            g.set_edge(i, j, mark_from_code(mi[0]), mark_from_code(mj[0]));
        }
        return g;
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("malformed graph document: ") + ex.what());
    } catch (const InvalidArgument& ex) {
        throw ParseError(std::string("invalid graph document: ") + ex.what());
    }
}

std::string dump_graph(const MixedGraph& g) { return graph_to_json(g).dump(2) + "\n"; }

MixedGraph parse_graph(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& ex) {
        throw ParseError(std::string("graph JSON: ") + ex.what());
    }
    return graph_from_json(doc);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

MixedGraph read_graph_file(const std::filesystem::path& path) { return parse_graph(read_text_file(path)); }

void write_graph_file(const std::filesystem::path& path, const MixedGraph& g) { write_text_file(path, dump_graph(g)); }

Dag read_dag_file(const std::filesystem::path& path) { return Dag::from_graph(read_graph_file(path)); }

}  // namespace cml
