#include "leadlag/export.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "leadlag/error.hpp"

namespace leadlag {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + '"';
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Prepared {
    std::vector<std::string> nodes;
    std::vector<Edge> edges;
    bool directed = true;
};

Prepared prepare(const DirectedNetwork& net, const ExportOptions& options) {
    Prepared p;
    p.nodes = net.nodes;
    std::sort(p.nodes.begin(), p.nodes.end());
    p.edges = net.edges;
    std::sort(p.edges.begin(), p.edges.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.from, a.to) < std::tie(b.from, b.to); });
    if (options.collapse_symmetric) {
        p.directed = false;
        std::set<std::pair<std::string, std::string>> seen;
        std::vector<Edge> merged;
        for (auto e : p.edges) {
            if (e.to < e.from) std::swap(e.from, e.to);
            if (seen.emplace(e.from, e.to).second) merged.push_back(e);
        }
        std::sort(merged.begin(), merged.end(),
                  [](const Edge& a, const Edge& b) { return std::tie(a.from, a.to) < std::tie(b.from, b.to); });
        p.edges = std::move(merged);
    }
    return p;
}

Correction correction_from_string(const std::string& s) {
    if (s == "none") return Correction::none;
    if (s == "bonferroni") return Correction::bonferroni;
    if (s == "fdr") return Correction::fdr;
    throw ParseError("unknown correction '" + s + "'", 0);
}

}  // namespace

const char* extension(ExportFormat f) {
    switch (f) {
        case ExportFormat::dot: return "dot";
        case ExportFormat::graphml: return "graphml";
        case ExportFormat::json: return "json";
    }
    return "";
}

ExportFormat export_format_from_string(const std::string& s) {
    if (s == "dot") return ExportFormat::dot;
    if (s == "graphml") return ExportFormat::graphml;
    if (s == "json") return ExportFormat::json;
    throw InputError("unknown export format '" + s + "' (expected dot, graphml or json)");
}

std::string network_to_dot(const DirectedNetwork& net, const ExportOptions& options) {
    const Prepared p = prepare(net, options);
    std::ostringstream out;
    out << (p.directed ? "digraph" : "graph") << " leadlag {\n";
    out << "  // lambda=" << net.lambda << " correction=" << to_string(net.correction)
        << " p=" << fmt_double(net.p_nominal) << " n_tests=" << net.n_tests << " statistic=" << to_string(net.statistic)
        << "\n";
    for (const auto& n : p.nodes) out << "  " << dot_quote(n) << ";\n";
    const char* arrow = p.directed ? " -> " : " -- ";
    for (const auto& e : p.edges) {
        out << "  " << dot_quote(e.from) << arrow << dot_quote(e.to) << " [statistic=" << fmt_double(e.statistic)
            << ", p_value=" << fmt_double(e.p_value);
        if (e.sign != 0) out << ", sign=" << e.sign;
        out << "];\n";
    }
    out << "}\n";
    return out.str();
}

std::string network_to_graphml(const DirectedNetwork& net, const ExportOptions& options) {
    const Prepared p = prepare(net, options);
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        << "  <key id=\"statistic\" for=\"edge\" attr.name=\"statistic\" attr.type=\"double\"/>\n"
        << "  <key id=\"p_value\" for=\"edge\" attr.name=\"p_value\" attr.type=\"double\"/>\n"
        << "  <key id=\"sign\" for=\"edge\" attr.name=\"sign\" attr.type=\"int\"/>\n"
        << "  <key id=\"lambda\" for=\"graph\" attr.name=\"lambda\" attr.type=\"int\"/>\n"
        << "  <key id=\"correction\" for=\"graph\" attr.name=\"correction\" attr.type=\"string\"/>\n"
        << "  <key id=\"p_nominal\" for=\"graph\" attr.name=\"p_nominal\" attr.type=\"double\"/>\n"
        << "  <graph id=\"leadlag\" edgedefault=\"" << (p.directed ? "directed" : "undirected") << "\">\n"
        << "    <data key=\"lambda\">" << net.lambda << "</data>\n"
        << "    <data key=\"correction\">" << to_string(net.correction) << "</data>\n"
        << "    <data key=\"p_nominal\">" << fmt_double(net.p_nominal) << "</data>\n";
    for (const auto& n : p.nodes) out << "    <node id=\"" << xml_escape(n) << "\"/>\n";
    for (const auto& e : p.edges) {
        out << "    <edge source=\"" << xml_escape(e.from) << "\" target=\"" << xml_escape(e.to) << "\">\n"
            << "      <data key=\"statistic\">" << fmt_double(e.statistic) << "</data>\n"
            << "      <data key=\"p_value\">" << fmt_double(e.p_value) << "</data>\n"
            << "      <data key=\"sign\">" << e.sign << "</data>\n"
            << "    </edge>\n";
    }
    out << "  </graph>\n</graphml>\n";
    return out.str();
}

nlohmann::json network_to_json(const DirectedNetwork& net, const ExportOptions& options) {
    const Prepared p = prepare(net, options);
    nlohmann::json j;
    j["directed"] = p.directed;
    j["lambda"] = net.lambda;
    j["correction"] = to_string(net.correction);
    j["p_nominal"] = net.p_nominal;
    j["n_tests"] = net.n_tests;
    j["statistic"] = to_string(net.statistic);
    j["nodes"] = p.nodes;
    j["edges"] = nlohmann::json::array();
    for (const auto& e : p.edges) {
        j["edges"].push_back(
            {{"from", e.from}, {"to", e.to}, {"statistic", e.statistic}, {"p_value", e.p_value}, {"sign", e.sign}});
    }
    return j;
}

DirectedNetwork network_from_json(const nlohmann::json& j) {
    DirectedNetwork net;
    try {
        net.lambda = j.at("lambda").get<int>();
        net.correction = correction_from_string(j.at("correction").get<std::string>());
        net.p_nominal = j.at("p_nominal").get<double>();
        net.n_tests = j.at("n_tests").get<std::size_t>();
        net.statistic = j.value("statistic", std::string("mi")) == "pearson" ? Statistic::pearson : Statistic::mi;
        net.nodes = j.at("nodes").get<std::vector<std::string>>();
        for (const auto& e : j.at("edges")) {
            net.edges.push_back({e.at("from").get<std::string>(), e.at("to").get<std::string>(),
                                 e.at("statistic").get<double>(), e.at("p_value").get<double>(),
                                 e.value("sign", 0)});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed network JSON: ") + e.what(), 0);
    }
    return net;
}

void export_network(const DirectedNetwork& net, ExportFormat format, const std::filesystem::path& path,
                    const ExportOptions& options) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    switch (format) {
        case ExportFormat::dot: out << network_to_dot(net, options); break;
        case ExportFormat::graphml: out << network_to_graphml(net, options); break;
        case ExportFormat::json: out << network_to_json(net, options).dump(2) << '\n'; break;
    }
    if (!out) throw InputError("failed writing '" + path.string() + "'");
}

}  // namespace leadlag
