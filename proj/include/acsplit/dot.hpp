#pragma once

#include "acsplit/link.hpp"
#include "acsplit/model.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace acs {

struct RenderOptions {
    bool show_contexts = true;
    bool collapse_modules = false;
    std::set<ElementRef> highlight;
    double rank_sep = 0.6;
};

namespace dot_detail {

inline std::string escape(std::string_view text)
{
    std::string out;
    for (char c : text) {
        if (c == '"' || c == '\\') {
            out += '\\';
            out += c;
        } else if (c == '\n') {
            out += "\\n";
        } else {
            out += c;
        }
    }
    return out;
}

/// Greedy word wrap at `width` bytes.
inline std::string wrap(std::string_view text, std::size_t width = 32)
{
    std::string out;
    std::size_t line = 0;
    std::istringstream words{std::string(text)};
    std::string w;
    while (words >> w) {
        if (line > 0 && line + 1 + w.size() > width) {
            out += '\n';
            line = 0;
        } else if (line > 0) {
            out += ' ';
            ++line;
        }
        out += w;
        line += w.size();
    }
    return out;
}

inline bool is_contextual(ElementKind k)
{
    return k == ElementKind::Context || k == ElementKind::Assumption || k == ElementKind::Justification;
}

inline std::string format_number(double v)
{
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

/// Elements to draw under the show/collapse options.
inline std::set<ElementId> visible(const AssuranceCase& ac, const RenderOptions& opt)
{
    std::set<ElementId> shown;
    for (const auto& e : ac.elements) {
        if (opt.show_contexts || !is_contextual(e.kind)) {
            shown.insert(e.id);
        }
    }
    if (!opt.collapse_modules) {
        return shown;
    }
    // Hide whatever is only reachable through a module claim's support.
    std::map<ElementId, std::vector<std::pair<EdgeKind, ElementId>>> adj;
    std::set<ElementId> has_parent;
    for (const auto& e : ac.edges) {
        adj[e.source].emplace_back(e.kind, e.target);
        has_parent.insert(e.target);
    }
    std::set<ElementId> reached;
    std::vector<ElementId> stack;
    for (const auto& e : ac.elements) {
        if (e.is_root || !has_parent.contains(e.id)) {
            reached.insert(e.id);
            stack.push_back(e.id);
        }
    }
    while (!stack.empty()) {
        auto cur = stack.back();
        stack.pop_back();
        const auto* el = ac.find(cur);
        for (const auto& [kind, next] : adj[cur]) {
            if (el && el->is_module && kind == EdgeKind::SupportedBy) {
                continue;
            }
            if (reached.insert(next).second) {
                stack.push_back(next);
            }
        }
    }
    std::set<ElementId> out;
    for (const auto& id : shown) {
        if (reached.contains(id)) {
            out.insert(id);
        }
    }
    return out;
}

inline void emit_case_body(std::ostringstream& os, const AssuranceCase& ac, const RenderOptions& opt,
                           const std::string& indent, bool qualified)
{
    const auto shown = visible(ac, opt);
    auto node_name = [&](const ElementId& id) {
        return "\"" + escape(qualified ? ac.id + "." + id : id) + "\"";
    };

    std::vector<const Element*> elems;
    for (const auto& e : ac.elements) {
        if (shown.contains(e.id)) {
            elems.push_back(&e);
        }
    }
    std::ranges::sort(elems, {}, &Element::id);
    for (const auto* e : elems) {
        std::string shape;
        std::string style;
        std::string label = e->id;
        switch (e->kind) {
        case ElementKind::Claim: shape = e->is_module ? "tab" : "box"; break;
        case ElementKind::Strategy: shape = "parallelogram"; break;
        case ElementKind::Context: shape = "box"; style = "rounded"; break;
        case ElementKind::Assumption: shape = "box"; style = "rounded"; label += " (A)"; break;
        case ElementKind::Justification: shape = "box"; style = "rounded"; label += " (J)"; break;
        case ElementKind::Evidence: shape = "circle"; break;
        }
        label += "\n" + wrap(e->statement);
        if (e->away_ref) {
            label += "\n[" + e->away_ref->to_string() + "]";
        }
        if (e->is_undeveloped) {
            label += "\n◇";
        }
        if (opt.highlight.contains(ElementRef{ac.id, e->id})) {
            style += style.empty() ? "filled" : ",filled";
        }
        os << indent << node_name(e->id) << " [shape=" << shape;
        if (!style.empty()) {
            os << ", style=\"" << style << "\"";
            if (style.find("filled") != std::string::npos) {
                os << ", fillcolor=\"lightgrey\"";
            }
        }
        os << ", label=\"" << escape(label) << "\"];\n";
    }

    std::vector<std::tuple<ElementId, int, ElementId>> edges;
    for (const auto& e : ac.edges) {
        if (shown.contains(e.source) && shown.contains(e.target)) {
            edges.emplace_back(e.source, static_cast<int>(e.kind), e.target);
        }
    }
    std::ranges::sort(edges);
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (const auto& [s, k, t] : edges) {
        os << indent << node_name(s) << " -> " << node_name(t);
        if (static_cast<EdgeKind>(k) == EdgeKind::InContextOf) {
            os << " [arrowhead=empty]";
        }
        os << ";\n";
    }
}

inline void emit_header(std::ostringstream& os, const std::string& name, const RenderOptions& opt)
{
    if (!(opt.rank_sep > 0)) {
        throw std::invalid_argument("rank separation must be positive");
    }
    os << "digraph \"" << escape(name) << "\" {\n";
    os << "  rankdir=TB;\n";
    os << "  ranksep=" << format_number(opt.rank_sep) << ";\n";
    os << "  node [fontname=\"Helvetica\", fontsize=10];\n";
    os << "  edge [arrowhead=normal];\n";
}

} // namespace dot_detail

/// GSN diagram of one case as a DOT digraph. Node ids are element ids.
inline std::string to_dot(const AssuranceCase& ac, const RenderOptions& opt = {})
{
    std::ostringstream os;
    dot_detail::emit_header(os, ac.id, opt);
    dot_detail::emit_case_body(os, ac, opt, "  ", false);
    os << "}\n";
    return os.str();
}

/// Bundle diagram: one cluster per case (TAC first, then CACs by id), node ids
/// `<case>.<element>`, and a dashed edge from each away-claim to its target.
inline std::string to_dot(const ResolvedBundle& rb, const RenderOptions& opt = {})
{
    std::ostringstream os;
    dot_detail::emit_header(os, rb.bundle.id, opt);
    std::vector<const AssuranceCase*> cases{&rb.bundle.tac};
    std::vector<const AssuranceCase*> cacs;
    for (const auto& c : rb.bundle.cacs) {
        cacs.push_back(&c);
    }
    std::ranges::sort(cacs, {}, &AssuranceCase::id);
    cases.insert(cases.end(), cacs.begin(), cacs.end());

    std::map<CaseId, std::set<ElementId>> shown;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& ac = *cases[i];
        shown[ac.id] = dot_detail::visible(ac, opt);
        os << "  subgraph \"cluster_" << dot_detail::escape(ac.id) << "\" {\n";
        os << "    label=\"" << dot_detail::escape(ac.id + " (" + std::string(keyword(ac.kind)) + ")") << "\";\n";
        os << "    style=\"solid\";\n";
        dot_detail::emit_case_body(os, ac, opt, "    ", true);
        os << "  }\n";
    }
    for (const auto& [from, to] : rb.resolutions) {
        if (!shown[from.case_id].contains(from.element_id) || !shown[to.case_id].contains(to.element_id)) {
            continue;
        }
        os << "  \"" << dot_detail::escape(from.to_string()) << "\" -> \"" << dot_detail::escape(to.to_string())
           << "\" [style=dashed, constraint=false];\n";
    }
    os << "}\n";
    return os.str();
}

} // namespace acs
