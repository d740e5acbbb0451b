#pragma once

#include "acsplit/decimal.hpp"

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace acs {

using CaseId = std::string;
using ElementId = std::string;

/// True for `[A-Za-z][A-Za-z0-9_-]*`.
inline bool is_valid_id(std::string_view text)
{
    auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); };
    auto digit = [](char c) { return c >= '0' && c <= '9'; };
    if (text.empty() || !alpha(text.front())) {
        return false;
    }
    return std::ranges::all_of(text, [&](char c) { return alpha(c) || digit(c) || c == '_' || c == '-'; });
}

enum class ElementKind { Claim, Strategy, Context, Assumption, Justification, Evidence };
enum class EdgeKind { SupportedBy, InContextOf };
enum class CaseKind { Monolithic, Technological, Clinical };
enum class ConcernKind { Safety, Effectiveness };
enum class Direction { Provided, Required };

inline constexpr ElementKind kAllElementKinds[] = {ElementKind::Claim,      ElementKind::Strategy,
                                                   ElementKind::Context,    ElementKind::Assumption,
                                                   ElementKind::Justification, ElementKind::Evidence};
inline constexpr EdgeKind kAllEdgeKinds[] = {EdgeKind::SupportedBy, EdgeKind::InContextOf};

constexpr std::string_view keyword(ElementKind k)
{
    switch (k) {
    case ElementKind::Claim: return "claim";
    case ElementKind::Strategy: return "strategy";
    case ElementKind::Context: return "context";
    case ElementKind::Assumption: return "assumption";
    case ElementKind::Justification: return "justification";
    case ElementKind::Evidence: return "evidence";
    }
    return "?";
}

constexpr std::string_view keyword(EdgeKind k)
{
    return k == EdgeKind::SupportedBy ? "supportedBy" : "inContextOf";
}

constexpr std::string_view keyword(CaseKind k)
{
    switch (k) {
    case CaseKind::Monolithic: return "monolithic";
    case CaseKind::Technological: return "technological";
    case CaseKind::Clinical: return "clinical";
    }
    return "?";
}

constexpr std::string_view keyword(ConcernKind k)
{
    return k == ConcernKind::Safety ? "safety" : "effectiveness";
}

constexpr std::string_view keyword(Direction d)
{
    return d == Direction::Provided ? "provided" : "required";
}

inline std::optional<ElementKind> element_kind_from(std::string_view word)
{
    for (auto k : kAllElementKinds) {
        if (keyword(k) == word) {
            return k;
        }
    }
    return std::nullopt;
}

inline std::optional<CaseKind> case_kind_from(std::string_view word)
{
    for (auto k : {CaseKind::Monolithic, CaseKind::Technological, CaseKind::Clinical}) {
        if (keyword(k) == word) {
            return k;
        }
    }
    return std::nullopt;
}

/// Location of a token in a source file. Lines and columns are 1-based;
/// columns count bytes.
struct SourceSpan {
    std::string file;
    int line = 1;
    int column = 1;
    int length = 0;

    friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
    friend auto operator<=>(const SourceSpan&, const SourceSpan&) = default;
};

/// A (case, element) pair naming an element anywhere in a bundle.
struct ElementRef {
    CaseId case_id;
    ElementId element_id;

    friend bool operator==(const ElementRef&, const ElementRef&) = default;
    friend auto operator<=>(const ElementRef&, const ElementRef&) = default;

    [[nodiscard]] std::string to_string() const { return case_id + "." + element_id; }
};

struct Element {
    ElementId id;
    ElementKind kind = ElementKind::Claim;
    std::string statement;
    bool is_root = false;
    bool is_public = false;
    bool is_undeveloped = false;
    bool is_module = false;
    std::optional<ConcernKind> concern;
    std::optional<ElementRef> away_ref;
    SourceSpan span;
};

struct Edge {
    ElementId source;
    ElementId target;
    EdgeKind kind = EdgeKind::SupportedBy;
    SourceSpan span;
};

struct Capability {
    std::string name;
    Direction direction = Direction::Provided;
    std::string unit;
    Decimal low;
    Decimal high;
    SourceSpan span;
};

struct AssuranceCase {
    CaseId id;
    CaseKind kind = CaseKind::Monolithic;
    std::vector<Element> elements;
    std::vector<Edge> edges;
    std::vector<Capability> capabilities;
    std::optional<CaseId> associated_tac;
    SourceSpan span;

    [[nodiscard]] const Element* find(std::string_view element_id) const
    {
        auto it = std::ranges::find(elements, element_id, &Element::id);
        return it == elements.end() ? nullptr : &*it;
    }

    [[nodiscard]] bool contains(std::string_view element_id) const { return find(element_id) != nullptr; }
};

/// One technological case plus the clinical cases that build on it.
struct Bundle {
    std::string id;
    AssuranceCase tac;
    std::vector<AssuranceCase> cacs;

    [[nodiscard]] const AssuranceCase* find_case(std::string_view case_id) const
    {
        if (tac.id == case_id) {
            return &tac;
        }
        auto it = std::ranges::find(cacs, case_id, &AssuranceCase::id);
        return it == cacs.end() ? nullptr : &*it;
    }
};

class LookupError : public std::out_of_range {
public:
    explicit LookupError(const std::string& what) : std::out_of_range(what) {}
};

class CycleError : public std::runtime_error {
public:
    CycleError(const std::string& what, std::vector<ElementId> cycle)
        : std::runtime_error(what), m_cycle(std::move(cycle))
    {}

    /// Element ids along one cycle; the first id is repeated implicitly.
    [[nodiscard]] const std::vector<ElementId>& cycle() const noexcept { return m_cycle; }

private:
    std::vector<ElementId> m_cycle;
};

inline const Element& require_element(const AssuranceCase& ac, std::string_view element_id)
{
    if (const auto* e = ac.find(element_id)) {
        return *e;
    }
    throw LookupError("unknown element '" + std::string(element_id) + "' in case '" + ac.id + "'");
}

/// Targets of `node`'s outgoing edges of `kind`, in declaration order.
inline std::vector<ElementId> children(const AssuranceCase& ac, std::string_view node, EdgeKind kind)
{
    require_element(ac, node);
    std::vector<ElementId> out;
    for (const auto& e : ac.edges) {
        if (e.kind == kind && e.source == node) {
            out.push_back(e.target);
        }
    }
    return out;
}

/// Sources of edges of `kind` pointing at `node`, in declaration order.
inline std::vector<ElementId> parents(const AssuranceCase& ac, std::string_view node, EdgeKind kind)
{
    require_element(ac, node);
    std::vector<ElementId> out;
    for (const auto& e : ac.edges) {
        if (e.kind == kind && e.target == node) {
            out.push_back(e.source);
        }
    }
    return out;
}

namespace detail {

using Adjacency = std::map<ElementId, std::vector<ElementId>>;

inline Adjacency adjacency(const AssuranceCase& ac, EdgeKind kind, bool reversed)
{
    Adjacency adj;
    for (const auto& e : ac.edges) {
        if (e.kind == kind) {
            if (reversed) {
                adj[e.target].push_back(e.source);
            } else {
                adj[e.source].push_back(e.target);
            }
        }
    }
    return adj;
}

inline std::set<ElementId> reach(const Adjacency& adj, const ElementId& start)
{
    std::set<ElementId> seen;
    std::vector<ElementId> stack{start};
    while (!stack.empty()) {
        auto cur = std::move(stack.back());
        stack.pop_back();
        auto it = adj.find(cur);
        if (it == adj.end()) {
            continue;
        }
        for (const auto& next : it->second) {
            if (seen.insert(next).second) {
                stack.push_back(next);
            }
        }
    }
    return seen;
}

/// One cycle inside the subgraph induced by `within`, if any.
inline std::optional<std::vector<ElementId>> find_cycle(const Adjacency& adj, const std::set<ElementId>& within)
{
    enum class Mark { White, Grey, Black };
    std::map<ElementId, Mark> mark;
    std::vector<ElementId> path;
    std::optional<std::vector<ElementId>> found;

    auto visit = [&](auto&& self, const ElementId& n) -> void {
        mark[n] = Mark::Grey;
        path.push_back(n);
        if (auto it = adj.find(n); it != adj.end()) {
            for (const auto& m : it->second) {
                if (found || !within.contains(m)) {
                    continue;
                }
                auto state = mark[m];
                if (state == Mark::Grey) {
                    auto from = std::ranges::find(path, m);
                    found = std::vector<ElementId>(from, path.end());
                    return;
                }
                if (state == Mark::White) {
                    self(self, m);
                }
            }
        }
        path.pop_back();
        mark[n] = Mark::Black;
    };
    for (const auto& n : within) {
        if (!found && mark[n] == Mark::White) {
            visit(visit, n);
        }
    }
    return found;
}

} // namespace detail

/// Every element from which `node` is reachable over SupportedBy edges,
/// excluding `node` itself. Throws CycleError if the traversal meets a cycle.
inline std::set<ElementId> ancestors(const AssuranceCase& ac, std::string_view node)
{
    require_element(ac, node);
    const ElementId start(node);
    auto up = detail::reach(detail::adjacency(ac, EdgeKind::SupportedBy, true), start);
    auto region = up;
    region.insert(start);
    if (auto cycle = detail::find_cycle(detail::adjacency(ac, EdgeKind::SupportedBy, false), region)) {
        std::string msg = "supportedBy cycle:";
        for (const auto& id : *cycle) {
            msg += " " + id + " ->";
        }
        msg += " " + cycle->front();
        throw CycleError(msg, *cycle);
    }
    up.erase(start);
    return up;
}

/// Every element reachable from `node` over SupportedBy edges, excluding `node`.
inline std::set<ElementId> descendants(const AssuranceCase& ac, std::string_view node)
{
    require_element(ac, node);
    auto down = detail::reach(detail::adjacency(ac, EdgeKind::SupportedBy, false), ElementId(node));
    down.erase(ElementId(node));
    return down;
}

/// Quoted DSL string literal with `"` and `\` escaped.
inline std::string quote(std::string_view text)
{
    std::string out = "\"";
    for (char c : text) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c;
    }
    out += '"';
    return out;
}

/// Flags in their fixed print order, space-separated (empty when none).
inline std::string flag_text(const Element& e)
{
    std::string out;
    auto add = [&](std::string_view word) {
        if (!out.empty()) {
            out += ' ';
        }
        out += word;
    };
    if (e.is_root) add("root");
    if (e.is_public) add("public");
    if (e.is_undeveloped) add("undeveloped");
    if (e.is_module) add("module");
    if (e.concern) {
        add("concern");
        add(keyword(*e.concern));
    }
    if (e.away_ref) {
        add("awayref");
        add(e.away_ref->to_string());
    }
    return out;
}

/// Order-independent text form. Two cases are structurally identical iff
/// their canonical texts are byte-equal. Spans are not part of the form.
inline std::string canonicalize(const AssuranceCase& ac)
{
    std::ostringstream os;
    os << "case " << ac.id << " kind " << keyword(ac.kind) << '\n';
    if (ac.associated_tac) {
        os << "associates " << *ac.associated_tac << '\n';
    }

    std::vector<std::string> caps;
    for (const auto& c : ac.capabilities) {
        caps.push_back(std::string(keyword(c.direction)) + " " + c.name + " unit " + c.unit + " range ["
                       + c.low.to_string() + ", " + c.high.to_string() + "]");
    }
    std::ranges::sort(caps);
    for (const auto& c : caps) {
        os << "capability " << c << '\n';
    }

    std::vector<const Element*> elems;
    for (const auto& e : ac.elements) {
        elems.push_back(&e);
    }
    std::ranges::sort(elems, {}, [](const Element* e) { return std::tie(e->id, e->statement); });
    for (const auto* e : elems) {
        os << "element " << e->id << ' ' << keyword(e->kind) << ' ' << quote(e->statement);
        if (auto flags = flag_text(*e); !flags.empty()) {
            os << ' ' << flags;
        }
        os << '\n';
    }

    std::vector<std::tuple<ElementId, int, ElementId>> edges;
    for (const auto& e : ac.edges) {
        edges.emplace_back(e.source, static_cast<int>(e.kind), e.target);
    }
    std::ranges::sort(edges);
    for (const auto& [s, k, t] : edges) {
        os << "edge " << s << ' ' << keyword(static_cast<EdgeKind>(k)) << ' ' << t << '\n';
    }
    return os.str();
}

} // namespace acs
