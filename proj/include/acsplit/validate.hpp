#pragma once

#include "acsplit/capability.hpp"
#include "acsplit/diagnostic.hpp"
#include "acsplit/model.hpp"
#include "acsplit/units.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace acs {

namespace rules {

namespace detail {

inline Diagnostic make(std::string rule, Severity sev, SourceSpan span, std::string message,
                       std::vector<ElementRef> refs = {})
{
    return {std::move(rule), sev, std::move(span), std::move(message), std::move(refs)};
}

inline bool supports_ok(ElementKind source, ElementKind target)
{
    if (source == ElementKind::Strategy) {
        return target == ElementKind::Claim;
    }
    if (source != ElementKind::Claim) {
        return false;
    }
    return target == ElementKind::Claim || target == ElementKind::Strategy || target == ElementKind::Evidence;
}

inline bool context_ok(ElementKind source, ElementKind target)
{
    const bool src = source == ElementKind::Claim || source == ElementKind::Strategy;
    const bool tgt = target == ElementKind::Context || target == ElementKind::Assumption
                     || target == ElementKind::Justification;
    return src && tgt;
}

/// Strongly connected components (Tarjan) of the supportedBy graph that
/// contain a cycle: size > 1, or a self loop.
inline std::vector<std::vector<ElementId>> cyclic_components(const AssuranceCase& ac)
{
    std::map<ElementId, std::vector<ElementId>> adj;
    std::set<ElementId> self_loops;
    for (const auto& e : ac.edges) {
        if (e.kind == EdgeKind::SupportedBy) {
            adj[e.source].push_back(e.target);
            if (e.source == e.target) {
                self_loops.insert(e.source);
            }
        }
    }
    std::map<ElementId, int> index, low;
    std::set<ElementId> on_stack;
    std::vector<ElementId> stack;
    std::vector<std::vector<ElementId>> out;
    int counter = 0;

    std::function<void(const ElementId&)> strong = [&](const ElementId& v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack.insert(v);
        for (const auto& w : adj[v]) {
            if (!index.contains(w)) {
                strong(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack.contains(w)) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<ElementId> comp;
            ElementId w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack.erase(w);
                comp.push_back(w);
            } while (w != v);
            if (comp.size() > 1 || self_loops.contains(v)) {
                std::ranges::sort(comp);
                out.push_back(std::move(comp));
            }
        }
    };
    for (const auto& e : ac.elements) {
        if (!index.contains(e.id)) {
            strong(e.id);
        }
    }
    return out;
}

} // namespace detail

inline void g1_single_root(const AssuranceCase& ac, Diagnostics& out)
{
    std::vector<const Element*> roots;
    for (const auto& e : ac.elements) {
        if (e.is_root && e.kind == ElementKind::Claim) {
            roots.push_back(&e);
        }
    }
    if (roots.empty()) {
        out.push_back(detail::make("G1", Severity::Error, ac.span, "case '" + ac.id + "' has no root claim"));
    } else if (roots.size() > 1) {
        std::string ids;
        std::vector<ElementRef> refs;
        for (const auto* r : roots) {
            ids += (ids.empty() ? "" : ", ") + r->id;
            refs.push_back({ac.id, r->id});
        }
        out.push_back(detail::make("G1", Severity::Error, roots[1]->span,
                                   "case '" + ac.id + "' has " + std::to_string(roots.size()) + " root claims: " + ids,
                                   std::move(refs)));
    }
}

inline void g2_acyclic(const AssuranceCase& ac, Diagnostics& out)
{
    for (const auto& comp : detail::cyclic_components(ac)) {
        std::string ids;
        std::vector<ElementRef> refs;
        const Element* anchor = nullptr;
        for (const auto& id : comp) {
            ids += (ids.empty() ? "" : ", ") + id;
            refs.push_back({ac.id, id});
            const auto* e = ac.find(id);
            if (e && (!anchor || e->span < anchor->span)) {
                anchor = e;
            }
        }
        out.push_back(detail::make("G2", Severity::Error, anchor ? anchor->span : ac.span,
                                   "supportedBy cycle through " + ids, std::move(refs)));
    }
}

inline void g3_g4_edge_kinds(const AssuranceCase& ac, Diagnostics& out)
{
    for (const auto& e : ac.edges) {
        const auto* s = ac.find(e.source);
        const auto* t = ac.find(e.target);
        if (!s || !t) {
            continue; // dangling endpoints are a parse error (P2)
        }
        const bool sb = e.kind == EdgeKind::SupportedBy;
        if (sb ? detail::supports_ok(s->kind, t->kind) : detail::context_ok(s->kind, t->kind)) {
            continue;
        }
        out.push_back(detail::make(sb ? "G3" : "G4", Severity::Error, e.span,
                                   std::string(keyword(s->kind)) + " '" + s->id + "' cannot be " + std::string(keyword(e.kind))
                                       + " " + std::string(keyword(t->kind)) + " '" + t->id + "'",
                                   {{ac.id, s->id}, {ac.id, t->id}}));
    }
}

/// A leaf claim has no supportedBy child that is a claim or strategy; it
/// must be backed by evidence, marked undeveloped, or resolved away.
inline bool is_leaf_claim(const AssuranceCase& ac, const Element& e)
{
    if (e.kind != ElementKind::Claim) {
        return false;
    }
    return std::ranges::none_of(ac.edges, [&](const Edge& edge) {
        if (edge.kind != EdgeKind::SupportedBy || edge.source != e.id) {
            return false;
        }
        const auto* t = ac.find(edge.target);
        return t && (t->kind == ElementKind::Claim || t->kind == ElementKind::Strategy);
    });
}

inline bool has_evidence(const AssuranceCase& ac, const Element& e)
{
    return std::ranges::any_of(ac.edges, [&](const Edge& edge) {
        if (edge.kind != EdgeKind::SupportedBy || edge.source != e.id) {
            return false;
        }
        const auto* t = ac.find(edge.target);
        return t && t->kind == ElementKind::Evidence;
    });
}

inline void g5_leaf_support(const AssuranceCase& ac, Diagnostics& out)
{
    for (const auto& e : ac.elements) {
        if (!is_leaf_claim(ac, e) || e.is_undeveloped || e.away_ref || has_evidence(ac, e)) {
            continue;
        }
        out.push_back(detail::make("G5", Severity::Error, e.span,
                                   "leaf claim '" + e.id + "' has no evidence and is not marked undeveloped",
                                   {{ac.id, e.id}}));
    }
}

inline void g6_reachable(const AssuranceCase& ac, Diagnostics& out)
{
    std::map<ElementId, std::vector<ElementId>> adj;
    for (const auto& e : ac.edges) {
        adj[e.source].push_back(e.target);
    }
    std::set<ElementId> seen;
    std::vector<ElementId> stack;
    for (const auto& e : ac.elements) {
        if (e.is_root && e.kind == ElementKind::Claim) {
            seen.insert(e.id);
            stack.push_back(e.id);
        }
    }
    if (stack.empty()) {
        return; // G1 already reports the missing root
    }
    while (!stack.empty()) {
        auto cur = stack.back();
        stack.pop_back();
        for (const auto& n : adj[cur]) {
            if (seen.insert(n).second) {
                stack.push_back(n);
            }
        }
    }
    for (const auto& e : ac.elements) {
        if (!seen.contains(e.id)) {
            out.push_back(detail::make("G6", Severity::Warning, e.span,
                                       std::string(keyword(e.kind)) + " '" + e.id + "' is not reachable from the root",
                                       {{ac.id, e.id}}));
        }
    }
}

inline void g7_strategy_children(const AssuranceCase& ac, Diagnostics& out)
{
    for (const auto& e : ac.elements) {
        if (e.kind != ElementKind::Strategy) {
            continue;
        }
        const bool any = std::ranges::any_of(ac.edges, [&](const Edge& edge) {
            return edge.kind == EdgeKind::SupportedBy && edge.source == e.id;
        });
        if (!any) {
            out.push_back(detail::make("G7", Severity::Error, e.span, "strategy '" + e.id + "' supports nothing",
                                       {{ac.id, e.id}}));
        }
    }
}

inline void s1_tac_direction(const Bundle& b, Diagnostics& out)
{
    for (const auto& e : b.tac.elements) {
        if (!e.away_ref) {
            continue;
        }
        const auto* target = b.find_case(e.away_ref->case_id);
        if (target && target->kind == CaseKind::Clinical) {
            out.push_back(detail::make("S1", Severity::Error, e.span,
                                       "technological case '" + b.tac.id + "' references clinical case '"
                                           + e.away_ref->case_id + "' from '" + e.id + "'",
                                       {{b.tac.id, e.id}}));
        } else {
            out.push_back(detail::make("S1", Severity::Warning, e.span,
                                       "technological case '" + b.tac.id + "' references '" + e.away_ref->to_string()
                                           + "'; it should be self-contained",
                                       {{b.tac.id, e.id}}));
        }
    }
}

inline void s2_cac_targets(const Bundle& b, Diagnostics& out)
{
    for (const auto& cac : b.cacs) {
        for (const auto& e : cac.elements) {
            if (e.away_ref && e.away_ref->case_id != b.tac.id) {
                out.push_back(detail::make("S2", Severity::Error, e.span,
                                           "away reference '" + e.away_ref->to_string() + "' on '" + e.id
                                               + "' must target the associated technological case '" + b.tac.id + "'",
                                           {{cac.id, e.id}}));
            }
        }
    }
}

inline void s3_documented(const Bundle& b, Diagnostics& out)
{
    for (const auto& cac : b.cacs) {
        for (const auto& e : cac.elements) {
            if (!e.away_ref) {
                continue;
            }
            const bool documented = std::ranges::any_of(cac.edges, [&](const Edge& edge) {
                return edge.kind == EdgeKind::InContextOf && edge.source == e.id;
            });
            if (!documented) {
                out.push_back(detail::make("S3", Severity::Error, e.span,
                                           "away-resolved claim '" + e.id + "' has no context documenting it",
                                           {{cac.id, e.id}}));
            }
        }
    }
}

inline void s4_capabilities(const Bundle& b, const UnitTable& units, Diagnostics& out)
{
    std::vector<Capability> provided;
    for (const auto& c : b.tac.capabilities) {
        if (c.direction == Direction::Provided) {
            provided.push_back(c);
        }
    }
    for (const auto& cac : b.cacs) {
        std::vector<Capability> required;
        for (const auto& c : cac.capabilities) {
            if (c.direction == Direction::Required) {
                required.push_back(c);
            }
        }
        std::vector<MatchResult> results;
        try {
            results = match_capabilities(required, provided, units);
        } catch (const UnitError& err) {
            out.push_back(detail::make("S4", Severity::Error, cac.span, err.what()));
            continue;
        }
        for (const auto& r : results) {
            if (r.status == MatchStatus::Satisfied) {
                continue;
            }
            const auto& c = r.required;
            out.push_back(detail::make("S4", Severity::Error, c.span,
                                       "required capability '" + c.name + "' [" + c.low.to_string() + ", "
                                           + c.high.to_string() + "] " + c.unit + " is "
                                           + std::string(keyword(r.status)) + " against '" + b.tac.id + "'",
                                       {{cac.id, c.name}}));
        }
    }
}

inline void s5_public_targets(const Bundle& b, Diagnostics& out)
{
    for (const auto& cac : b.cacs) {
        for (const auto& e : cac.elements) {
            if (!e.away_ref || e.away_ref->case_id != b.tac.id) {
                continue;
            }
            const auto* t = b.tac.find(e.away_ref->element_id);
            std::string problem;
            if (!t) {
                problem = "does not exist";
            } else if (t->kind != ElementKind::Claim) {
                problem = "is a " + std::string(keyword(t->kind)) + ", not a claim";
            } else if (!t->is_public) {
                problem = "is not public";
            }
            if (!problem.empty()) {
                out.push_back(detail::make("S5", Severity::Error, e.span,
                                           "away reference target '" + e.away_ref->to_string() + "' " + problem,
                                           {{cac.id, e.id}}));
            }
        }
    }
}

inline void s6_association(const Bundle& b, Diagnostics& out)
{
    for (const auto& cac : b.cacs) {
        if (cac.associated_tac != b.tac.id) {
            out.push_back(detail::make("S6", Severity::Error, cac.span,
                                       "clinical case '" + cac.id + "' associates '" + cac.associated_tac.value_or("")
                                           + "' but the bundle's technological case is '" + b.tac.id + "'"));
        }
    }
}

inline void s7_statement_drift(const Bundle& b, Diagnostics& out)
{
    for (const auto& cac : b.cacs) {
        for (const auto& e : cac.elements) {
            if (!e.away_ref || e.away_ref->case_id != b.tac.id) {
                continue;
            }
            const auto* t = b.tac.find(e.away_ref->element_id);
            if (t && t->statement != e.statement) {
                out.push_back(detail::make("S7", Severity::Warning, e.span,
                                           "statement of '" + e.id + "' differs from its target '"
                                               + e.away_ref->to_string() + "'",
                                           {{cac.id, e.id}, {b.tac.id, t->id}}));
            }
        }
    }
}

} // namespace rules

/// Single-case well-formedness rules G1-G7, sorted by position.
inline Diagnostics validate_case(const AssuranceCase& ac)
{
    Diagnostics out;
    rules::g1_single_root(ac, out);
    rules::g2_acyclic(ac, out);
    rules::g3_g4_edge_kinds(ac, out);
    rules::g5_leaf_support(ac, out);
    rules::g6_reachable(ac, out);
    rules::g7_strategy_children(ac, out);
    sort_diagnostics(out);
    return out;
}

/// Cross-case separation rules S1-S7 over a bundle, sorted by position.
inline Diagnostics validate_bundle(const Bundle& b, const UnitTable& units = UnitTable::builtin())
{
    Diagnostics out;
    rules::s1_tac_direction(b, out);
    rules::s2_cac_targets(b, out);
    rules::s3_documented(b, out);
    rules::s4_capabilities(b, units, out);
    rules::s5_public_targets(b, out);
    rules::s6_association(b, out);
    rules::s7_statement_drift(b, out);
    sort_diagnostics(out);
    return out;
}

/// G-rules on every member case followed by the bundle S-rules.
inline Diagnostics validate_all(const Bundle& b, const UnitTable& units = UnitTable::builtin())
{
    Diagnostics out = validate_case(b.tac);
    for (const auto& cac : b.cacs) {
        auto d = validate_case(cac);
        out.insert(out.end(), d.begin(), d.end());
    }
    auto s = validate_bundle(b, units);
    out.insert(out.end(), s.begin(), s.end());
    sort_diagnostics(out);
    return out;
}

} // namespace acs
