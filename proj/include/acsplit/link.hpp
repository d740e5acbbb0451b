#pragma once

#include "acsplit/diagnostic.hpp"
#include "acsplit/model.hpp"
#include "acsplit/validate.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace acs {

/// A bundle whose away references all resolve to public TAC claims.
struct ResolvedBundle {
    Bundle bundle;
    /// (cac, away-claim) -> (tac, target claim)
    std::map<ElementRef, ElementRef> resolutions;
};

struct LinkResult {
    std::optional<ResolvedBundle> resolved;
    Diagnostics diagnostics;
};

/// Resolves every clinical away reference against the technological case.
/// Succeeds iff S1, S2 and S5 report no errors; the diagnostics come from the
/// same rule implementations `validate_bundle` uses.
inline LinkResult resolve_links(const Bundle& bundle)
{
    LinkResult result;
    rules::s1_tac_direction(bundle, result.diagnostics);
    rules::s2_cac_targets(bundle, result.diagnostics);
    rules::s5_public_targets(bundle, result.diagnostics);
    sort_diagnostics(result.diagnostics);
    if (has_errors(result.diagnostics)) {
        return result;
    }
    ResolvedBundle rb{bundle, {}};
    for (const auto& cac : bundle.cacs) {
        for (const auto& e : cac.elements) {
            if (e.away_ref) {
                rb.resolutions.emplace(ElementRef{cac.id, e.id}, *e.away_ref);
            }
        }
    }
    result.resolved = std::move(rb);
    return result;
}

/// Id given to the n-th copy (1-based) of TAC element `id` in an inlined case.
inline std::string inlined_id(const CaseId& tac, const ElementId& id, int copy)
{
    std::string out = tac + "__" + id;
    if (copy > 1) {
        out += "__" + std::to_string(copy);
    }
    return out;
}

/// The target plus everything reachable from it over either edge kind, in
/// the TAC's declaration order.
inline std::vector<ElementId> subtree(const AssuranceCase& ac, const ElementId& root)
{
    require_element(ac, root);
    std::map<ElementId, std::vector<ElementId>> adj;
    for (const auto& e : ac.edges) {
        adj[e.source].push_back(e.target);
    }
    std::set<ElementId> seen{root};
    std::vector<ElementId> stack{root};
    while (!stack.empty()) {
        auto cur = stack.back();
        stack.pop_back();
        for (const auto& n : adj[cur]) {
            if (seen.insert(n).second) {
                stack.push_back(n);
            }
        }
    }
    std::vector<ElementId> out;
    for (const auto& e : ac.elements) {
        if (seen.contains(e.id)) {
            out.push_back(e.id);
        }
    }
    return out;
}

/// Builds the monolithic view of one clinical case: each away-resolved claim
/// loses its away reference and undeveloped marker and gains a supportedBy
/// edge to a copy of its target's TAC subtree. Copies are ids prefixed
/// `<tacId>__`; a second copy of the same element gets a `__2` suffix, and so
/// on. Capabilities and the association are dropped (a monolithic case
/// carries neither).
inline AssuranceCase inline_bundle(const ResolvedBundle& resolved, const CaseId& cac_id)
{
    const auto& bundle = resolved.bundle;
    auto it = std::ranges::find(bundle.cacs, cac_id, &AssuranceCase::id);
    if (it == bundle.cacs.end()) {
        throw LookupError("unknown clinical case '" + cac_id + "' in bundle '" + bundle.id + "'");
    }
    const AssuranceCase& cac = *it;
    const AssuranceCase& tac = bundle.tac;

    AssuranceCase out = cac;
    out.id = cac.id + "-monolithic";
    out.kind = CaseKind::Monolithic;
    out.associated_tac.reset();
    out.capabilities.clear();

    std::set<ElementId> used;
    for (const auto& e : out.elements) {
        used.insert(e.id);
    }

    std::vector<Element> extra_elements;
    std::vector<Edge> extra_edges;
    for (auto& claim : out.elements) {
        auto res = resolved.resolutions.find(ElementRef{cac.id, claim.id});
        if (res == resolved.resolutions.end()) {
            continue;
        }
        const auto& target = res->second.element_id;
        const auto members = subtree(tac, target);

        int copy = 1;
        auto free = [&](int c) {
            return std::ranges::none_of(members, [&](const ElementId& m) { return used.contains(inlined_id(tac.id, m, c)); });
        };
        while (!free(copy)) {
            ++copy;
        }
        std::map<ElementId, ElementId> rename;
        for (const auto& m : members) {
            rename[m] = inlined_id(tac.id, m, copy);
            used.insert(rename[m]);
        }

        for (const auto& m : members) {
            Element e = *tac.find(m);
            e.id = rename[m];
            e.is_root = false;
            e.away_ref.reset();
            extra_elements.push_back(std::move(e));
        }
        extra_edges.push_back(Edge{claim.id, rename[target], EdgeKind::SupportedBy, claim.span});
        for (const auto& edge : tac.edges) {
            if (rename.contains(edge.source) && rename.contains(edge.target)) {
                extra_edges.push_back(Edge{rename[edge.source], rename[edge.target], edge.kind, edge.span});
            }
        }
        claim.away_ref.reset();
        claim.is_undeveloped = false;
    }
    out.elements.insert(out.elements.end(), extra_elements.begin(), extra_elements.end());
    out.edges.insert(out.edges.end(), extra_edges.begin(), extra_edges.end());
    return out;
}

/// Relabels elements `N1, N2, ...` by a traversal that depends only on
/// structure and content, and renames the case to `case_id`. Two cases that
/// differ only in element ids and declaration order normalize to the same
/// canonical text.
///
/// Traversal: roots first, then depth-first preorder; children are visited
/// supportedBy before inContextOf and, within a kind, by the signature of
/// their subtree (kind, statement, flags, children's signatures). Elements
/// left unvisited are started from in signature order.
inline AssuranceCase normalize_ids(const AssuranceCase& ac, const CaseId& case_id = "normalized")
{
    std::map<ElementId, std::vector<std::pair<EdgeKind, ElementId>>> adj;
    for (const auto& e : ac.edges) {
        adj[e.source].emplace_back(e.kind, e.target);
    }
    std::map<ElementId, std::string> memo;
    std::set<ElementId> active;
    std::function<std::string(const ElementId&)> signature = [&](const ElementId& id) -> std::string {
        if (auto it = memo.find(id); it != memo.end()) {
            return it->second;
        }
        if (!active.insert(id).second) {
            return "<cycle>";
        }
        const auto* e = ac.find(id);
        std::string sig = std::string(keyword(e->kind)) + " " + quote(e->statement) + " " + flag_text(*e) + " (";
        std::vector<std::string> parts;
        for (const auto& [kind, child] : adj[id]) {
            parts.push_back(std::string(keyword(kind)) + ":" + signature(child));
        }
        std::ranges::sort(parts);
        for (const auto& p : parts) {
            sig += p + ";";
        }
        sig += ")";
        active.erase(id);
        memo[id] = sig;
        return sig;
    };

    std::map<ElementId, std::string> label;
    int next = 1;
    std::function<void(const ElementId&)> visit = [&](const ElementId& id) {
        if (label.contains(id)) {
            return;
        }
        label[id] = "N" + std::to_string(next++);
        auto kids = adj[id];
        std::ranges::stable_sort(kids, [&](const auto& a, const auto& b) {
            if (a.first != b.first) {
                return a.first < b.first;
            }
            return signature(a.second) < signature(b.second);
        });
        for (const auto& [kind, child] : kids) {
            visit(child);
        }
    };

    auto by_signature = [&](std::vector<ElementId> ids) {
        std::ranges::stable_sort(ids, [&](const auto& a, const auto& b) { return signature(a) < signature(b); });
        return ids;
    };
    std::vector<ElementId> roots, rest;
    for (const auto& e : ac.elements) {
        (e.is_root ? roots : rest).push_back(e.id);
    }
    for (const auto& id : by_signature(roots)) {
        visit(id);
    }
    for (const auto& id : by_signature(rest)) {
        visit(id);
    }

    AssuranceCase out = ac;
    out.id = case_id;
    for (auto& e : out.elements) {
        e.id = label[e.id];
    }
    for (auto& e : out.edges) {
        e.source = label[e.source];
        e.target = label[e.target];
    }
    return out;
}

} // namespace acs
