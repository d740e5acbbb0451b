#pragma once

#include "acsplit/link.hpp"
#include "acsplit/model.hpp"
#include "acsplit/validate.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace acs {

struct ImpactReport {
    std::set<ElementRef> changed;
    /// One entry per case of the bundle; unaffected cases map to an empty set.
    std::map<CaseId, std::set<ElementId>> affected;
    std::set<CaseId> affected_cacs;

    [[nodiscard]] bool is_affected(const ElementRef& r) const
    {
        auto it = affected.find(r.case_id);
        return it != affected.end() && it->second.contains(r.element_id);
    }
};

/// Everything a change calls into question. Propagation runs upward only:
/// from an element to whatever it supports or contextualizes (reverse
/// supportedBy and inContextOf), and from a TAC target to every clinical
/// away-claim resolved to it. Throws LookupError for unknown ids.
inline ImpactReport impact(const ResolvedBundle& resolved, const std::set<ElementRef>& changed)
{
    const auto& bundle = resolved.bundle;
    ImpactReport report;
    report.changed = changed;

    std::map<CaseId, const AssuranceCase*> cases{{bundle.tac.id, &bundle.tac}};
    for (const auto& cac : bundle.cacs) {
        cases.emplace(cac.id, &cac);
    }
    for (const auto& [id, ac] : cases) {
        report.affected[id];
    }

    std::map<ElementRef, std::vector<ElementRef>> up;
    for (const auto& [id, ac] : cases) {
        for (const auto& e : ac->edges) {
            up[{id, e.target}].push_back({id, e.source});
        }
    }
    for (const auto& [away, target] : resolved.resolutions) {
        up[target].push_back(away);
    }

    std::vector<ElementRef> work;
    for (const auto& r : changed) {
        auto it = cases.find(r.case_id);
        if (it == cases.end()) {
            throw LookupError("unknown case '" + r.case_id + "'");
        }
        require_element(*it->second, r.element_id);
        if (report.affected[r.case_id].insert(r.element_id).second) {
            work.push_back(r);
        }
    }
    while (!work.empty()) {
        auto cur = work.back();
        work.pop_back();
        for (const auto& p : up[cur]) {
            if (report.affected[p.case_id].insert(p.element_id).second) {
                work.push_back(p);
            }
        }
    }
    for (const auto& cac : bundle.cacs) {
        if (!report.affected[cac.id].empty()) {
            report.affected_cacs.insert(cac.id);
        }
    }
    return report;
}

struct CaseMetrics {
    CaseId id;
    CaseKind kind = CaseKind::Monolithic;
    std::map<ElementKind, int> elements;
    std::map<EdgeKind, int> edges;
    std::map<ConcernKind, int> concerns;
    int element_total = 0;
    int edge_total = 0;
    int depth = 0;
    int undeveloped = 0;
    int leaf_claims = 0;
    int evidenced_leaf_claims = 0;

    /// Fraction of leaf claims backed by evidence; 1 when there are none.
    [[nodiscard]] double evidence_coverage() const
    {
        return leaf_claims == 0 ? 1.0 : static_cast<double>(evidenced_leaf_claims) / leaf_claims;
    }
};

struct Metrics {
    std::vector<CaseMetrics> cases;
    /// Present for bundles: sums over `cases`, depth as the maximum.
    std::optional<CaseMetrics> totals;
    std::optional<int> cross_links;
};

/// Longest supportedBy path, counted in elements. Edges closing a cycle are
/// ignored so the value stays finite on malformed input.
inline int supported_by_depth(const AssuranceCase& ac)
{
    std::map<ElementId, std::vector<ElementId>> adj;
    for (const auto& e : ac.edges) {
        if (e.kind == EdgeKind::SupportedBy) {
            adj[e.source].push_back(e.target);
        }
    }
    std::map<ElementId, int> memo;
    std::set<ElementId> active;
    std::function<int(const ElementId&)> longest = [&](const ElementId& id) -> int {
        if (auto it = memo.find(id); it != memo.end()) {
            return it->second;
        }
        if (!active.insert(id).second) {
            return 0;
        }
        int best = 0;
        for (const auto& c : adj[id]) {
            best = std::max(best, longest(c));
        }
        active.erase(id);
        return memo[id] = best + 1;
    };
    int depth = 0;
    for (const auto& e : ac.elements) {
        depth = std::max(depth, longest(e.id));
    }
    return depth;
}

inline CaseMetrics case_metrics(const AssuranceCase& ac)
{
    CaseMetrics m;
    m.id = ac.id;
    m.kind = ac.kind;
    for (auto k : kAllElementKinds) {
        m.elements[k] = 0;
    }
    for (auto k : kAllEdgeKinds) {
        m.edges[k] = 0;
    }
    m.concerns[ConcernKind::Safety] = 0;
    m.concerns[ConcernKind::Effectiveness] = 0;
    for (const auto& e : ac.elements) {
        ++m.elements[e.kind];
        ++m.element_total;
        if (e.is_undeveloped) {
            ++m.undeveloped;
        }
        if (e.concern) {
            ++m.concerns[*e.concern];
        }
        if (rules::is_leaf_claim(ac, e)) {
            ++m.leaf_claims;
            if (rules::has_evidence(ac, e)) {
                ++m.evidenced_leaf_claims;
            }
        }
    }
    for (const auto& e : ac.edges) {
        ++m.edges[e.kind];
        ++m.edge_total;
    }
    m.depth = supported_by_depth(ac);
    return m;
}

inline Metrics metrics(const AssuranceCase& ac)
{
    return Metrics{{case_metrics(ac)}, std::nullopt, std::nullopt};
}

/// Per-case metrics for the TAC then each CAC, bundle totals, and the
/// number of clinical away references (equal to the resolution count once
/// the bundle resolves).
inline Metrics metrics(const Bundle& bundle)
{
    Metrics out;
    out.cases.push_back(case_metrics(bundle.tac));
    for (const auto& cac : bundle.cacs) {
        out.cases.push_back(case_metrics(cac));
    }
    CaseMetrics total;
    total.id = bundle.id;
    total.kind = CaseKind::Monolithic;
    for (const auto& c : out.cases) {
        for (const auto& [k, n] : c.elements) total.elements[k] += n;
        for (const auto& [k, n] : c.edges) total.edges[k] += n;
        for (const auto& [k, n] : c.concerns) total.concerns[k] += n;
        total.element_total += c.element_total;
        total.edge_total += c.edge_total;
        total.undeveloped += c.undeveloped;
        total.leaf_claims += c.leaf_claims;
        total.evidenced_leaf_claims += c.evidenced_leaf_claims;
        total.depth = std::max(total.depth, c.depth);
    }
    out.totals = total;
    int links = 0;
    for (const auto& cac : bundle.cacs) {
        links += static_cast<int>(std::ranges::count_if(cac.elements, [](const Element& e) { return e.away_ref.has_value(); }));
    }
    out.cross_links = links;
    return out;
}

inline Metrics metrics(const ResolvedBundle& resolved)
{
    auto m = metrics(resolved.bundle);
    m.cross_links = static_cast<int>(resolved.resolutions.size());
    return m;
}

} // namespace acs
