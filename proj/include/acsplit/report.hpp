#pragma once

#include "acsplit/analyze.hpp"
#include "acsplit/capability.hpp"
#include "acsplit/diagnostic.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace acs {

/// Capability match results of one clinical case.
struct CapabilityReport {
    CaseId cac;
    std::vector<MatchResult> results;
};

struct ReportInput {
    std::optional<Diagnostics> diagnostics;
    std::optional<std::vector<CapabilityReport>> capabilities;
    std::optional<Metrics> metrics;
    std::optional<ImpactReport> impact;
};

namespace report_detail {

using Json = nlohmann::ordered_json;

inline Json ref_json(const ElementRef& r)
{
    return Json{{"case", r.case_id}, {"element", r.element_id}};
}

/// JSON number spelled like the decimal's shortest text.
inline Json number_json(const Decimal& d)
{
    return Json::parse(d.to_string());
}

inline Json capability_json(const Capability& c)
{
    return Json{{"name", c.name},
                {"direction", keyword(c.direction)},
                {"unit", c.unit},
                {"low", number_json(c.low)},
                {"high", number_json(c.high)}};
}

inline Json case_metrics_json(const CaseMetrics& m)
{
    Json elements = Json::object();
    for (const auto& [k, n] : m.elements) {
        elements[std::string(keyword(k))] = n;
    }
    Json edges = Json::object();
    for (const auto& [k, n] : m.edges) {
        edges[std::string(keyword(k))] = n;
    }
    Json concerns = Json::object();
    for (const auto& [k, n] : m.concerns) {
        concerns[std::string(keyword(k))] = n;
    }
    return Json{{"id", m.id},
                {"kind", keyword(m.kind)},
                {"elementTotal", m.element_total},
                {"edgeTotal", m.edge_total},
                {"elements", elements},
                {"edges", edges},
                {"depth", m.depth},
                {"undeveloped", m.undeveloped},
                {"leafClaims", m.leaf_claims},
                {"evidenceCoverage", m.evidence_coverage()},
                {"concerns", concerns}};
}

} // namespace report_detail

/// One JSON document with keys `diagnostics`, `capabilities`, `metrics`,
/// `impact` in that order; absent inputs are omitted. Layout in FORMATS.md.
inline std::string report_json(const ReportInput& in)
{
    using report_detail::Json;
    Json doc = Json::object();
    if (in.diagnostics) {
        Json arr = Json::array();
        for (const auto& d : *in.diagnostics) {
            Json refs = Json::array();
            for (const auto& r : d.elements) {
                refs.push_back(report_detail::ref_json(r));
            }
            arr.push_back(Json{{"ruleId", d.rule_id},
                               {"severity", keyword(d.severity)},
                               {"file", d.span.file},
                               {"line", d.span.line},
                               {"column", d.span.column},
                               {"length", d.span.length},
                               {"message", d.message},
                               {"elements", refs}});
        }
        doc["diagnostics"] = arr;
    }
    if (in.capabilities) {
        Json arr = Json::array();
        for (const auto& rep : *in.capabilities) {
            for (const auto& r : rep.results) {
                arr.push_back(Json{{"case", rep.cac},
                                   {"required", report_detail::capability_json(r.required)},
                                   {"status", keyword(r.status)},
                                   {"provider", r.matched_provider ? report_detail::capability_json(*r.matched_provider)
                                                                   : Json(nullptr)}});
            }
        }
        doc["capabilities"] = arr;
    }
    if (in.metrics) {
        Json m = Json::object();
        Json cases = Json::array();
        for (const auto& c : in.metrics->cases) {
            cases.push_back(report_detail::case_metrics_json(c));
        }
        m["cases"] = cases;
        if (in.metrics->totals) {
            auto totals = report_detail::case_metrics_json(*in.metrics->totals);
            totals["kind"] = "bundle";
            m["totals"] = totals;
        }
        if (in.metrics->cross_links) {
            m["crossLinks"] = *in.metrics->cross_links;
        }
        doc["metrics"] = m;
    }
    if (in.impact) {
        Json changed = Json::array();
        for (const auto& r : in.impact->changed) {
            changed.push_back(report_detail::ref_json(r));
        }
        Json affected = Json::object();
        for (const auto& [c, ids] : in.impact->affected) {
            affected[c] = Json(std::vector<std::string>(ids.begin(), ids.end()));
        }
        doc["impact"] = Json{{"changed", changed},
                             {"affected", affected},
                             {"affectedCacs", std::vector<std::string>(in.impact->affected_cacs.begin(),
                                                                       in.impact->affected_cacs.end())}};
    }
    return doc.dump(2) + "\n";
}

} // namespace acs
