#pragma once

#include "acsplit/model.hpp"

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

namespace acs {

enum class Severity { Error, Warning };

constexpr std::string_view keyword(Severity s)
{
    return s == Severity::Error ? "error" : "warning";
}

struct Diagnostic {
    std::string rule_id;
    Severity severity = Severity::Error;
    SourceSpan span;
    std::string message;
    std::vector<ElementRef> elements;

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;

    /// `<file>:<line>:<col>: <severity> <RULEID>: <message>`
    [[nodiscard]] std::string to_line() const
    {
        return span.file + ":" + std::to_string(span.line) + ":" + std::to_string(span.column) + ": "
               + std::string(keyword(severity)) + " " + rule_id + ": " + message;
    }
};

using Diagnostics = std::vector<Diagnostic>;

struct RuleInfo {
    std::string_view id;
    Severity severity;
    std::string_view summary;
};

/// Every rule id the tool can emit. RULES.md mirrors this table.
inline constexpr RuleInfo kRuleCatalog[] = {
    {"P0", Severity::Error, "lexical or syntax error"},
    {"P1", Severity::Error, "duplicate element id within a case"},
    {"P2", Severity::Error, "edge endpoint names no element of the case"},
    {"P3", Severity::Error, "flag not allowed on this element kind, or conflicting flags"},
    {"P4", Severity::Error, "bundle slot loads a case of the wrong kind"},
    {"P5", Severity::Error, "duplicate case id within a bundle"},
    {"P6", Severity::Error, "bundle member file cannot be read"},
    {"P7", Severity::Error, "case-level declaration invalid (association, capability direction, unit, range)"},
    {"P8", Severity::Error, "bundle manifest must name exactly one tac and at least one cac"},
    {"G1", Severity::Error, "exactly one root claim"},
    {"G2", Severity::Error, "supportedBy subgraph must be acyclic"},
    {"G3", Severity::Error, "supportedBy endpoint kinds"},
    {"G4", Severity::Error, "inContextOf endpoint kinds"},
    {"G5", Severity::Error, "leaf claim needs evidence, an undeveloped marker or an away reference"},
    {"G6", Severity::Warning, "element unreachable from the root"},
    {"G7", Severity::Error, "strategy without supportedBy children"},
    {"S1", Severity::Error, "technological case references a clinical case (warning for other targets)"},
    {"S2", Severity::Error, "clinical away reference must target the bundle's technological case"},
    {"S3", Severity::Error, "away-resolved claim needs an inContextOf context"},
    {"S4", Severity::Error, "required capability not satisfied by provided capabilities"},
    {"S5", Severity::Error, "away reference target must be an existing public claim"},
    {"S6", Severity::Error, "clinical case must associate the bundle's technological case"},
    {"S7", Severity::Warning, "away-claim statement differs from its target's statement"},
};

inline bool is_known_rule(std::string_view id)
{
    return std::ranges::any_of(kRuleCatalog, [&](const RuleInfo& r) { return r.id == id; });
}

inline bool has_errors(const Diagnostics& ds)
{
    return std::ranges::any_of(ds, [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

inline std::size_t count_rule(const Diagnostics& ds, std::string_view rule, Severity sev = Severity::Error)
{
    return static_cast<std::size_t>(
        std::ranges::count_if(ds, [&](const Diagnostic& d) { return d.rule_id == rule && d.severity == sev; }));
}

/// Stable sort by (file, line, column, rule id).
inline void sort_diagnostics(Diagnostics& ds)
{
    std::ranges::stable_sort(ds, [](const Diagnostic& a, const Diagnostic& b) {
        return std::tie(a.span.file, a.span.line, a.span.column, a.rule_id)
               < std::tie(b.span.file, b.span.line, b.span.column, b.rule_id);
    });
}

} // namespace acs
