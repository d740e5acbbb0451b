#pragma once

#include "acsplit/model.hpp"
#include "acsplit/units.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace acs {

enum class MatchStatus { Satisfied, UnitMismatch, RangeNotCovered, Missing };

constexpr std::string_view keyword(MatchStatus s)
{
    switch (s) {
    case MatchStatus::Satisfied: return "satisfied";
    case MatchStatus::UnitMismatch: return "unit-mismatch";
    case MatchStatus::RangeNotCovered: return "range-not-covered";
    case MatchStatus::Missing: return "missing";
    }
    return "?";
}

struct MatchResult {
    Capability required;
    MatchStatus status = MatchStatus::Missing;
    std::optional<Capability> matched_provider;
};

/// Closed interval in base units.
struct BaseInterval {
    Decimal low;
    Decimal high;

    [[nodiscard]] bool contains(const BaseInterval& other) const { return low <= other.low && other.high <= high; }
};

inline BaseInterval to_base(const Capability& c, const UnitTable& units)
{
    const auto& u = units.require(c.unit);
    return {c.low * u.scale_to_base, c.high * u.scale_to_base};
}

/// Checks each required capability against the provided set, in order.
///
/// Providers are matched by name. With no same-name provider the result is
/// Missing; if none of them shares the required unit's dimension it is
/// UnitMismatch. Otherwise both intervals are converted to base units and
/// the first provider (declaration order) whose closed interval contains the
/// required one satisfies it; failing that, RangeNotCovered. Comparison is
/// exact. Throws UnitError if any capability names a unit missing from
/// `units`.
inline std::vector<MatchResult> match_capabilities(std::span<const Capability> required,
                                                   std::span<const Capability> provided, const UnitTable& units)
{
    for (const auto& c : required) {
        (void)units.require(c.unit);
    }
    for (const auto& c : provided) {
        (void)units.require(c.unit);
    }

    std::vector<MatchResult> out;
    out.reserve(required.size());
    for (const auto& req : required) {
        MatchResult r{req, MatchStatus::Missing, std::nullopt};
        const auto& req_unit = units.require(req.unit);
        bool named = false;
        bool same_dimension = false;
        const auto need = to_base(req, units);
        for (const auto& prov : provided) {
            if (prov.name != req.name) {
                continue;
            }
            named = true;
            if (units.require(prov.unit).dimension != req_unit.dimension) {
                continue;
            }
            same_dimension = true;
            if (to_base(prov, units).contains(need)) {
                r.status = MatchStatus::Satisfied;
                r.matched_provider = prov;
                break;
            }
        }
        if (r.status != MatchStatus::Satisfied) {
            r.status = !named ? MatchStatus::Missing
                              : !same_dimension ? MatchStatus::UnitMismatch : MatchStatus::RangeNotCovered;
        }
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace acs
