#include "support.hpp"

#include <gtest/gtest.h>

using namespace acs;
using namespace acs::testing;

namespace {

Capability cap(std::string name, Direction dir, std::string unit, std::string_view lo, std::string_view hi)
{
    return Capability{std::move(name), dir, std::move(unit), *Decimal::parse(lo), *Decimal::parse(hi), {}};
}

Capability req(std::string name, std::string unit, std::string_view lo, std::string_view hi)
{
    return cap(std::move(name), Direction::Required, std::move(unit), lo, hi);
}

Capability prov(std::string name, std::string unit, std::string_view lo, std::string_view hi)
{
    return cap(std::move(name), Direction::Provided, std::move(unit), lo, hi);
}

MatchStatus status_of(const Capability& r, const std::vector<Capability>& provided)
{
    const std::vector<Capability> required{r};
    return match_capabilities(required, provided, UnitTable::builtin()).at(0).status;
}

struct Row {
    Capability required;
    std::vector<Capability> provided;
    MatchStatus expected;
};

// Statuses below were computed by hand.
std::vector<Row> matrix()
{
    using S = MatchStatus;
    return {
        {req("p", "W", "60", "250"), {prov("p", "W", "0", "300")}, S::Satisfied},
        {req("p", "W", "0", "300"), {prov("p", "W", "0", "300")}, S::Satisfied},
        {req("p", "W", "0", "300.001"), {prov("p", "W", "0", "300")}, S::RangeNotCovered},
        {req("p", "W", "-1", "10"), {prov("p", "W", "0", "300")}, S::RangeNotCovered},
        {req("p", "mW", "500", "250000"), {prov("p", "W", "0.5", "250")}, S::Satisfied},
        {req("p", "mW", "499.999", "1000"), {prov("p", "W", "0.5", "250")}, S::RangeNotCovered},
        {req("p", "W", "0.001", "0.002"), {prov("p", "mW", "1", "2")}, S::Satisfied},
        {req("p", "kW", "0.1", "0.3"), {prov("p", "W", "0", "300")}, S::Satisfied},
        {req("p", "kW", "0.1", "0.31"), {prov("p", "W", "0", "300")}, S::RangeNotCovered},
        {req("f", "kHz", "1000", "1200"), {prov("f", "MHz", "0.95", "1.35")}, S::Satisfied},
        {req("f", "kHz", "940", "1200"), {prov("f", "MHz", "0.95", "1.35")}, S::RangeNotCovered},
        {req("f", "MHz", "1.35", "1.35"), {prov("f", "kHz", "950", "1350")}, S::Satisfied},
        {req("f", "Hz", "950000", "1350000"), {prov("f", "MHz", "0.95", "1.35")}, S::Satisfied},
        {req("f", "Hz", "950000", "1350001"), {prov("f", "MHz", "0.95", "1.35")}, S::RangeNotCovered},
        {req("t", "ms", "10000", "40000"), {prov("t", "s", "1", "60")}, S::Satisfied},
        {req("t", "ms", "999", "40000"), {prov("t", "s", "1", "60")}, S::RangeNotCovered},
        {req("t", "min", "0.5", "1"), {prov("t", "s", "1", "60")}, S::Satisfied},
        {req("t", "s", "0.0005", "0.001"), {prov("t", "ms", "0.5", "1")}, S::Satisfied},
        {req("t", "s", "10", "40"), {prov("t", "W", "0", "1000")}, S::UnitMismatch},
        {req("t", "s", "10", "40"), {prov("t", "Hz", "10", "40")}, S::UnitMismatch},
        {req("d", "mm", "0", "1.5"), {prov("d", "cm", "0", "0.2")}, S::Satisfied},
        {req("d", "m", "0", "0.0021"), {prov("d", "mm", "0", "2")}, S::RangeNotCovered},
        {req("e", "kJ", "1", "2"), {prov("p", "W", "0", "300")}, S::Missing},
        {req("e", "kJ", "1", "2"), {}, S::Missing},
        {req("p", "W", "60", "250"), {prov("p", "s", "0", "300"), prov("p", "W", "0", "100")}, S::RangeNotCovered},
        {req("p", "W", "60", "250"), {prov("p", "W", "0", "100"), prov("p", "kW", "0", "1")}, S::Satisfied},
        {req("x", "degC", "-10", "40"), {prov("x", "degC", "-20", "50")}, S::Satisfied},
        {req("x", "degC", "-30", "40"), {prov("x", "degC", "-20", "50")}, S::RangeNotCovered},
        {req("i", "W_per_cm2", "0.1", "0.1"), {prov("i", "W_per_cm2", "0.1", "0.1")}, S::Satisfied},
    };
}

Capability random_capability(Rng& rng, Direction dir, const std::string& unit)
{
    Capability c;
    c.name = "c";
    c.direction = dir;
    c.unit = unit;
    auto a = random_decimal(rng, 100000, -3, 3);
    auto b = random_decimal(rng, 100000, -3, 3);
    c.low = std::min(a, b);
    c.high = std::max(a, b);
    return c;
}

const std::vector<std::string>& all_units()
{
    static const std::vector<std::string> units{"W", "mW", "kW", "J", "kJ", "s", "ms", "min", "Hz", "kHz",
                                                "MHz", "m", "mm", "cm", "degC", "W_per_cm2"};
    return units;
}

} // namespace

TEST(CapabilityMatch, HandComputedMatrix)
{
    const auto rows = matrix();
    ASSERT_GE(rows.size(), 20u);
    std::set<MatchStatus> covered;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(status_of(rows[i].required, rows[i].provided), rows[i].expected)
            << "row " << i << ": expected " << keyword(rows[i].expected);
        covered.insert(rows[i].expected);
    }
    EXPECT_EQ(covered.size(), 4u);
}

TEST(CapabilityMatch, ReportsMatchedProvider)
{
    const std::vector<Capability> required{req("p", "W", "60", "250")};
    const std::vector<Capability> provided{prov("p", "W", "0", "100"), prov("p", "kW", "0", "1")};
    const auto r = match_capabilities(required, provided, UnitTable::builtin());
    ASSERT_EQ(r.size(), 1u);
    ASSERT_TRUE(r[0].matched_provider);
    EXPECT_EQ(r[0].matched_provider->unit, "kW");
}

TEST(CapabilityMatch, UnknownUnitThrows)
{
    const std::vector<Capability> required{req("p", "furlong", "1", "2")};
    EXPECT_THROW((void)match_capabilities(required, {}, UnitTable::builtin()), UnitError);
}

TEST(CapabilityMatch, CorpusBundleIsSatisfied)
{
    const auto b = load_bundle("bundle_mrgfus.acb");
    const auto r = match_capabilities(b.cacs[0].capabilities, b.tac.capabilities, UnitTable::builtin());
    ASSERT_EQ(r.size(), 4u);
    for (const auto& m : r) {
        EXPECT_EQ(m.status, MatchStatus::Satisfied) << m.required.name;
    }
}

TEST(CapabilityProperties, Reflexivity)
{
    Rng rng(101);
    for (int i = 0; i < 1000; ++i) {
        const auto& unit = pick(rng, all_units());
        auto c = random_capability(rng, Direction::Required, unit);
        auto p = c;
        p.direction = Direction::Provided;
        EXPECT_EQ(status_of(c, {p}), MatchStatus::Satisfied);
    }
}

TEST(CapabilityProperties, ContainmentMonotonicity)
{
    Rng rng(102);
    int satisfied = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto& unit = pick(rng, all_units());
        const auto r = random_capability(rng, Direction::Required, unit);
        const auto p = random_capability(rng, Direction::Provided, unit);
        const auto before = status_of(r, {p});
        ASSERT_NE(before, MatchStatus::Missing);
        ASSERT_NE(before, MatchStatus::UnitMismatch);

        // Shrinking the requirement or widening the provision never breaks a match.
        auto narrower = r;
        auto mid = random_decimal(rng, 100000, -3, 3);
        if (r.low <= mid && mid <= r.high) {
            (chance(rng, 0.5) ? narrower.low : narrower.high) = mid;
        }
        auto wider = p;
        wider.low = std::min(p.low, random_decimal(rng, 100000, -3, 3));
        wider.high = std::max(p.high, random_decimal(rng, 100000, -3, 3));
        if (before == MatchStatus::Satisfied) {
            ++satisfied;
            EXPECT_EQ(status_of(narrower, {p}), MatchStatus::Satisfied);
            EXPECT_EQ(status_of(r, {wider}), MatchStatus::Satisfied);
        }
        // Conversely: a failing requirement stays failing when widened.
        if (before == MatchStatus::RangeNotCovered) {
            auto broader = r;
            broader.low = std::min(r.low, mid);
            broader.high = std::max(r.high, mid);
            EXPECT_EQ(status_of(broader, {p}), MatchStatus::RangeNotCovered);
        }
    }
    EXPECT_GT(satisfied, 50);
}

TEST(CapabilityProperties, UnitScaleInvariance)
{
    Rng rng(103);
    const auto& units = UnitTable::builtin();
    int checked = 0;
    for (int i = 0; checked < 1000; ++i) {
        const auto dim = pick(rng, std::vector<Dimension>{Dimension::Power, Dimension::Energy, Dimension::Time,
                                                          Dimension::Frequency, Dimension::Length});
        const auto family = units.units_of(dim);
        const auto& u = pick(rng, family);
        const auto r = random_capability(rng, Direction::Required, u.symbol);
        const auto p = random_capability(rng, Direction::Provided, pick(rng, family).symbol);
        const auto before = status_of(r, {p});

        // Restate the requirement in another unit of the same dimension.
        const auto& v = pick(rng, family);
        auto converted = r;
        converted.unit = v.symbol;
        const auto factor = u.scale_to_base.divided_by(v.scale_to_base);
        if (!factor) {
            continue; // e.g. ms -> min has no exact decimal factor
        }
        ++checked;
        converted.low = r.low * *factor;
        converted.high = r.high * *factor;
        EXPECT_EQ(status_of(converted, {p}), before) << r.low.to_string() << " " << u.symbol << " -> " << v.symbol;
    }
    EXPECT_EQ(checked, 1000);
}
