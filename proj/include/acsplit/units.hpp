#pragma once

#include "acsplit/decimal.hpp"
#include "acsplit/model.hpp"

#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace acs {

enum class Dimension { Power, Energy, Time, Frequency, Length, Temperature, Intensity };

inline constexpr Dimension kAllDimensions[] = {Dimension::Power,     Dimension::Energy, Dimension::Time,
                                               Dimension::Frequency, Dimension::Length, Dimension::Temperature,
                                               Dimension::Intensity};

constexpr std::string_view keyword(Dimension d)
{
    switch (d) {
    case Dimension::Power: return "power";
    case Dimension::Energy: return "energy";
    case Dimension::Time: return "time";
    case Dimension::Frequency: return "frequency";
    case Dimension::Length: return "length";
    case Dimension::Temperature: return "temperature";
    case Dimension::Intensity: return "intensity";
    }
    return "?";
}

inline std::optional<Dimension> dimension_from(std::string_view word)
{
    for (auto d : kAllDimensions) {
        if (keyword(d) == word) {
            return d;
        }
    }
    return std::nullopt;
}

/// Raised for unknown unit symbols and malformed unit tables.
class UnitError : public std::runtime_error {
public:
    explicit UnitError(const std::string& what) : std::runtime_error(what) {}
};

struct UnitSymbol {
    std::string symbol;
    Dimension dimension = Dimension::Power;
    Decimal scale_to_base; // value_in_base = value * scale_to_base
};

/// Symbol -> (dimension, scale) table. Conversions never cross dimensions.
class UnitTable {
public:
    UnitTable() = default;

    /// W, mW, kW; J, kJ; s, ms, min; Hz, kHz, MHz; m, mm, cm; degC; W_per_cm2.
    static const UnitTable& builtin()
    {
        static const UnitTable table = [] {
            UnitTable t;
            auto dec = [](std::string_view s) { return *Decimal::parse_scientific(s); };
            t.add({"W", Dimension::Power, dec("1")});
            t.add({"mW", Dimension::Power, dec("0.001")});
            t.add({"kW", Dimension::Power, dec("1000")});
            t.add({"J", Dimension::Energy, dec("1")});
            t.add({"kJ", Dimension::Energy, dec("1000")});
            t.add({"s", Dimension::Time, dec("1")});
            t.add({"ms", Dimension::Time, dec("0.001")});
            t.add({"min", Dimension::Time, dec("60")});
            t.add({"Hz", Dimension::Frequency, dec("1")});
            t.add({"kHz", Dimension::Frequency, dec("1e3")});
            t.add({"MHz", Dimension::Frequency, dec("1e6")});
            t.add({"m", Dimension::Length, dec("1")});
            t.add({"mm", Dimension::Length, dec("0.001")});
            t.add({"cm", Dimension::Length, dec("0.01")});
            t.add({"degC", Dimension::Temperature, dec("1")});
            t.add({"W_per_cm2", Dimension::Intensity, dec("1")});
            return t;
        }();
        return table;
    }

    /// Adds a unit. Re-adding an identical definition is a no-op; any other
    /// redefinition, a non-positive scale, or a second base unit in one
    /// dimension throws UnitError.
    void add(const UnitSymbol& unit)
    {
        if (!is_valid_id(unit.symbol)) {
            throw UnitError("invalid unit symbol '" + unit.symbol + "'");
        }
        if (unit.scale_to_base.sign() <= 0) {
            throw UnitError("unit '" + unit.symbol + "' must have a positive scale");
        }
        if (auto it = m_units.find(unit.symbol); it != m_units.end()) {
            if (it->second.dimension == unit.dimension && it->second.scale_to_base == unit.scale_to_base) {
                return;
            }
            throw UnitError("unit '" + unit.symbol + "' redefined with a different dimension or scale");
        }
        if (unit.scale_to_base == Decimal::from_int(1)) {
            for (const auto& [sym, u] : m_units) {
                if (u.dimension == unit.dimension && u.scale_to_base == Decimal::from_int(1)) {
                    throw UnitError("dimension '" + std::string(keyword(unit.dimension)) + "' already has base unit '"
                                    + sym + "'");
                }
            }
        }
        m_units.emplace(unit.symbol, unit);
    }

    [[nodiscard]] const UnitSymbol* find(std::string_view symbol) const
    {
        auto it = m_units.find(std::string(symbol));
        return it == m_units.end() ? nullptr : &it->second;
    }

    [[nodiscard]] const UnitSymbol& require(std::string_view symbol) const
    {
        if (const auto* u = find(symbol)) {
            return *u;
        }
        throw UnitError("unknown unit symbol '" + std::string(symbol) + "'");
    }

    [[nodiscard]] bool contains(std::string_view symbol) const { return find(symbol) != nullptr; }

    /// Units sharing `dimension`, ordered by symbol.
    [[nodiscard]] std::vector<UnitSymbol> units_of(Dimension dimension) const
    {
        std::vector<UnitSymbol> out;
        for (const auto& [sym, u] : m_units) {
            if (u.dimension == dimension) {
                out.push_back(u);
            }
        }
        return out;
    }

    [[nodiscard]] std::size_t size() const noexcept { return m_units.size(); }

    /// Reads `symbol dimension scale` lines ('#' or '//' start a comment) into
    /// this table. Throws UnitError with the offending line number.
    void load(std::string_view text)
    {
        std::istringstream in{std::string(text)};
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            for (std::string_view marker : {"#", "//"}) {
                if (auto pos = line.find(marker); pos != std::string::npos) {
                    line.erase(pos);
                }
            }
            std::istringstream fields(line);
            std::string symbol, dim, scale, extra;
            if (!(fields >> symbol)) {
                continue;
            }
            auto where = [&] { return "units line " + std::to_string(line_no) + ": "; };
            if (!(fields >> dim >> scale) || (fields >> extra)) {
                throw UnitError(where() + "expected 'symbol dimension scale'");
            }
            auto d = dimension_from(dim);
            if (!d) {
                throw UnitError(where() + "unknown dimension '" + dim + "'");
            }
            auto s = Decimal::parse_scientific(scale);
            if (!s) {
                throw UnitError(where() + "malformed scale '" + scale + "'");
            }
            try {
                add({symbol, *d, *s});
            } catch (const UnitError& e) {
                throw UnitError(where() + e.what());
            }
        }
    }

private:
    std::map<std::string, UnitSymbol, std::less<>> m_units;
};

} // namespace acs
