#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace acs {

/// Exact base-10 number `mantissa * 10^exponent`.
///
/// Values are kept normalized (no trailing zero digits in the mantissa, zero
/// has exponent 0), so structural equality is numeric equality. Arithmetic
/// that would leave the 64-bit mantissa range throws std::overflow_error
/// rather than rounding.
class Decimal {
public:
    constexpr Decimal() = default;

    Decimal(std::int64_t mantissa, std::int32_t exponent) : m_mantissa(mantissa), m_exponent(exponent)
    {
        normalize();
    }

    static Decimal from_int(std::int64_t value) { return Decimal(value, 0); }

    /// Plain decimal literal: `-?digits(.digits)?`. This is the only numeric
    /// form the case DSL accepts.
    static std::optional<Decimal> parse(std::string_view text)
    {
        return parse_impl(text, false);
    }

    /// Like parse() but also accepts an `e[+-]digits` exponent suffix (units files).
    static std::optional<Decimal> parse_scientific(std::string_view text)
    {
        return parse_impl(text, true);
    }

    [[nodiscard]] std::int64_t mantissa() const noexcept { return m_mantissa; }
    [[nodiscard]] std::int32_t exponent() const noexcept { return m_exponent; }
    [[nodiscard]] bool is_zero() const noexcept { return m_mantissa == 0; }
    [[nodiscard]] int sign() const noexcept { return (m_mantissa > 0) - (m_mantissa < 0); }

    friend bool operator==(const Decimal&, const Decimal&) = default;

    friend std::strong_ordering operator<=>(const Decimal& a, const Decimal& b)
    {
        if (a.sign() != b.sign()) {
            return a.sign() <=> b.sign();
        }
        if (a.is_zero()) {
            return std::strong_ordering::equal;
        }
        // Same sign, both non-zero: compare magnitudes via digit counts first.
        const auto mag = compare_magnitude(a, b);
        return a.sign() > 0 ? mag : 0 <=> mag;
    }

    friend Decimal operator*(const Decimal& a, const Decimal& b)
    {
        const __int128 product = static_cast<__int128>(a.m_mantissa) * b.m_mantissa;
        return from_wide(product, static_cast<std::int64_t>(a.m_exponent) + b.m_exponent);
    }

    friend Decimal operator-(const Decimal& a) { return Decimal(-a.m_mantissa, a.m_exponent); }

    /// Exact quotient, or nullopt when it has no terminating decimal expansion.
    [[nodiscard]] std::optional<Decimal> divided_by(const Decimal& divisor) const
    {
        if (divisor.is_zero()) {
            throw std::domain_error("decimal division by zero");
        }
        if (is_zero()) {
            return Decimal{};
        }
        std::int64_t num = m_mantissa;
        std::int64_t den = divisor.m_mantissa;
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const std::int64_t g = std::gcd(num, den);
        num /= g;
        den /= g;
        int twos = 0;
        int fives = 0;
        while (den % 2 == 0) {
            den /= 2;
            ++twos;
        }
        while (den % 5 == 0) {
            den /= 5;
            ++fives;
        }
        if (den != 1) {
            return std::nullopt;
        }
        // num / (2^twos * 5^fives) = num * 2^(k-twos) * 5^(k-fives) / 10^k
        const int k = std::max(twos, fives);
        __int128 wide = num;
        for (int i = twos; i < k; ++i) {
            wide *= 2;
        }
        for (int i = fives; i < k; ++i) {
            wide *= 5;
        }
        return from_wide(wide, static_cast<std::int64_t>(m_exponent) - divisor.m_exponent - k);
    }

    /// Shortest plain decimal text, e.g. `300000`, `0.5`, `-1.25`.
    [[nodiscard]] std::string to_string() const
    {
        if (m_mantissa == 0) {
            return "0";
        }
        std::string digits = std::to_string(magnitude(m_mantissa));
        std::string out = m_mantissa < 0 ? "-" : "";
        if (m_exponent >= 0) {
            out += digits;
            out.append(static_cast<std::size_t>(m_exponent), '0');
            return out;
        }
        const auto frac = static_cast<std::size_t>(-static_cast<std::int64_t>(m_exponent));
        if (digits.size() <= frac) {
            out += "0.";
            out.append(frac - digits.size(), '0');
            out += digits;
        } else {
            out += digits.substr(0, digits.size() - frac);
            out += '.';
            out += digits.substr(digits.size() - frac);
        }
        return out;
    }

    /// Nearest double; the decimal text round-trips through it for up to 15 significant digits.
    [[nodiscard]] double to_double() const { return std::strtod(to_string().c_str(), nullptr); }

private:
    std::int64_t m_mantissa = 0;
    std::int32_t m_exponent = 0;

    void normalize()
    {
        if (m_mantissa == 0) {
            m_exponent = 0;
            return;
        }
        while (m_mantissa % 10 == 0) {
            m_mantissa /= 10;
            ++m_exponent;
        }
    }

    static Decimal from_wide(__int128 mantissa, std::int64_t exponent)
    {
        if (mantissa == 0) {
            return Decimal{};
        }
        while (mantissa % 10 == 0) {
            mantissa /= 10;
            ++exponent;
        }
        if (mantissa > std::numeric_limits<std::int64_t>::max() || mantissa < -std::numeric_limits<std::int64_t>::max()
            || exponent > std::numeric_limits<std::int32_t>::max() / 2
            || exponent < std::numeric_limits<std::int32_t>::min() / 2) {
            throw std::overflow_error("decimal value out of range");
        }
        return Decimal(static_cast<std::int64_t>(mantissa), static_cast<std::int32_t>(exponent));
    }

    static unsigned long long magnitude(std::int64_t v)
    {
        return v < 0 ? static_cast<unsigned long long>(-(v + 1)) + 1ULL : static_cast<unsigned long long>(v);
    }

    static int digit_count(std::int64_t v)
    {
        unsigned long long u = magnitude(v);
        int n = 0;
        while (u != 0) {
            u /= 10;
            ++n;
        }
        return n;
    }

    static std::strong_ordering compare_magnitude(const Decimal& a, const Decimal& b)
    {
        // Position of the leading digit decides unless equal.
        const std::int64_t lead_a = static_cast<std::int64_t>(digit_count(a.m_mantissa)) + a.m_exponent;
        const std::int64_t lead_b = static_cast<std::int64_t>(digit_count(b.m_mantissa)) + b.m_exponent;
        if (lead_a != lead_b) {
            return lead_a <=> lead_b;
        }
        // Same leading position: aligned mantissas differ by < 19 digits of shift.
        __int128 ma = a.m_mantissa < 0 ? -static_cast<__int128>(a.m_mantissa) : a.m_mantissa;
        __int128 mb = b.m_mantissa < 0 ? -static_cast<__int128>(b.m_mantissa) : b.m_mantissa;
        for (std::int64_t e = a.m_exponent; e > b.m_exponent; --e) {
            ma *= 10;
        }
        for (std::int64_t e = b.m_exponent; e > a.m_exponent; --e) {
            mb *= 10;
        }
        return ma <=> mb;
    }

    static std::optional<Decimal> parse_impl(std::string_view text, bool allow_exponent)
    {
        std::size_t pos = 0;
        bool negative = false;
        if (pos < text.size() && text[pos] == '-') {
            negative = true;
            ++pos;
        }
        __int128 mantissa = 0;
        std::int64_t exponent = 0;
        std::size_t int_digits = 0;
        auto take_digit = [&](char c) {
            mantissa = mantissa * 10 + (c - '0');
            return mantissa <= std::numeric_limits<std::int64_t>::max();
        };
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
            if (!take_digit(text[pos])) {
                return std::nullopt;
            }
            ++pos;
            ++int_digits;
        }
        if (int_digits == 0) {
            return std::nullopt;
        }
        if (pos < text.size() && text[pos] == '.') {
            ++pos;
            std::size_t frac_digits = 0;
            while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
                if (!take_digit(text[pos])) {
                    return std::nullopt;
                }
                ++pos;
                ++frac_digits;
                --exponent;
            }
            if (frac_digits == 0) {
                return std::nullopt;
            }
        }
        if (allow_exponent && pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
            ++pos;
            bool exp_negative = false;
            if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
                exp_negative = text[pos] == '-';
                ++pos;
            }
            std::int64_t e = 0;
            std::size_t exp_digits = 0;
            while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
                e = e * 10 + (text[pos] - '0');
                if (e > 100000) {
                    return std::nullopt;
                }
                ++pos;
                ++exp_digits;
            }
            if (exp_digits == 0) {
                return std::nullopt;
            }
            exponent += exp_negative ? -e : e;
        }
        if (pos != text.size()) {
            return std::nullopt;
        }
        try {
            return from_wide(negative ? -mantissa : mantissa, exponent);
        } catch (const std::overflow_error&) {
            return std::nullopt;
        }
    }
};

} // namespace acs
