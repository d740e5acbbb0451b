#pragma once

#include "acsplit/diagnostic.hpp"
#include "acsplit/lexer.hpp"
#include "acsplit/model.hpp"
#include "acsplit/units.hpp"

#include <filesystem>
#include <functional>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace acs {

struct ParseResult {
    std::optional<AssuranceCase> assurance_case;
    Diagnostics diagnostics;

    [[nodiscard]] bool ok() const { return assurance_case && !has_errors(diagnostics); }
};

struct BundleParseResult {
    std::optional<Bundle> bundle;
    Diagnostics diagnostics;
};

/// Returns the file's text, or nullopt when it cannot be read.
using FileLoader = std::function<std::optional<std::string>(const std::string& path)>;

namespace detail {

using lex::Token;
using lex::TokenKind;

/// Thrown inside the parser to abandon the current statement.
struct SyntaxAbort {};

class TokenCursor {
public:
    TokenCursor(std::vector<Token> tokens, Diagnostics& diags) : m_tokens(std::move(tokens)), m_diags(diags) {}

    [[nodiscard]] const Token& peek(std::size_t ahead = 0) const
    {
        return m_tokens[std::min(m_pos + ahead, m_tokens.size() - 1)];
    }

    const Token& next()
    {
        const Token& t = m_tokens[m_pos];
        if (m_pos + 1 < m_tokens.size()) {
            ++m_pos;
        }
        return t;
    }

    [[nodiscard]] bool at(TokenKind k) const { return peek().kind == k; }
    [[nodiscard]] bool at_terminator() const
    {
        return at(TokenKind::Newline) || at(TokenKind::Semicolon) || at(TokenKind::RBrace) || at(TokenKind::End);
    }

    void skip_terminators()
    {
        while (at(TokenKind::Newline) || at(TokenKind::Semicolon)) {
            next();
        }
    }

    void skip_newlines()
    {
        while (at(TokenKind::Newline)) {
            next();
        }
    }

    /// Skips to the next statement boundary without consuming a closing brace.
    void recover()
    {
        while (!at(TokenKind::Newline) && !at(TokenKind::Semicolon) && !at(TokenKind::RBrace)
               && !at(TokenKind::End)) {
            next();
        }
    }

    [[noreturn]] void fail(const Token& at_token, std::string_view expected)
    {
        m_diags.push_back({"P0", Severity::Error, at_token.span,
                           "unexpected " + at_token.describe() + ", expected " + std::string(expected), {}});
        throw SyntaxAbort{};
    }

    const Token& expect(TokenKind k, std::string_view expected)
    {
        if (!at(k)) {
            fail(peek(), expected);
        }
        return next();
    }

    const Token& expect_word(std::string_view word)
    {
        if (!peek().is_word(word)) {
            fail(peek(), "'" + std::string(word) + "'");
        }
        return next();
    }

    const Token& expect_one_of(std::initializer_list<std::string_view> words)
    {
        for (auto w : words) {
            if (peek().is_word(w)) {
                return next();
            }
        }
        std::string list;
        for (auto w : words) {
            list += list.empty() ? "one of " : ", ";
            list += "'" + std::string(w) + "'";
        }
        fail(peek(), list);
    }

    const Token& expect_id(std::string_view what)
    {
        return expect(TokenKind::Ident, what);
    }

private:
    std::vector<Token> m_tokens;
    std::size_t m_pos = 0;
    Diagnostics& m_diags;
};

class CaseParser {
public:
    CaseParser(std::string_view source, std::string file, const UnitTable& units)
        : m_file(std::move(file)), m_units(units), m_cursor(lex::Lexer(source, m_file).run(m_diags), m_diags)
    {}

    ParseResult run()
    {
        ParseResult result;
        std::optional<AssuranceCase> ac;
        try {
            ac = parse_header();
        } catch (const SyntaxAbort&) {
        }
        if (ac) {
            parse_body(*ac);
            finish(*ac);
        }
        sort_diagnostics(m_diags);
        result.diagnostics = std::move(m_diags);
        if (ac && !m_drop_case) {
            result.assurance_case = std::move(ac);
        }
        return result;
    }

private:
    struct RawElement {
        Element element;
        std::vector<std::pair<std::string, SourceSpan>> flags; // flag word + span, for P3
    };

    std::string m_file;
    const UnitTable& m_units;
    Diagnostics m_diags;
    TokenCursor m_cursor;
    std::vector<RawElement> m_raw;
    std::vector<Edge> m_edges;
    std::vector<Capability> m_caps;
    std::vector<std::pair<CaseId, SourceSpan>> m_assocs;
    bool m_drop_case = false;

    void error(std::string rule, const SourceSpan& span, std::string message, std::vector<ElementRef> refs = {})
    {
        m_diags.push_back({std::move(rule), Severity::Error, span, std::move(message), std::move(refs)});
    }

    std::optional<AssuranceCase> parse_header()
    {
        m_cursor.skip_terminators();
        if (!m_cursor.peek().is_word("case")) {
            const auto& t = m_cursor.peek();
            error("P0", t.span, "expected 'case'");
            return std::nullopt;
        }
        m_cursor.next();
        m_cursor.skip_newlines();
        AssuranceCase ac;
        const Token& id = m_cursor.expect_id("case identifier");
        ac.id = id.text;
        ac.span = id.span;
        m_cursor.skip_newlines();
        m_cursor.expect_word("kind");
        m_cursor.skip_newlines();
        const Token& kind = m_cursor.expect_one_of({"monolithic", "technological", "clinical"});
        ac.kind = *case_kind_from(kind.text);
        m_cursor.skip_newlines();
        m_cursor.expect(TokenKind::LBrace, "'{'");
        return ac;
    }

    void parse_body(AssuranceCase& ac)
    {
        while (true) {
            m_cursor.skip_terminators();
            if (m_cursor.at(TokenKind::RBrace)) {
                m_cursor.next();
                break;
            }
            if (m_cursor.at(TokenKind::End)) {
                error("P0", m_cursor.peek().span, "unexpected end of input, expected '}' closing case '" + ac.id + "'");
                return;
            }
            try {
                parse_item();
                if (!m_cursor.at_terminator()) {
                    m_cursor.fail(m_cursor.peek(), "end of statement");
                }
            } catch (const SyntaxAbort&) {
                m_cursor.recover();
            }
        }
        m_cursor.skip_terminators();
        if (!m_cursor.at(TokenKind::End)) {
            error("P0", m_cursor.peek().span, "unexpected " + m_cursor.peek().describe() + " after the case block");
        }
    }

    void parse_item()
    {
        const Token& first = m_cursor.peek();
        const Token& second = m_cursor.peek(1);
        const bool edge_keyword = (second.is_word("supportedBy") || second.is_word("inContextOf"))
            && m_cursor.peek(2).kind == TokenKind::Ident;
        const bool node_shape = element_kind_from(first.text) && m_cursor.peek(2).kind == TokenKind::String;
        if (first.kind == TokenKind::Ident && edge_keyword && !node_shape) {
            parse_edge();
            return;
        }
        if (first.is_word("associates")) {
            m_cursor.next();
            const Token& id = m_cursor.expect_id("case identifier");
            m_assocs.emplace_back(id.text, id.span);
            return;
        }
        if (first.is_word("provides") || first.is_word("requires")) {
            parse_capability();
            return;
        }
        if (element_kind_from(first.text) && first.kind == TokenKind::Ident) {
            parse_node();
            return;
        }
        m_cursor.fail(first, "one of 'associates', 'provides', 'requires', an element kind, or an edge");
    }

    void parse_edge()
    {
        Edge edge;
        const Token& src = m_cursor.next();
        edge.source = src.text;
        edge.span = src.span;
        edge.kind = m_cursor.next().text == "supportedBy" ? EdgeKind::SupportedBy : EdgeKind::InContextOf;
        edge.target = m_cursor.expect_id("element identifier").text;
        m_edges.push_back(std::move(edge));
    }

    Decimal parse_number()
    {
        const Token& t = m_cursor.expect(TokenKind::Number, "number");
        auto d = Decimal::parse(t.text);
        if (!d) {
            error("P0", t.span, "number '" + t.text + "' out of range");
            throw SyntaxAbort{};
        }
        return *d;
    }

    void parse_capability()
    {
        Capability cap;
        cap.direction = m_cursor.next().text == "provides" ? Direction::Provided : Direction::Required;
        m_cursor.expect_word("capability");
        const Token& name = m_cursor.expect_id("capability name");
        cap.name = name.text;
        cap.span = name.span;
        m_cursor.expect_word("unit");
        cap.unit = m_cursor.expect_id("unit symbol").text;
        m_cursor.expect_word("range");
        m_cursor.expect(TokenKind::LBracket, "'['");
        cap.low = parse_number();
        m_cursor.expect(TokenKind::Comma, "','");
        cap.high = parse_number();
        m_cursor.expect(TokenKind::RBracket, "']'");
        m_caps.push_back(std::move(cap));
    }

    void parse_node()
    {
        RawElement raw;
        raw.element.kind = *element_kind_from(m_cursor.next().text);
        const Token& id = m_cursor.expect_id("element identifier");
        raw.element.id = id.text;
        raw.element.span = id.span;
        raw.element.statement = m_cursor.expect(TokenKind::String, "statement string").text;
        while (!m_cursor.at_terminator()) {
            const Token& flag = m_cursor.expect_one_of({"root", "public", "undeveloped", "module", "concern", "awayref"});
            std::string word = flag.text;
            SourceSpan span = flag.span;
            if (word == "concern") {
                const Token& c = m_cursor.expect_one_of({"safety", "effectiveness"});
                const auto kind = c.text == "safety" ? ConcernKind::Safety : ConcernKind::Effectiveness;
                if (raw.element.concern && *raw.element.concern != kind) {
                    error("P3", span, "conflicting concern flags on '" + raw.element.id + "'");
                }
                raw.element.concern = kind;
            } else if (word == "awayref") {
                const Token& c = m_cursor.expect_id("case identifier");
                m_cursor.expect(TokenKind::Dot, "'.'");
                const Token& e = m_cursor.expect_id("element identifier");
                raw.element.away_ref = ElementRef{c.text, e.text};
            }
            raw.flags.emplace_back(std::move(word), std::move(span));
        }
        m_raw.push_back(std::move(raw));
    }

    /// Applies P1, P2, P3 and P7 and moves accepted items into the case.
    void finish(AssuranceCase& ac)
    {
        std::map<ElementId, const SourceSpan*> seen;
        for (auto& raw : m_raw) {
            auto& e = raw.element;
            if (auto it = seen.find(e.id); it != seen.end()) {
                error("P1", e.span,
                      "duplicate element id '" + e.id + "' (first declared at line " + std::to_string(it->second->line)
                          + ")",
                      {{ac.id, e.id}});
                continue;
            }
            apply_flags(ac, raw);
            ac.elements.push_back(e);
            seen.emplace(e.id, &raw.element.span);
        }

        for (auto& edge : m_edges) {
            bool ok = true;
            for (const auto* end : {&edge.source, &edge.target}) {
                if (!ac.contains(*end)) {
                    error("P2", edge.span, "edge endpoint '" + *end + "' is not an element of case '" + ac.id + "'",
                          {{ac.id, *end}});
                    ok = false;
                }
            }
            if (ok) {
                ac.edges.push_back(std::move(edge));
            }
        }

        for (std::size_t i = 0; i < m_assocs.size(); ++i) {
            const auto& [id, span] = m_assocs[i];
            if (ac.kind != CaseKind::Clinical) {
                error("P7", span, "'associates' is only allowed in clinical cases");
            } else if (i > 0) {
                error("P7", span, "clinical case associates more than one technological case");
            } else {
                ac.associated_tac = id;
            }
        }
        if (ac.kind == CaseKind::Clinical && !ac.associated_tac) {
            error("P7", ac.span, "clinical case '" + ac.id + "' must declare 'associates <tac>'");
            m_drop_case = true;
        }

        for (auto& cap : m_caps) {
            if (cap.direction == Direction::Provided && ac.kind != CaseKind::Technological) {
                error("P7", cap.span, "'provides capability' is only allowed in technological cases");
            } else if (cap.direction == Direction::Required && ac.kind != CaseKind::Clinical) {
                error("P7", cap.span, "'requires capability' is only allowed in clinical cases");
            } else if (!m_units.contains(cap.unit)) {
                error("P7", cap.span, "unknown unit '" + cap.unit + "' on capability '" + cap.name + "'");
            } else if (cap.low > cap.high) {
                error("P7", cap.span, "capability '" + cap.name + "' has low > high");
            } else {
                ac.capabilities.push_back(std::move(cap));
            }
        }
    }

    void apply_flags(const AssuranceCase& ac, RawElement& raw)
    {
        auto& e = raw.element;
        const bool claim = e.kind == ElementKind::Claim;
        std::set<std::string> used;
        for (const auto& [word, span] : raw.flags) {
            if (!used.insert(word).second && word != "concern") {
                error("P3", span, "duplicate flag '" + word + "' on '" + e.id + "'", {{ac.id, e.id}});
            }
            auto reject = [&] {
                error("P3", span,
                      "flag '" + word + "' is only allowed on claims, not on " + std::string(keyword(e.kind)) + " '"
                          + e.id + "'",
                      {{ac.id, e.id}});
            };
            if (word == "root") {
                claim ? void(e.is_root = true) : reject();
            } else if (word == "public") {
                e.is_public = true;
            } else if (word == "undeveloped") {
                claim ? void(e.is_undeveloped = true) : reject();
            } else if (word == "module") {
                claim ? void(e.is_module = true) : reject();
            } else if (word == "awayref" && !claim) {
                reject();
                e.away_ref.reset();
            }
        }
        if (e.away_ref && !e.is_undeveloped) {
            const auto it = std::ranges::find(raw.flags, std::string("awayref"), &std::pair<std::string, SourceSpan>::first);
            error("P3", it->second, "claim '" + e.id + "' has 'awayref' but is not marked 'undeveloped'",
                  {{ac.id, e.id}});
            e.away_ref.reset();
        }
    }
};

class ManifestParser {
public:
    ManifestParser(std::string_view source, std::string file)
        : m_file(std::move(file)), m_cursor(lex::Lexer(source, m_file).run(m_diags), m_diags)
    {}

    struct Entry {
        bool is_tac = false;
        std::string path;
        SourceSpan span;
    };

    struct Manifest {
        std::string id;
        SourceSpan span;
        std::vector<Entry> entries;
    };

    std::optional<Manifest> run()
    {
        Manifest m;
        try {
            m_cursor.skip_terminators();
            if (!m_cursor.peek().is_word("bundle")) {
                m_diags.push_back({"P0", Severity::Error, m_cursor.peek().span, "expected 'bundle'", {}});
                return std::nullopt;
            }
            m_cursor.next();
            m_cursor.skip_newlines();
            const Token& id = m_cursor.expect_id("bundle identifier");
            m.id = id.text;
            m.span = id.span;
            m_cursor.skip_newlines();
            m_cursor.expect(TokenKind::LBrace, "'{'");
        } catch (const SyntaxAbort&) {
            return std::nullopt;
        }
        while (true) {
            m_cursor.skip_terminators();
            if (m_cursor.at(TokenKind::RBrace)) {
                m_cursor.next();
                break;
            }
            if (m_cursor.at(TokenKind::End)) {
                m_diags.push_back({"P0", Severity::Error, m_cursor.peek().span,
                                   "unexpected end of input, expected '}' closing bundle '" + m.id + "'", {}});
                break;
            }
            try {
                const Token& slot = m_cursor.expect_one_of({"tac", "cac"});
                const bool is_tac = slot.text == "tac";
                const Token& path = m_cursor.expect(TokenKind::String, "file path string");
                if (!m_cursor.at_terminator()) {
                    m_cursor.fail(m_cursor.peek(), "end of statement");
                }
                m.entries.push_back({is_tac, path.text, path.span});
            } catch (const SyntaxAbort&) {
                m_cursor.recover();
            }
        }
        m_cursor.skip_terminators();
        if (!m_cursor.at(TokenKind::End)) {
            m_diags.push_back({"P0", Severity::Error, m_cursor.peek().span,
                               "unexpected " + m_cursor.peek().describe() + " after the bundle block", {}});
        }
        return m;
    }

    Diagnostics& diagnostics() { return m_diags; }

private:
    std::string m_file;
    Diagnostics m_diags;
    TokenCursor m_cursor;
};

} // namespace detail

/// Parses one `.acd` case file. Never throws on bad input: every problem is
/// a diagnostic, and parsing recovers at statement boundaries.
inline ParseResult parse_case(std::string_view source, std::string file_name,
                              const UnitTable& units = UnitTable::builtin())
{
    return detail::CaseParser(source, std::move(file_name), units).run();
}

/// Member path as seen from the manifest: relative paths resolve against
/// the manifest's directory.
inline std::string resolve_member_path(const std::string& manifest_name, const std::string& path)
{
    std::filesystem::path p(path);
    if (p.is_absolute()) {
        return p.lexically_normal().generic_string();
    }
    return (std::filesystem::path(manifest_name).parent_path() / p).lexically_normal().generic_string();
}

/// Parses a `.acb` manifest and every case it lists. A bundle is produced
/// only when every member parses without errors and fills the right slot.
inline BundleParseResult parse_bundle(std::string_view manifest_source, std::string manifest_name,
                                      const FileLoader& loader, const UnitTable& units = UnitTable::builtin())
{
    BundleParseResult result;
    detail::ManifestParser mp(manifest_source, manifest_name);
    auto manifest = mp.run();
    Diagnostics& diags = mp.diagnostics();
    bool ok = manifest.has_value() && !has_errors(diags);

    std::optional<AssuranceCase> tac;
    std::vector<AssuranceCase> cacs;
    if (manifest) {
        const auto tac_count = std::ranges::count_if(manifest->entries, &detail::ManifestParser::Entry::is_tac);
        const auto cac_count = static_cast<std::ptrdiff_t>(manifest->entries.size()) - tac_count;
        if (tac_count != 1) {
            diags.push_back({"P8", Severity::Error, manifest->span,
                             tac_count == 0 ? "bundle requires exactly one tac" : "bundle lists more than one tac",
                             {}});
            ok = false;
        }
        if (cac_count == 0) {
            diags.push_back({"P8", Severity::Error, manifest->span, "bundle requires at least one cac", {}});
            ok = false;
        }

        std::map<CaseId, std::string> seen_ids;
        for (const auto& entry : manifest->entries) {
            const std::string path = resolve_member_path(manifest_name, entry.path);
            auto text = loader(path);
            if (!text) {
                diags.push_back({"P6", Severity::Error, entry.span, "cannot read bundle member '" + path + "'", {}});
                ok = false;
                continue;
            }
            auto parsed = parse_case(*text, path, units);
            diags.insert(diags.end(), parsed.diagnostics.begin(), parsed.diagnostics.end());
            if (!parsed.ok()) {
                ok = false;
                continue;
            }
            auto& ac = *parsed.assurance_case;
            const CaseKind wanted = entry.is_tac ? CaseKind::Technological : CaseKind::Clinical;
            if (ac.kind != wanted) {
                diags.push_back({"P4", Severity::Error, entry.span,
                                 std::string(entry.is_tac ? "tac" : "cac") + " slot expects a "
                                     + std::string(keyword(wanted)) + " case but '" + ac.id + "' is "
                                     + std::string(keyword(ac.kind)),
                                 {}});
                ok = false;
                continue;
            }
            if (auto [it, inserted] = seen_ids.emplace(ac.id, path); !inserted) {
                diags.push_back({"P5", Severity::Error, entry.span,
                                 "duplicate case id '" + ac.id + "' (also in '" + it->second + "')", {}});
                ok = false;
                continue;
            }
            if (entry.is_tac) {
                tac = std::move(ac);
            } else {
                cacs.push_back(std::move(ac));
            }
        }
    }
    sort_diagnostics(diags);
    result.diagnostics = std::move(diags);
    if (ok && tac && !cacs.empty()) {
        result.bundle = Bundle{manifest->id, std::move(*tac), std::move(cacs)};
    }
    return result;
}

} // namespace acs
