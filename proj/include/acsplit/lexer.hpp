#pragma once

#include "acsplit/diagnostic.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace acs::lex {

enum class TokenKind { Ident, String, Number, LBrace, RBrace, LBracket, RBracket, Comma, Dot, Semicolon, Newline, End };

constexpr std::string_view describe(TokenKind k)
{
    switch (k) {
    case TokenKind::Ident: return "identifier";
    case TokenKind::String: return "string";
    case TokenKind::Number: return "number";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
    case TokenKind::LBracket: return "'['";
    case TokenKind::RBracket: return "']'";
    case TokenKind::Comma: return "','";
    case TokenKind::Dot: return "'.'";
    case TokenKind::Semicolon: return "';'";
    case TokenKind::Newline: return "end of line";
    case TokenKind::End: return "end of input";
    }
    return "?";
}

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text; // identifier/number text, or the unescaped string value
    SourceSpan span;

    [[nodiscard]] bool is_word(std::string_view w) const { return kind == TokenKind::Ident && text == w; }

    [[nodiscard]] std::string describe() const
    {
        switch (kind) {
        case TokenKind::Ident: return "'" + text + "'";
        case TokenKind::Number: return "number " + text;
        case TokenKind::String: return "string";
        default: return std::string(lex::describe(kind));
        }
    }
};

/// Splits DSL text into tokens. Newlines are significant (statement
/// terminators); `//` comments and other whitespace are dropped. Lexical
/// errors become P0 diagnostics and the offending bytes are skipped.
class Lexer {
public:
    Lexer(std::string_view source, std::string file) : m_src(source), m_file(std::move(file)) {}

    std::vector<Token> run(Diagnostics& diags)
    {
        std::vector<Token> out;
        while (true) {
            skip_blank();
            if (m_pos >= m_src.size()) {
                out.push_back(make(TokenKind::End, "", m_line, m_col, 0));
                return out;
            }
            const char c = m_src[m_pos];
            const int line = m_line;
            const int col = m_col;
            if (c == '\n') {
                advance();
                out.push_back(make(TokenKind::Newline, "", line, col, 1));
            } else if (is_alpha(c)) {
                const std::size_t start = m_pos;
                while (m_pos < m_src.size() && is_id_char(m_src[m_pos])) {
                    advance();
                }
                out.push_back(make(TokenKind::Ident, std::string(m_src.substr(start, m_pos - start)), line, col,
                                   static_cast<int>(m_pos - start)));
            } else if (is_digit(c) || (c == '-' && m_pos + 1 < m_src.size() && is_digit(m_src[m_pos + 1]))) {
                lex_number(out, diags);
            } else if (c == '"') {
                lex_string(out, diags);
            } else if (auto k = punct(c)) {
                advance();
                out.push_back(make(*k, std::string(1, c), line, col, 1));
            } else {
                // Consume a whole UTF-8 sequence so the message names one character.
                std::size_t len = 1;
                const auto uc = static_cast<unsigned char>(c);
                if (uc >= 0xF0) len = 4;
                else if (uc >= 0xE0) len = 3;
                else if (uc >= 0xC0) len = 2;
                len = std::min(len, m_src.size() - m_pos);
                std::string bad(m_src.substr(m_pos, len));
                for (std::size_t i = 0; i < len; ++i) {
                    advance();
                }
                error(diags, line, col, static_cast<int>(len), "unexpected character '" + bad + "'");
            }
        }
    }

private:
    std::string_view m_src;
    std::string m_file;
    std::size_t m_pos = 0;
    int m_line = 1;
    int m_col = 1;

    static bool is_alpha(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); }
    static bool is_digit(char c) { return c >= '0' && c <= '9'; }
    static bool is_id_char(char c) { return is_alpha(c) || is_digit(c) || c == '_' || c == '-'; }

    static std::optional<TokenKind> punct(char c)
    {
        switch (c) {
        case '{': return TokenKind::LBrace;
        case '}': return TokenKind::RBrace;
        case '[': return TokenKind::LBracket;
        case ']': return TokenKind::RBracket;
        case ',': return TokenKind::Comma;
        case '.': return TokenKind::Dot;
        case ';': return TokenKind::Semicolon;
        default: return std::nullopt;
        }
    }

    void advance()
    {
        if (m_src[m_pos] == '\n') {
            ++m_line;
            m_col = 1;
        } else {
            ++m_col;
        }
        ++m_pos;
    }

    void skip_blank()
    {
        while (m_pos < m_src.size()) {
            const char c = m_src[m_pos];
            if (c == ' ' || c == '\t' || c == '\r') {
                advance();
            } else if (c == '/' && m_pos + 1 < m_src.size() && m_src[m_pos + 1] == '/') {
                while (m_pos < m_src.size() && m_src[m_pos] != '\n') {
                    advance();
                }
            } else {
                return;
            }
        }
    }

    Token make(TokenKind kind, std::string text, int line, int col, int len) const
    {
        return Token{kind, std::move(text), SourceSpan{m_file, line, col, len}};
    }

    void error(Diagnostics& diags, int line, int col, int len, std::string message) const
    {
        diags.push_back({"P0", Severity::Error, SourceSpan{m_file, line, col, len}, std::move(message), {}});
    }

    void lex_number(std::vector<Token>& out, Diagnostics& diags)
    {
        const int line = m_line;
        const int col = m_col;
        const std::size_t start = m_pos;
        if (m_src[m_pos] == '-') {
            advance();
        }
        while (m_pos < m_src.size() && is_digit(m_src[m_pos])) {
            advance();
        }
        if (m_pos + 1 < m_src.size() && m_src[m_pos] == '.' && is_digit(m_src[m_pos + 1])) {
            advance();
            while (m_pos < m_src.size() && is_digit(m_src[m_pos])) {
                advance();
            }
        }
        // A number running straight into letters (e.g. `1e6`, `3W`) is malformed.
        bool malformed = false;
        while (m_pos < m_src.size() && is_id_char(m_src[m_pos])) {
            advance();
            malformed = true;
        }
        std::string text(m_src.substr(start, m_pos - start));
        if (malformed) {
            error(diags, line, col, static_cast<int>(text.size()), "malformed number '" + text + "'");
            return;
        }
        out.push_back(make(TokenKind::Number, std::move(text), line, col, static_cast<int>(m_pos - start)));
    }

    void lex_string(std::vector<Token>& out, Diagnostics& diags)
    {
        const int line = m_line;
        const int col = m_col;
        const std::size_t start = m_pos;
        advance(); // opening quote
        std::string value;
        while (true) {
            if (m_pos >= m_src.size()) {
                error(diags, line, col, static_cast<int>(m_pos - start), "unterminated string");
                return;
            }
            const char c = m_src[m_pos];
            if (c == '"') {
                advance();
                break;
            }
            if (c == '\\') {
                const int esc_line = m_line;
                const int esc_col = m_col;
                advance();
                if (m_pos < m_src.size() && (m_src[m_pos] == '"' || m_src[m_pos] == '\\')) {
                    value += m_src[m_pos];
                    advance();
                } else {
                    error(diags, esc_line, esc_col, 2, "invalid escape sequence in string (only \\\" and \\\\)");
                }
                continue;
            }
            value += c;
            advance();
        }
        // An invalid escape is already reported; keep the token so the
        // statement shape survives and the parser stays quiet.
        out.push_back(make(TokenKind::String, std::move(value), line, col, static_cast<int>(m_pos - start)));
    }
};

} // namespace acs::lex
