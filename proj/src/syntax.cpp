#include "futs/syntax.hpp"

#include <cctype>

namespace futs {

std::string to_string(Language lang) {
    switch (lang) {
        case Language::pepa: return "pepa";
        case Language::iml: return "iml";
        case Language::raw: return "raw";
    }
    return "?";
}

Language language_from_string(std::string_view name) {
    if (name == "pepa") return Language::pepa;
    if (name == "iml") return Language::iml;
    if (name == "raw") return Language::raw;
    throw Error("unknown language '" + std::string(name) + "'");
}

namespace syntax {

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> out;
    std::size_t line = 1, col = 1;
    std::size_t i = 0;
    auto bump = [&](std::size_t n = 1) {
        col += n;
        i += n;
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == '\n') {
            out.push_back({TokenKind::newline, "\n", line, col});
            ++i;
            ++line;
            col = 1;
            continue;
        }
        if (c == '%') {
            while (i < text.size() && text[i] != '\n') ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            bump();
            continue;
        }
        std::size_t tline = line, tcol = col;
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = i;
            while (i < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_' || text[i] == '\''))
                bump();
            std::string word = text.substr(start, i - start);
            TokenKind kind = std::isupper(static_cast<unsigned char>(word[0])) ? TokenKind::constant
                                                                               : TokenKind::action;
            out.push_back({kind, std::move(word), tline, tcol});
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = i;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) bump();
            if (i < text.size() && (text[i] == '.' || text[i] == '/')) {
                // a fraction or decimal only when digits follow; a trailing '.'
                // belongs to a prefix construct, as in "(3/2).P"
                if (i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
                    bump();
                    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) bump();
                }
            }
            out.push_back({TokenKind::number, text.substr(start, i - start), tline, tcol});
            continue;
        }
        if (c == ':' && i + 1 < text.size() && text[i + 1] == '=') {
            out.push_back({TokenKind::define, ":=", tline, tcol});
            bump(2);
            continue;
        }
        TokenKind kind;
        switch (c) {
            case '+': kind = TokenKind::plus; break;
            case '<': kind = TokenKind::less; break;
            case '>': kind = TokenKind::greater; break;
            case ',': kind = TokenKind::comma; break;
            case '.': kind = TokenKind::dot; break;
            case '(': kind = TokenKind::lparen; break;
            case ')': kind = TokenKind::rparen; break;
            default:
                throw SourceError(SourceError::Kind::syntax, line, col,
                                  std::string("unexpected character '") + c + "'");
        }
        out.push_back({kind, std::string(1, c), tline, tcol});
        bump();
    }
    out.push_back({TokenKind::end, "", line, col});
    return out;
}

std::string TokenCursor::describe(const Token& t) {
    switch (t.kind) {
        case TokenKind::newline: return "end of line";
        case TokenKind::end: return "end of input";
        default: return t.text;
    }
}

Rational positive_rate(const Token& tok) {
    Rational r;
    try {
        r = Rational::parse(tok.text);
    } catch (const Error& e) {
        throw SourceError(SourceError::Kind::syntax, tok.line, tok.col, e.what());
    }
    if (!r.is_positive())
        throw SourceError(SourceError::Kind::nonpositive_rate, tok.line, tok.col,
                          "rate must be strictly positive, got " + tok.text);
    return r;
}

}  // namespace syntax
}  // namespace futs
