#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "futs/rational.hpp"

namespace futs {

enum class Language { pepa, iml, raw };

std::string to_string(Language lang);
Language language_from_string(std::string_view name);

/// Diagnostic raised while reading source text, with a 1-based position.
class SourceError : public Error {
public:
    enum class Kind { syntax, undefined_constant, unguarded_recursion, nonpositive_rate };

    SourceError(Kind kind, std::size_t line, std::size_t col, const std::string& msg)
        : Error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
          kind(kind),
          line(line),
          col(col),
          message(msg) {}

    Kind kind;
    std::size_t line;
    std::size_t col;
    std::string message;  // without the position prefix
};

namespace syntax {

enum class TokenKind {
    constant,   // identifier starting with an upper-case letter
    action,     // identifier starting with a lower-case letter
    number,     // rational literal: digits, "p/q" or a finite decimal
    define,     // :=
    plus,
    less,
    greater,
    comma,
    dot,
    lparen,
    rparen,
    newline,
    end,
};

struct Token {
    TokenKind kind;
    std::string text;
    std::size_t line = 1;
    std::size_t col = 1;
};

/// Tokenizes a whole source text. '%' starts a comment running to the end of
/// the line; line breaks are significant (one definition per line).
std::vector<Token> tokenize(const std::string& text);

/// Bounds-checked cursor over a token stream.
class TokenCursor {
public:
    explicit TokenCursor(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    const Token& peek() const { return tokens_[pos_]; }
    const Token& peek2() const { return tokens_[std::min(pos_ + 1, tokens_.size() - 1)]; }
    const Token& next() { return tokens_[pos_ == tokens_.size() - 1 ? pos_ : pos_++]; }
    bool at(TokenKind kind) const { return peek().kind == kind; }

    bool accept(TokenKind kind) {
        if (!at(kind)) return false;
        next();
        return true;
    }

    Token expect(TokenKind kind, const std::string& what) {
        if (!at(kind)) {
            const Token& t = peek();
            throw SourceError(SourceError::Kind::syntax, t.line, t.col,
                              "expected " + what + ", found '" + describe(t) + "'");
        }
        return next();
    }

    static std::string describe(const Token& t);

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

/// Parses a rational literal token, requiring a strictly positive value.
Rational positive_rate(const Token& tok);

}  // namespace syntax
}  // namespace futs
