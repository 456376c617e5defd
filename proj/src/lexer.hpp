#pragma once

#include <string>
#include <vector>

#include "acv/error.hpp"

namespace acv::detail {

enum class Tok {
    Ident, LParen, RParen, LBrace, RBrace, LBracket, RBracket,
    Comma, Colon, Dot, Slash, Plus, Minus, Tilde, Amp, Pipe,
    Arrow,   // ->
    LArrow,  // <-
    At,      // @
    Define,  // :=
    Eq,      // =
    End,
};

struct Token {
    Tok kind;
    std::string text;
    int line;
    int col;
};

// Shared tokenizer for policy and query files. '#' starts a comment that
// runs to end of line; newlines are plain whitespace except where the
// caller asks for line-sensitive scanning.
class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) {}

    Token next() {
        skip_ws();
        int line = line_, col = col_;
        if (pos_ >= src_.size()) return {Tok::End, "", line, col};
        char c = src_[pos_];
        if (isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < src_.size() &&
                   (isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                advance();
            return {Tok::Ident, src_.substr(start, pos_ - start), line, col};
        }
        if (isdigit(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < src_.size() && isdigit(static_cast<unsigned char>(src_[pos_])))
                advance();
            return {Tok::Ident, src_.substr(start, pos_ - start), line, col};
        }
        auto two = [&](char a, char b) {
            return c == a && pos_ + 1 < src_.size() && src_[pos_ + 1] == b;
        };
        if (two('-', '>')) { advance(); advance(); return {Tok::Arrow, "->", line, col}; }
        if (two('<', '-')) { advance(); advance(); return {Tok::LArrow, "<-", line, col}; }
        if (two(':', '=')) { advance(); advance(); return {Tok::Define, ":=", line, col}; }
        advance();
        switch (c) {
            case '(': return {Tok::LParen, "(", line, col};
            case ')': return {Tok::RParen, ")", line, col};
            case '{': return {Tok::LBrace, "{", line, col};
            case '}': return {Tok::RBrace, "}", line, col};
            case '[': return {Tok::LBracket, "[", line, col};
            case ']': return {Tok::RBracket, "]", line, col};
            case ',': return {Tok::Comma, ",", line, col};
            case ':': return {Tok::Colon, ":", line, col};
            case '.': return {Tok::Dot, ".", line, col};
            case '/': return {Tok::Slash, "/", line, col};
            case '+': return {Tok::Plus, "+", line, col};
            case '-': return {Tok::Minus, "-", line, col};
            case '~': return {Tok::Tilde, "~", line, col};
            case '&': return {Tok::Amp, "&", line, col};
            case '|': return {Tok::Pipe, "|", line, col};
            case '@': return {Tok::At, "@", line, col};
            case '=': return {Tok::Eq, "=", line, col};
            default:
                throw Error(std::string("unexpected character '") + c + "'", line, col);
        }
    }

private:
    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_ws() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    const std::string& src_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// Buffered token stream with one-token lookahead.
class TokenStream {
public:
    explicit TokenStream(const std::string& src) : lex_(src) { cur_ = lex_.next(); }

    const Token& peek() const { return cur_; }
    Token take() {
        Token t = cur_;
        cur_ = lex_.next();
        return t;
    }
    bool at(Tok k) const { return cur_.kind == k; }
    bool at_ident(const std::string& s) const { return cur_.kind == Tok::Ident && cur_.text == s; }
    Token expect(Tok k, const std::string& what) {
        if (!at(k)) throw Error("expected " + what + ", found '" + cur_.text + "'", cur_.line, cur_.col);
        return take();
    }

private:
    Lexer lex_;
    Token cur_;
};

}  // namespace acv::detail
