#pragma once

// Text format for system definitions:
//
//   dim = 2; f = [-x1*x2^2, 0]; g = [0, 1]; V = x1^2 + x2^2
//
// Statements are `dim=INT`, `f=[expr,...]`, `g=[expr,...]`, `V=expr` and the
// optional `theta=expr`, separated by `;` or newlines. Expressions use
// + - * ^ with parentheses, real literals and the variables x1..xn.
// Whitespace is insignificant. Errors carry line and column.

#include "sdclf/system.hpp"

#include <cctype>
#include <optional>
#include <string_view>

namespace sdclf {

struct ParsedSystem {
    System system;
    std::optional<Polynomial> theta;
};

namespace detail {

struct Token {
    enum class Kind { Ident, Number, Integer, Punct, End };
    Kind kind;
    std::string text;
    double number = 0.0;
    int line = 1, col = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(tok_.line, tok_.col, msg); }

private:
    void advance() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) bump();
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= src_.size()) {
            tok_ = {Token::Kind::End, "", 0.0, line_, col_};
            return;
        }
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string id;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                id += src_[pos_];
                bump();
            }
            tok_ = {Token::Kind::Ident, id, 0.0, tok_.line, tok_.col};
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::string num;
            bool is_int = true;
            while (pos_ < src_.size()) {
                char d = src_[pos_];
                if (std::isdigit(static_cast<unsigned char>(d))) {
                    num += d;
                } else if (d == '.' || d == 'e' || d == 'E' ||
                           ((d == '+' || d == '-') && !num.empty() &&
                            (num.back() == 'e' || num.back() == 'E'))) {
                    num += d;
                    is_int = false;
                } else {
                    break;
                }
                bump();
            }
            try {
                double v = std::stod(num);
                tok_ = {is_int ? Token::Kind::Integer : Token::Kind::Number, num, v, tok_.line,
                        tok_.col};
            } catch (const std::exception&) {
                throw ParseError(tok_.line, tok_.col, "malformed number '" + num + "'");
            }
            return;
        }
        tok_ = {Token::Kind::Punct, std::string(1, c), 0.0, tok_.line, tok_.col};
        bump();
    }

    void bump() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_;
};

class ExprParser {
public:
    ExprParser(Lexer& lex, int dim) : lex_(lex), dim_(dim) {}

    // expr := term (('+'|'-') term)*
    Polynomial expr() {
        Polynomial acc = term();
        while (is_punct("+") || is_punct("-")) {
            bool plus = lex_.take().text == "+";
            Polynomial rhs = term();
            if (plus) acc += rhs;
            else acc -= rhs;
        }
        return acc;
    }

private:
    // term := unary ('*' unary)*
    Polynomial term() {
        Polynomial acc = unary();
        while (is_punct("*")) {
            lex_.take();
            acc = acc * unary();
        }
        return acc;
    }

    // unary := ('-'|'+')* power
    Polynomial unary() {
        double sign = 1.0;
        while (is_punct("-") || is_punct("+")) {
            if (lex_.take().text == "-") sign = -sign;
        }
        Polynomial p = power();
        return sign < 0 ? -p : p;
    }

    // power := atom ('^' INTEGER)?
    Polynomial power() {
        Polynomial base = atom();
        if (is_punct("^")) {
            lex_.take();
            const Token t = lex_.peek();
            if (t.kind != Token::Kind::Integer)
                throw ParseError(t.line, t.col, "exponent must be a nonnegative integer");
            lex_.take();
            return base.pow(static_cast<int>(t.number));
        }
        return base;
    }

    Polynomial atom() {
        const Token t = lex_.peek();
        if (t.kind == Token::Kind::Number || t.kind == Token::Kind::Integer) {
            lex_.take();
            return Polynomial::constant(dim_, t.number);
        }
        if (t.kind == Token::Kind::Ident) {
            lex_.take();
            if (t.text.size() >= 2 && t.text[0] == 'x') {
                bool digits = true;
                for (std::size_t i = 1; i < t.text.size(); ++i)
                    if (!std::isdigit(static_cast<unsigned char>(t.text[i]))) digits = false;
                if (digits) {
                    int idx = std::stoi(t.text.substr(1));
                    if (idx < 1 || idx > dim_)
                        throw ParseError(t.line, t.col,
                                         "variable '" + t.text + "' out of range for dim=" +
                                             std::to_string(dim_));
                    return Polynomial::variable(dim_, idx - 1);
                }
            }
            throw ParseError(t.line, t.col, "unknown identifier '" + t.text + "'");
        }
        if (t.kind == Token::Kind::Punct && t.text == "(") {
            lex_.take();
            Polynomial inner = expr();
            expect(")");
            return inner;
        }
        throw ParseError(t.line, t.col, "expected a number, variable or '('");
    }

    bool is_punct(const char* p) const {
        return lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == p;
    }

    void expect(const char* p) {
        if (!is_punct(p)) lex_.fail("expected '" + std::string(p) + "'");
        lex_.take();
    }

    Lexer& lex_;
    int dim_;
};

}  // namespace detail

inline ParsedSystem parse_system_spec(std::string_view text) {
    detail::Lexer lex(text);
    std::optional<int> dim;
    std::optional<std::vector<Polynomial>> f, g;
    std::optional<Polynomial> V, theta;

    auto expect_eq = [&] {
        if (lex.peek().kind != detail::Token::Kind::Punct || lex.peek().text != "=")
            lex.fail("expected '='");
        lex.take();
    };

    auto parse_vector = [&](const std::string& who) {
        if (!dim) lex.fail("'dim' must be set before '" + who + "'");
        if (lex.peek().kind != detail::Token::Kind::Punct || lex.peek().text != "[")
            lex.fail("expected '[' after '" + who + " ='");
        detail::Token open = lex.take();
        std::vector<Polynomial> comps;
        detail::ExprParser ep(lex, *dim);
        while (true) {
            comps.push_back(ep.expr());
            if (lex.peek().kind == detail::Token::Kind::Punct && lex.peek().text == ",") {
                lex.take();
                continue;
            }
            break;
        }
        if (lex.peek().kind != detail::Token::Kind::Punct || lex.peek().text != "]")
            lex.fail("expected ']' to close '" + who + "'");
        lex.take();
        if (static_cast<int>(comps.size()) != *dim)
            throw ParseError(open.line, open.col,
                             who + " has " + std::to_string(comps.size()) + " component(s), dim=" +
                                 std::to_string(*dim));
        return comps;
    };

    while (lex.peek().kind != detail::Token::Kind::End) {
        if (lex.peek().kind == detail::Token::Kind::Punct && lex.peek().text == ";") {
            lex.take();
            continue;
        }
        detail::Token key = lex.take();
        if (key.kind != detail::Token::Kind::Ident)
            throw ParseError(key.line, key.col, "expected a declaration (dim, f, g, V, theta)");
        if (key.text == "dim") {
            expect_eq();
            detail::Token t = lex.take();
            if (t.kind != detail::Token::Kind::Integer || t.number < 1)
                throw ParseError(t.line, t.col, "dim must be a positive integer");
            dim = static_cast<int>(t.number);
        } else if (key.text == "f") {
            expect_eq();
            f = parse_vector("f");
        } else if (key.text == "g") {
            expect_eq();
            g = parse_vector("g");
        } else if (key.text == "V" || key.text == "theta") {
            expect_eq();
            if (!dim) lex.fail("'dim' must be set before '" + key.text + "'");
            detail::ExprParser ep(lex, *dim);
            if (key.text == "V") V = ep.expr();
            else theta = ep.expr();
        } else {
            throw ParseError(key.line, key.col, "unknown declaration '" + key.text + "'");
        }
    }

    if (!dim) throw ParseError(1, 1, "missing 'dim'");
    if (!f) throw ParseError(1, 1, "missing 'f'");
    if (!g) throw ParseError(1, 1, "missing 'g'");
    if (!V) throw ParseError(1, 1, "missing 'V'");
    return ParsedSystem{System(VectorField(std::move(*f)), VectorField(std::move(*g)),
                               std::move(*V)),
                        std::move(theta)};
}

}  // namespace sdclf
