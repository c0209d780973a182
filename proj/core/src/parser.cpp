#include "cbnlab/parser.hpp"

#include <cctype>
#include <charconv>

namespace cbnlab {
namespace {

struct Token {
    enum class Kind { LParen, RParen, Atom, End };
    Kind kind;
    std::string text;
    std::size_t line, col;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_ws();
        if (pos_ >= src_.size()) return {Token::Kind::End, "", line_, col_};
        std::size_t l = line_, c = col_;
        char ch = src_[pos_];
        if (ch == '(') {
            advance();
            return {Token::Kind::LParen, "(", l, c};
        }
        if (ch == ')') {
            advance();
            return {Token::Kind::RParen, ")", l, c};
        }
        std::string atom;
        while (pos_ < src_.size() && !std::isspace(static_cast<unsigned char>(src_[pos_])) &&
               src_[pos_] != '(' && src_[pos_] != ')') {
            atom += src_[pos_];
            advance();
        }
        return {Token::Kind::Atom, atom, l, c};
    }

private:
    void skip_ws() {
        while (pos_ < src_.size()) {
            char ch = src_[pos_];
            if (ch == ';') {  // comment to end of line
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(ch))) {
                advance();
            } else {
                break;
            }
        }
    }
    void advance() {
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
    std::size_t line_ = 1, col_ = 1;
};

struct Parser {
    Lexer lex;
    Token tok;
    std::optional<ParseError> err;

    explicit Parser(std::string_view src) : lex(src) { tok = lex.next(); }

    void bump() { tok = lex.next(); }

    bool fail(const std::string& msg) {
        if (!err) err = ParseError{tok.line, tok.col, msg};
        return false;
    }

    bool expect_lparen(const char* what) {
        if (tok.kind != Token::Kind::LParen) return fail(std::string("expected '(' to open ") + what);
        bump();
        return true;
    }

    bool expect_rparen(const char* what) {
        if (tok.kind != Token::Kind::RParen) return fail(std::string("expected ')' to close ") + what);
        bump();
        return true;
    }

    std::optional<std::string> atom(const char* what) {
        if (tok.kind != Token::Kind::Atom) {
            fail(std::string("expected ") + what);
            return std::nullopt;
        }
        std::string t = tok.text;
        bump();
        return t;
    }

    std::optional<Address> address() {
        auto a = atom("address");
        if (!a) return std::nullopt;
        if (a->size() < 2 || (*a)[0] != 'a') {
            fail("malformed address '" + *a + "'");
            return std::nullopt;
        }
        std::int64_t idx = 0;
        auto [p, ec] = std::from_chars(a->data() + 1, a->data() + a->size(), idx);
        if (ec != std::errc{} || p != a->data() + a->size()) {
            fail("malformed address '" + *a + "'");
            return std::nullopt;
        }
        auto addr = Address::make(idx);
        if (!addr) {
            fail("address out of range '" + *a + "' (valid: a0..a" +
                 std::to_string(kMemCells - 1) + ")");
            return std::nullopt;
        }
        return addr;
    }

    ExprPtr expr() {
        if (!expect_lparen("expression")) return nullptr;
        auto head = atom("expression head");
        if (!head) return nullptr;
        ExprPtr out;
        if (*head == "int") {
            auto n = atom("integer literal");
            if (!n) return nullptr;
            std::int64_t v = 0;
            auto [p, ec] = std::from_chars(n->data(), n->data() + n->size(), v);
            if (ec != std::errc{} || p != n->data() + n->size()) {
                fail("malformed integer '" + *n + "'");
                return nullptr;
            }
            if (!int_in_range(v)) {
                fail("integer literal out of range '" + *n + "' (valid: " +
                     std::to_string(kIntMin) + ".." + std::to_string(kIntMax) + ")");
                return nullptr;
            }
            out = Expr::constant(Value::integer(v));
        } else if (*head == "bool") {
            auto b = atom("bool literal");
            if (!b) return nullptr;
            if (*b != "true" && *b != "false") {
                fail("expected true or false, got '" + *b + "'");
                return nullptr;
            }
            out = Expr::constant(Value::boolean(*b == "true"));
        } else if (*head == "addr") {
            auto a = address();
            if (!a) return nullptr;
            out = Expr::constant(Value::address(*a));
        } else if (*head == "var") {
            auto a = address();
            if (!a) return nullptr;
            out = Expr::var(*a);
        } else if (*head == "not") {
            auto inner = expr();
            if (!inner) return nullptr;
            out = Expr::negate(inner);
        } else {
            BinOp op;
            if (*head == "add") op = BinOp::Add;
            else if (*head == "sub") op = BinOp::Sub;
            else if (*head == "lt") op = BinOp::Lt;
            else if (*head == "eq") op = BinOp::Eq;
            else if (*head == "and") op = BinOp::And;
            else if (*head == "or") op = BinOp::Or;
            else {
                fail("unknown operator '" + *head + "'");
                return nullptr;
            }
            auto l = expr();
            if (!l) return nullptr;
            auto r = expr();
            if (!r) return nullptr;
            out = Expr::bin(op, l, r);
        }
        if (!expect_rparen("expression")) return nullptr;
        return out;
    }

    // Appends to out; "(skip)" appends nothing.
    bool stmt_into(Program& out) {
        if (!expect_lparen("statement")) return false;
        auto head = atom("statement head");
        if (!head) return false;
        if (*head == "assign") {
            auto a = address();
            if (!a) return false;
            auto e = expr();
            if (!e) return false;
            out.push_back(StmtL::assign(*a, e));
        } else if (*head == "if") {
            auto c = expr();
            if (!c) return false;
            Program t, f;
            if (!block(t) || !block(f)) return false;
            out.push_back(StmtL::ifelse(c, std::move(t), std::move(f)));
        } else if (*head == "while") {
            auto c = expr();
            if (!c) return false;
            Program b;
            if (!block(b)) return false;
            out.push_back(StmtL::loop(c, std::move(b)));
        } else if (*head == "call") {
            auto f = atom("function name");
            if (!f) return false;
            out.push_back(StmtL::call(*f));
        } else if (*head == "throw") {
            out.push_back(StmtL::throw_());
        } else if (*head == "skip") {
            // no effect
        } else {
            return fail("unknown statement '" + *head + "'");
        }
        return expect_rparen("statement");
    }

    bool block(Program& out) {
        if (!expect_lparen("block")) return false;
        auto head = atom("block keyword");
        if (!head) return false;
        if (*head != "block") return fail("expected 'block', got '" + *head + "'");
        while (tok.kind == Token::Kind::LParen) {
            if (!stmt_into(out)) return false;
        }
        return expect_rparen("block");
    }
};

} // namespace

ParseResult parse_program(std::string_view text) {
    Parser p(text);
    Program prog;
    while (p.tok.kind != Token::Kind::End) {
        if (p.tok.kind != Token::Kind::LParen) {
            p.fail("expected '(' to open a statement");
            break;
        }
        if (!p.stmt_into(prog)) break;
    }
    if (p.err) return {std::nullopt, p.err};
    return {std::move(prog), std::nullopt};
}

} // namespace cbnlab
