#include "ptinv/exprparse.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <optional>

#include "ptinv/errors.hpp"

namespace ptinv::expr {
namespace {

using NodePtr = std::shared_ptr<const Node>;

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok kind = Tok::End;
    std::size_t offset = 0;
    double number = 0.0;
    std::string text;

    Token() = default;
    Token(Tok k, std::size_t off, double num = 0.0, std::string txt = {})
        : kind(k), offset(off), number(num), text(std::move(txt)) {}
};

class Lexer {
public:
    explicit Lexer(std::string_view s) : s_(s) {}

    Token next() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        std::size_t start = pos_;
        if (pos_ >= s_.size()) return {Tok::End, start};
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number(start);
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            return {Tok::Ident, start, 0.0, std::string(s_.substr(start, pos_ - start))};
        }
        ++pos_;
        switch (c) {
            case '+': return {Tok::Plus, start};
            case '-': return {Tok::Minus, start};
            case '*': return {Tok::Star, start};
            case '/': return {Tok::Slash, start};
            case '^': return {Tok::Caret, start};
            case '(': return {Tok::LParen, start};
            case ')': return {Tok::RParen, start};
            default: break;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", start);
    }

private:
    Token number(std::size_t start) {
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_, ++n;
            return n;
        };
        std::size_t n = digits();
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            n += digits();
        }
        if (n == 0) throw ParseError("malformed number", start);
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
            if (digits() == 0) pos_ = save;  // "2e" is 2 followed by identifier e
        }
        std::string text(s_.substr(start, pos_ - start));
        return {Tok::Number, start, std::strtod(text.c_str(), nullptr), text};
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

// Binding powers: + - : 10, * / : 20, unary - : 30, ^ : 40 (right assoc).
int infix_bp(Tok t) {
    switch (t) {
        case Tok::Plus:
        case Tok::Minus: return 10;
        case Tok::Star:
        case Tok::Slash: return 20;
        case Tok::Caret: return 40;
        default: return -1;
    }
}

std::optional<Func> lookup_func(const std::string& name) {
    if (name == "sin") return Func::Sin;
    if (name == "cos") return Func::Cos;
    if (name == "exp") return Func::Exp;
    if (name == "log") return Func::Log;
    if (name == "sqrt") return Func::Sqrt;
    if (name == "tanh") return Func::Tanh;
    return std::nullopt;
}

NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

Node node(NodeKind k, std::size_t offset) {
    Node n;
    n.kind = k;
    n.offset = offset;
    return n;
}

class Parser {
public:
    explicit Parser(std::string_view s) : lex_(s) { advance(); }

    NodePtr parse_all() {
        NodePtr e = expression(0);
        if (cur_.kind != Tok::End) throw ParseError("unexpected token", cur_.offset);
        return e;
    }

private:
    void advance() { cur_ = lex_.next(); }

    NodePtr expression(int min_bp) {
        NodePtr lhs = prefix();
        for (;;) {
            int bp = infix_bp(cur_.kind);
            if (bp <= min_bp) break;
            Token op = cur_;
            advance();
            // ^ is right associative: its right operand may contain another ^.
            int rbp = op.kind == Tok::Caret ? bp - 1 : bp;
            NodePtr rhs = expression(rbp);
            Node n = node(NodeKind::Binary, op.offset);
            switch (op.kind) {
                case Tok::Plus: n.op = BinOp::Add; break;
                case Tok::Minus: n.op = BinOp::Sub; break;
                case Tok::Star: n.op = BinOp::Mul; break;
                case Tok::Slash: n.op = BinOp::Div; break;
                default: n.op = BinOp::Pow; break;
            }
            n.lhs = lhs;
            n.rhs = rhs;
            lhs = make(std::move(n));
        }
        return lhs;
    }

    NodePtr prefix() {
        Token tok = cur_;
        switch (tok.kind) {
            case Tok::Number: {
                advance();
                Node n = node(NodeKind::Constant, tok.offset);
                n.value = tok.number;
                return make(std::move(n));
            }
            case Tok::Minus: {
                advance();
                Node n = node(NodeKind::Neg, tok.offset);
                n.lhs = expression(30);
                return make(std::move(n));
            }
            case Tok::Plus:
                advance();
                return expression(30);
            case Tok::LParen: {
                advance();
                NodePtr e = expression(0);
                expect(Tok::RParen, "expected ')'");
                return e;
            }
            case Tok::Ident: return identifier(tok);
            case Tok::End: throw ParseError("unexpected end of input", tok.offset);
            default: throw ParseError("unexpected token", tok.offset);
        }
    }

    NodePtr identifier(const Token& tok) {
        advance();
        if (tok.text == "t") return make(node(NodeKind::Variable, tok.offset));
        if (tok.text == "pi") {
            Node n = node(NodeKind::Constant, tok.offset);
            n.value = std::numbers::pi;
            return make(std::move(n));
        }
        auto f = lookup_func(tok.text);
        if (!f) throw ParseError("unknown identifier '" + tok.text + "'", tok.offset);
        expect(Tok::LParen, "expected '(' after function name");
        Node n = node(NodeKind::Call, tok.offset);
        n.func = *f;
        n.lhs = expression(0);
        expect(Tok::RParen, "expected ')'");
        return make(std::move(n));
    }

    void expect(Tok k, const char* msg) {
        if (cur_.kind != k) throw ParseError(msg, cur_.offset);
        advance();
    }

    Lexer lex_;
    Token cur_{Tok::End, 0};
};

// (f(a), f'(a), f''(a)) composed with the jet a.
Jet2 chain(const Jet2& a, double f0, double f1, double f2) {
    return {f0, f1 * a.d1, f2 * a.d1 * a.d1 + f1 * a.d2};
}

[[noreturn]] void domain_fail(const Node& n, const std::string& what, double t) {
    throw DomainError(what + " at offset " + std::to_string(n.offset) + " (t = " + std::to_string(t) + ")");
}

bool depends_on_t(const Node& n) {
    switch (n.kind) {
        case NodeKind::Constant: return false;
        case NodeKind::Variable: return true;
        case NodeKind::Neg:
        case NodeKind::Call: return depends_on_t(*n.lhs);
        case NodeKind::Binary: return depends_on_t(*n.lhs) || depends_on_t(*n.rhs);
    }
    return true;
}

Jet2 eval_node(const Node& n, double t) {
    switch (n.kind) {
        case NodeKind::Constant: return {n.value, 0.0, 0.0};
        case NodeKind::Variable: return {t, 1.0, 0.0};
        case NodeKind::Neg: {
            Jet2 a = eval_node(*n.lhs, t);
            return {-a.value, -a.d1, -a.d2};
        }
        case NodeKind::Call: {
            Jet2 a = eval_node(*n.lhs, t);
            double x = a.value;
            switch (n.func) {
                case Func::Sin: return chain(a, std::sin(x), std::cos(x), -std::sin(x));
                case Func::Cos: return chain(a, std::cos(x), -std::sin(x), -std::cos(x));
                case Func::Exp: {
                    double e = std::exp(x);
                    return chain(a, e, e, e);
                }
                case Func::Log:
                    if (!(x > 0.0)) domain_fail(n, "log of non-positive argument", t);
                    return chain(a, std::log(x), 1.0 / x, -1.0 / (x * x));
                case Func::Sqrt: {
                    if (x < 0.0) domain_fail(n, "sqrt of negative argument", t);
                    double s = std::sqrt(x);
                    if (s == 0.0 && (a.d1 != 0.0 || a.d2 != 0.0))
                        domain_fail(n, "sqrt not differentiable at zero", t);
                    if (s == 0.0) return {0.0, 0.0, 0.0};
                    return chain(a, s, 0.5 / s, -0.25 / (s * x));
                }
                case Func::Tanh: {
                    double th = std::tanh(x);
                    double sech2 = 1.0 - th * th;
                    return chain(a, th, sech2, -2.0 * th * sech2);
                }
            }
            break;
        }
        case NodeKind::Binary: {
            Jet2 a = eval_node(*n.lhs, t);
            Jet2 b = eval_node(*n.rhs, t);
            switch (n.op) {
                case BinOp::Add: return {a.value + b.value, a.d1 + b.d1, a.d2 + b.d2};
                case BinOp::Sub: return {a.value - b.value, a.d1 - b.d1, a.d2 - b.d2};
                case BinOp::Mul:
                    return {a.value * b.value, a.d1 * b.value + a.value * b.d1,
                            a.d2 * b.value + 2.0 * a.d1 * b.d1 + a.value * b.d2};
                case BinOp::Div: {
                    if (b.value == 0.0) domain_fail(n, "division by zero", t);
                    double q = a.value / b.value;
                    double q1 = (a.d1 - q * b.d1) / b.value;
                    double q2 = (a.d2 - 2.0 * q1 * b.d1 - q * b.d2) / b.value;
                    return {q, q1, q2};
                }
                case BinOp::Pow: {
                    bool const_exp = !depends_on_t(*n.rhs);
                    double p = b.value;
                    if (const_exp && p == std::round(p) && std::abs(p) < 1e9) {
                        if (p == 0.0) return {1.0, 0.0, 0.0};
                        if (a.value == 0.0 && p < 0.0) domain_fail(n, "zero raised to a negative power", t);
                        double f0 = std::pow(a.value, p);
                        double f1 = p * std::pow(a.value, p - 1.0);
                        double f2 = p * (p - 1.0) * (p == 1.0 ? 1.0 : std::pow(a.value, p - 2.0));
                        return chain(a, f0, f1, f2);
                    }
                    if (!(a.value > 0.0)) domain_fail(n, "non-integer power of non-positive base", t);
                    if (const_exp) {
                        double f0 = std::pow(a.value, p);
                        return chain(a, f0, p * f0 / a.value, p * (p - 1.0) * f0 / (a.value * a.value));
                    }
                    // exp(b log a)
                    double la = std::log(a.value);
                    Jet2 l{la, a.d1 / a.value, a.d2 / a.value - a.d1 * a.d1 / (a.value * a.value)};
                    Jet2 e{b.value * l.value, b.d1 * l.value + b.value * l.d1,
                           b.d2 * l.value + 2.0 * b.d1 * l.d1 + b.value * l.d2};
                    double ex = std::exp(e.value);
                    return chain(e, ex, ex, ex);
                }
            }
            break;
        }
    }
    domain_fail(n, "malformed expression node", t);
}

std::string fmt_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* func_name(Func f) {
    switch (f) {
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Exp: return "exp";
        case Func::Log: return "log";
        case Func::Sqrt: return "sqrt";
        case Func::Tanh: return "tanh";
    }
    return "?";
}

void print(const Node& n, std::string& out) {
    switch (n.kind) {
        case NodeKind::Constant: out += fmt_number(n.value); return;
        case NodeKind::Variable: out += 't'; return;
        case NodeKind::Neg:
            out += "(-";
            print(*n.lhs, out);
            out += ')';
            return;
        case NodeKind::Call:
            out += func_name(n.func);
            out += '(';
            print(*n.lhs, out);
            out += ')';
            return;
        case NodeKind::Binary: {
            static constexpr const char* ops[] = {" + ", " - ", " * ", " / ", " ^ "};
            out += '(';
            print(*n.lhs, out);
            out += ops[static_cast<int>(n.op)];
            print(*n.rhs, out);
            out += ')';
            return;
        }
    }
}

}  // namespace

Expr Expr::parse(std::string_view source) {
    Parser p(source);
    return Expr(p.parse_all(), std::string(source));
}

Expr Expr::constant(double c) {
    Node n = node(NodeKind::Constant, 0);
    n.value = c;
    return Expr(make(std::move(n)), fmt_number(c));
}

Jet2 Expr::eval_jet2(double t) const { return eval_node(*root_, t); }

bool Expr::is_constant() const { return !depends_on_t(*root_); }

std::string Expr::print() const {
    std::string out;
    ::ptinv::expr::print(*root_, out);
    return out;
}

}  // namespace ptinv::expr
