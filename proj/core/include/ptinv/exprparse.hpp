#pragma once

// Scalar functions of t given as text, e.g. "1 + 0.2*sin(2*t)". Evaluation
// returns the value with exact first and second derivatives.

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

namespace ptinv::expr {

struct Jet2 {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

enum class NodeKind { Constant, Variable, Neg, Call, Binary };
enum class Func { Sin, Cos, Exp, Log, Sqrt, Tanh };
enum class BinOp { Add, Sub, Mul, Div, Pow };

struct Node {
    NodeKind kind = NodeKind::Constant;
    std::size_t offset = 0;  // byte offset of the token that produced the node
    double value = 0.0;      // Constant
    Func func = Func::Sin;   // Call
    BinOp op = BinOp::Add;   // Binary
    std::shared_ptr<const Node> lhs;  // operand for Neg/Call, left for Binary
    std::shared_ptr<const Node> rhs;
};

class Expr {
public:
    // Throws ParseError (with byte offset) on malformed input or unknown names.
    static Expr parse(std::string_view source);
    static Expr constant(double c);

    // Throws DomainError naming the offending node.
    Jet2 eval_jet2(double t) const;
    double eval(double t) const { return eval_jet2(t).value; }

    // True when the tree does not reference t.
    bool is_constant() const;

    // Fully parenthesized canonical form; parse(print(e)) reproduces e.
    std::string print() const;
    const std::string& source() const { return source_; }
    const Node& root() const { return *root_; }

private:
    Expr(std::shared_ptr<const Node> root, std::string source)
        : root_(std::move(root)), source_(std::move(source)) {}

    std::shared_ptr<const Node> root_;
    std::string source_;
};

}  // namespace ptinv::expr
