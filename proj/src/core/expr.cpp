#include "scqc/expr.hpp"

#include <cctype>
#include <cstdlib>
#include <numbers>
#include <variant>
#include <vector>

#include "scqc/errors.hpp"

namespace scqc {

enum class Op { Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Sqrt, Exp, Log };

struct Expression::Node {
    enum class Kind { Constant, Variable, Unary, Binary } kind = Kind::Constant;
    double value = 0.0;
    Op op = Op::Add;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr constant(double v) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = Expression::Node::Kind::Constant;
    n->value = v;
    return n;
}

NodePtr unary(Op op, NodePtr a) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = Expression::Node::Kind::Unary;
    n->op = op;
    n->lhs = std::move(a);
    return n;
}

NodePtr binary(Op op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = Expression::Node::Kind::Binary;
    n->op = op;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ValidationError("expression \"" + s_ + "\", column " + std::to_string(pos_ + 1) +
                              ": " + what);
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr a = term();
        while (true) {
            if (accept('+'))
                a = binary(Op::Add, a, term());
            else if (accept('-'))
                a = binary(Op::Sub, a, term());
            else
                return a;
        }
    }

    NodePtr term() {
        NodePtr a = factor();
        while (true) {
            if (accept('*'))
                a = binary(Op::Mul, a, factor());
            else if (accept('/'))
                a = binary(Op::Div, a, factor());
            else
                return a;
        }
    }

    NodePtr factor() {
        if (accept('+')) return factor();
        if (accept('-')) return unary(Op::Neg, factor());
        NodePtr base = atom();
        if (accept('^')) return binary(Op::Pow, base, factor());
        return base;
    }

    NodePtr atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + pos_;
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin) fail("bad number");
            pos_ += static_cast<std::size_t>(end - begin);
            return constant(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            const std::string name = s_.substr(start, pos_ - start);
            if (name == "pi") return constant(std::numbers::pi);
            if (name == "t" || name == "l" || name == "lambda") {
                auto n = std::make_shared<Expression::Node>();
                n->kind = Expression::Node::Kind::Variable;
                return n;
            }
            Op op;
            if (name == "sin")
                op = Op::Sin;
            else if (name == "cos")
                op = Op::Cos;
            else if (name == "sqrt")
                op = Op::Sqrt;
            else if (name == "exp")
                op = Op::Exp;
            else if (name == "log")
                op = Op::Log;
            else {
                pos_ = start;
                fail("unknown identifier '" + name + "'");
            }
            if (!accept('(')) fail("expected '(' after " + name);
            NodePtr arg = expr();
            if (!accept(')')) fail("expected ')'");
            return unary(op, arg);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

template <class V>
V evaluate(const Expression::Node& n, const V& x) {
    using K = Expression::Node::Kind;
    switch (n.kind) {
        case K::Constant:
            return V(n.value);
        case K::Variable:
            return x;
        case K::Unary: {
            const V a = evaluate(*n.lhs, x);
            using std::cos, std::sin, std::sqrt, std::exp, std::log;
            switch (n.op) {
                case Op::Neg: return -a;
                case Op::Sin: return sin(a);
                case Op::Cos: return cos(a);
                case Op::Sqrt: return sqrt(a);
                case Op::Exp: return exp(a);
                case Op::Log: return log(a);
                default: break;
            }
            break;
        }
        case K::Binary: {
            const V a = evaluate(*n.lhs, x);
            if (n.op == Op::Pow && n.rhs->kind == K::Constant) {
                using std::pow;
                return pow(a, n.rhs->value);
            }
            const V b = evaluate(*n.rhs, x);
            switch (n.op) {
                case Op::Add: return a + b;
                case Op::Sub: return a - b;
                case Op::Mul: return a * b;
                case Op::Div: return a / b;
                case Op::Pow: {
                    using std::exp, std::log;
                    return exp(log(a) * b);
                }
                default: break;
            }
            break;
        }
    }
    return V(0.0);
}

}  // namespace

Expression Expression::parse(const std::string& text) {
    Expression e;
    e.text_ = text;
    e.root_ = Parser(text).parse();
    return e;
}

double Expression::operator()(double x) const { return evaluate<double>(*root_, x); }

Jet3 Expression::operator()(const Jet3& x) const { return evaluate<Jet3>(*root_, x); }

}  // namespace scqc
