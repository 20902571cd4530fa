#include "modelforge/expr.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <utility>

#include "modelforge/errors.hpp"

namespace modelforge {

std::shared_ptr<ExprNode> ExprNode::blank() {
    return std::shared_ptr<ExprNode>(new ExprNode());
}

namespace {

bool is_literal(const ExprPtr& e, double v) {
    return e->op() == ExprOp::Literal && e->literal_value() == v;
}

double fold_call(BuiltinFn fn, double x) {
    switch (fn) {
        case BuiltinFn::Sin: return std::sin(x);
        case BuiltinFn::Cos: return std::cos(x);
        case BuiltinFn::Sinh: return std::sinh(x);
        case BuiltinFn::Cosh: return std::cosh(x);
        case BuiltinFn::Exp: return std::exp(x);
        case BuiltinFn::Tanh: return std::tanh(x);
        case BuiltinFn::Sqrt: return std::sqrt(x);
        case BuiltinFn::Abs: return std::fabs(x);
    }
    return 0.0;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

const char* builtin_fn_name(BuiltinFn fn) {
    switch (fn) {
        case BuiltinFn::Sin: return "sin";
        case BuiltinFn::Cos: return "cos";
        case BuiltinFn::Sinh: return "sinh";
        case BuiltinFn::Cosh: return "cosh";
        case BuiltinFn::Exp: return "exp";
        case BuiltinFn::Tanh: return "tanh";
        case BuiltinFn::Sqrt: return "sqrt";
        case BuiltinFn::Abs: return "abs";
    }
    return "?";
}

ExprPtr ExprNode::literal(double value) {
    auto n = blank();
    n->op_ = ExprOp::Literal;
    n->literal_ = value;
    return n;
}

ExprPtr ExprNode::variable() {
    auto n = blank();
    n->op_ = ExprOp::Variable;
    return n;
}

ExprPtr ExprNode::add(ExprPtr lhs, ExprPtr rhs) {
    if (lhs->op() == ExprOp::Literal && rhs->op() == ExprOp::Literal)
        return literal(lhs->literal_value() + rhs->literal_value());
    if (is_literal(lhs, 0.0)) return rhs;
    if (is_literal(rhs, 0.0)) return lhs;
    auto n = blank();
    n->op_ = ExprOp::Add;
    n->lhs_ = std::move(lhs);
    n->rhs_ = std::move(rhs);
    return n;
}

ExprPtr ExprNode::sub(ExprPtr lhs, ExprPtr rhs) {
    if (lhs->op() == ExprOp::Literal && rhs->op() == ExprOp::Literal)
        return literal(lhs->literal_value() - rhs->literal_value());
    if (is_literal(rhs, 0.0)) return lhs;
    if (is_literal(lhs, 0.0)) return neg(std::move(rhs));
    auto n = blank();
    n->op_ = ExprOp::Sub;
    n->lhs_ = std::move(lhs);
    n->rhs_ = std::move(rhs);
    return n;
}

ExprPtr ExprNode::mul(ExprPtr lhs, ExprPtr rhs) {
    if (lhs->op() == ExprOp::Literal && rhs->op() == ExprOp::Literal)
        return literal(lhs->literal_value() * rhs->literal_value());
    if (is_literal(lhs, 0.0) || is_literal(rhs, 0.0)) return literal(0.0);
    if (is_literal(lhs, 1.0)) return rhs;
    if (is_literal(rhs, 1.0)) return lhs;
    if (is_literal(lhs, -1.0)) return neg(std::move(rhs));
    if (is_literal(rhs, -1.0)) return neg(std::move(lhs));
    auto n = blank();
    n->op_ = ExprOp::Mul;
    n->lhs_ = std::move(lhs);
    n->rhs_ = std::move(rhs);
    return n;
}

ExprPtr ExprNode::div(ExprPtr lhs, ExprPtr rhs) {
    if (lhs->op() == ExprOp::Literal && rhs->op() == ExprOp::Literal &&
        rhs->literal_value() != 0.0)
        return literal(lhs->literal_value() / rhs->literal_value());
    if (is_literal(lhs, 0.0)) return literal(0.0);
    if (is_literal(rhs, 1.0)) return lhs;
    auto n = blank();
    n->op_ = ExprOp::Div;
    n->lhs_ = std::move(lhs);
    n->rhs_ = std::move(rhs);
    return n;
}

ExprPtr ExprNode::neg(ExprPtr operand) {
    if (operand->op() == ExprOp::Literal) return literal(-operand->literal_value());
    if (operand->op() == ExprOp::Neg) return operand->lhs();
    auto n = blank();
    n->op_ = ExprOp::Neg;
    n->lhs_ = std::move(operand);
    return n;
}

ExprPtr ExprNode::pow(ExprPtr base, int exponent) {
    if (exponent == 0) return literal(1.0);
    if (exponent == 1) return base;
    if (base->op() == ExprOp::Literal)
        return literal(std::pow(base->literal_value(), exponent));
    auto n = blank();
    n->op_ = ExprOp::Pow;
    n->lhs_ = std::move(base);
    n->exponent_ = exponent;
    return n;
}

ExprPtr ExprNode::call(BuiltinFn fn, ExprPtr argument) {
    if (argument->op() == ExprOp::Literal)
        return literal(fold_call(fn, argument->literal_value()));
    auto n = blank();
    n->op_ = ExprOp::Call;
    n->fn_ = fn;
    n->lhs_ = std::move(argument);
    return n;
}

double ExprNode::eval(double r) const {
    switch (op_) {
        case ExprOp::Literal: return literal_;
        case ExprOp::Variable: return r;
        case ExprOp::Add: return lhs_->eval(r) + rhs_->eval(r);
        case ExprOp::Sub: return lhs_->eval(r) - rhs_->eval(r);
        case ExprOp::Mul: return lhs_->eval(r) * rhs_->eval(r);
        case ExprOp::Div: return lhs_->eval(r) / rhs_->eval(r);
        case ExprOp::Neg: return -lhs_->eval(r);
        case ExprOp::Pow: {
            // Integer power by squaring; negative exponents via reciprocal.
            double base = lhs_->eval(r);
            int e = exponent_ >= 0 ? exponent_ : -exponent_;
            double acc = 1.0, p = base;
            while (e > 0) {
                if (e & 1) acc *= p;
                p *= p;
                e >>= 1;
            }
            return exponent_ >= 0 ? acc : 1.0 / acc;
        }
        case ExprOp::Call: return fold_call(fn_, lhs_->eval(r));
    }
    return 0.0;
}

ExprPtr ExprNode::derivative() const {
    switch (op_) {
        case ExprOp::Literal: return literal(0.0);
        case ExprOp::Variable: return literal(1.0);
        case ExprOp::Add: return add(lhs_->derivative(), rhs_->derivative());
        case ExprOp::Sub: return sub(lhs_->derivative(), rhs_->derivative());
        case ExprOp::Mul:
            return add(mul(lhs_->derivative(), rhs_), mul(lhs_, rhs_->derivative()));
        case ExprOp::Div:
            return div(sub(mul(lhs_->derivative(), rhs_), mul(lhs_, rhs_->derivative())),
                       pow(rhs_, 2));
        case ExprOp::Neg: return neg(lhs_->derivative());
        case ExprOp::Pow:
            return mul(mul(literal(exponent_), pow(lhs_, exponent_ - 1)),
                       lhs_->derivative());
        case ExprOp::Call: {
            ExprPtr u = lhs_;
            ExprPtr du = lhs_->derivative();
            switch (fn_) {
                case BuiltinFn::Sin: return mul(call(BuiltinFn::Cos, u), du);
                case BuiltinFn::Cos: return mul(neg(call(BuiltinFn::Sin, u)), du);
                case BuiltinFn::Sinh: return mul(call(BuiltinFn::Cosh, u), du);
                case BuiltinFn::Cosh: return mul(call(BuiltinFn::Sinh, u), du);
                case BuiltinFn::Exp: return mul(call(BuiltinFn::Exp, u), du);
                case BuiltinFn::Tanh:
                    return mul(sub(literal(1.0), pow(call(BuiltinFn::Tanh, u), 2)), du);
                case BuiltinFn::Sqrt:
                    return div(du, mul(literal(2.0), call(BuiltinFn::Sqrt, u)));
                case BuiltinFn::Abs:
                    // sign(u) expressed as u/|u|; undefined at u = 0 as it should be.
                    return mul(div(u, call(BuiltinFn::Abs, u)), du);
            }
            return literal(0.0);
        }
    }
    return literal(0.0);
}

bool ExprNode::depends_on_variable() const {
    switch (op_) {
        case ExprOp::Literal: return false;
        case ExprOp::Variable: return true;
        default:
            if (lhs_ && lhs_->depends_on_variable()) return true;
            return rhs_ && rhs_->depends_on_variable();
    }
}

namespace {

// Precedence tiers for printing: additive 1, multiplicative 2, unary minus 3,
// power 4, atom 5. A child printed in a context of higher precedence than its
// own gets parenthesized.
int precedence(const ExprNode& n) {
    switch (n.op()) {
        case ExprOp::Add:
        case ExprOp::Sub: return 1;
        case ExprOp::Mul:
        case ExprOp::Div: return 2;
        case ExprOp::Neg: return 3;
        case ExprOp::Pow: return 4;
        default: return 5;
    }
}

void print_node(const ExprNode& n, int context, std::string& out) {
    const int prec = precedence(n);
    const bool parens = prec < context;
    if (parens) out += '(';
    switch (n.op()) {
        case ExprOp::Literal: out += format_double(n.literal_value()); break;
        case ExprOp::Variable: out += 'r'; break;
        case ExprOp::Add:
            print_node(*n.lhs(), 1, out);
            out += " + ";
            print_node(*n.rhs(), 2, out);
            break;
        case ExprOp::Sub:
            print_node(*n.lhs(), 1, out);
            out += " - ";
            print_node(*n.rhs(), 2, out);
            break;
        case ExprOp::Mul:
            print_node(*n.lhs(), 2, out);
            out += '*';
            print_node(*n.rhs(), 3, out);
            break;
        case ExprOp::Div:
            print_node(*n.lhs(), 2, out);
            out += '/';
            print_node(*n.rhs(), 3, out);
            break;
        case ExprOp::Neg:
            out += '-';
            print_node(*n.lhs(), 3, out);
            break;
        case ExprOp::Pow: {
            print_node(*n.lhs(), 5, out);
            out += '^';
            char buf[16];
            std::snprintf(buf, sizeof buf, "%d", n.exponent());
            out += buf;
            break;
        }
        case ExprOp::Call:
            out += builtin_fn_name(n.fn());
            out += '(';
            print_node(*n.lhs(), 1, out);
            out += ')';
            break;
    }
    if (parens) out += ')';
}

struct Parser {
    std::string_view text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    [[noreturn]] void fail(const std::string& expected) {
        throw SyntaxError("syntax error at position " + std::to_string(pos) + ": expected " +
                              expected,
                          pos, expected);
    }

    double parse_number() {
        skip_ws();
        const char* begin = text.data() + pos;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) fail("number");
        pos += static_cast<std::size_t>(end - begin);
        return v;
    }

    int parse_integer() {
        skip_ws();
        std::size_t start = pos;
        bool negative = false;
        if (peek() == '-' || peek() == '+') {
            negative = text[pos] == '-';
            ++pos;
        }
        skip_ws();
        if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) {
            pos = start;
            fail("integer exponent");
        }
        long value = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            value = value * 10 + (text[pos] - '0');
            if (value > 1000) fail("exponent in [-1000, 1000]");
            ++pos;
        }
        return static_cast<int>(negative ? -value : value);
    }

    std::string parse_identifier() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && std::isalpha(static_cast<unsigned char>(text[pos]))) ++pos;
        return std::string(text.substr(start, pos - start));
    }

    ExprPtr parse_expr() {
        ExprPtr node = parse_term();
        while (true) {
            char c = peek();
            if (c == '+') {
                ++pos;
                node = ExprNode::add(node, parse_term());
            } else if (c == '-') {
                ++pos;
                node = ExprNode::sub(node, parse_term());
            } else {
                return node;
            }
        }
    }

    ExprPtr parse_term() {
        ExprPtr node = parse_factor();
        while (true) {
            char c = peek();
            if (c == '*') {
                ++pos;
                node = ExprNode::mul(node, parse_factor());
            } else if (c == '/') {
                ++pos;
                node = ExprNode::div(node, parse_factor());
            } else {
                return node;
            }
        }
    }

    ExprPtr parse_factor() {
        bool negated = false;
        if (peek() == '-') {
            ++pos;
            negated = true;
        }
        ExprPtr base = parse_atom();
        if (peek() == '^') {
            ++pos;
            base = ExprNode::pow(base, parse_integer());
        }
        return negated ? ExprNode::neg(base) : base;
    }

    ExprPtr parse_atom() {
        char c = peek();
        if (c == '(') {
            ++pos;
            ExprPtr inner = parse_expr();
            if (peek() != ')') fail("')'");
            ++pos;
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return ExprNode::literal(parse_number());
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t ident_pos = pos;
            std::string name = parse_identifier();
            if (name == "r" && peek() != '(') return ExprNode::variable();
            if (peek() == '(') {
                static constexpr std::array<std::pair<const char*, BuiltinFn>, 8> table{{
                    {"sin", BuiltinFn::Sin},
                    {"cos", BuiltinFn::Cos},
                    {"sinh", BuiltinFn::Sinh},
                    {"cosh", BuiltinFn::Cosh},
                    {"exp", BuiltinFn::Exp},
                    {"tanh", BuiltinFn::Tanh},
                    {"sqrt", BuiltinFn::Sqrt},
                    {"abs", BuiltinFn::Abs},
                }};
                for (const auto& [fname, fn] : table) {
                    if (name == fname) {
                        ++pos;  // consume '('
                        ExprPtr arg = parse_expr();
                        if (peek() != ')') fail("')'");
                        ++pos;
                        return ExprNode::call(fn, arg);
                    }
                }
                throw UnsupportedFunctionError("unsupported function '" + name +
                                               "' at position " + std::to_string(ident_pos));
            }
            pos = ident_pos;
            fail("number, 'r', function call, or '('");
        }
        fail("number, 'r', function call, or '('");
    }
};

}  // namespace

std::string ExprNode::to_string() const {
    std::string out;
    print_node(*this, 0, out);
    return out;
}

ExprPtr parse_expression(std::string_view text) {
    Parser p{text};
    ExprPtr root = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("end of input");
    return root;
}

}  // namespace modelforge
