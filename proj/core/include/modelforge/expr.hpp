#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace modelforge {

enum class ExprOp { Literal, Variable, Add, Sub, Mul, Div, Neg, Pow, Call };

enum class BuiltinFn { Sin, Cos, Sinh, Cosh, Exp, Tanh, Sqrt, Abs };

class ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

/// Immutable arithmetic expression tree in the single variable r.
///
/// Construction goes through the static factories, which fold constants and
/// prune algebraic identities so that repeated symbolic differentiation does
/// not blow the tree up. Pow is restricted to integer exponents; this keeps
/// d/dr closed over the node set. Division nodes carry an implicit
/// nonzero-denominator domain that callers enforce by sampling (see
/// CurvatureProfile's parse-time audit).
class ExprNode {
public:
    static ExprPtr literal(double value);
    static ExprPtr variable();
    static ExprPtr add(ExprPtr lhs, ExprPtr rhs);
    static ExprPtr sub(ExprPtr lhs, ExprPtr rhs);
    static ExprPtr mul(ExprPtr lhs, ExprPtr rhs);
    static ExprPtr div(ExprPtr lhs, ExprPtr rhs);
    static ExprPtr neg(ExprPtr operand);
    static ExprPtr pow(ExprPtr base, int exponent);
    static ExprPtr call(BuiltinFn fn, ExprPtr argument);

    ExprOp op() const noexcept { return op_; }
    double literal_value() const noexcept { return literal_; }
    int exponent() const noexcept { return exponent_; }
    BuiltinFn fn() const noexcept { return fn_; }
    const ExprPtr& lhs() const noexcept { return lhs_; }
    const ExprPtr& rhs() const noexcept { return rhs_; }

    /// Plain IEEE evaluation; division by zero and sqrt of a negative produce
    /// inf/NaN rather than throwing, so callers audit finiteness themselves.
    double eval(double r) const;

    /// Symbolic d/dr; the result is again an expression tree.
    ExprPtr derivative() const;

    bool depends_on_variable() const;

    /// Prints a form the grammar accepts back (round-trip safe).
    std::string to_string() const;

private:
    ExprNode() = default;
    static std::shared_ptr<ExprNode> blank();

    ExprOp op_ = ExprOp::Literal;
    double literal_ = 0.0;
    int exponent_ = 0;
    BuiltinFn fn_ = BuiltinFn::Sin;
    ExprPtr lhs_;
    ExprPtr rhs_;
};

/// Parses the profile expression grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := '-'? (number | 'r' | func '(' expr ')' | '(' expr ')') ('^' integer)?
/// Throws SyntaxError / UnsupportedFunctionError.
ExprPtr parse_expression(std::string_view text);

const char* builtin_fn_name(BuiltinFn fn);

}  // namespace modelforge
