#ifndef VECTHOST_EXPRESSION_HPP
#define VECTHOST_EXPRESSION_HPP

#include "vecthost/grid.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace vecthost {

/// Parse failure, with 0-based character offset into the input.
class ParseError : public SimError {
public:
    ParseError(const std::string& msg, size_t pos)
        : SimError(msg + " at position " + std::to_string(pos)), pos_(pos) {}
    size_t position() const { return pos_; }

private:
    size_t pos_;
};

/// Evaluation failure (division by zero, non-finite result).
class EvalError : public SimError {
public:
    explicit EvalError(const std::string& msg) : SimError(msg) {}
};

struct ExprNode;

/// Arithmetic expression in the variables x, y, a.
///
/// Grammar: + - * / ^ with ^ right-associative and binding tighter than
/// unary minus; functions sin, cos, exp, abs (one argument) and min, max
/// (two arguments); the constant pi. Whitespace is ignored.
class Expression {
public:
    Expression();
    Expression(const Expression&);
    Expression(Expression&&) noexcept;
    Expression& operator=(const Expression&);
    Expression& operator=(Expression&&) noexcept;
    ~Expression();

    static Expression parse(std::string_view text);

    double eval(double x, double y, double a) const;
    /// Evaluate an expression of a alone (rejects use of x or y).
    double eval_age(double a) const;

    bool uses_x() const;
    bool uses_y() const;
    bool uses_a() const;

    /// Canonical fully parenthesized form; parsing it back gives an equal tree.
    std::string to_string() const;

    bool operator==(const Expression& o) const;
    bool operator!=(const Expression& o) const { return !(*this == o); }

    /// The text the expression was parsed from.
    const std::string& source() const { return source_; }

private:
    std::shared_ptr<const ExprNode> root_;
    std::string source_;
};

/// Evaluate at the cell centers of the active cells of a mask.
/// The expression may use x and y only.
ScalarField evaluate_field(const Expression& e, const Grid& g, Mask m);

} // namespace vecthost

#endif
