#pragma once

// Arithmetic expressions over a declared variable set.
//
// Grammar (ASCII):
//     expr    := term (('+' | '-') term)*
//     term    := unary (('*' | '/') unary)*
//     unary   := '-' unary | power
//     power   := primary ('^' unary)?          right-associative
//     primary := number | 'pi' | variable | func '(' expr ')' | '(' expr ')'
//     func    := sin | cos | sinh | cosh | exp | abs | sqrt
// so '^' binds tighter than unary minus: -x^2 is -(x^2), 2^-1 is 0.5.

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace beamide {

class Expression {
public:
    /// The constant 0 over no variables.
    Expression();

    /// Throws ParseError with the byte offset of the first fault.
    static Expression parse(std::string_view text, std::vector<std::string> variables);

    /// Arguments in the order of variables(). Throws ExpressionFault on a
    /// domain fault; the result is always finite.
    double evaluate(std::span<const double> args) const;
    double operator()(double a) const;
    double operator()(double a, double b) const;
    double operator()(double a, double b, double c) const;

    const std::vector<std::string>& variables() const noexcept { return variables_; }
    bool uses(std::string_view variable) const;

    /// Same tree over a new variable list of equal length (positional rename).
    Expression with_variables(std::vector<std::string> variables) const;
    /// Every occurrence of `variable` replaced by its negation.
    Expression negating(std::string_view variable) const;

    /// Fully parenthesized form that parses back to an equivalent tree.
    std::string to_string() const;

    struct Node;

private:
    Expression(std::shared_ptr<const Node> root, std::vector<std::string> variables);

    std::shared_ptr<const Node> root_;
    std::vector<std::string> variables_;
};

inline Expression parse_expr(std::string_view text, std::vector<std::string> variables) {
    return Expression::parse(text, std::move(variables));
}

}  // namespace beamide
