#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ddm/geometry.hpp"

namespace ddm {

/// Syntax error in an expression; `offset()` is the byte offset of the problem.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset);
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Identifier that is neither a variable (x, y) nor a known function.
class UnknownIdentifier : public ParseError {
public:
    using ParseError::ParseError;
};

/// Division by zero, domain error, or a non-finite result during evaluation.
class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Immutable arithmetic expression over the variables x and y.
///
/// Grammar (whitespace is insignificant):
///
///     expr    := term  (('+' | '-') term)*
///     term    := unary (('*' | '/') unary)*
///     unary   := '-' unary | power
///     power   := primary ('^' unary)?
///     primary := number | 'x' | 'y' | func '(' expr ')' | '(' expr ')'
///     func    := sin | cos | exp | tanh | sqrt | abs
///
/// Copies share the parse tree.
class Expression {
public:
    struct Node;

    /// The constant 0.
    Expression();

    static Expression parse(std::string_view text);
    static Expression constant(double value);

    double evaluate(const Point& p) const;
    double operator()(const Point& p) const { return evaluate(p); }

    /// Canonical text with minimal parentheses; parses back to the same tree.
    std::string to_string() const;

    /// True when the expression references neither x nor y.
    bool is_constant() const;
    bool uses_y() const;

private:
    explicit Expression(std::shared_ptr<const Node> root);
    std::shared_ptr<const Node> root_;
};

}  // namespace ddm
