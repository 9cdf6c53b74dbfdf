#pragma once

#include "hml/errors.hpp"

#include <cstddef>
#include <memory>
#include <string>

namespace hml {

/// Half-open byte range [offset, offset+length) into the original source
/// text; attached to every parse/eval diagnostic.
struct SourceSpan {
    std::size_t offset = 0;
    std::size_t length = 0;
};

/// Syntax or name error while parsing an expression. `span` points at the
/// offending token; the message already embeds the position.
class ParseError : public ParameterError {
public:
    ParseError(const std::string& what, SourceSpan s) : ParameterError(what), span(s) {}
    SourceSpan span;
};

/// Numeric failure while evaluating (log of a non-positive value, 0^-1, any
/// non-finite intermediate). `span` points at the subexpression that failed.
class EvalError : public DomainError {
public:
    EvalError(const std::string& what, SourceSpan s) : DomainError(what), span(s) {}
    SourceSpan span;
};

namespace detail {
struct ExprNode;
}

/// Immutable parsed arithmetic expression in the variables t and x.
///
/// Grammar: numbers, t, x, pi, e; unary minus; + - * / and right-associative
/// ^; calls sin, cos, exp, ln, abs, sqrt, erfc. Trees are immutable and
/// cheap to copy/share across threads.
class Expr {
public:
    Expr() = default;

    /// Value at (t, x). Every intermediate is checked: a non-finite result
    /// raises EvalError pointing at the subexpression that produced it.
    double eval(double t, double x) const;

    /// Canonical text form. Parsing the result yields a structurally equal
    /// tree (round-trip invariant); numbers are printed with 17 significant
    /// digits so values survive exactly.
    std::string to_string() const;

    bool structurally_equal(const Expr& other) const;
    bool empty() const { return root_ == nullptr; }

    friend Expr parse_expression(const std::string& text);

private:
    std::shared_ptr<const detail::ExprNode> root_;
};

/// Parse `text` into an expression tree. Throws ParseError (with a span into
/// `text`) on syntax errors, unknown names, or trailing garbage.
Expr parse_expression(const std::string& text);

} // namespace hml
