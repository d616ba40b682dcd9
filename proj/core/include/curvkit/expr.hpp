#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "curvkit/jet.hpp"

namespace curvkit {

/// Expression tree for metric components. Identifiers are resolved against
/// the chart's coordinate names (x1..xn) and declared scalar parameters at
/// evaluation time; `validate_symbols` performs the same resolution eagerly
/// and reports the first unknown name with its source offset.
struct Expr {
    enum class Kind { number, identifier, negate, binary, call };

    Kind kind = Kind::number;
    double number = 0.0;      // Kind::number
    std::string name;         // Kind::identifier / Kind::call
    char op = 0;              // Kind::binary: one of + - * / ^
    std::vector<std::shared_ptr<const Expr>> args;
    std::size_t offset = 0;   // byte offset in the source text
};

using ExprPtr = std::shared_ptr<const Expr>;

/// Grammar (whitespace insignificant):
///   expr   := term (("+"|"-") term)*
///   term   := factor (("*"|"/") factor)*
///   factor := ("-")? power
///   power  := atom ("^" factor)?
///   atom   := NUMBER | IDENT | IDENT "(" expr ("," expr)* ")" | "(" expr ")"
/// Functions are restricted to exp, log, sin, cos, sqrt (one argument each).
/// Throws ParseError with the byte offset on any malformed input.
ExprPtr parse_expression(std::string_view src);

/// Emits text that reparses to a structurally identical tree. Compound
/// subtrees are fully parenthesized; number literals use round-trip
/// precision.
std::string format_expression(const Expr& ast);

bool structurally_equal(const Expr& a, const Expr& b);

using ParamMap = std::map<std::string, double>;

/// Throws ParseError (with the identifier's offset) if the tree references a
/// name that is neither a listed coordinate nor a declared parameter.
void validate_symbols(const Expr& ast, std::span<const std::string> coordinates,
                      const ParamMap& parameters);

/// Order-3 jet of the expression at `point`; coordinate i seeds variable i.
Jet3 evaluate_jet(const Expr& ast, std::span<const std::string> coordinates,
                  std::span<const double> point, const ParamMap& parameters);

/// Plain value evaluation (used by domain predicates).
double evaluate_value(const Expr& ast, std::span<const std::string> coordinates,
                      std::span<const double> point, const ParamMap& parameters);

/// One inequality between two expressions, e.g. "x5 > 0".
struct Inequality {
    ExprPtr lhs;
    enum class Cmp { lt, le, gt, ge } cmp = Cmp::gt;
    ExprPtr rhs;

    bool holds(std::span<const std::string> coordinates, std::span<const double> point,
               const ParamMap& parameters) const;
};

Inequality parse_inequality(std::string_view src);

} // namespace curvkit
