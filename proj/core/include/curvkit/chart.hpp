#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curvkit/expr.hpp"

namespace curvkit {

/// A coordinate chart with symbolic metric components. Components are stored
/// as a symmetric n x n grid of expression trees; a null entry means the
/// component is identically zero. Invertibility of the metric matrix is a
/// per-point property checked at evaluation, not at construction.
struct MetricChart {
    int dim = 0;
    std::vector<std::string> coordinates;       // x1..xn
    std::vector<ExprPtr> components;            // dim*dim, row-major, symmetric
    ParamMap parameters;
    std::vector<Inequality> domain;             // all must hold at an admissible point

    /// Box from which default sample points are drawn.
    std::vector<double> sample_lo, sample_hi;

    const ExprPtr& component(int i, int j) const { return components[static_cast<std::size_t>(i) * dim + j]; }
    void set_component(int i, int j, ExprPtr e);

    bool admissible(std::span<const double> point) const;

    /// Validates shape, coordinate names and every component/domain
    /// expression against the declared symbols. Throws on any violation.
    void validate() const;
};

/// Builds a chart with the given dimension, coordinates x1..xn, and the
/// default sampling box [0.1, 0.9]^n.
MetricChart make_chart(int dim);

/// Parses the plain-text chart format:
///   dim = N
///   coordinates = x1, x2, ...        (optional; defaults to x1..xN)
///   g[i][j] = <expression>           (1-based indices; absent entries are 0)
///   param.NAME = <real>
///   domain = <expr> <cmp> <expr>     (repeatable)
/// Lines starting with '#' and blank lines are ignored.
MetricChart parse_chart(std::string_view text);

MetricChart load_chart_file(const std::string& path);

} // namespace curvkit
