#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "curvkit/chart.hpp"
#include "curvkit/jet.hpp"

namespace curvkit {

/// Closed-form reference values for the nonzero curvature components of a
/// built-in metric, keyed by 0-based index tuples (one representative per
/// symmetry orbit).
struct OracleComponents {
    std::map<std::array<int, 4>, double> r;
    std::map<std::array<int, 2>, double> s;
};

/// 5-dimensional chart with g = diag(f, f, f, f, f*h); f may depend on x1
/// only and h on x1, x2 only (violations are detected by scanning the
/// expression trees). Throws ParseError on malformed expressions.
MetricChart build_met1(std::string_view f_expr, std::string_view h_expr);

/// The closed-form nonzero R and S components of the met1 family, given the
/// jets of f and h at the point (derivatives are read as f' = d1(0),
/// h2 = d1(1), h12 = d2(0,1), ...).
OracleComponents met1_oracle(const Jet3& f, const Jet3& h);

/// Convenience overload evaluating f and h from their expressions.
OracleComponents met1_oracle(std::string_view f_expr, std::string_view h_expr,
                             std::span<const double> point);

/// 6-dimensional diagonal product chart
/// ds^2 = (dx1)^2 + e^{x1}(dx2)^2 + e^{x1}(dx3)^2
///      + (dx4)^2 + e^{x4}(dx5)^2 + e^{x4}(x5+1)^2(dx6)^2,  x5 > 0.
MetricChart build_met2();

OracleComponents met2_oracle(std::span<const double> point);

/// The 3-dimensional constant-curvature factor of met2:
/// ds^2 = (dx1)^2 + e^{x1}(dx2)^2 + e^{x1}(dx3)^2.
MetricChart build_met2_block3();

/// A named builder. `parameters` carries expression-valued parameters (the
/// f and h of met1); entries with no required parameters ignore it.
struct CatalogEntry {
    std::string name;
    std::string description;
    std::vector<std::string> expression_params; // names the builder consumes
    std::function<MetricChart(const std::map<std::string, std::string>&)> build;
};

const std::vector<CatalogEntry>& metric_catalog();

/// Looks up a catalog entry by name; returns nullptr when absent.
const CatalogEntry* find_metric(std::string_view name);

} // namespace curvkit
