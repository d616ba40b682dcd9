#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "curvkit/classify.hpp"
#include "curvkit/symmetry.hpp"

namespace curvkit {

/// Raised for invalid configuration (unknown metric, malformed parameters,
/// inconsistent tolerances). CLI exit code 3.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Raised when the engine cannot produce a report (every sampled point
/// failed, or any failure under strict mode). CLI exit code 2.
class EngineError : public Error {
public:
    using Error::Error;
};

struct AnalysisConfig {
    std::string metric;       // catalog name, or
    std::string chart_file;   // path to a chart file (exactly one of the two)
    std::map<std::string, std::string> params; // met1's f/h expressions or scalar overrides
    int samples = 8;
    std::vector<std::vector<double>> points;   // explicit points override sampling
    std::uint64_t seed = 0;
    Tolerances tols;
    enum class OutputFormat { json, text } format = OutputFormat::json;
    bool strict = false;
};

/// Everything computed at one sample point. `ok` is false when the engine
/// failed there (singular metric, domain violation); the error text is kept
/// and all other fields are meaningless.
struct PointAnalysis {
    std::vector<double> point;
    bool ok = false;
    std::string error;
    double kappa = 0.0;
    double kappa2 = 0.0;
    CurvatureFormResult form;
    EinsteinVerdict einstein;
    std::optional<QuasiEinstein> quasi_einstein;
    std::optional<QuasiConstantCurvature> quasi_constant_curvature;
    std::pair<double, double> local_symmetry{0.0, 0.0};
    EquivalenceReport equivalence;
};

struct CoefficientSpread {
    double min = 0.0;
    double max = 0.0;
};

struct ClassificationReport {
    int schema_version = 1;
    AnalysisConfig config;
    std::vector<PointAnalysis> points;
    // Aggregates over the successful points.
    std::string modal_class;
    std::vector<int> class_disagreements;      // indices of points off the modal class
    std::string modal_einstein_level;
    std::vector<int> einstein_disagreements;
    std::vector<CoefficientSpread> coefficient_spread; // per modal-class fit coefficient
    int failed_points = 0;
};

/// Runs the full pipeline: build the chart, sample or take the configured
/// points, compute the curvature package and all verdicts per point
/// (concurrently), and aggregate. Deterministic for a fixed config and seed.
ClassificationReport analyze(const AnalysisConfig& config);

/// JSON rendering: stable key order, floats with 17 significant digits.
/// Identical configs and seeds give byte-identical output.
std::string render_json(const ClassificationReport& report);

/// Human-readable projection of the same numbers.
std::string render_text(const ClassificationReport& report);

} // namespace curvkit
