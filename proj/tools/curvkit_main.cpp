#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "curvkit/analysis.hpp"

namespace {

// "--param K=V" entries, V an expression (met1's f, h) or a real (scalar
// chart parameters).
void apply_params(const std::vector<std::string>& raw, curvkit::AnalysisConfig& config) {
    for (const auto& kv : raw) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw curvkit::ConfigError("--param expects K=V, got '" + kv + "'");
        config.params[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
}

std::vector<double> parse_point(const std::string& text) {
    std::vector<double> p;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos
                                                                             : comma - pos);
        try {
            std::size_t used = 0;
            p.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw curvkit::ConfigError("--point expects comma-separated reals, got '" + text + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return p;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pointwise curvature computation and classification for semi-Riemannian metrics"};
    app.require_subcommand(1);

    auto* analyze = app.add_subcommand(
        "analyze", "Sample chart points, classify the curvature form and Einstein level, "
                   "and run the symmetry battery");

    std::string metric, chart_file, format = "json";
    std::vector<std::string> params, points;
    int samples = 8;
    std::uint64_t seed = 0;
    double accept_tol = curvkit::Tolerances{}.accept_tol;
    double reject_tol = curvkit::Tolerances{}.reject_tol;
    bool strict = false;

    analyze->add_option("--metric", metric, "Catalog metric name (met1, met1-case-i..iii, met1-case-vi, met2, met2-block3)");
    analyze->add_option("--chart-file", chart_file, "Path to a chart file");
    analyze->add_option("--param", params, "K=V (repeatable): met1's f/h expressions or scalar chart parameters");
    analyze->add_option("--samples", samples, "Number of sampled points")->capture_default_str();
    analyze->add_option("--point", points, "v1,v2,... explicit point (repeatable, overrides sampling)");
    analyze->add_option("--seed", seed, "Sampling seed")->capture_default_str();
    analyze->add_option("--accept-tol", accept_tol, "Acceptance residual threshold")->capture_default_str();
    analyze->add_option("--reject-tol", reject_tol, "Rejection residual threshold")->capture_default_str();
    analyze->add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();
    analyze->add_flag("--strict", strict, "Any per-point engine failure is fatal");

    CLI11_PARSE(app, argc, argv);

    try {
        curvkit::AnalysisConfig config;
        config.metric = metric;
        config.chart_file = chart_file;
        apply_params(params, config);
        config.samples = samples;
        for (const auto& p : points) config.points.push_back(parse_point(p));
        config.seed = seed;
        config.tols.accept_tol = accept_tol;
        config.tols.reject_tol = reject_tol;
        config.strict = strict;
        config.format = format == "text" ? curvkit::AnalysisConfig::OutputFormat::text
                                         : curvkit::AnalysisConfig::OutputFormat::json;

        const curvkit::ClassificationReport report = curvkit::analyze(config);
        if (config.format == curvkit::AnalysisConfig::OutputFormat::json)
            std::cout << curvkit::render_json(report) << "\n";
        else
            std::cout << curvkit::render_text(report);
        if (report.failed_points > 0)
            std::cerr << "warning: " << report.failed_points << " point(s) failed and were skipped\n";
        return 0;
    } catch (const curvkit::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
