#include "curvkit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <future>
#include <random>

#include "curvkit/catalog.hpp"

namespace curvkit {

namespace {

// ---------------------------------------------------------------------------
// Deterministic JSON emission: stable key order, every float %.17g.
// ---------------------------------------------------------------------------
class Json {
public:
    std::string out;

    void begin_object() { pre(); out += '{'; stack_.push_back(true); }
    void end_object() { out += '}'; stack_.pop_back(); }
    void begin_array() { pre(); out += '['; stack_.push_back(true); }
    void end_array() { out += ']'; stack_.pop_back(); }

    void key(std::string_view k) {
        pre();
        write_string(k);
        out += ':';
        pending_value_ = true;
    }

    void value(double v) {
        pre();
        if (!std::isfinite(v)) { out += "null"; return; }
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out += buf;
    }
    void value(int v) { pre(); out += std::to_string(v); }
    void value(std::uint64_t v) { pre(); out += std::to_string(v); }
    void value(bool v) { pre(); out += v ? "true" : "false"; }
    void value(std::string_view v) { pre(); write_string(v); }
    void null() { pre(); out += "null"; }

private:
    std::vector<bool> stack_;
    bool pending_value_ = false;

    void pre() {
        if (pending_value_) { pending_value_ = false; return; }
        if (!stack_.empty()) {
            if (!stack_.back()) out += ',';
            stack_.back() = false;
        }
    }

    void write_string(std::string_view s) {
        out += '"';
        for (char c : s) {
            switch (c) {
                case '"': out += "\\\""; break;
                case '\\': out += "\\\\"; break;
                case '\n': out += "\\n"; break;
                case '\t': out += "\\t"; break;
                case '\r': out += "\\r"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof buf, "\\u%04x", c);
                        out += buf;
                    } else {
                        out += c;
                    }
            }
        }
        out += '"';
    }
};

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Chart construction from the configuration.
// ---------------------------------------------------------------------------
MetricChart build_chart(const AnalysisConfig& config) {
    const bool has_metric = !config.metric.empty();
    const bool has_file = !config.chart_file.empty();
    if (has_metric == has_file)
        throw ConfigError("exactly one of --metric and --chart-file must be given");
    try {
        if (has_metric) {
            const CatalogEntry* entry = find_metric(config.metric);
            if (!entry) {
                std::string names;
                for (const auto& e : metric_catalog()) {
                    if (!names.empty()) names += ", ";
                    names += e.name;
                }
                throw ConfigError("unknown metric '" + config.metric + "' (catalog: " + names + ")");
            }
            for (const auto& [k, v] : config.params) {
                if (std::find(entry->expression_params.begin(), entry->expression_params.end(), k) ==
                    entry->expression_params.end())
                    throw ConfigError("metric '" + config.metric + "' takes no parameter '" + k + "'");
            }
            return entry->build(config.params);
        }
        MetricChart chart = load_chart_file(config.chart_file);
        for (const auto& [k, v] : config.params) {
            if (!chart.parameters.contains(k))
                throw ConfigError("chart file declares no parameter '" + k + "'");
            char* end = nullptr;
            const std::string text = v;
            const double d = std::strtod(text.c_str(), &end);
            if (end != text.c_str() + text.size() || text.empty())
                throw ConfigError("parameter '" + k + "' must be a real number");
            chart.parameters[k] = d;
        }
        return chart;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

std::vector<std::vector<double>> sample_points(const MetricChart& chart,
                                               const AnalysisConfig& config) {
    if (!config.points.empty()) {
        for (const auto& p : config.points)
            if (static_cast<int>(p.size()) != chart.dim)
                throw ConfigError("explicit point arity does not match chart dimension " +
                                  std::to_string(chart.dim));
        return config.points;
    }
    if (config.samples < 1) throw ConfigError("sample count must be at least 1");
    std::mt19937_64 rng(config.seed);
    auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    std::vector<std::vector<double>> pts;
    for (int s = 0; s < config.samples; ++s) {
        bool found = false;
        for (int attempt = 0; attempt < 1000 && !found; ++attempt) {
            std::vector<double> p(static_cast<std::size_t>(chart.dim));
            for (int i = 0; i < chart.dim; ++i)
                p[static_cast<std::size_t>(i)] =
                    chart.sample_lo[static_cast<std::size_t>(i)] +
                    uniform() * (chart.sample_hi[static_cast<std::size_t>(i)] -
                                 chart.sample_lo[static_cast<std::size_t>(i)]);
            if (chart.admissible(p)) {
                pts.push_back(std::move(p));
                found = true;
            }
        }
        if (!found)
            throw EngineError("could not sample an admissible point from the chart box");
    }
    return pts;
}

PointAnalysis analyze_point(const MetricChart& chart, std::vector<double> point,
                            const Tolerances& tols) {
    PointAnalysis pa;
    pa.point = std::move(point);
    try {
        const CurvaturePackage pkg = curvature_package(chart, pa.point);
        pa.kappa = pkg.kappa;
        pa.kappa2 = pkg.kappa2;
        pa.form = classify_curvature_form(pkg, tols);
        pa.einstein = einstein_level(pkg, tols);
        pa.quasi_einstein = quasi_einstein(pkg, tols);
        pa.quasi_constant_curvature = quasi_constant_curvature(pkg, tols);
        pa.local_symmetry = local_symmetry_residuals(pkg);
        pa.equivalence = equivalence_matrix(pkg, tols);
        pa.ok = true;
    } catch (const std::exception& e) {
        pa.ok = false;
        pa.error = e.what();
    }
    return pa;
}

const FitResult* fit_of_class(const CurvatureFormResult& form) {
    switch (form.cls) {
        case CurvatureClass::constant_curvature: return &form.constant_curvature;
        case CurvatureClass::conformally_flat: return &form.conformally_flat;
        case CurvatureClass::roter_type: return &form.roter;
        case CurvatureClass::generalized_roter_type: return &form.generalized_roter;
        default: return nullptr;
    }
}

} // namespace

ClassificationReport analyze(const AnalysisConfig& config) {
    if (!(config.tols.accept_tol < config.tols.reject_tol))
        throw ConfigError("accept tolerance must be below reject tolerance");
    const MetricChart chart = build_chart(config);
    const auto pts = sample_points(chart, config);

    ClassificationReport report;
    report.config = config;
    report.points.resize(pts.size());
    {
        std::vector<std::future<PointAnalysis>> jobs;
        jobs.reserve(pts.size());
        for (const auto& p : pts)
            jobs.push_back(std::async(std::launch::async, analyze_point, std::cref(chart), p,
                                      std::cref(config.tols)));
        for (std::size_t i = 0; i < jobs.size(); ++i) report.points[i] = jobs[i].get();
    }

    for (const auto& pa : report.points)
        if (!pa.ok) ++report.failed_points;
    if (report.failed_points == static_cast<int>(report.points.size()))
        throw EngineError("every sampled point failed: " + report.points.front().error);
    if (config.strict && report.failed_points > 0) {
        for (const auto& pa : report.points)
            if (!pa.ok) throw EngineError("strict mode: point failed: " + pa.error);
    }

    // Modal curvature class (ties break toward the more special class).
    std::map<std::string, int> class_counts, ein_counts;
    for (const auto& pa : report.points) {
        if (!pa.ok) continue;
        ++class_counts[std::string(to_string(pa.form.cls))];
        ++ein_counts[std::string(to_string(pa.einstein.level))];
    }
    auto modal = [](const std::map<std::string, int>& counts,
                    std::span<const std::string_view> order) {
        std::string best;
        int best_count = -1;
        for (auto name : order) {
            auto it = counts.find(std::string(name));
            const int c = it == counts.end() ? 0 : it->second;
            if (c > best_count) {
                best = name;
                best_count = c;
            }
        }
        return best;
    };
    static constexpr std::string_view class_order[] = {
        "flat", "constant_curvature", "conformally_flat", "roter_type",
        "generalized_roter_type", "unclassified"};
    static constexpr std::string_view ein_order[] = {"ricci_flat", "einstein", "ein2",
                                                     "ein3", "ein4", "none"};
    report.modal_class = modal(class_counts, class_order);
    report.modal_einstein_level = modal(ein_counts, ein_order);
    for (std::size_t i = 0; i < report.points.size(); ++i) {
        const auto& pa = report.points[i];
        if (!pa.ok) continue;
        if (std::string(to_string(pa.form.cls)) != report.modal_class)
            report.class_disagreements.push_back(static_cast<int>(i));
        if (std::string(to_string(pa.einstein.level)) != report.modal_einstein_level)
            report.einstein_disagreements.push_back(static_cast<int>(i));
    }
    // Coefficient spread of the modal-class fit across agreeing points.
    bool spread_started = false;
    for (const auto& pa : report.points) {
        if (!pa.ok || std::string(to_string(pa.form.cls)) != report.modal_class) continue;
        const FitResult* fit = fit_of_class(pa.form);
        if (!fit) break;
        if (!spread_started) {
            report.coefficient_spread.assign(fit->coefficients.size(), CoefficientSpread{});
            for (std::size_t j = 0; j < fit->coefficients.size(); ++j)
                report.coefficient_spread[j] = {fit->coefficients[j], fit->coefficients[j]};
            spread_started = true;
        } else {
            for (std::size_t j = 0; j < fit->coefficients.size(); ++j) {
                report.coefficient_spread[j].min =
                    std::min(report.coefficient_spread[j].min, fit->coefficients[j]);
                report.coefficient_spread[j].max =
                    std::max(report.coefficient_spread[j].max, fit->coefficients[j]);
            }
        }
    }
    return report;
}

namespace {

void emit_fit(Json& j, const FitResult& fit, const Tolerances& tols) {
    j.begin_object();
    j.key("coefficients");
    j.begin_array();
    for (double c : fit.coefficients) j.value(c);
    j.end_array();
    j.key("relative_residual");
    j.value(fit.relative_residual);
    j.key("accept_tol");
    j.value(tols.accept_tol);
    j.key("reject_tol");
    j.value(tols.reject_tol);
    j.key("status");
    j.value(to_string(fit.status));
    j.key("membership");
    j.value(to_string(fit.membership));
    j.key("kernel");
    j.begin_array();
    for (const auto& k : fit.kernel_basis) {
        j.begin_array();
        for (double v : k) j.value(v);
        j.end_array();
    }
    j.end_array();
    j.end_object();
}

void emit_pseudo(Json& j, const PseudosymmetryVerdict& v, const Tolerances& tols) {
    j.begin_object();
    j.key("L");
    j.value(v.L);
    j.key("residual");
    j.value(v.residual);
    j.key("accept_tol");
    j.value(tols.accept_tol);
    j.key("determinacy_floor");
    j.value(tols.determinacy_floor);
    j.key("status");
    j.value(to_string(v.status));
    j.end_object();
}

void emit_point(Json& j, const PointAnalysis& pa, const Tolerances& tols) {
    j.begin_object();
    j.key("point");
    j.begin_array();
    for (double v : pa.point) j.value(v);
    j.end_array();
    j.key("ok");
    j.value(pa.ok);
    if (!pa.ok) {
        j.key("error");
        j.value(pa.error);
        j.end_object();
        return;
    }
    j.key("kappa");
    j.value(pa.kappa);
    j.key("kappa2");
    j.value(pa.kappa2);

    j.key("curvature_form");
    j.begin_object();
    j.key("class");
    j.value(to_string(pa.form.cls));
    j.key("flat_residual");
    j.value(pa.form.flat_residual);
    j.key("weyl_residual");
    j.value(pa.form.weyl_residual);
    j.key("accept_tol");
    j.value(tols.accept_tol);
    j.key("reject_tol");
    j.value(tols.reject_tol);
    j.key("roter_proper");
    j.value(to_string(pa.form.roter_proper));
    j.key("generalized_roter_proper");
    j.value(to_string(pa.form.generalized_roter_proper));
    j.key("fits");
    j.begin_object();
    j.key("constant_curvature");
    emit_fit(j, pa.form.constant_curvature, tols);
    j.key("conformally_flat");
    emit_fit(j, pa.form.conformally_flat, tols);
    j.key("roter");
    emit_fit(j, pa.form.roter, tols);
    j.key("generalized_roter");
    emit_fit(j, pa.form.generalized_roter, tols);
    j.key("generalized_roter_minor");
    emit_fit(j, pa.form.generalized_roter_minor, tols);
    j.end_object();
    j.end_object();

    j.key("einstein");
    j.begin_object();
    j.key("level");
    j.value(to_string(pa.einstein.level));
    j.key("relation");
    j.begin_array();
    for (double v : pa.einstein.relation) j.value(v);
    j.end_array();
    j.key("residual");
    j.value(pa.einstein.residual);
    j.key("accept_tol");
    j.value(tols.accept_tol);
    j.key("kernel");
    j.begin_array();
    for (const auto& k : pa.einstein.kernel_basis) {
        j.begin_array();
        for (double v : k) j.value(v);
        j.end_array();
    }
    j.end_array();
    j.end_object();

    j.key("quasi_einstein");
    if (pa.quasi_einstein) {
        j.begin_object();
        j.key("alpha");
        j.value(pa.quasi_einstein->alpha);
        j.key("beta");
        j.value(pa.quasi_einstein->beta);
        j.key("eta");
        j.begin_array();
        for (double v : pa.quasi_einstein->eta) j.value(v);
        j.end_array();
        j.key("residual");
        j.value(pa.quasi_einstein->residual);
        j.key("degenerate");
        j.value(pa.quasi_einstein->degenerate);
        j.end_object();
    } else {
        j.null();
    }

    j.key("quasi_constant_curvature");
    if (pa.quasi_constant_curvature) {
        j.begin_object();
        j.key("alpha_prime");
        j.value(pa.quasi_constant_curvature->alpha_prime);
        j.key("beta_prime");
        j.value(pa.quasi_constant_curvature->beta_prime);
        j.key("eta");
        j.begin_array();
        for (double v : pa.quasi_constant_curvature->eta) j.value(v);
        j.end_array();
        j.key("residual");
        j.value(pa.quasi_constant_curvature->residual);
        j.end_object();
    } else {
        j.null();
    }

    j.key("local_symmetry");
    j.begin_object();
    j.key("nabla_r_residual");
    j.value(pa.local_symmetry.first);
    j.key("nabla_s_residual");
    j.value(pa.local_symmetry.second);
    j.key("accept_tol");
    j.value(tols.accept_tol);
    j.end_object();

    j.key("symmetry");
    j.begin_object();
    j.key("grt_member");
    j.value(pa.equivalence.grt_member);
    j.key("pairs");
    j.begin_array();
    for (const auto& row : pa.equivalence.pairs) {
        j.begin_object();
        j.key("d");
        j.value(row.d_name);
        j.key("t");
        j.value(row.t_name);
        j.key("semisymmetry_residual");
        j.value(row.semisymmetry);
        j.key("pseudosymmetry");
        emit_pseudo(j, row.pseudosymmetry, tols);
        j.end_object();
    }
    j.end_array();
    j.key("named");
    j.begin_array();
    for (const auto& row : pa.equivalence.named) {
        j.begin_object();
        j.key("name");
        j.value(row.name);
        j.key("verdict");
        emit_pseudo(j, row.verdict, tols);
        j.end_object();
    }
    j.end_array();
    j.key("violations");
    j.begin_array();
    for (const auto& v : pa.equivalence.violations) j.value(v);
    j.end_array();
    j.end_object();

    j.end_object();
}

} // namespace

std::string render_json(const ClassificationReport& report) {
    Json j;
    j.begin_object();
    j.key("schema_version");
    j.value(report.schema_version);

    j.key("config");
    j.begin_object();
    j.key("metric");
    j.value(report.config.metric);
    j.key("chart_file");
    j.value(report.config.chart_file);
    j.key("params");
    j.begin_object();
    for (const auto& [k, v] : report.config.params) {
        j.key(k);
        j.value(v);
    }
    j.end_object();
    j.key("samples");
    j.value(report.config.samples);
    j.key("seed");
    j.value(report.config.seed);
    j.key("accept_tol");
    j.value(report.config.tols.accept_tol);
    j.key("reject_tol");
    j.value(report.config.tols.reject_tol);
    j.key("determinacy_floor");
    j.value(report.config.tols.determinacy_floor);
    j.key("strict");
    j.value(report.config.strict);
    j.end_object();

    j.key("points");
    j.begin_array();
    for (const auto& pa : report.points) emit_point(j, pa, report.config.tols);
    j.end_array();

    j.key("aggregate");
    j.begin_object();
    j.key("modal_class");
    j.value(report.modal_class);
    j.key("class_disagreements");
    j.begin_array();
    for (int i : report.class_disagreements) j.value(i);
    j.end_array();
    j.key("modal_einstein_level");
    j.value(report.modal_einstein_level);
    j.key("einstein_disagreements");
    j.begin_array();
    for (int i : report.einstein_disagreements) j.value(i);
    j.end_array();
    j.key("coefficient_spread");
    j.begin_array();
    for (const auto& s : report.coefficient_spread) {
        j.begin_object();
        j.key("min");
        j.value(s.min);
        j.key("max");
        j.value(s.max);
        j.end_object();
    }
    j.end_array();
    j.key("failed_points");
    j.value(report.failed_points);
    j.end_object();

    j.end_object();
    return j.out;
}

std::string render_text(const ClassificationReport& report) {
    std::string out;
    auto line = [&out](const std::string& s) {
        out += s;
        out += '\n';
    };
    line("curvkit analysis (schema " + std::to_string(report.schema_version) + ")");
    line("source: " + (report.config.metric.empty() ? "chart file " + report.config.chart_file
                                                    : "metric " + report.config.metric));
    line("tolerances: accept " + format_double(report.config.tols.accept_tol) + ", reject " +
         format_double(report.config.tols.reject_tol) + ", determinacy floor " +
         format_double(report.config.tols.determinacy_floor));
    line("seed: " + std::to_string(report.config.seed));
    for (std::size_t i = 0; i < report.points.size(); ++i) {
        const auto& pa = report.points[i];
        std::string pt = "point " + std::to_string(i) + ": (";
        for (std::size_t k = 0; k < pa.point.size(); ++k) {
            if (k) pt += ", ";
            pt += format_double(pa.point[k]);
        }
        pt += ")";
        line(pt);
        if (!pa.ok) {
            line("  FAILED: " + pa.error);
            continue;
        }
        line("  kappa = " + format_double(pa.kappa) + ", kappa2 = " + format_double(pa.kappa2));
        line("  curvature form: " + std::string(to_string(pa.form.cls)) +
             " (flat residual " + format_double(pa.form.flat_residual) + ", weyl residual " +
             format_double(pa.form.weyl_residual) + ")");
        auto fit_line = [&](const char* name, const FitResult& f) {
            std::string s = "    ";
            s += name;
            s += ": residual " + format_double(f.relative_residual) + " [" +
                 std::string(to_string(f.membership)) + ", " + std::string(to_string(f.status)) +
                 "], coefficients (";
            for (std::size_t c = 0; c < f.coefficients.size(); ++c) {
                if (c) s += ", ";
                s += format_double(f.coefficients[c]);
            }
            s += ")";
            line(s);
        };
        fit_line("constant curvature", pa.form.constant_curvature);
        fit_line("conformally flat", pa.form.conformally_flat);
        fit_line("roter", pa.form.roter);
        fit_line("generalized roter", pa.form.generalized_roter);
        line("    roter proper: " + std::string(to_string(pa.form.roter_proper)) +
             ", generalized roter proper: " +
             std::string(to_string(pa.form.generalized_roter_proper)));
        std::string ein = "  einstein level: " + std::string(to_string(pa.einstein.level)) +
                          " (residual " + format_double(pa.einstein.residual) + "), relation (";
        for (std::size_t c = 0; c < pa.einstein.relation.size(); ++c) {
            if (c) ein += ", ";
            ein += format_double(pa.einstein.relation[c]);
        }
        ein += ")";
        line(ein);
        if (pa.quasi_einstein) {
            line("  quasi-einstein: alpha " + format_double(pa.quasi_einstein->alpha) + ", beta " +
                 format_double(pa.quasi_einstein->beta) + ", residual " +
                 format_double(pa.quasi_einstein->residual) +
                 (pa.quasi_einstein->degenerate ? " (degenerate)" : ""));
        } else {
            line("  quasi-einstein: none");
        }
        if (pa.quasi_constant_curvature) {
            line("  quasi-constant-curvature: alpha' " +
                 format_double(pa.quasi_constant_curvature->alpha_prime) + ", beta' " +
                 format_double(pa.quasi_constant_curvature->beta_prime) + ", residual " +
                 format_double(pa.quasi_constant_curvature->residual));
        } else {
            line("  quasi-constant-curvature: none");
        }
        line("  local symmetry residuals: nabla_R " + format_double(pa.local_symmetry.first) +
             ", nabla_S " + format_double(pa.local_symmetry.second));
        for (const auto& row : pa.equivalence.pairs) {
            line("  " + row.d_name + "." + row.t_name + ": semisymmetry " +
                 format_double(row.semisymmetry) + ", pseudo L " +
                 format_double(row.pseudosymmetry.L) + " residual " +
                 format_double(row.pseudosymmetry.residual) + " [" +
                 std::string(to_string(row.pseudosymmetry.status)) + "]");
        }
        for (const auto& row : pa.equivalence.named) {
            line("  " + row.name + ": L " + format_double(row.verdict.L) + " residual " +
                 format_double(row.verdict.residual) + " [" +
                 std::string(to_string(row.verdict.status)) + "]");
        }
        for (const auto& v : pa.equivalence.violations) line("  VIOLATION: " + v);
    }
    line("aggregate: modal class " + report.modal_class + ", modal einstein level " +
         report.modal_einstein_level + ", failed points " + std::to_string(report.failed_points));
    if (!report.class_disagreements.empty()) {
        std::string s = "  class disagreements at points:";
        for (int i : report.class_disagreements) s += " " + std::to_string(i);
        line(s);
    }
    if (!report.einstein_disagreements.empty()) {
        std::string s = "  einstein disagreements at points:";
        for (int i : report.einstein_disagreements) s += " " + std::to_string(i);
        line(s);
    }
    std::string spread = "  coefficient spread:";
    for (const auto& s : report.coefficient_spread)
        spread += " [" + format_double(s.min) + ", " + format_double(s.max) + "]";
    line(spread);
    return out;
}

} // namespace curvkit
