#include "curvkit/chart.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "curvkit/errors.hpp"

namespace curvkit {

void MetricChart::set_component(int i, int j, ExprPtr e) {
    components[static_cast<std::size_t>(i) * dim + j] = e;
    components[static_cast<std::size_t>(j) * dim + i] = std::move(e);
}

bool MetricChart::admissible(std::span<const double> point) const {
    if (static_cast<int>(point.size()) != dim) return false;
    for (const auto& ineq : domain)
        if (!ineq.holds(coordinates, point, parameters)) return false;
    return true;
}

void MetricChart::validate() const {
    if (dim < 3) throw Error("chart dimension must be at least 3");
    if (static_cast<int>(coordinates.size()) != dim)
        throw Error("chart must declare one coordinate per dimension");
    if (static_cast<int>(components.size()) != dim * dim)
        throw Error("chart component grid has the wrong shape");
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            if (component(i, j) != component(j, i))
                throw Error("chart component grid is not symmetric");
    for (const auto& c : components)
        if (c) validate_symbols(*c, coordinates, parameters);
    for (const auto& ineq : domain) {
        validate_symbols(*ineq.lhs, coordinates, parameters);
        validate_symbols(*ineq.rhs, coordinates, parameters);
    }
}

MetricChart make_chart(int dim) {
    MetricChart c;
    c.dim = dim;
    for (int i = 1; i <= dim; ++i) c.coordinates.push_back("x" + std::to_string(i));
    c.components.assign(static_cast<std::size_t>(dim) * dim, nullptr);
    c.sample_lo.assign(static_cast<std::size_t>(dim), 0.1);
    c.sample_hi.assign(static_cast<std::size_t>(dim), 0.9);
    return c;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_real(std::string_view v, int line_no) {
    const std::string text(v);
    char* end = nullptr;
    const double d = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || text.empty())
        throw ParseError("chart line " + std::to_string(line_no) + ": malformed real value", 0);
    return d;
}

} // namespace

MetricChart parse_chart(std::string_view text) {
    std::optional<MetricChart> chart;
    std::vector<std::string> coord_names;
    struct Pending {
        int i, j;
        std::string expr;
        int line_no;
    };
    std::vector<Pending> pending_components;
    std::vector<std::pair<std::string, int>> pending_domain;
    ParamMap params;

    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("chart line " + std::to_string(line_no) + ": expected 'key = value'", 0);
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key == "dim") {
            chart = make_chart(static_cast<int>(parse_real(value, line_no)));
        } else if (key == "coordinates") {
            std::string_view rest = value;
            while (!rest.empty()) {
                const std::size_t comma = rest.find(',');
                coord_names.emplace_back(trim(rest.substr(0, comma)));
                if (comma == std::string_view::npos) break;
                rest.remove_prefix(comma + 1);
            }
        } else if (key.starts_with("g[")) {
            int i = 0, j = 0;
            if (std::sscanf(std::string(key).c_str(), "g[%d][%d]", &i, &j) != 2 || i < 1 || j < 1)
                throw ParseError("chart line " + std::to_string(line_no) + ": malformed metric key", 0);
            pending_components.push_back({i - 1, j - 1, std::string(value), line_no});
        } else if (key.starts_with("param.")) {
            params[std::string(key.substr(6))] = parse_real(value, line_no);
        } else if (key == "domain") {
            pending_domain.emplace_back(std::string(value), line_no);
        } else {
            throw ParseError("chart line " + std::to_string(line_no) + ": unknown key '" +
                                 std::string(key) + "'",
                             0);
        }
    }
    if (!chart) throw ParseError("chart file must declare dim", 0);
    if (!coord_names.empty()) {
        if (static_cast<int>(coord_names.size()) != chart->dim)
            throw ParseError("chart declares " + std::to_string(coord_names.size()) +
                                 " coordinates for dim " + std::to_string(chart->dim),
                             0);
        chart->coordinates = coord_names;
    }
    chart->parameters = std::move(params);
    for (const auto& p : pending_components) {
        if (p.i >= chart->dim || p.j >= chart->dim)
            throw ParseError("chart line " + std::to_string(p.line_no) + ": metric index out of range", 0);
        chart->set_component(p.i, p.j, parse_expression(p.expr));
    }
    for (const auto& [src, ln] : pending_domain) chart->domain.push_back(parse_inequality(src));
    chart->validate();
    return *chart;
}

MetricChart load_chart_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open chart file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_chart(buf.str());
}

} // namespace curvkit
