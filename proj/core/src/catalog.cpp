#include "curvkit/catalog.hpp"

#include <cmath>
#include <set>

#include "curvkit/errors.hpp"

namespace curvkit {

namespace {

void collect_identifiers(const Expr& e, std::set<std::string>& out) {
    if (e.kind == Expr::Kind::identifier) {
        out.insert(e.name);
        return;
    }
    for (const auto& c : e.args) collect_identifiers(*c, out);
}

void require_depends_only_on(const Expr& e, const std::set<std::string>& allowed, const char* what) {
    std::set<std::string> ids;
    collect_identifiers(e, ids);
    for (const auto& id : ids)
        if (!allowed.contains(id))
            throw ParseError(std::string(what) + " may not depend on '" + id + "'", e.offset);
}

ExprPtr product(ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::binary;
    e->op = '*';
    e->args = {std::move(a), std::move(b)};
    return e;
}

} // namespace

MetricChart build_met1(std::string_view f_expr, std::string_view h_expr) {
    ExprPtr f = parse_expression(f_expr);
    ExprPtr h = parse_expression(h_expr);
    require_depends_only_on(*f, {"x1"}, "met1: f");
    require_depends_only_on(*h, {"x1", "x2"}, "met1: h");
    MetricChart c = make_chart(5);
    for (int i = 0; i < 4; ++i) c.set_component(i, i, f);
    c.set_component(4, 4, product(f, h));
    c.validate();
    return c;
}

OracleComponents met1_oracle(const Jet3& f, const Jet3& h) {
    const double fv = f.value(), f1 = f.d1(0), f11 = f.d2(0, 0);
    const double hv = h.value(), h1 = h.d1(0), h2 = h.d1(1);
    const double h11 = h.d2(0, 0), h12 = h.d2(0, 1), h22 = h.d2(1, 1);

    OracleComponents o;
    const double r_aa = (f1 * f1 - fv * f11) / (2.0 * fv);
    o.r[{0, 1, 0, 1}] = r_aa;
    o.r[{0, 2, 0, 2}] = r_aa;
    o.r[{0, 3, 0, 3}] = r_aa;
    const double r_bb = -(f1 * f1) / (4.0 * fv);
    o.r[{1, 2, 1, 2}] = r_bb;
    o.r[{1, 3, 1, 3}] = r_bb;
    o.r[{2, 3, 2, 3}] = r_bb;
    o.r[{0, 4, 0, 4}] = 0.25 * (-2.0 * hv * f11 - h1 * f1 + 2.0 * hv * f1 * f1 / fv +
                                fv * h1 * h1 / hv - 2.0 * fv * h11);
    o.r[{0, 4, 1, 4}] = 0.25 * fv * (h1 * h2 / hv - 2.0 * h12);
    o.r[{1, 4, 1, 4}] = 0.25 * fv * (-f1 * (hv * f1 + fv * h1) / (fv * fv) + h2 * h2 / hv - 2.0 * h22);
    const double r_c5 = -f1 * (hv * f1 + fv * h1) / (4.0 * fv);
    o.r[{2, 4, 2, 4}] = r_c5;
    o.r[{3, 4, 3, 4}] = r_c5;

    o.s[{0, 0}] = (-fv * fv * h1 * h1 + fv * hv * h1 * f1 +
                   2.0 * hv * (4.0 * fv * hv * f11 + fv * fv * h11 - 4.0 * hv * f1 * f1)) /
                  (4.0 * fv * fv * hv * hv);
    o.s[{0, 1}] = -(h1 * h2 - 2.0 * hv * h12) / (4.0 * hv * hv);
    o.s[{1, 1}] = (hv * (2.0 * fv * hv * f11 + 2.0 * fv * fv * h22 + fv * h1 * f1 + hv * f1 * f1) -
                   fv * fv * h2 * h2) /
                  (4.0 * fv * fv * hv * hv);
    const double s_cc = (2.0 * fv * hv * f11 + hv * f1 * f1 + fv * h1 * f1) / (4.0 * fv * fv * hv);
    o.s[{2, 2}] = s_cc;
    o.s[{3, 3}] = s_cc;
    o.s[{4, 4}] = (-fv * fv * (h1 * h1 + h2 * h2) +
                   2.0 * fv * hv * (2.0 * h1 * f1 + fv * (h11 + h22)) +
                   hv * hv * (2.0 * fv * f11 + f1 * f1)) /
                  (4.0 * fv * fv * hv);
    return o;
}

OracleComponents met1_oracle(std::string_view f_expr, std::string_view h_expr,
                             std::span<const double> point) {
    MetricChart c = build_met1(f_expr, h_expr);
    const Jet3 f = evaluate_jet(*parse_expression(f_expr), c.coordinates, point, c.parameters);
    const Jet3 h = evaluate_jet(*parse_expression(h_expr), c.coordinates, point, c.parameters);
    return met1_oracle(f, h);
}

MetricChart build_met2() {
    MetricChart c = make_chart(6);
    c.set_component(0, 0, parse_expression("1"));
    c.set_component(1, 1, parse_expression("exp(x1)"));
    c.set_component(2, 2, parse_expression("exp(x1)"));
    c.set_component(3, 3, parse_expression("1"));
    c.set_component(4, 4, parse_expression("exp(x4)"));
    c.set_component(5, 5, parse_expression("exp(x4) * (x5+1)^2"));
    c.domain.push_back(parse_inequality("x5 > 0"));
    c.sample_lo[4] = 1.1;
    c.sample_hi[4] = 1.9;
    c.validate();
    return c;
}

OracleComponents met2_oracle(std::span<const double> point) {
    if (point.size() != 6) throw Error("met2_oracle: point must have 6 coordinates");
    if (point[4] <= 0.0) throw DomainError("met2: chart requires x5 > 0");
    const double e1 = std::exp(point[0]);
    const double e4 = std::exp(point[3]);
    const double w = (point[4] + 1.0) * (point[4] + 1.0);

    OracleComponents o;
    o.r[{0, 1, 0, 1}] = -e1 / 4.0;
    o.r[{0, 2, 0, 2}] = -e1 / 4.0;
    o.r[{1, 2, 1, 2}] = -e1 * e1 / 4.0;
    o.r[{3, 4, 3, 4}] = -e4 / 4.0;
    o.r[{4, 5, 4, 5}] = -e4 * e4 * w / 4.0;
    o.r[{3, 5, 3, 5}] = -e4 * w / 4.0;

    o.s[{0, 0}] = 0.5;
    o.s[{3, 3}] = 0.5;
    o.s[{1, 1}] = e1 / 2.0;
    o.s[{2, 2}] = e1 / 2.0;
    o.s[{4, 4}] = e4 / 2.0;
    o.s[{5, 5}] = e4 * w / 2.0;
    return o;
}

MetricChart build_met2_block3() {
    MetricChart c = make_chart(3);
    c.set_component(0, 0, parse_expression("1"));
    c.set_component(1, 1, parse_expression("exp(x1)"));
    c.set_component(2, 2, parse_expression("exp(x1)"));
    c.validate();
    return c;
}

namespace {

const std::string& required_param(const std::map<std::string, std::string>& params,
                                  const std::string& name, const char* metric) {
    auto it = params.find(name);
    if (it == params.end())
        throw Error(std::string(metric) + " requires --param " + name + "=<expression>");
    return it->second;
}

} // namespace

const std::vector<CatalogEntry>& metric_catalog() {
    static const std::vector<CatalogEntry> entries = {
        {"met1",
         "5-dim family ds^2 = f[(dx1)^2+..+(dx4)^2 + h (dx5)^2], f = f(x1), h = h(x1,x2)",
         {"f", "h"},
         [](const std::map<std::string, std::string>& p) {
             return build_met1(required_param(p, "f", "met1"), required_param(p, "h", "met1"));
         }},
        {"met1-case-i", "met1 with f = exp(x1), h = exp(x1+x2)", {},
         [](const auto&) { return build_met1("exp(x1)", "exp(x1+x2)"); }},
        {"met1-case-ii", "met1 with f = exp(x1), h = 1+x1^2", {},
         [](const auto&) { return build_met1("exp(x1)", "1 + x1^2"); }},
        {"met1-case-iii", "met1 with f = exp(x1), h = exp(-x1)", {},
         [](const auto&) { return build_met1("exp(x1)", "exp(-x1)"); }},
        {"met1-case-vi", "met1 with f = h = 1 (flat)", {},
         [](const auto&) { return build_met1("1", "1"); }},
        {"met2", "6-dim Einstein product metric on x5 > 0", {},
         [](const auto&) { return build_met2(); }},
        {"met2-block3", "3-dim constant-curvature factor of met2", {},
         [](const auto&) { return build_met2_block3(); }},
    };
    return entries;
}

const CatalogEntry* find_metric(std::string_view name) {
    for (const auto& e : metric_catalog())
        if (e.name == name) return &e;
    return nullptr;
}

} // namespace curvkit
