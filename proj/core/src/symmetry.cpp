#include "curvkit/symmetry.hpp"

#include <cmath>

#include "curvkit/errors.hpp"

namespace curvkit {

namespace {
constexpr double kTiny = 1e-300;
}

std::string_view to_string(PseudosymmetryVerdict::Status s) {
    switch (s) {
        case PseudosymmetryVerdict::Status::holds: return "holds";
        case PseudosymmetryVerdict::Status::fails: return "fails";
        case PseudosymmetryVerdict::Status::indeterminate: return "indeterminate";
    }
    return "?";
}

double semisymmetry_residual(const DenseTensor& d, const DenseTensor& t, const DenseTensor& g) {
    const DenseTensor dt = curvature_action(d, g, t);
    return frobenius_norm(dt) / std::max(frobenius_norm(d) * frobenius_norm(t), kTiny);
}

PseudosymmetryVerdict pseudosymmetry_fit(const DenseTensor& lhs, const DenseTensor& rhs,
                                         const Tolerances& tols, double rhs_scale) {
    PseudosymmetryVerdict out;
    const double lhs_norm = frobenius_norm(lhs);
    const double rhs_norm = frobenius_norm(rhs);
    if (rhs_scale < 0.0) rhs_scale = std::max(lhs_norm, rhs_norm);
    if (rhs_norm <= tols.determinacy_floor * rhs_scale) {
        out.status = PseudosymmetryVerdict::Status::indeterminate;
        out.residual = lhs_norm / std::max({lhs_norm, rhs_norm, kTiny});
        return out;
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) dot += lhs.flat(i) * rhs.flat(i);
    out.L = dot / (rhs_norm * rhs_norm);
    double err = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        const double e = lhs.flat(i) - out.L * rhs.flat(i);
        err += e * e;
    }
    out.residual = std::sqrt(err) / std::max({lhs_norm, rhs_norm, kTiny});
    out.status = out.residual < tols.accept_tol ? PseudosymmetryVerdict::Status::holds
                                                : PseudosymmetryVerdict::Status::fails;
    return out;
}

std::pair<double, double> local_symmetry_residuals(const CurvaturePackage& pkg) {
    const double r = frobenius_norm(pkg.nabla_R) / std::max(frobenius_norm(pkg.R), kTiny);
    const double s = frobenius_norm(pkg.nabla_S) / std::max(frobenius_norm(pkg.S), kTiny);
    return {r, s};
}

EquivalenceReport equivalence_matrix(const CurvaturePackage& pkg, const Tolerances& tols) {
    EquivalenceReport out;
    const CurvatureFormResult form = classify_curvature_form(pkg, tols);
    out.grt_member = form.generalized_roter.membership == Membership::member;

    struct TEntry {
        const char* name;
        const DenseTensor* t;
    };
    const TEntry d_list[] = {{"R", &pkg.R}, {"C", &pkg.C}, {"W", &pkg.W}, {"K", &pkg.K}};
    const TEntry t_list[] = {{"R", &pkg.R}, {"S", &pkg.S}, {"C", &pkg.C}};

    const double g_norm = frobenius_norm(pkg.g);
    const double s_norm = frobenius_norm(pkg.S);

    for (const auto& [dn, d] : d_list) {
        for (const auto& [tn, t] : t_list) {
            SymmetryPairRow row;
            row.d_name = dn;
            row.t_name = tn;
            const DenseTensor dt = curvature_action(*d, pkg.g, *t);
            row.semisymmetry =
                frobenius_norm(dt) / std::max(frobenius_norm(*d) * frobenius_norm(*t), kTiny);
            const DenseTensor qt = q_product(pkg.g, *t, pkg.g);
            row.pseudosymmetry = pseudosymmetry_fit(dt, qt, tols, g_norm * frobenius_norm(*t));
            out.pairs.push_back(std::move(row));
        }
    }

    const DenseTensor rr = curvature_action(pkg.R, pkg.g, pkg.R);
    const DenseTensor rs = curvature_action(pkg.R, pkg.g, pkg.S);
    const DenseTensor cc = curvature_action(pkg.C, pkg.g, pkg.C);
    const double r_norm = frobenius_norm(pkg.R);
    out.named.push_back({"deszcz", pseudosymmetry_fit(rr, q_product(pkg.g, pkg.R, pkg.g), tols,
                                                      g_norm * r_norm)});
    out.named.push_back({"ricci", pseudosymmetry_fit(rs, q_product(pkg.g, pkg.S, pkg.g), tols,
                                                     g_norm * s_norm)});
    out.named.push_back({"weyl", pseudosymmetry_fit(cc, q_product(pkg.g, pkg.C, pkg.g), tols,
                                                    g_norm * frobenius_norm(pkg.C))});
    out.named.push_back({"ricci_generalized",
                         pseudosymmetry_fit(rr, q_product(pkg.S, pkg.R, pkg.g), tols,
                                            s_norm * r_norm)});

    if (out.grt_member) {
        // On a generalized Roter point every commutative second-type
        // restriction transfers from S to R (and hence to C): the structure
        // for S implies the structure for R and C.
        auto row_at = [&](std::string_view dn, std::string_view tn) -> const SymmetryPairRow& {
            for (const auto& r : out.pairs)
                if (r.d_name == dn && r.t_name == tn) return r;
            throw Error("equivalence_matrix: missing row");
        };
        for (const auto& [dn, d] : d_list) {
            const auto& s_row = row_at(dn, "S");
            if (s_row.semisymmetry < tols.accept_tol) {
                for (const char* tn : {"R", "C"}) {
                    const auto& t_row = row_at(dn, tn);
                    if (t_row.semisymmetry >= 10.0 * tols.accept_tol)
                        out.violations.push_back(std::string(dn) + ".S = 0 holds but " + dn + "." +
                                                 tn + " = 0 fails");
                }
            }
            if (s_row.pseudosymmetry.status == PseudosymmetryVerdict::Status::holds) {
                for (const char* tn : {"R", "C"}) {
                    const auto& v = row_at(dn, tn).pseudosymmetry;
                    if (v.status == PseudosymmetryVerdict::Status::indeterminate) continue;
                    const bool same_l =
                        std::abs(v.L - s_row.pseudosymmetry.L) <=
                        1e-6 * std::max(1.0, std::abs(s_row.pseudosymmetry.L));
                    if (v.status != PseudosymmetryVerdict::Status::holds || !same_l)
                        out.violations.push_back(std::string(dn) + ".S = L Q(g,S) holds but " + dn +
                                                 "." + tn + " does not share it");
                }
            }
        }
    }
    return out;
}

} // namespace curvkit
