#include "curvkit/classify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "curvkit/errors.hpp"

namespace curvkit {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kSvCutoff = 1e-10;       // relative singular-value cutoff
constexpr double kClusterTol = 1e-6;      // quasi-Einstein eigenvalue clustering

Eigen::VectorXd flatten(const DenseTensor& t) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(t.size()));
    for (std::size_t i = 0; i < t.size(); ++i) v[static_cast<Eigen::Index>(i)] = t.flat(i);
    return v;
}

struct LeastSquares {
    Eigen::VectorXd solution;
    double residual = 1.0;                 // relative to |target|
    std::vector<std::vector<double>> kernel;
    FitStatus status = FitStatus::indeterminate;
};

LeastSquares min_norm_solve(const Eigen::MatrixXd& basis, const Eigen::VectorXd& target) {
    LeastSquares out;
    const Eigen::Index m = basis.cols();
    out.solution = Eigen::VectorXd::Zero(m);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis, Eigen::ComputeThinU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv[0] : 0.0;
    if (smax < 1e-150) {
        out.status = FitStatus::indeterminate;
        for (Eigen::Index j = 0; j < m; ++j) {
            std::vector<double> k(static_cast<std::size_t>(m), 0.0);
            k[static_cast<std::size_t>(j)] = 1.0;
            out.kernel.push_back(std::move(k));
        }
        out.residual = target.norm() / std::max(target.norm(), kTiny);
        return out;
    }
    int kept = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv[i] > kSvCutoff * smax) {
            out.solution += svd.matrixV().col(i) * (svd.matrixU().col(i).dot(target) / sv[i]);
            ++kept;
        } else {
            const auto col = svd.matrixV().col(i);
            out.kernel.emplace_back(col.data(), col.data() + col.size());
        }
    }
    // Thin U covers min(rows, cols) singular triplets; remaining V columns
    // (cols > rows case never occurs here: flattened tensors are long).
    out.status = (kept == m) ? FitStatus::determinate : FitStatus::degenerate;
    out.residual = (target - basis * out.solution).norm() / std::max(target.norm(), kTiny);
    return out;
}

} // namespace

Membership classify_residual(double residual, const Tolerances& tols) {
    if (residual < tols.accept_tol) return Membership::member;
    if (residual > tols.reject_tol) return Membership::non_member;
    return Membership::indeterminate;
}

FitResult fit_linear_combination(const DenseTensor& target, std::span<const DenseTensor> basis,
                                 double accept_tol, double reject_tol) {
    if (basis.empty()) throw std::invalid_argument("fit_linear_combination: empty basis");
    for (const auto& b : basis)
        if (b.dim() != target.dim() || b.rank() != target.rank())
            throw std::invalid_argument("fit_linear_combination: basis shape mismatch");
    if (!(accept_tol < reject_tol))
        throw std::invalid_argument("fit_linear_combination: accept_tol must be below reject_tol");

    Eigen::MatrixXd B(static_cast<Eigen::Index>(target.size()), static_cast<Eigen::Index>(basis.size()));
    for (std::size_t j = 0; j < basis.size(); ++j) B.col(static_cast<Eigen::Index>(j)) = flatten(basis[j]);
    const LeastSquares ls = min_norm_solve(B, flatten(target));

    FitResult out;
    out.coefficients.assign(ls.solution.data(), ls.solution.data() + ls.solution.size());
    out.relative_residual = ls.residual;
    out.kernel_basis = ls.kernel;
    out.status = ls.status;
    out.membership = classify_residual(ls.residual, Tolerances{accept_tol, reject_tol});
    return out;
}

std::string_view to_string(Membership m) {
    switch (m) {
        case Membership::member: return "member";
        case Membership::non_member: return "non_member";
        case Membership::indeterminate: return "indeterminate";
    }
    return "?";
}

std::string_view to_string(FitStatus s) {
    switch (s) {
        case FitStatus::determinate: return "determinate";
        case FitStatus::degenerate: return "degenerate";
        case FitStatus::indeterminate: return "indeterminate";
    }
    return "?";
}

std::string_view to_string(CurvatureClass c) {
    switch (c) {
        case CurvatureClass::flat: return "flat";
        case CurvatureClass::constant_curvature: return "constant_curvature";
        case CurvatureClass::conformally_flat: return "conformally_flat";
        case CurvatureClass::roter_type: return "roter_type";
        case CurvatureClass::generalized_roter_type: return "generalized_roter_type";
        case CurvatureClass::unclassified: return "unclassified";
    }
    return "?";
}

std::string_view to_string(EinsteinLevel l) {
    switch (l) {
        case EinsteinLevel::ricci_flat: return "ricci_flat";
        case EinsteinLevel::einstein: return "einstein";
        case EinsteinLevel::ein2: return "ein2";
        case EinsteinLevel::ein3: return "ein3";
        case EinsteinLevel::ein4: return "ein4";
        case EinsteinLevel::none: return "none";
    }
    return "?";
}

CurvatureFormResult classify_curvature_form(const CurvaturePackage& pkg, const Tolerances& tols) {
    CurvatureFormResult out;
    const DenseTensor gg = kn_product(pkg.g, pkg.g);
    const DenseTensor gs = kn_product(pkg.g, pkg.S);
    const DenseTensor ss = kn_product(pkg.S, pkg.S);
    const DenseTensor gs2 = kn_product(pkg.g, pkg.S2);
    const DenseTensor ss2 = kn_product(pkg.S, pkg.S2);
    const DenseTensor s2s2 = kn_product(pkg.S2, pkg.S2);

    const double r_norm = frobenius_norm(pkg.R);
    out.flat_residual = r_norm / std::max(frobenius_norm(pkg.G), kTiny);
    out.weyl_residual = frobenius_norm(pkg.C) / std::max(r_norm, kTiny);

    const DenseTensor cc_basis[] = {gg};
    const DenseTensor cf_basis[] = {gg, gs};
    const DenseTensor rt_basis[] = {gg, gs, ss};
    const DenseTensor grt_basis[] = {gg, gs, ss, gs2, ss2, s2s2};
    const DenseTensor grt_minor_basis[] = {gg, gs, ss, gs2, ss2};
    out.constant_curvature = fit_linear_combination(pkg.R, cc_basis, tols.accept_tol, tols.reject_tol);
    out.conformally_flat = fit_linear_combination(pkg.R, cf_basis, tols.accept_tol, tols.reject_tol);
    out.roter = fit_linear_combination(pkg.R, rt_basis, tols.accept_tol, tols.reject_tol);
    out.generalized_roter = fit_linear_combination(pkg.R, grt_basis, tols.accept_tol, tols.reject_tol);
    out.generalized_roter_minor =
        fit_linear_combination(pkg.R, grt_minor_basis, tols.accept_tol, tols.reject_tol);

    // The top coefficient is essential iff no solution reaches zero there,
    // i.e. iff the subset fit without the top tensor fails.
    auto essential = [](Membership subset) {
        switch (subset) {
            case Membership::member: return Membership::non_member;       // a top-free solution exists
            case Membership::non_member: return Membership::member;       // every solution needs the top
            case Membership::indeterminate: return Membership::indeterminate;
        }
        return Membership::indeterminate;
    };
    out.roter_proper = essential(out.conformally_flat.membership);
    out.generalized_roter_proper = essential(out.generalized_roter_minor.membership);

    // Conformal flatness is double-checked against the Weyl norm; the two
    // routes must agree for the class to be selected.
    const Membership weyl_member = classify_residual(out.weyl_residual, tols);
    Membership cf_member = out.conformally_flat.membership;
    if (cf_member != weyl_member &&
        cf_member != Membership::indeterminate && weyl_member != Membership::indeterminate) {
        cf_member = Membership::indeterminate;
        out.conformally_flat.membership = Membership::indeterminate;
    }

    if (out.flat_residual < tols.accept_tol) out.cls = CurvatureClass::flat;
    else if (out.constant_curvature.membership == Membership::member) out.cls = CurvatureClass::constant_curvature;
    else if (cf_member == Membership::member) out.cls = CurvatureClass::conformally_flat;
    else if (out.roter.membership == Membership::member) out.cls = CurvatureClass::roter_type;
    else if (out.generalized_roter.membership == Membership::member) out.cls = CurvatureClass::generalized_roter_type;
    else out.cls = CurvatureClass::unclassified;
    return out;
}

namespace {

std::vector<Eigen::VectorXd> krylov_family(const CurvaturePackage& pkg, int max_power) {
    std::vector<Eigen::VectorXd> fam;
    fam.push_back(flatten(pkg.g));
    if (max_power >= 1) fam.push_back(flatten(pkg.S));
    if (max_power >= 2) fam.push_back(flatten(pkg.S2));
    if (max_power >= 3) fam.push_back(flatten(pkg.S3));
    if (max_power >= 4) fam.push_back(flatten(pkg.S4));
    return fam;
}

} // namespace

EinsteinVerdict einstein_level(const CurvaturePackage& pkg, const Tolerances& tols) {
    EinsteinVerdict out;
    out.kernel_basis = krylov_kernel(pkg, 4);
    const auto fam = krylov_family(pkg, 4);

    // k = 0: S itself vanishes (scale against |g|).
    const double s0 = fam[1].norm() / std::max(fam[0].norm(), kTiny);
    if (s0 < tols.accept_tol) {
        out.level = EinsteinLevel::ricci_flat;
        out.relation = {0.0, 1.0};
        out.residual = s0;
        return out;
    }
    for (int k = 1; k <= 4; ++k) {
        Eigen::MatrixXd B(fam[0].size(), k);
        for (int j = 0; j < k; ++j) B.col(j) = fam[static_cast<std::size_t>(j)];
        const LeastSquares ls = min_norm_solve(B, fam[static_cast<std::size_t>(k)]);
        if (ls.residual < tols.accept_tol) {
            out.level = static_cast<EinsteinLevel>(k); // enum order matches levels
            out.residual = ls.residual;
            out.relation.assign(static_cast<std::size_t>(k) + 1, 1.0);
            for (int j = 0; j < k; ++j) out.relation[static_cast<std::size_t>(j)] = -ls.solution[j];
            return out;
        }
        out.residual = ls.residual;
    }
    out.level = EinsteinLevel::none;
    out.relation.clear();
    return out;
}

std::vector<std::vector<double>> krylov_kernel(const CurvaturePackage& pkg, int max_power) {
    const auto fam = krylov_family(pkg, max_power);
    Eigen::MatrixXd B(fam[0].size(), static_cast<Eigen::Index>(fam.size()));
    for (std::size_t j = 0; j < fam.size(); ++j) B.col(static_cast<Eigen::Index>(j)) = fam[j];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv[0] : 0.0;
    std::vector<std::vector<double>> kernel;
    for (Eigen::Index i = 0; i < B.cols(); ++i) {
        if (i >= sv.size() || sv[i] <= kSvCutoff * smax) {
            const auto col = svd.matrixV().col(i);
            kernel.emplace_back(col.data(), col.data() + col.size());
        }
    }
    return kernel;
}

std::optional<QuasiEinstein> quasi_einstein(const CurvaturePackage& pkg, const Tolerances& tols) {
    const int n = pkg.dim;
    Eigen::MatrixXd sm(n, n), gm(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            sm(i, j) = pkg.S(i, j);
            gm(i, j) = pkg.g(i, j);
        }
    const Eigen::MatrixXd op = gm.partialPivLu().solve(sm); // Ricci operator
    Eigen::EigenSolver<Eigen::MatrixXd> eig(op);
    if (eig.info() != Eigen::Success) return std::nullopt;

    const double ev_scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
    std::vector<double> real_evs;
    for (int i = 0; i < n; ++i) {
        if (std::abs(eig.eigenvalues()[i].imag()) <= kClusterTol * ev_scale)
            real_evs.push_back(eig.eigenvalues()[i].real());
    }
    if (static_cast<int>(real_evs.size()) < n - 1) return std::nullopt;
    std::sort(real_evs.begin(), real_evs.end());

    const double s_norm = frobenius_norm(pkg.S);
    std::optional<QuasiEinstein> best;
    for (std::size_t lo = 0; lo + static_cast<std::size_t>(n - 1) <= real_evs.size(); ++lo) {
        const double width = real_evs[lo + n - 2] - real_evs[lo];
        double alpha = 0.0;
        for (std::size_t i = lo; i < lo + static_cast<std::size_t>(n - 1); ++i) alpha += real_evs[i];
        alpha /= (n - 1);
        if (width > kClusterTol * std::max(1.0, std::abs(alpha))) continue;

        const Eigen::MatrixXd m = sm - alpha * gm;
        QuasiEinstein cand;
        cand.alpha = alpha;
        cand.eta.assign(static_cast<std::size_t>(n), 0.0);
        if (m.norm() <= tols.accept_tol * std::max(s_norm, frobenius_norm(pkg.g))) {
            cand.beta = 0.0;
            cand.degenerate = true;
            cand.residual = m.norm() / std::max(s_norm, kTiny);
        } else {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sa(0.5 * (m + m.transpose()));
            if (sa.info() != Eigen::Success) continue;
            int top = 0;
            for (int i = 1; i < n; ++i)
                if (std::abs(sa.eigenvalues()[i]) > std::abs(sa.eigenvalues()[top])) top = i;
            const double sigma = sa.eigenvalues()[top];
            const Eigen::VectorXd u = sa.eigenvectors().col(top);
            const Eigen::MatrixXd rem = m - sigma * u * u.transpose();
            cand.residual = rem.norm() / std::max(s_norm, kTiny);
            if (cand.residual >= tols.accept_tol) continue; // remainder has rank > 1
            cand.beta = sigma;
            cand.eta.assign(u.data(), u.data() + n);
        }
        if (!best || cand.residual < best->residual) best = cand;
    }
    return best;
}

QuasiConstantCurvature quasi_constant_curvature(const CurvaturePackage& pkg,
                                                std::span<const double> eta,
                                                const Tolerances& tols) {
    const int n = pkg.dim;
    DenseTensor ee(n, 2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ee(i, j) = eta[static_cast<std::size_t>(i)] * eta[static_cast<std::size_t>(j)];
    ee.enforce_symmetry(Symmetry::sym2);
    const DenseTensor basis[] = {pkg.G, kn_product(pkg.g, ee)};
    const FitResult fit = fit_linear_combination(pkg.R, basis, tols.accept_tol, tols.reject_tol);
    QuasiConstantCurvature out;
    out.alpha_prime = fit.coefficients[0];
    out.beta_prime = fit.coefficients[1];
    out.eta.assign(eta.begin(), eta.end());
    out.residual = fit.relative_residual;
    return out;
}

std::optional<QuasiConstantCurvature> quasi_constant_curvature(const CurvaturePackage& pkg,
                                                               const Tolerances& tols) {
    const auto qe = quasi_einstein(pkg, tols);
    if (!qe) return std::nullopt;
    return quasi_constant_curvature(pkg, qe->eta, tols);
}

std::array<double, 3> rt_to_grt_coefficients(double n1, double n2, double n3, double kappa,
                                             int n, double l4, double l5, double l6) {
    if (n3 == 0.0) throw std::invalid_argument("rt_to_grt_coefficients: N3 must be nonzero");
    const double a = (n - 2) * n2 + 2.0 * n3 * kappa;
    const double b = 2.0 * (n - 1) * n1 + n2 * kappa;
    // Contracting the Roter form gives S = b g + a S - 2 N3 S^2, hence
    // S^2 = p g + q S with:
    const double p = b / (2.0 * n3);
    const double q = (a - 1.0) / (2.0 * n3);
    return {
        n1 - l4 * p - l6 * p * p,
        n2 - l4 * q - l5 * p - 2.0 * l6 * p * q,
        n3 - l5 * q - l6 * q * q,
    };
}

namespace {

bool relation_holds(const FitResult& fit, std::span<const double> w, double rhs, double tol) {
    double v = 0.0;
    double wnorm = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        v += w[i] * fit.coefficients[i];
        wnorm += w[i] * w[i];
    }
    wnorm = std::sqrt(wnorm);
    if (std::abs(v - rhs) > tol * std::max(1.0, std::abs(rhs))) return false;
    for (const auto& k : fit.kernel_basis) {
        double kv = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) kv += w[i] * k[i];
        if (std::abs(kv) > tol * std::max(1.0, wnorm)) return false;
    }
    return true;
}

} // namespace

std::pair<bool, bool> constant_curvature_relations(const FitResult& rt_fit,
                                                   const FitResult& grt_fit, double kappa, int n,
                                                   double tol) {
    if (kappa == 0.0)
        throw std::invalid_argument("constant_curvature_relations: vacuous for kappa = 0");
    const double rhs = kappa / (2.0 * (n - 1));
    const double k = kappa;
    const double w_rt[] = {static_cast<double>(n), k, k * k / n};
    const double w_grt[] = {static_cast<double>(n), k,     k * k / n,
                            k * k / n,              k * k * k / (n * n),
                            k * k * k * k / (static_cast<double>(n) * n * n)};
    return {relation_holds(rt_fit, w_rt, rhs, tol), relation_holds(grt_fit, w_grt, rhs, tol)};
}

double einstein_grt_constant_coefficient(const CurvaturePackage& pkg, const FitResult& grt_fit,
                                         const Tolerances& tols) {
    const int n = pkg.dim;
    DenseTensor dev = pkg.S - pkg.g * (pkg.kappa / n);
    if (frobenius_norm(dev) > tols.accept_tol * std::max(frobenius_norm(pkg.S), frobenius_norm(pkg.g)))
        throw std::invalid_argument("einstein_grt_constant_coefficient: package is not Einstein");
    const auto& l = grt_fit.coefficients;
    const double k = pkg.kappa;
    const double n4 = static_cast<double>(n) * n * n * n;
    return (2.0 / n4) *
           (l[0] * n4 +
            k * (l[1] * n * n * n + k * ((l[2] + l[3]) * n * n + l[4] * n * k + l[5] * k * k)));
}

} // namespace curvkit
