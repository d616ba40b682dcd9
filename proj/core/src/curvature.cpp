#include "curvkit/curvature.hpp"

#include <cmath>

#include "curvkit/errors.hpp"

namespace curvkit {

namespace {

// Jets of the metric components at a point, row-major n*n, plus the plain
// value matrices and Christoffel jets derived from them. Jets are valid to
// full order 3 for g, order 2 for Gamma, order 1 for anything built from
// dGamma; higher blocks are truncated and never read.
struct MetricJets {
    int n = 0;
    std::vector<Jet3> g;       // n*n
    std::vector<Jet3> g_inv;   // n*n
    std::vector<Jet3> gamma;   // n*n*n, [a][b][c] = Gamma^a_bc
};

// Gauss-Jordan inverse of a jet-valued symmetric matrix with partial
// pivoting on the values. Singularity is judged exactly like the plain
// dense path in tensor.cpp: |det| under 1e-12 relative to the product of
// the row norms.
std::vector<Jet3> jet_matrix_inverse(const std::vector<Jet3>& m, int n) {
    std::vector<Jet3> a = m;
    const int nv = m[0].nvars();
    std::vector<Jet3> inv(static_cast<std::size_t>(n) * n, Jet3::constant(nv, 0.0));
    for (int i = 0; i < n; ++i) inv[static_cast<std::size_t>(i) * n + i] = Jet3::constant(nv, 1.0);

    double row_norm_product = 1.0;
    for (int r = 0; r < n; ++r) {
        double s = 0.0;
        for (int c = 0; c < n; ++c) {
            const double v = a[static_cast<std::size_t>(r) * n + c].value();
            s += v * v;
        }
        row_norm_product *= std::sqrt(s);
    }

    double det = 1.0;
    auto row = [n](std::vector<Jet3>& v, int r) { return v.begin() + static_cast<std::ptrdiff_t>(r) * n; };
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[static_cast<std::size_t>(r) * n + col].value()) >
                std::abs(a[static_cast<std::size_t>(pivot) * n + col].value()))
                pivot = r;
        if (pivot != col) {
            std::swap_ranges(row(a, col), row(a, col) + n, row(a, pivot));
            std::swap_ranges(row(inv, col), row(inv, col) + n, row(inv, pivot));
            det = -det;
        }
        const Jet3 p = a[static_cast<std::size_t>(col) * n + col];
        det *= p.value();
        if (p.value() == 0.0) break;
        for (int c = 0; c < n; ++c) {
            a[static_cast<std::size_t>(col) * n + c] = a[static_cast<std::size_t>(col) * n + c] / p;
            inv[static_cast<std::size_t>(col) * n + c] = inv[static_cast<std::size_t>(col) * n + c] / p;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const Jet3 f = a[static_cast<std::size_t>(r) * n + col];
            for (int c = 0; c < n; ++c) {
                a[static_cast<std::size_t>(r) * n + c] -= f * a[static_cast<std::size_t>(col) * n + c];
                inv[static_cast<std::size_t>(r) * n + c] -= f * inv[static_cast<std::size_t>(col) * n + c];
            }
        }
    }
    if (std::abs(det) < 1e-12 * std::max(row_norm_product, 1e-300))
        throw SingularMetricError("metric matrix is singular at the evaluation point");
    return inv;
}

MetricJets evaluate_metric_jets(const MetricChart& chart, std::span<const double> point) {
    const int n = chart.dim;
    if (static_cast<int>(point.size()) != n) throw Error("point arity does not match chart dimension");
    if (!chart.admissible(point)) throw DomainError("point violates the chart domain");

    MetricJets mj;
    mj.n = n;
    const Jet3 zero = Jet3::constant(n, 0.0);
    mj.g.assign(static_cast<std::size_t>(n) * n, zero);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            if (const auto& e = chart.component(i, j)) {
                Jet3 v = evaluate_jet(*e, chart.coordinates, point, chart.parameters);
                mj.g[static_cast<std::size_t>(i) * n + j] = v;
                mj.g[static_cast<std::size_t>(j) * n + i] = std::move(v);
            }
        }
    }
    mj.g_inv = jet_matrix_inverse(mj.g, n);

    mj.gamma.assign(static_cast<std::size_t>(n) * n * n, zero);
    // Precompute the partial-derivative jets of g once: dg[b][i][j].
    std::vector<Jet3> dg(static_cast<std::size_t>(n) * n * n, zero);
    for (int b = 0; b < n; ++b)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                Jet3 v = derivative_jet(mj.g[static_cast<std::size_t>(i) * n + j], b);
                dg[(static_cast<std::size_t>(b) * n + i) * n + j] = v;
                dg[(static_cast<std::size_t>(b) * n + j) * n + i] = std::move(v);
            }
    auto dgat = [&](int b, int i, int j) -> const Jet3& {
        return dg[(static_cast<std::size_t>(b) * n + i) * n + j];
    };
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = b; c < n; ++c) {
                Jet3 acc = zero;
                for (int d = 0; d < n; ++d) {
                    Jet3 term = dgat(b, d, c) + dgat(c, b, d) - dgat(d, b, c);
                    acc += mj.g_inv[static_cast<std::size_t>(a) * n + d] * term;
                }
                acc *= 0.5;
                mj.gamma[(static_cast<std::size_t>(a) * n + b) * n + c] = acc;
                mj.gamma[(static_cast<std::size_t>(a) * n + c) * n + b] = std::move(acc);
            }
    return mj;
}

const Jet3& gamma_at(const MetricJets& mj, int a, int b, int c) {
    return mj.gamma[(static_cast<std::size_t>(a) * mj.n + b) * mj.n + c];
}

} // namespace

DenseTensor christoffel(const MetricChart& chart, std::span<const double> point) {
    const MetricJets mj = evaluate_metric_jets(chart, point);
    const int n = mj.n;
    DenseTensor out(n, 3);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) out(a, b, c) = gamma_at(mj, a, b, c).value();
    return out;
}

CurvaturePackage curvature_package(const MetricChart& chart, std::span<const double> point) {
    const MetricJets mj = evaluate_metric_jets(chart, point);
    const int n = mj.n;
    const Jet3 zero = Jet3::constant(n, 0.0);

    CurvaturePackage pkg;
    pkg.point.assign(point.begin(), point.end());
    pkg.dim = n;

    pkg.g = DenseTensor(n, 2);
    pkg.g_inv = DenseTensor(n, 2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            pkg.g(i, j) = mj.g[static_cast<std::size_t>(i) * n + j].value();
            pkg.g_inv(i, j) = mj.g_inv[static_cast<std::size_t>(i) * n + j].value();
        }
    pkg.g.enforce_symmetry(Symmetry::sym2, 1e-9 * std::max(1.0, max_abs(pkg.g)));
    pkg.g_inv.enforce_symmetry(Symmetry::sym2, 1e-9 * std::max(1.0, max_abs(pkg.g_inv)));

    pkg.gamma = DenseTensor(n, 3);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) pkg.gamma(a, b, c) = gamma_at(mj, a, b, c).value();

    // Mixed curvature R^d_abc as jets (value + gradient are exact).
    //   R^d_abc = d_b Gamma^d_ac - d_a Gamma^d_bc
    //           + Gamma^m_ac Gamma^d_bm - Gamma^m_bc Gamma^d_am
    std::vector<Jet3> rm(static_cast<std::size_t>(n) * n * n * n, zero);
    auto rm_at = [&](int d, int a, int b, int c) -> Jet3& {
        return rm[((static_cast<std::size_t>(d) * n + a) * n + b) * n + c];
    };
    for (int d = 0; d < n; ++d)
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                for (int c = 0; c < n; ++c) {
                    Jet3 acc = derivative_jet(gamma_at(mj, d, a, c), b) -
                               derivative_jet(gamma_at(mj, d, b, c), a);
                    for (int m = 0; m < n; ++m)
                        acc += gamma_at(mj, m, a, c) * gamma_at(mj, d, b, m) -
                               gamma_at(mj, m, b, c) * gamma_at(mj, d, a, m);
                    rm_at(d, a, b, c) = acc;
                    rm_at(d, b, a, c) = -acc;
                }

    // Lower the contravariant slot: R_abcd = g_dm R^m_abc.
    std::vector<Jet3> rj(static_cast<std::size_t>(n) * n * n * n, zero);
    auto rj_at = [&](int a, int b, int c, int d) -> Jet3& {
        return rj[((static_cast<std::size_t>(a) * n + b) * n + c) * n + d];
    };
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    Jet3 acc = zero;
                    for (int m = 0; m < n; ++m)
                        acc += mj.g[static_cast<std::size_t>(d) * n + m] * rm_at(m, a, b, c);
                    rj_at(a, b, c, d) = acc;
                    rj_at(b, a, c, d) = -acc;
                }

    pkg.R = DenseTensor(n, 4);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) pkg.R(a, b, c, d) = rj_at(a, b, c, d).value();
    pkg.R.enforce_symmetry(Symmetry::curv4, 1e-9 * std::max(1.0, max_abs(pkg.R)));

    // Ricci tensor as jets: S_jk = g^il R_ijkl.
    std::vector<Jet3> sj(static_cast<std::size_t>(n) * n, zero);
    for (int j = 0; j < n; ++j)
        for (int k = j; k < n; ++k) {
            Jet3 acc = zero;
            for (int i = 0; i < n; ++i)
                for (int l = 0; l < n; ++l)
                    acc += mj.g_inv[static_cast<std::size_t>(i) * n + l] * rj_at(i, j, k, l);
            sj[static_cast<std::size_t>(j) * n + k] = acc;
            sj[static_cast<std::size_t>(k) * n + j] = std::move(acc);
        }

    pkg.S = DenseTensor(n, 2);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) pkg.S(j, k) = sj[static_cast<std::size_t>(j) * n + k].value();
    pkg.S.enforce_symmetry(Symmetry::sym2, 1e-9 * std::max(1.0, max_abs(pkg.S)));

    pkg.S2 = ricci_power(pkg.S, pkg.g, 2);
    pkg.S3 = ricci_power(pkg.S, pkg.g, 3);
    pkg.S4 = ricci_power(pkg.S, pkg.g, 4);
    pkg.kappa = trace_wrt_g(pkg.S, pkg.g);
    pkg.kappa2 = trace_wrt_g(pkg.S2, pkg.g);

    const DenseTensor gg = kn_product(pkg.g, pkg.g);
    const DenseTensor gs = kn_product(pkg.g, pkg.S);
    pkg.G = gg * 0.5;
    pkg.C = pkg.R - gs * (1.0 / (n - 2)) + gg * (pkg.kappa / (2.0 * (n - 1) * (n - 2)));
    pkg.W = pkg.R - gg * (pkg.kappa / (2.0 * n * (n - 1)));
    pkg.K = pkg.R - gs * (1.0 / (n - 2));
    for (DenseTensor* t : {&pkg.C, &pkg.W, &pkg.K})
        t->enforce_symmetry(Symmetry::curv4, 1e-9 * std::max(1.0, max_abs(*t)));

    // nabla_R(e,a,b,c,d) = d_e R_abcd - Gamma^m_ea R_mbcd - Gamma^m_eb R_amcd
    //                    - Gamma^m_ec R_abmd - Gamma^m_ed R_abcm
    pkg.nabla_R = DenseTensor(n, 5);
    for (int e = 0; e < n; ++e)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d < n; ++d) {
                        double acc = rj_at(a, b, c, d).d1(e);
                        for (int m = 0; m < n; ++m)
                            acc -= pkg.gamma(m, e, a) * pkg.R(m, b, c, d) +
                                   pkg.gamma(m, e, b) * pkg.R(a, m, c, d) +
                                   pkg.gamma(m, e, c) * pkg.R(a, b, m, d) +
                                   pkg.gamma(m, e, d) * pkg.R(a, b, c, m);
                        pkg.nabla_R(e, a, b, c, d) = acc;
                    }

    pkg.nabla_S = DenseTensor(n, 3);
    for (int c = 0; c < n; ++c)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                double acc = sj[static_cast<std::size_t>(a) * n + b].d1(c);
                for (int m = 0; m < n; ++m)
                    acc -= pkg.gamma(m, c, a) * pkg.S(m, b) + pkg.gamma(m, c, b) * pkg.S(a, m);
                pkg.nabla_S(c, a, b) = acc;
            }

    return pkg;
}

DenseTensor covariant_derivative_sym2(const MetricChart& chart, std::span<const double> point,
                                      std::span<const Jet3> field) {
    const MetricJets mj = evaluate_metric_jets(chart, point);
    const int n = mj.n;
    if (static_cast<int>(field.size()) != n * n)
        throw Error("covariant_derivative_sym2: field must be a dim*dim jet grid");
    DenseTensor out(n, 3);
    for (int c = 0; c < n; ++c)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                double acc = field[static_cast<std::size_t>(a) * n + b].d1(c);
                for (int m = 0; m < n; ++m)
                    acc -= gamma_at(mj, m, c, a).value() * field[static_cast<std::size_t>(m) * n + b].value() +
                           gamma_at(mj, m, c, b).value() * field[static_cast<std::size_t>(a) * n + m].value();
                out(c, a, b) = acc;
            }
    return out;
}

} // namespace curvkit
