#include "curvkit/tensor.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "curvkit/errors.hpp"

namespace curvkit {

namespace {

std::size_t pow_size(int dim, int rank) {
    std::size_t s = 1;
    for (int i = 0; i < rank; ++i) s *= static_cast<std::size_t>(dim);
    return s;
}

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

void require_sym2(const DenseTensor& t, const char* what) {
    require(t.rank() == 2 && t.symmetry() == Symmetry::sym2, what);
}

void require_same_dim(const DenseTensor& a, const DenseTensor& b) {
    require(a.dim() == b.dim(), "dimension mismatch");
}

Eigen::MatrixXd as_matrix(const DenseTensor& g) {
    const int n = g.dim();
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = g(i, j);
    return m;
}

Eigen::MatrixXd inverse_matrix(const DenseTensor& g) {
    const int n = g.dim();
    Eigen::MatrixXd m = as_matrix(g);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    double row_norm_product = 1.0;
    for (int i = 0; i < n; ++i) row_norm_product *= m.row(i).norm();
    if (std::abs(lu.determinant()) < 1e-12 * std::max(row_norm_product, 1e-300))
        throw SingularMetricError("metric matrix is singular");
    return lu.inverse();
}

} // namespace

DenseTensor::DenseTensor(int dim, int rank, Symmetry symmetry)
    : dim_(dim), rank_(rank), symmetry_(symmetry), data_(pow_size(dim, rank), 0.0) {
    require(dim >= 1, "dim must be positive");
    require(rank >= 0, "rank must be non-negative");
    if (symmetry == Symmetry::sym2) require(rank == 2, "sym2 tag requires rank 2");
    if (symmetry == Symmetry::curv4) require(rank == 4, "curv4 tag requires rank 4");
}

DenseTensor DenseTensor::identity_sym2(int dim) {
    DenseTensor t(dim, 2, Symmetry::sym2);
    for (int i = 0; i < dim; ++i) t(i, i) = 1.0;
    return t;
}

DenseTensor DenseTensor::diagonal_sym2(std::span<const double> diag) {
    DenseTensor t(static_cast<int>(diag.size()), 2, Symmetry::sym2);
    for (int i = 0; i < t.dim(); ++i) t(i, i) = diag[i];
    return t;
}

double DenseTensor::at(std::span<const int> idx) const {
    require(static_cast<int>(idx.size()) == rank_, "index arity mismatch");
    std::size_t f = 0;
    for (int i : idx) f = f * dim_ + static_cast<std::size_t>(i);
    return data_[f];
}

double& DenseTensor::at(std::span<const int> idx) {
    require(static_cast<int>(idx.size()) == rank_, "index arity mismatch");
    std::size_t f = 0;
    for (int i : idx) f = f * dim_ + static_cast<std::size_t>(i);
    return data_[f];
}

DenseTensor& DenseTensor::enforce_symmetry(Symmetry symmetry, double tol) {
    const int n = dim_;
    if (symmetry == Symmetry::sym2) {
        require(rank_ == 2, "sym2 tag requires rank 2");
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                const double s = 0.5 * ((*this)(i, j) + (*this)(j, i));
                if (std::abs((*this)(i, j) - s) > tol)
                    throw std::invalid_argument("tensor is not symmetric within tolerance");
                (*this)(i, j) = s;
                (*this)(j, i) = s;
            }
        }
    } else if (symmetry == Symmetry::curv4) {
        require(rank_ == 4, "curv4 tag requires rank 4");
        // Group average over the signed symmetry group generated by
        // D_abcd = -D_bacd = -D_abdc = D_cdab; exact idempotent projection.
        DenseTensor sym(n, 4, Symmetry::none);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d < n; ++d) {
                        const double p = 0.125 * ((*this)(a, b, c, d) - (*this)(b, a, c, d) -
                                                  (*this)(a, b, d, c) + (*this)(b, a, d, c) +
                                                  (*this)(c, d, a, b) - (*this)(d, c, a, b) -
                                                  (*this)(c, d, b, a) + (*this)(d, c, b, a));
                        if (std::abs(p - (*this)(a, b, c, d)) > tol)
                            throw std::invalid_argument(
                                "tensor lacks the curv4 symmetries within tolerance");
                        sym(a, b, c, d) = p;
                    }
        data_.assign(sym.data().begin(), sym.data().end());
    }
    symmetry_ = symmetry;
    return *this;
}

DenseTensor& DenseTensor::operator+=(const DenseTensor& rhs) {
    require(dim_ == rhs.dim_ && rank_ == rhs.rank_, "shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
    if (symmetry_ != rhs.symmetry_) symmetry_ = Symmetry::none;
    return *this;
}

DenseTensor& DenseTensor::operator-=(const DenseTensor& rhs) {
    require(dim_ == rhs.dim_ && rank_ == rhs.rank_, "shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
    if (symmetry_ != rhs.symmetry_) symmetry_ = Symmetry::none;
    return *this;
}

DenseTensor& DenseTensor::operator*=(double s) {
    for (auto& v : data_) v *= s;
    return *this;
}

double frobenius_norm(const DenseTensor& t) {
    double s = 0.0;
    for (double v : t.data()) s += v * v;
    return std::sqrt(s);
}

double max_abs(const DenseTensor& t) {
    double m = 0.0;
    for (double v : t.data()) m = std::max(m, std::abs(v));
    return m;
}

DenseTensor kn_product(const DenseTensor& a, const DenseTensor& e) {
    require_sym2(a, "kn_product: first argument must be a sym2 tensor");
    require_sym2(e, "kn_product: second argument must be a sym2 tensor");
    require_same_dim(a, e);
    const int n = a.dim();
    DenseTensor out(n, 4, Symmetry::curv4);
    for (int x1 = 0; x1 < n; ++x1)
        for (int x2 = 0; x2 < n; ++x2)
            for (int y1 = 0; y1 < n; ++y1)
                for (int y2 = 0; y2 < n; ++y2)
                    out(x1, x2, y1, y2) = a(x1, y2) * e(x2, y1) + a(x2, y1) * e(x1, y2) -
                                          a(x1, y1) * e(x2, y2) - a(x2, y2) * e(x1, y1);
    return out;
}

DenseTensor kn_product_general(const DenseTensor& a, const DenseTensor& t) {
    require_sym2(a, "kn_product_general: first argument must be a sym2 tensor");
    require_same_dim(a, t);
    require(t.rank() >= 2, "kn_product_general: tensor rank must be at least 2");
    const int n = a.dim();
    const int k = t.rank();
    DenseTensor out(n, k + 2);
    const std::size_t tail = pow_size(n, k - 2); // strides of T's trailing k-2 slots
    // Output slots: (X1, X2, Y1, Y2, tail...); T is evaluated with its first
    // two slots replaced and the tail passed through.
    std::size_t f = 0;
    for (int x1 = 0; x1 < n; ++x1)
        for (int x2 = 0; x2 < n; ++x2)
            for (int y1 = 0; y1 < n; ++y1)
                for (int y2 = 0; y2 < n; ++y2) {
                    const std::size_t t21 = (static_cast<std::size_t>(x2) * n + y1) * tail;
                    const std::size_t t12 = (static_cast<std::size_t>(x1) * n + y2) * tail;
                    const std::size_t t22 = (static_cast<std::size_t>(x2) * n + y2) * tail;
                    const std::size_t t11 = (static_cast<std::size_t>(x1) * n + y1) * tail;
                    const double a12 = a(x1, y2), a21 = a(x2, y1), a11 = a(x1, y1), a22 = a(x2, y2);
                    for (std::size_t r = 0; r < tail; ++r, ++f)
                        out.flat(f) = a12 * t.flat(t21 + r) + a21 * t.flat(t12 + r) -
                                      a11 * t.flat(t22 + r) - a22 * t.flat(t11 + r);
                }
    return out;
}

DenseTensor endo_action(const Endomorphism& h, const DenseTensor& t) {
    require(h.dim() == t.dim(), "dimension mismatch");
    const int n = t.dim();
    const int k = t.rank();
    DenseTensor out(n, k);
    if (k == 0) return out; // the action on a scalar is zero
    std::vector<std::size_t> stride(static_cast<std::size_t>(k));
    stride[k - 1] = 1;
    for (int j = k - 2; j >= 0; --j) stride[j] = stride[j + 1] * static_cast<std::size_t>(n);
    for (std::size_t f = 0; f < out.size(); ++f) {
        double acc = 0.0;
        for (int j = 0; j < k; ++j) {
            const int ij = static_cast<int>(f / stride[j]) % n;
            const std::size_t base = f - static_cast<std::size_t>(ij) * stride[j];
            for (int m = 0; m < n; ++m) acc -= h(m, ij) * t.flat(base + static_cast<std::size_t>(m) * stride[j]);
        }
        out.flat(f) = acc;
    }
    return out;
}

namespace {

// Shared kernel of curvature_action and q_product: acts a family of
// endomorphisms E(a,b), antisymmetric in (a,b), on T and appends (a,b) as the
// last two slots.
template <typename EndoAt>
DenseTensor pair_family_action(const DenseTensor& t, int n, const EndoAt& endo_at) {
    const int k = t.rank();
    DenseTensor out(n, k + 2);
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    std::vector<std::size_t> stride(static_cast<std::size_t>(k), 1);
    for (int j = k - 2; j >= 0; --j) stride[j] = stride[j + 1] * static_cast<std::size_t>(n);
    Endomorphism e(n);
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            endo_at(a, b, e);
            for (std::size_t f = 0; f < t.size(); ++f) {
                double acc = 0.0;
                for (int j = 0; j < k; ++j) {
                    const int ij = static_cast<int>(f / stride[j]) % n;
                    const std::size_t base = f - static_cast<std::size_t>(ij) * stride[j];
                    for (int m = 0; m < n; ++m)
                        acc -= e(m, ij) * t.flat(base + static_cast<std::size_t>(m) * stride[j]);
                }
                out.flat(f * nn + static_cast<std::size_t>(a) * n + b) = acc;
                out.flat(f * nn + static_cast<std::size_t>(b) * n + a) = -acc;
            }
        }
    }
    return out;
}

} // namespace

DenseTensor curvature_action(const DenseTensor& d, const DenseTensor& g, const DenseTensor& t) {
    require(d.rank() == 4 && d.symmetry() == Symmetry::curv4,
            "curvature_action: D must carry the curv4 symmetry tag");
    require_sym2(g, "curvature_action: g must be a sym2 tensor");
    require_same_dim(d, g);
    require_same_dim(d, t);
    require(t.rank() >= 1, "curvature_action: tensor rank must be at least 1");
    const int n = d.dim();
    const Eigen::MatrixXd ginv = inverse_matrix(g);
    // Endomorphism of the pair (a,b): matrix m,c = sum_d g^{md} D_{abcd}.
    return pair_family_action(t, n, [&](int a, int b, Endomorphism& e) {
        for (int m = 0; m < n; ++m)
            for (int c = 0; c < n; ++c) {
                double acc = 0.0;
                for (int dd = 0; dd < n; ++dd) acc += ginv(m, dd) * d(a, b, c, dd);
                e(m, c) = acc;
            }
    });
}

DenseTensor q_product(const DenseTensor& a, const DenseTensor& t, const DenseTensor& g) {
    require_sym2(a, "q_product: A must be a sym2 tensor");
    require_sym2(g, "q_product: g must be a sym2 tensor");
    require_same_dim(a, g);
    require_same_dim(a, t);
    require(t.rank() >= 1, "q_product: tensor rank must be at least 1");
    inverse_matrix(g); // the contract demands an invertible metric
    const int n = a.dim();
    // (e_a ^_A e_b) e_c = A(e_b, e_c) e_a - A(e_a, e_c) e_b.
    return pair_family_action(t, n, [&](int ia, int ib, Endomorphism& e) {
        for (int m = 0; m < n; ++m)
            for (int c = 0; c < n; ++c)
                e(m, c) = (m == ia ? a(ib, c) : 0.0) - (m == ib ? a(ia, c) : 0.0);
    });
}

DenseTensor mu_action(const OneForm& mu, const Vector& x, const DenseTensor& t) {
    require(mu.dim() == t.dim() && x.dim() == t.dim(), "dimension mismatch");
    const int n = t.dim();
    Endomorphism e(n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) e(r, c) = mu[c] * x[r];
    return endo_action(e, t);
}

DenseTensor ricci_power(const DenseTensor& a, const DenseTensor& g, int k) {
    require_sym2(a, "ricci_power: A must be a sym2 tensor");
    require_sym2(g, "ricci_power: g must be a sym2 tensor");
    require_same_dim(a, g);
    require(k >= 1, "ricci_power: k must be positive");
    const int n = a.dim();
    const Eigen::MatrixXd am = as_matrix(a);
    const Eigen::MatrixXd op = inverse_matrix(g) * am; // the endomorphism of A
    Eigen::MatrixXd opk = Eigen::MatrixXd::Identity(n, n);
    for (int i = 1; i < k; ++i) opk = op * opk;
    const Eigen::MatrixXd res = opk.transpose() * am; // A^k(X,Y) = A(op^{k-1} X, Y)
    DenseTensor out(n, 2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out(i, j) = res(i, j);
    out.enforce_symmetry(Symmetry::sym2, 1e-9 * std::max(1.0, res.cwiseAbs().maxCoeff()));
    return out;
}

double trace_wrt_g(const DenseTensor& a, const DenseTensor& g) {
    require_sym2(a, "trace_wrt_g: A must be a sym2 tensor");
    require_sym2(g, "trace_wrt_g: g must be a sym2 tensor");
    require_same_dim(a, g);
    const Eigen::MatrixXd ginv = inverse_matrix(g);
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) s += ginv(i, j) * a(i, j);
    return s;
}

DenseTensor contract_first_last(const DenseTensor& d, const DenseTensor& g_inv) {
    require(d.rank() == 4, "contract_first_last: rank-4 tensor required");
    require_same_dim(d, g_inv);
    const int n = d.dim();
    DenseTensor out(n, 2);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i)
                for (int l = 0; l < n; ++l) acc += g_inv(i, l) * d(i, j, k, l);
            out(j, k) = acc;
        }
    return out;
}

bool check_generalized_curvature(const DenseTensor& d, double tol) {
    if (d.rank() != 4) throw std::invalid_argument("check_generalized_curvature: rank-4 tensor required");
    const int n = d.dim();
    double worst = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int e = 0; e < n; ++e) {
                    const double v = d(a, b, c, e);
                    worst = std::max(worst, std::abs(v + d(b, a, c, e)));
                    worst = std::max(worst, std::abs(v - d(c, e, a, b)));
                    worst = std::max(worst, std::abs(v + d(b, c, a, e) + d(c, a, b, e)));
                    if (worst >= tol) return false;
                }
    return worst < tol;
}

DenseTensor invert_sym2(const DenseTensor& g) {
    require_sym2(g, "invert_sym2: g must be a sym2 tensor");
    const Eigen::MatrixXd inv = inverse_matrix(g);
    DenseTensor out(g.dim(), 2);
    for (int i = 0; i < g.dim(); ++i)
        for (int j = 0; j < g.dim(); ++j) out(i, j) = inv(i, j);
    out.enforce_symmetry(Symmetry::sym2, 1e-9 * std::max(1.0, inv.cwiseAbs().maxCoeff()));
    return out;
}

} // namespace curvkit
