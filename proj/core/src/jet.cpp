#include "curvkit/jet.hpp"

#include <cmath>
#include <stdexcept>

#include "curvkit/errors.hpp"

namespace curvkit {

Jet3::Jet3(int nvars, double value)
    : nvars_(nvars),
      value_(value),
      grad_(static_cast<std::size_t>(nvars), 0.0),
      hess_(static_cast<std::size_t>(nvars) * nvars, 0.0),
      third_(static_cast<std::size_t>(nvars) * nvars * nvars, 0.0) {
    if (nvars < 1) throw std::invalid_argument("Jet3: nvars must be positive");
}

Jet3 Jet3::constant(int nvars, double value) { return Jet3(nvars, value); }

Jet3 Jet3::seed(int nvars, int var, double value) {
    Jet3 j(nvars, value);
    j.grad_[var] = 1.0;
    return j;
}

Jet3 Jet3::operator-() const {
    Jet3 r = *this;
    r.value_ = -r.value_;
    for (auto& v : r.grad_) v = -v;
    for (auto& v : r.hess_) v = -v;
    for (auto& v : r.third_) v = -v;
    return r;
}

Jet3& Jet3::operator+=(const Jet3& rhs) {
    value_ += rhs.value_;
    for (std::size_t i = 0; i < grad_.size(); ++i) grad_[i] += rhs.grad_[i];
    for (std::size_t i = 0; i < hess_.size(); ++i) hess_[i] += rhs.hess_[i];
    for (std::size_t i = 0; i < third_.size(); ++i) third_[i] += rhs.third_[i];
    return *this;
}

Jet3& Jet3::operator-=(const Jet3& rhs) {
    value_ -= rhs.value_;
    for (std::size_t i = 0; i < grad_.size(); ++i) grad_[i] -= rhs.grad_[i];
    for (std::size_t i = 0; i < hess_.size(); ++i) hess_[i] -= rhs.hess_[i];
    for (std::size_t i = 0; i < third_.size(); ++i) third_[i] -= rhs.third_[i];
    return *this;
}

Jet3& Jet3::operator*=(double s) {
    value_ *= s;
    for (auto& v : grad_) v *= s;
    for (auto& v : hess_) v *= s;
    for (auto& v : third_) v *= s;
    return *this;
}

// Leibniz rule through order 3. Only the i<=j (resp. i<=j<=k) simplex is
// computed; the symmetric positions are mirrored afterwards.
Jet3 operator*(const Jet3& a, const Jet3& b) {
    const int n = a.nvars_;
    Jet3 r(n, a.value_ * b.value_);
    for (int i = 0; i < n; ++i)
        r.grad_[i] = a.grad_[i] * b.value_ + a.value_ * b.grad_[i];
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double v = a.d2(i, j) * b.value_ + a.grad_[i] * b.grad_[j] +
                             a.grad_[j] * b.grad_[i] + a.value_ * b.d2(i, j);
            r.d2(i, j) = v;
            r.d2(j, i) = v;
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            for (int k = j; k < n; ++k) {
                const double v = a.d3(i, j, k) * b.value_
                               + a.d2(i, j) * b.grad_[k] + a.d2(i, k) * b.grad_[j] + a.d2(j, k) * b.grad_[i]
                               + a.grad_[i] * b.d2(j, k) + a.grad_[j] * b.d2(i, k) + a.grad_[k] * b.d2(i, j)
                               + a.value_ * b.d3(i, j, k);
                r.d3(i, j, k) = v;
                r.d3(i, k, j) = v;
                r.d3(j, i, k) = v;
                r.d3(j, k, i) = v;
                r.d3(k, i, j) = v;
                r.d3(k, j, i) = v;
            }
        }
    }
    return r;
}

Jet3 Jet3::compose(double f0, double f1, double f2, double f3) const {
    const int n = nvars_;
    Jet3 r(n, f0);
    for (int i = 0; i < n; ++i) r.grad_[i] = f1 * grad_[i];
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double v = f2 * grad_[i] * grad_[j] + f1 * d2(i, j);
            r.d2(i, j) = v;
            r.d2(j, i) = v;
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            for (int k = j; k < n; ++k) {
                const double v = f3 * grad_[i] * grad_[j] * grad_[k]
                               + f2 * (d2(i, j) * grad_[k] + d2(i, k) * grad_[j] + d2(j, k) * grad_[i])
                               + f1 * d3(i, j, k);
                r.d3(i, j, k) = v;
                r.d3(i, k, j) = v;
                r.d3(j, i, k) = v;
                r.d3(j, k, i) = v;
                r.d3(k, i, j) = v;
                r.d3(k, j, i) = v;
            }
        }
    }
    return r;
}

Jet3 operator/(const Jet3& a, const Jet3& b) {
    const double v = b.value();
    if (v == 0.0) throw DomainError("jet division by zero value");
    const double iv = 1.0 / v;
    return a * b.compose(iv, -iv * iv, 2.0 * iv * iv * iv, -6.0 * iv * iv * iv * iv);
}

Jet3 operator/(double s, const Jet3& rhs) {
    return Jet3::constant(rhs.nvars(), s) / rhs;
}

Jet3 exp(const Jet3& x) {
    const double e = std::exp(x.value());
    return x.compose(e, e, e, e);
}

Jet3 log(const Jet3& x) {
    const double v = x.value();
    if (v <= 0.0) throw DomainError("jet log of nonpositive value");
    const double iv = 1.0 / v;
    return x.compose(std::log(v), iv, -iv * iv, 2.0 * iv * iv * iv);
}

Jet3 sin(const Jet3& x) {
    const double s = std::sin(x.value());
    const double c = std::cos(x.value());
    return x.compose(s, c, -s, -c);
}

Jet3 cos(const Jet3& x) {
    const double s = std::sin(x.value());
    const double c = std::cos(x.value());
    return x.compose(c, -s, -c, s);
}

Jet3 sqrt(const Jet3& x) {
    const double v = x.value();
    if (v <= 0.0) throw DomainError("jet sqrt of nonpositive value");
    const double r = std::sqrt(v);
    return x.compose(r, 0.5 / r, -0.25 / (v * r), 0.375 / (v * v * r));
}

Jet3 pow(const Jet3& x, int e) {
    if (e == 0) return Jet3::constant(x.nvars(), 1.0);
    if (e < 0) return 1.0 / pow(x, -e);
    Jet3 r = x;
    for (int i = 1; i < e; ++i) r = r * x;
    return r;
}

Jet3 pow(const Jet3& x, double r) {
    const double v = x.value();
    if (v <= 0.0) throw DomainError("jet pow of nonpositive base");
    const double f0 = std::pow(v, r);
    return x.compose(f0, r * f0 / v, r * (r - 1.0) * f0 / (v * v),
                     r * (r - 1.0) * (r - 2.0) * f0 / (v * v * v));
}

Jet3 derivative_jet(const Jet3& f, int b) {
    const int n = f.nvars();
    Jet3 r(n, f.d1(b));
    for (int i = 0; i < n; ++i) r.d1(i) = f.d2(b, i);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r.d2(i, j) = f.d3(b, i, j);
    return r;
}

} // namespace curvkit
