#pragma once

#include <vector>

namespace curvkit {

/// Truncated multivariate Taylor expansion: value plus all partial
/// derivatives through order 3 at a point. The order is fixed at 3, which is
/// what a metric needs to deliver Christoffel symbols (order 1), curvature
/// (order 2) and one covariant derivative of curvature (order 3).
///
/// The Hessian and third-order blocks are stored fully (nvars^2 and nvars^3
/// entries); symmetry under index permutation holds by construction of the
/// arithmetic.
class Jet3 {
public:
    Jet3() = default;
    explicit Jet3(int nvars, double value = 0.0);

    static Jet3 constant(int nvars, double value);
    /// Coordinate jet: value plus unit gradient in slot `var`.
    static Jet3 seed(int nvars, int var, double value);

    int nvars() const noexcept { return nvars_; }
    double value() const noexcept { return value_; }
    double& value() noexcept { return value_; }

    double d1(int i) const { return grad_[i]; }
    double& d1(int i) { return grad_[i]; }
    double d2(int i, int j) const { return hess_[i * nvars_ + j]; }
    double& d2(int i, int j) { return hess_[i * nvars_ + j]; }
    double d3(int i, int j, int k) const { return third_[(i * nvars_ + j) * nvars_ + k]; }
    double& d3(int i, int j, int k) { return third_[(i * nvars_ + j) * nvars_ + k]; }

    Jet3 operator-() const;
    Jet3& operator+=(const Jet3& rhs);
    Jet3& operator-=(const Jet3& rhs);
    Jet3& operator*=(double s);

    friend Jet3 operator+(Jet3 lhs, const Jet3& rhs) { return lhs += rhs; }
    friend Jet3 operator-(Jet3 lhs, const Jet3& rhs) { return lhs -= rhs; }
    friend Jet3 operator*(const Jet3& lhs, const Jet3& rhs);
    friend Jet3 operator/(const Jet3& lhs, const Jet3& rhs);
    friend Jet3 operator*(Jet3 lhs, double s) { return lhs *= s; }
    friend Jet3 operator*(double s, Jet3 rhs) { return rhs *= s; }
    friend Jet3 operator+(Jet3 lhs, double s) { lhs.value() += s; return lhs; }
    friend Jet3 operator+(double s, Jet3 rhs) { rhs.value() += s; return rhs; }
    friend Jet3 operator-(Jet3 lhs, double s) { lhs.value() -= s; return lhs; }
    friend Jet3 operator-(double s, const Jet3& rhs) { Jet3 r = -rhs; r.value() += s; return r; }
    friend Jet3 operator/(Jet3 lhs, double s) { return lhs *= 1.0 / s; }
    friend Jet3 operator/(double s, const Jet3& rhs);

    /// Chain rule through order 3 for a scalar function applied to this jet,
    /// given the function's value and first three derivatives at value().
    Jet3 compose(double f0, double f1, double f2, double f3) const;

private:
    int nvars_ = 0;
    double value_ = 0.0;
    std::vector<double> grad_;
    std::vector<double> hess_;
    std::vector<double> third_;
};

Jet3 exp(const Jet3& x);
Jet3 log(const Jet3& x);
Jet3 sin(const Jet3& x);
Jet3 cos(const Jet3& x);
Jet3 sqrt(const Jet3& x);
Jet3 pow(const Jet3& x, int e);
Jet3 pow(const Jet3& x, double r);

/// Jet of the partial derivative df/dx_b. Exact through order 2; the
/// third-order block of the result is zeroed because f carries no order-4
/// information. Callers must not read the top block of the result.
Jet3 derivative_jet(const Jet3& f, int b);

} // namespace curvkit
