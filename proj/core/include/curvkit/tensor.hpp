#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace curvkit {

/// Symmetry class carried by a DenseTensor. sym2 marks a symmetric (0,2)
/// tensor; curv4 marks a (0,4) tensor with the generalized-curvature
/// symmetries D_abcd = -D_bacd = -D_abdc = D_cdab.
enum class Symmetry { none, sym2, curv4 };

/// Pointwise covariant tensor of rank k over an n-dimensional tangent space,
/// stored densely in row-major order over all n^k index tuples. Symmetry is
/// enforced at construction (symmetrize-and-check), not stored compactly:
/// every workload here has n <= 6.
class DenseTensor {
public:
    DenseTensor() = default;
    DenseTensor(int dim, int rank, Symmetry symmetry = Symmetry::none);

    static DenseTensor identity_sym2(int dim);
    static DenseTensor diagonal_sym2(std::span<const double> diag);

    int dim() const noexcept { return dim_; }
    int rank() const noexcept { return rank_; }
    Symmetry symmetry() const noexcept { return symmetry_; }
    std::size_t size() const noexcept { return data_.size(); }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }
    double flat(std::size_t i) const { return data_[i]; }
    double& flat(std::size_t i) { return data_[i]; }

    template <typename... I>
    double operator()(I... idx) const {
        return data_[index(idx...)];
    }
    template <typename... I>
    double& operator()(I... idx) {
        return data_[index(idx...)];
    }

    double at(std::span<const int> idx) const;
    double& at(std::span<const int> idx);

    /// Checks the requested symmetry holds up to `tol` (max-norm of the
    /// violation, absolute), symmetrizes, and tags. Throws on violation.
    DenseTensor& enforce_symmetry(Symmetry symmetry, double tol = 1e-9);

    DenseTensor& operator+=(const DenseTensor& rhs);
    DenseTensor& operator-=(const DenseTensor& rhs);
    DenseTensor& operator*=(double s);
    friend DenseTensor operator+(DenseTensor lhs, const DenseTensor& rhs) { return lhs += rhs; }
    friend DenseTensor operator-(DenseTensor lhs, const DenseTensor& rhs) { return lhs -= rhs; }
    friend DenseTensor operator*(DenseTensor lhs, double s) { return lhs *= s; }
    friend DenseTensor operator*(double s, DenseTensor rhs) { return rhs *= s; }

private:
    template <typename... I>
    std::size_t index(I... idx) const {
        std::size_t f = 0;
        ((f = f * dim_ + static_cast<std::size_t>(idx)), ...);
        return f;
    }

    int dim_ = 0;
    int rank_ = 0;
    Symmetry symmetry_ = Symmetry::none;
    std::vector<double> data_;
};

/// Euclidean norm of the raw coordinate components. All residuals in this
/// library are measured in this chart-dependent norm; the indefinite metric
/// norm is unusable as a fitting criterion.
double frobenius_norm(const DenseTensor& t);
double max_abs(const DenseTensor& t);

/// Mixed (1,1) components of an endomorphism of the tangent space:
/// matrix(r, c) is the r-th component of the image of basis vector c.
class Endomorphism {
public:
    Endomorphism() = default;
    explicit Endomorphism(int dim) : dim_(dim), m_(static_cast<std::size_t>(dim) * dim, 0.0) {}

    int dim() const noexcept { return dim_; }
    double operator()(int r, int c) const { return m_[static_cast<std::size_t>(r) * dim_ + c]; }
    double& operator()(int r, int c) { return m_[static_cast<std::size_t>(r) * dim_ + c]; }

private:
    int dim_ = 0;
    std::vector<double> m_;
};

struct Vector {
    std::vector<double> components;
    int dim() const noexcept { return static_cast<int>(components.size()); }
    double operator[](int i) const { return components[i]; }
};
using OneForm = Vector;

/// Kulkarni-Nomizu product of two symmetric (0,2) tensors:
///   (A ^ E)(X1,X2,Y1,Y2) = A(X1,Y2)E(X2,Y1) + A(X2,Y1)E(X1,Y2)
///                        - A(X1,Y1)E(X2,Y2) - A(X2,Y2)E(X1,Y1).
/// The result carries the curv4 symmetries by construction.
DenseTensor kn_product(const DenseTensor& a, const DenseTensor& e);

/// Generalized Kulkarni-Nomizu product of a symmetric (0,2) tensor with a
/// (0,k) tensor, k >= 2; the first two slots of T couple with A's slots and
/// the remaining k-2 slots pass through. Reduces to kn_product for k = 2.
DenseTensor kn_product_general(const DenseTensor& a, const DenseTensor& t);

/// Derivation action of an endomorphism on a (0,k) tensor:
///   (H T)(X1..Xk) = -T(H X1,..,Xk) - ... - T(X1,..,H Xk).
/// A rank-0 input is accepted and maps to 0.
DenseTensor endo_action(const Endomorphism& h, const DenseTensor& t);

/// The (0,k+2) tensor D.T: for each vector pair (X,Y) the endomorphism
/// D(X,Y) (last slot of D raised with g^{-1}) acts as a derivation on T.
/// The pair (X,Y) occupies the LAST two slots of the result, which is
/// antisymmetric in them. D must carry the curv4 tag.
DenseTensor curvature_action(const DenseTensor& d, const DenseTensor& g, const DenseTensor& t);

/// Tachibana-type tensor Q(A,T): the action of the endomorphism
/// (X ^_A Y)Z = A(Y,Z)X - A(X,Z)Y on T, with (X,Y) appended as the last two
/// slots. g is taken to keep the metric dependence of the surrounding
/// algebra explicit; it is validated for invertibility.
DenseTensor q_product(const DenseTensor& a, const DenseTensor& t, const DenseTensor& g);

/// Action of the rank-one endomorphism mu_X(Z) = mu(Z) X on a (0,k) tensor.
DenseTensor mu_action(const OneForm& mu, const Vector& x, const DenseTensor& t);

/// k-th level tensor of a symmetric (0,2) tensor A with respect to g:
/// A^k(X,Y) = A(Ak-1 X, Y) where the operator is g^{-1}A. A^1 = A.
DenseTensor ricci_power(const DenseTensor& a, const DenseTensor& g, int k);

/// Full g-trace of a symmetric (0,2) tensor: sum_ij g^{ij} A_ij.
double trace_wrt_g(const DenseTensor& a, const DenseTensor& g);

/// g-contraction of a (0,4) tensor over its first and last slots:
/// out_jk = sum_il g^{il} D_ijkl. Contracting the curvature tensor this way
/// yields the Ricci tensor under the conventions fixed in curvature.hpp.
DenseTensor contract_first_last(const DenseTensor& d, const DenseTensor& g_inv);

/// True iff the first-Bianchi cyclic sum, antisymmetry in the first pair and
/// pair-interchange symmetry all hold with max-norm violation < tol.
bool check_generalized_curvature(const DenseTensor& d, double tol);

/// Inverse of a symmetric (0,2) tensor by dense LU with partial pivoting.
/// Throws SingularMetricError when |det| is below 1e-12 relative to the
/// product of row norms.
DenseTensor invert_sym2(const DenseTensor& g);

} // namespace curvkit
