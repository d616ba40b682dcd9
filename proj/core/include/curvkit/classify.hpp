#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "curvkit/curvature.hpp"
#include "curvkit/tensor.hpp"

namespace curvkit {

/// Residual thresholds shared by every membership decision. Fits land around
/// 1e-12 when a structure holds (double-precision jets), so accept and reject
/// each keep two orders of safety margin. The band in between reports
/// "indeterminate".
struct Tolerances {
    double accept_tol = 1e-8;
    double reject_tol = 1e-4;
    double determinacy_floor = 1e-10;
};

enum class Membership { member, non_member, indeterminate };
enum class FitStatus { determinate, degenerate, indeterminate };

/// Least-squares representation of a target tensor in a span of basis
/// tensors. `kernel_basis` holds an orthonormal basis of the null space of
/// the flattened basis matrix, so the full solution set is
/// coefficients + span(kernel_basis).
struct FitResult {
    std::vector<double> coefficients;
    double relative_residual = 1.0;
    std::vector<std::vector<double>> kernel_basis;
    FitStatus status = FitStatus::indeterminate;
    Membership membership = Membership::indeterminate;
};

/// Minimum-norm least squares of `target` against `basis` (all tensors of the
/// same shape), via SVD with singular values below 1e-10 of the largest
/// treated as zero. relative_residual is against max(|target|, tiny).
FitResult fit_linear_combination(const DenseTensor& target, std::span<const DenseTensor> basis,
                                 double accept_tol, double reject_tol);

Membership classify_residual(double residual, const Tolerances& tols);

std::string_view to_string(Membership m);
std::string_view to_string(FitStatus s);

/// The curvature-form hierarchy, ordered from most to least special.
enum class CurvatureClass {
    flat,
    constant_curvature,
    conformally_flat,
    roter_type,
    generalized_roter_type,
    unclassified
};
std::string_view to_string(CurvatureClass c);

/// All the per-class fits plus the selected class. The fit bases follow the
/// canonical coefficient order:
///   constant curvature     {g^g}
///   conformally flat       {g^g, g^S}
///   Roter                  {g^g, g^S, S^S}                      (N1,N2,N3)
///   generalized Roter      {g^g, g^S, S^S, g^S2, S^S2, S2^S2}   (L1..L6)
struct CurvatureFormResult {
    CurvatureClass cls = CurvatureClass::unclassified;
    double flat_residual = 0.0;       // |R| / max(|G|, tiny)
    FitResult constant_curvature;
    FitResult conformally_flat;
    FitResult roter;
    FitResult generalized_roter;
    FitResult generalized_roter_minor; // GRT basis without S2^S2, for properness
    double weyl_residual = 0.0;        // |C| / max(|R|, tiny)
    /// Top coefficient essential on the whole solution set: the Roter fit is
    /// proper when the conformally-flat subset fit fails, the generalized
    /// Roter fit when the five-tensor subset fit fails.
    Membership roter_proper = Membership::indeterminate;
    Membership generalized_roter_proper = Membership::indeterminate;
};

/// Tests flat, constant curvature, conformally flat, Roter, generalized
/// Roter in order and selects the first class that passes. Conformal
/// flatness must be confirmed by both the fit and the Weyl norm; if the two
/// routes disagree the class is skipped and the fit marked indeterminate.
CurvatureFormResult classify_curvature_form(const CurvaturePackage& pkg, const Tolerances& tols);

enum class EinsteinLevel { ricci_flat, einstein, ein2, ein3, ein4, none };
std::string_view to_string(EinsteinLevel l);

/// Smallest k such that S^k lies in the span of {g, S, ..., S^{k-1}}
/// (k = 0 means S itself vanishes). Decided by rank tests on the flattened
/// Krylov family, never by eigendecomposition: the Ricci operator may be
/// non-diagonalizable in indefinite signature.
struct EinsteinVerdict {
    EinsteinLevel level = EinsteinLevel::none;
    /// Monic relation: sum_j relation[j] * S^j = 0 with relation.back() = 1
    /// (S^0 = g). Empty when level = none.
    std::vector<double> relation;
    double residual = 1.0;  // fit residual at the accepted level
    std::vector<std::vector<double>> kernel_basis; // of the full family {g..S^4}
};

EinsteinVerdict einstein_level(const CurvaturePackage& pkg, const Tolerances& tols);

/// Orthonormal basis of the relations among {g, S, S^2, ..., S^max_power}.
std::vector<std::vector<double>> krylov_kernel(const CurvaturePackage& pkg, int max_power);

/// S = alpha g + beta eta (x) eta. beta and eta are individually determined
/// only up to beta -> beta/c^2, eta -> c eta; eta is returned unit-length in
/// the coordinate norm. `degenerate` marks the Einstein case (beta = 0, eta
/// meaningless).
struct QuasiEinstein {
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<double> eta;
    double residual = 0.0;
    bool degenerate = false;
};

std::optional<QuasiEinstein> quasi_einstein(const CurvaturePackage& pkg, const Tolerances& tols);

/// R = alpha' G + beta' g^(eta (x) eta).
struct QuasiConstantCurvature {
    double alpha_prime = 0.0;
    double beta_prime = 0.0;
    std::vector<double> eta;
    double residual = 0.0;
};

/// Uses the quasi-Einstein eta; absent when no quasi-Einstein decomposition
/// exists.
std::optional<QuasiConstantCurvature> quasi_constant_curvature(const CurvaturePackage& pkg,
                                                               const Tolerances& tols);
QuasiConstantCurvature quasi_constant_curvature(const CurvaturePackage& pkg,
                                                std::span<const double> eta,
                                                const Tolerances& tols);

/// Completes Roter coefficients (N1,N2,N3), N3 != 0, to a full generalized
/// Roter coefficient vector with the free tail (L4,L5,L6): substituting the
/// contracted Ricci relation of the Roter form eliminates S^2. Collapses to
/// (N1,N2,N3) when L4 = L5 = L6 = 0.
std::array<double, 3> rt_to_grt_coefficients(double n1, double n2, double n3, double kappa,
                                             int n, double l4, double l5, double l6);

/// For a non-flat constant-curvature package: every vector in the Roter fit
/// solution set must satisfy (N1 n^2 + kappa (N2 n + N3 kappa))/n =
/// kappa/(2(n-1)), and every generalized Roter solution the analogous
/// degree-4 relation. Returns (roter holds, generalized roter holds).
/// Throws on kappa = 0 (the relation is vacuous).
std::pair<bool, bool> constant_curvature_relations(const FitResult& rt_fit,
                                                   const FitResult& grt_fit, double kappa, int n,
                                                   double tol);

/// On an Einstein package with a generalized Roter fit, the predicted
/// coefficient of G in R:
///   (2/n^4) [L1 n^4 + kappa {L2 n^3 + kappa ((L3+L4) n^2 + L5 n kappa + L6 kappa^2)}].
/// Throws when the package is not Einstein within accept_tol.
double einstein_grt_constant_coefficient(const CurvaturePackage& pkg, const FitResult& grt_fit,
                                         const Tolerances& tols);

} // namespace curvkit
