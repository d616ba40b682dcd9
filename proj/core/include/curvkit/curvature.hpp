#pragma once

#include <span>
#include <vector>

#include "curvkit/chart.hpp"
#include "curvkit/jet.hpp"
#include "curvkit/tensor.hpp"

namespace curvkit {

/// All pointwise curvature data of a chart at one point.
///
/// Sign and contraction conventions, frozen against the reference tables of
/// the built-in product metric (catalog "met2", where R_1212 = -e^{x1}/4 and
/// S_11 = +1/2 must hold):
///   R^d_abc   = d_b Gamma^d_ac - d_a Gamma^d_bc
///             + Gamma^m_ac Gamma^d_bm - Gamma^m_bc Gamma^d_am
///   R_abcd    = g_dm R^m_abc
///   S_jk      = g^il R_ijkl          (first slot against last)
///   kappa     = g^jk S_jk,   kappa2 = g-trace of S^2
/// With these conventions a space of constant curvature satisfies
/// R = kappa / (2 n (n-1)) g^g exactly.
///
/// Derived tensors:
///   G = (1/2) g^g
///   C = R - (1/(n-2)) g^S + (kappa / (2(n-1)(n-2))) g^g
///   W = R - (kappa / (2n(n-1))) g^g
///   K = R - (1/(n-2)) g^S
/// where ^ is the Kulkarni-Nomizu product.
///
/// Covariant derivatives carry the derivative direction in the FIRST slot:
///   nabla_R(e, a,b,c,d) = (nabla_e R)_abcd
///   nabla_S(c, a,b)     = (nabla_c S)_ab
struct CurvaturePackage {
    std::vector<double> point;
    int dim = 0;
    DenseTensor g, g_inv;           // sym2
    DenseTensor gamma;              // rank 3: gamma(a,b,c) = Gamma^a_bc, symmetric in (b,c)
    DenseTensor R;                  // curv4
    DenseTensor S, S2, S3, S4;      // sym2
    double kappa = 0.0, kappa2 = 0.0;
    DenseTensor G, C, W, K;         // curv4
    DenseTensor nabla_R;            // rank 5
    DenseTensor nabla_S;            // rank 3
};

/// Christoffel symbols of the second kind at `point`:
/// Gamma^a_bc = (1/2) g^ad (d_b g_dc + d_c g_bd - d_d g_bc).
/// Throws SingularMetricError / DomainError for inadmissible points.
DenseTensor christoffel(const MetricChart& chart, std::span<const double> point);

/// Computes the full package. Derivatives come from order-3 jets of the
/// metric components; no numerical differentiation is involved.
CurvaturePackage curvature_package(const MetricChart& chart, std::span<const double> point);

/// First covariant derivative of a symmetric (0,2) field given as jets of its
/// components (row-major dim*dim grid):
/// (nabla_c T)_ab = d_c T_ab - Gamma^d_ca T_db - Gamma^d_cb T_ad,
/// returned with the derivative direction in the first slot.
DenseTensor covariant_derivative_sym2(const MetricChart& chart, std::span<const double> point,
                                      std::span<const Jet3> field);

} // namespace curvkit
