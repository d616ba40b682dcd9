#pragma once

#include <string>
#include <vector>

#include "curvkit/classify.hpp"
#include "curvkit/curvature.hpp"
#include "curvkit/tensor.hpp"

namespace curvkit {

/// Outcome of a pointwise proportionality test lhs = L * rhs. The status is
/// indeterminate when the right side is numerically zero, mirroring the
/// U_R/U_S domain restrictions of the pseudosymmetry definitions: nothing is
/// asserted where the right side vanishes.
struct PseudosymmetryVerdict {
    double L = 0.0;
    double residual = 0.0;
    enum class Status { holds, fails, indeterminate } status = Status::indeterminate;
};

std::string_view to_string(PseudosymmetryVerdict::Status s);

/// Relative norm of the curvature action D.T, scaled by |D| |T| so that the
/// verdict D.T = 0 is size-independent.
double semisymmetry_residual(const DenseTensor& d, const DenseTensor& t, const DenseTensor& g);

/// Fits L = <lhs,rhs>/<rhs,rhs> and reports
/// residual = |lhs - L rhs| / max(|lhs|, |rhs|, tiny). `rhs_scale` is the
/// natural magnitude of the right side used by the determinacy floor
/// (callers pass |A||T| for a Q(A,T) side); a negative value defaults it to
/// max(|lhs|, |rhs|).
PseudosymmetryVerdict pseudosymmetry_fit(const DenseTensor& lhs, const DenseTensor& rhs,
                                         const Tolerances& tols, double rhs_scale = -1.0);

/// (|nabla_R| / |R|, |nabla_S| / |S|) with zero guards.
std::pair<double, double> local_symmetry_residuals(const CurvaturePackage& pkg);

/// One row of the semisymmetry/pseudosymmetry battery: the tensor pair
/// (D, T), the residual of D.T = 0, and the fit of D.T against Q(g,T).
struct SymmetryPairRow {
    std::string d_name;
    std::string t_name;
    double semisymmetry;
    PseudosymmetryVerdict pseudosymmetry;
};

/// The four named structures of the literature, each a proportionality fit:
/// Deszcz (R.R vs Q(g,R)), Ricci (R.S vs Q(g,S)), Weyl (C.C vs Q(g,C)) and
/// Ricci-generalized (R.R vs Q(S,R)).
struct NamedStructureRow {
    std::string name;
    PseudosymmetryVerdict verdict;
};

struct EquivalenceReport {
    std::vector<SymmetryPairRow> pairs;   // D in {R,C,W,K} x T in {R,S,C}
    std::vector<NamedStructureRow> named;
    bool grt_member = false;              // generalized Roter fit passed here
    /// Implications of the equivalence theorem that failed although the
    /// package passed the generalized Roter fit. Any entry is a defect, not a
    /// report item.
    std::vector<std::string> violations;
};

/// Runs the full battery and checks, on generalized-Roter points, that a
/// structure holding for S forces the same structure (with the same L) for R
/// and C.
EquivalenceReport equivalence_matrix(const CurvaturePackage& pkg, const Tolerances& tols);

} // namespace curvkit
