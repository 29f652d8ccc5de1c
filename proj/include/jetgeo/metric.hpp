#pragma once

#include "jetgeo/errors.hpp"
#include "jetgeo/expr.hpp"
#include "jetgeo/tensors.hpp"

namespace jetgeo {

/// Metric pair on the 1-jet space: a time metric component h(t) > 0 and
/// a spatial Riemannian metric phi_ij(x), n >= 2.
///
/// Construction validates shapes, structural symmetry of phi, and the
/// allowed symbol sets (h over t and parameters, phi over base
/// coordinates and parameters).  Positive definiteness is a pointwise
/// property checked by require_positive_definite.
struct MetricPair {
    MetricPair(Expr h_, ExprMatrix phi_);

    static MetricPair euclidean(int n);

    /// h == 1 and phi == identity, structurally.
    bool is_euclidean() const;

    Expr h;
    ExprMatrix phi;
    int n = 0;
};

/// Christoffel data of a metric pair at one point.
struct ChristoffelData {
    double H = 0.0;   // time-metric symbol
    Tensor3 gamma;    // Levi-Civita symbols of phi, [i][j][k] = gamma^i_jk
    Tensor4 r;        // curvature of gamma, [l][i][j][k] = r^l_ijk
};

/// H(t) = h'(t) / (2 h(t)).  Throws MetricError if h(t) <= 0.
double temporal_christoffel(const Expr& h, double t, const Bindings& params = {});

/// H as an expression in t.
Expr temporal_christoffel_expr(const Expr& h);

/// Symbolic matrix inverse via adjugate / determinant.
ExprMatrix metric_inverse(const ExprMatrix& phi);

/// gamma^i_jk = 1/2 phi^il (d_j phi_lk + d_k phi_lj - d_l phi_jk),
/// with phi^il the numeric inverse of phi at x and the partials of phi
/// taken symbolically.  Throws MetricError if phi(x) is not positive
/// definite.
Tensor3 spatial_christoffel(const ExprMatrix& phi, const Vector& x,
                            const Bindings& params = {});

/// Same symbols as expression trees (symbolic inverse).
ExprTensor3 spatial_christoffel_expr(const ExprMatrix& phi);

/// Curvature of the symbols gamma, taking their partials symbolically:
/// r^l_ijk = d_j gamma^l_ik - d_k gamma^l_ij
///           + gamma^m_ik gamma^l_mj - gamma^m_ij gamma^l_mk.
ExprTensor4 curvature_tensor_expr(const ExprTensor3& gamma);

/// Curvature of phi's Levi-Civita connection evaluated at x.
Tensor4 curvature_tensor(const ExprMatrix& phi, const Vector& x,
                         const Bindings& params = {});

/// All Christoffel data of the pair at (t, x).
ChristoffelData christoffel_at(const MetricPair& m, double t, const Vector& x,
                               const Bindings& params = {});

/// Throws MetricError unless h(t) > 0 and phi(x) is positive definite
/// (checked via leading principal minors).
void require_positive_definite(const MetricPair& m, double t, const Vector& x,
                               const Bindings& params = {});

/// Evaluate phi at x.
Matrix eval_phi(const ExprMatrix& phi, const Vector& x, const Bindings& params = {});

} // namespace jetgeo
