#pragma once

#include <vector>

#include "jetgeo/errors.hpp"
#include "jetgeo/expr.hpp"
#include "jetgeo/metric.hpp"
#include "jetgeo/systems.hpp"
#include "jetgeo/tensors.hpp"

namespace jetgeo {

// Point of the 1-jet space: time t, spatial coordinates x^i, velocities x1^i.
struct JetPoint {
    double t = 0.0;
    Vector x;
    Vector x1;
};

// Components of the generalized Cartan connection (temporal, 0, spatial, 0).
// The second and fourth slots vanish for every system and metric; they are
// kept explicit so reports always show all four.
struct CartanConnection {
    double temporal = 0.0;        // time Christoffel symbol
    double temporal_mixed = 0.0;  // identically zero
    Tensor3 spatial;              // gamma^i_jk
    double vertical = 0.0;        // identically zero
};

struct NonlinearConnection {
    Vector M;  // temporal components, -H x1^i
    Matrix N;  // spatial components, row = upper index i, column = lower j
};

// Temporal and spatial torsion are distinct objects that happen to share a
// letter; they are never interchangeable.
struct TorsionTensors {
    Matrix R_temporal;              // R^i_(1)1j
    std::vector<Matrix> R_spatial;  // R^i_(1)jk, one matrix per k
};

struct MaxwellResiduals {
    Matrix first;    // LHS - RHS of the first Maxwell equation
    Tensor3 cyclic;  // cyclic sum of the covariant derivatives of F
};

struct GeometryReport {
    Vector M;
    Matrix N;
    CartanConnection cartan;
    Matrix R_temporal;
    std::vector<Matrix> R_spatial;
    Tensor4 curvature;  // r^l_ijk
    Matrix F;
    Matrix maxwell_residual_1;
    Tensor3 maxwell_residual_2;
    double eym = 0.0;
};

// EYM = sum over i<j of F(i,j)^2
double yang_mills_energy(const Matrix& F);

// Symbolic engine for a system plus a metric pair: every geometric object is
// built once as an expression tree, then evaluated at jet points. Immutable
// after construction; safe to share across threads.
class JetGeometry {
public:
    JetGeometry(SystemSpec sys, MetricPair metric, Bindings params = {});

    int dimension() const { return sys_.n; }
    const SystemSpec& system() const { return sys_; }
    const MetricPair& metric() const { return metric_; }

    Matrix cov_spatial(const JetPoint& p) const;   // X^i_||j
    Matrix cov_temporal(const JetPoint& p) const;  // X^i_||j//1
    Tensor3 cov_second(const JetPoint& p) const;   // X^i_||j||k

    NonlinearConnection nonlinear_connection(const JetPoint& p) const;
    CartanConnection cartan_connection(const JetPoint& p) const;
    TorsionTensors torsion(const JetPoint& p) const;
    Tensor4 curvature_d_tensor(const JetPoint& p) const;
    Matrix em_form(const JetPoint& p) const;
    MaxwellResiduals maxwell_residuals(const JetPoint& p) const;
    GeometryReport full_report(const JetPoint& p) const;

    // symbolic display of the two matrices the reports print
    const ExprMatrix& nonlinear_connection_exprs() const { return N_; }
    const ExprMatrix& em_form_exprs() const { return F_; }

private:
    Bindings binding_at(const JetPoint& p) const;
    void validate(const JetPoint& p) const;

    SystemSpec sys_;
    MetricPair metric_;
    Bindings params_;

    Expr H_ = Expr::constant(0.0);     // temporal Christoffel expression
    Expr hinv_ = Expr::constant(1.0);  // 1/h
    ExprTensor3 gamma_;                // gamma^i_jk
    ExprTensor4 curv_;                 // r^l_ijk
    ExprMatrix covJ_;                  // X^i_||j
    ExprMatrix covT_;                  // X^i_||j//1
    ExprTensor3 covS_;                 // X^i_||j||k
    ExprVector M_;
    ExprMatrix N_;
    ExprMatrix Rt_;
    ExprTensor3 Rs_;  // [k][i][j]
    ExprMatrix F_;
    ExprMatrix res1_;
    ExprTensor3 res2_;  // [i][j][k]
};

// Independent flat-metric path, built directly from the reduced displays
// (h = 1, phi = identity). Used to cross-check JetGeometry, never the
// other way around.
class EuclideanGeometry {
public:
    explicit EuclideanGeometry(SystemSpec sys, Bindings params = {});

    int dimension() const { return sys_.n; }

    Matrix jacobian(const JetPoint& p) const;
    NonlinearConnection nonlinear_connection(const JetPoint& p) const;
    TorsionTensors torsion(const JetPoint& p) const;
    Matrix em_form(const JetPoint& p) const;
    MaxwellResiduals maxwell_residuals(const JetPoint& p) const;
    GeometryReport full_report(const JetPoint& p) const;

private:
    Bindings binding_at(const JetPoint& p) const;
    void validate(const JetPoint& p) const;

    SystemSpec sys_;
    Bindings params_;
    ExprMatrix dX_;    // dX^i/dx^j
    ExprMatrix N_;     // -1/2 (J - J^T)
    ExprMatrix Rt_;    // +1/2 d/dt (J - J^T)
    ExprTensor3 Rs_;   // [k][i][j] = -1/2 d/dx^k (J - J^T)
    ExprMatrix F_;     // -N
    ExprMatrix res1_;
    ExprTensor3 res2_;
};

} // namespace jetgeo
