#include "jetgeo/jetcore.hpp"

#include <string>

namespace jetgeo {

namespace {

Expr fiber_symbol(int i) { return Expr::symbol(fiber_var(i)); }

void check_point(const JetPoint& p, int n) {
    if (p.x.size() != n || p.x1.size() != n)
        throw SpecError("jet point dimension does not match the system (n = " +
                        std::to_string(n) + ")");
}

} // namespace

double yang_mills_energy(const Matrix& F) {
    double e = 0.0;
    for (int i = 0; i < F.rows(); ++i)
        for (int j = i + 1; j < F.cols(); ++j) e += F(i, j) * F(i, j);
    return e;
}

JetGeometry::JetGeometry(SystemSpec sys, MetricPair metric, Bindings params)
    : sys_(std::move(sys)), metric_(std::move(metric)), params_(std::move(params)) {
    const int n = sys_.n;
    if (metric_.n != n)
        throw SpecError("metric dimension " + std::to_string(metric_.n) +
                        " does not match system dimension " + std::to_string(n));
    for (const auto& [name, value] : params_) {
        (void)value;
        if (is_variable_name(name))
            throw SpecError("'" + name + "' is a coordinate, not a parameter");
    }

    H_ = temporal_christoffel_expr(metric_.h);
    hinv_ = Expr::constant(1.0) / metric_.h;
    gamma_ = spatial_christoffel_expr(metric_.phi);
    curv_ = curvature_tensor_expr(gamma_);
    const ExprMatrix phinv = metric_inverse(metric_.phi);
    const ExprMatrix& phi = metric_.phi;

    // X^i_||j = dX^i/dx^j + X^m gamma^i_mj
    covJ_ = expr_matrix(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Expr e = sys_.X[i].diff(spatial_var(j + 1));
            for (int m = 0; m < n; ++m) e = e + sys_.X[m] * gamma_[i][m][j];
            covJ_[i][j] = e;
        }

    // X^i_||j//1 = d(X^i_||j)/dt - X^i_||j H
    covT_ = expr_matrix(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            covT_[i][j] = covJ_[i][j].diff("t") - covJ_[i][j] * H_;

    // X^i_||j||k = d(X^i_||j)/dx^k + X^m_||j gamma^i_mk - X^i_||m gamma^m_jk
    covS_ = expr_tensor3(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                Expr e = covJ_[i][j].diff(spatial_var(k + 1));
                for (int m = 0; m < n; ++m) e = e + covJ_[m][j] * gamma_[i][m][k];
                for (int m = 0; m < n; ++m) e = e - covJ_[i][m] * gamma_[m][j][k];
                covS_[i][j][k] = e;
            }

    // 1/2 [ cov_ij - phi^ir cov_sr phi_sj ], the metric skew-adjoint part
    auto correction = [&](auto&& entry) {
        ExprMatrix out = expr_matrix(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Expr conj = Expr::constant(0.0);
                for (int r = 0; r < n; ++r)
                    for (int s = 0; s < n; ++s)
                        conj = conj + phinv[i][r] * entry(s, r) * phi[s][j];
                out[i][j] = Expr::constant(0.5) * (entry(i, j) - conj);
            }
        return out;
    };
    const ExprMatrix corrJ = correction([&](int i, int j) { return covJ_[i][j]; });
    const ExprMatrix corrT = correction([&](int i, int j) { return covT_[i][j]; });

    M_ = ExprVector(n, Expr::constant(0.0));
    for (int i = 0; i < n; ++i) M_[i] = -(H_ * fiber_symbol(i + 1));

    // N^i_j = gamma^i_jk x1^k - 1/2 [ X^i_||j - phi^ir X^s_||r phi_sj ]
    N_ = expr_matrix(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Expr e = Expr::constant(0.0);
            for (int k = 0; k < n; ++k) e = e + gamma_[i][j][k] * fiber_symbol(k + 1);
            N_[i][j] = e - corrJ[i][j];
        }

    // R^i_(1)1j = +1/2 [ X^i_||j//1 - phi^ir X^s_||r//1 phi_sj ]
    Rt_ = corrT;

    // R^i_(1)jk = r^i_jkm x1^m - 1/2 [ X^i_||j||k - phi^ir X^s_||r||k phi_sj ]
    Rs_ = expr_tensor3(n);
    for (int k = 0; k < n; ++k) {
        const ExprMatrix corrS =
            correction([&](int i, int j) { return covS_[i][j][k]; });
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Expr e = Expr::constant(0.0);
                for (int m = 0; m < n; ++m)
                    e = e + curv_[i][j][k][m] * fiber_symbol(m + 1);
                Rs_[k][i][j] = e - corrS[i][j];
            }
    }

    // F_(i)j = h^11/2 [ phi_im X^m_||j - phi_jm X^m_||i ], skew by construction
    ExprMatrix lowered = expr_matrix(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Expr e = Expr::constant(0.0);
            for (int m = 0; m < n; ++m) e = e + phi[i][m] * covJ_[m][j];
            lowered[i][j] = e;
        }
    F_ = expr_matrix(n, n);
    const Expr half_hinv = Expr::constant(0.5) * hinv_;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            F_[i][j] = half_hinv * (lowered[i][j] - lowered[j][i]);
            F_[j][i] = -F_[i][j];
        }

    // first Maxwell equation, both sides built independently:
    // LHS = dF/dt + F H, RHS = 1/4 alternation of h^11 phi_im [bracket T]
    res1_ = expr_matrix(n, n);
    {
        ExprMatrix bracket = expr_matrix(n, n);
        for (int m = 0; m < n; ++m)
            for (int j = 0; j < n; ++j) {
                Expr conj = Expr::constant(0.0);
                for (int r = 0; r < n; ++r)
                    for (int s = 0; s < n; ++s)
                        conj = conj + phinv[m][r] * covT_[s][r] * phi[s][j];
                bracket[m][j] = covT_[m][j] - conj;
            }
        ExprMatrix G = expr_matrix(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Expr e = Expr::constant(0.0);
                for (int m = 0; m < n; ++m) e = e + phi[i][m] * bracket[m][j];
                G[i][j] = hinv_ * e;
            }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const Expr lhs = F_[i][j].diff("t") + F_[i][j] * H_;
                const Expr rhs = Expr::constant(0.25) * (G[i][j] - G[j][i]);
                res1_[i][j] = lhs - rhs;
            }
    }

    // cyclic sum of F_(i)j||k = dF/dx^k - F_(m)j gamma^m_ik - F_(i)m gamma^m_jk
    auto f_cov = [&](int i, int j, int k) {
        Expr e = F_[i][j].diff(spatial_var(k + 1));
        for (int m = 0; m < n; ++m) e = e - F_[m][j] * gamma_[m][i][k];
        for (int m = 0; m < n; ++m) e = e - F_[i][m] * gamma_[m][j][k];
        return e;
    };
    res2_ = expr_tensor3(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                res2_[i][j][k] = f_cov(i, j, k) + f_cov(j, k, i) + f_cov(k, i, j);
}

Bindings JetGeometry::binding_at(const JetPoint& p) const {
    Bindings b = params_;
    b["t"] = p.t;
    for (int i = 0; i < sys_.n; ++i) {
        b[spatial_var(i + 1)] = p.x(i);
        b[fiber_var(i + 1)] = p.x1(i);
    }
    return b;
}

void JetGeometry::validate(const JetPoint& p) const {
    check_point(p, sys_.n);
    require_positive_definite(metric_, p.t, p.x, params_);
}

Matrix JetGeometry::cov_spatial(const JetPoint& p) const {
    validate(p);
    return eval_matrix(covJ_, binding_at(p));
}

Matrix JetGeometry::cov_temporal(const JetPoint& p) const {
    validate(p);
    return eval_matrix(covT_, binding_at(p));
}

Tensor3 JetGeometry::cov_second(const JetPoint& p) const {
    validate(p);
    return eval_tensor3(covS_, binding_at(p));
}

NonlinearConnection JetGeometry::nonlinear_connection(const JetPoint& p) const {
    validate(p);
    const Bindings b = binding_at(p);
    NonlinearConnection out;
    out.M = Vector::Zero(sys_.n);
    for (int i = 0; i < sys_.n; ++i) out.M(i) = M_[i].eval(b);
    out.N = eval_matrix(N_, b);
    return out;
}

CartanConnection JetGeometry::cartan_connection(const JetPoint& p) const {
    validate(p);
    const Bindings b = binding_at(p);
    CartanConnection out;
    out.temporal = H_.eval(b);
    out.spatial = eval_tensor3(gamma_, b);
    return out;
}

TorsionTensors JetGeometry::torsion(const JetPoint& p) const {
    validate(p);
    const Bindings b = binding_at(p);
    TorsionTensors out;
    out.R_temporal = eval_matrix(Rt_, b);
    out.R_spatial.reserve(sys_.n);
    for (int k = 0; k < sys_.n; ++k) out.R_spatial.push_back(eval_matrix(Rs_[k], b));
    return out;
}

Tensor4 JetGeometry::curvature_d_tensor(const JetPoint& p) const {
    validate(p);
    return eval_tensor4(curv_, binding_at(p));
}

Matrix JetGeometry::em_form(const JetPoint& p) const {
    validate(p);
    return eval_matrix(F_, binding_at(p));
}

MaxwellResiduals JetGeometry::maxwell_residuals(const JetPoint& p) const {
    validate(p);
    const Bindings b = binding_at(p);
    MaxwellResiduals out;
    out.first = eval_matrix(res1_, b);
    out.cyclic = eval_tensor3(res2_, b);
    return out;
}

GeometryReport JetGeometry::full_report(const JetPoint& p) const {
    validate(p);
    const Bindings b = binding_at(p);
    const int n = sys_.n;
    GeometryReport r;
    r.M = Vector::Zero(n);
    for (int i = 0; i < n; ++i) r.M(i) = M_[i].eval(b);
    r.N = eval_matrix(N_, b);
    r.cartan.temporal = H_.eval(b);
    r.cartan.spatial = eval_tensor3(gamma_, b);
    r.R_temporal = eval_matrix(Rt_, b);
    r.R_spatial.reserve(n);
    for (int k = 0; k < n; ++k) r.R_spatial.push_back(eval_matrix(Rs_[k], b));
    r.curvature = eval_tensor4(curv_, b);
    r.F = eval_matrix(F_, b);
    r.maxwell_residual_1 = eval_matrix(res1_, b);
    r.maxwell_residual_2 = eval_tensor3(res2_, b);
    r.eym = yang_mills_energy(r.F);
    return r;
}

EuclideanGeometry::EuclideanGeometry(SystemSpec sys, Bindings params)
    : sys_(std::move(sys)), params_(std::move(params)) {
    const int n = sys_.n;

    dX_ = expr_matrix(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) dX_[i][j] = sys_.X[i].diff(spatial_var(j + 1));

    N_ = expr_matrix(n, n);
    Rt_ = expr_matrix(n, n);
    F_ = expr_matrix(n, n);
    res1_ = expr_matrix(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Expr skew = dX_[i][j] - dX_[j][i];
            N_[i][j] = Expr::constant(-0.5) * skew;
            Rt_[i][j] = Expr::constant(0.5) * (dX_[i][j].diff("t") - dX_[j][i].diff("t"));
            F_[i][j] = Expr::constant(0.5) * skew;
            res1_[i][j] = F_[i][j].diff("t") -
                          Expr::constant(0.5) *
                              (dX_[i][j].diff("t") - dX_[j][i].diff("t"));
        }

    Rs_ = expr_tensor3(n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                Rs_[k][i][j] = Expr::constant(-0.5) * (dX_[i][j].diff(spatial_var(k + 1)) -
                                                       dX_[j][i].diff(spatial_var(k + 1)));

    res2_ = expr_tensor3(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                res2_[i][j][k] = F_[i][j].diff(spatial_var(k + 1)) +
                                 F_[j][k].diff(spatial_var(i + 1)) +
                                 F_[k][i].diff(spatial_var(j + 1));
}

Bindings EuclideanGeometry::binding_at(const JetPoint& p) const {
    Bindings b = params_;
    b["t"] = p.t;
    for (int i = 0; i < sys_.n; ++i) {
        b[spatial_var(i + 1)] = p.x(i);
        b[fiber_var(i + 1)] = p.x1(i);
    }
    return b;
}

void EuclideanGeometry::validate(const JetPoint& p) const { check_point(p, sys_.n); }

Matrix EuclideanGeometry::jacobian(const JetPoint& p) const {
    validate(p);
    return eval_matrix(dX_, binding_at(p));
}

NonlinearConnection EuclideanGeometry::nonlinear_connection(const JetPoint& p) const {
    validate(p);
    NonlinearConnection out;
    out.M = Vector::Zero(sys_.n);
    out.N = eval_matrix(N_, binding_at(p));
    return out;
}

TorsionTensors EuclideanGeometry::torsion(const JetPoint& p) const {
    validate(p);
    const Bindings b = binding_at(p);
    TorsionTensors out;
    out.R_temporal = eval_matrix(Rt_, b);
    out.R_spatial.reserve(sys_.n);
    for (int k = 0; k < sys_.n; ++k) out.R_spatial.push_back(eval_matrix(Rs_[k], b));
    return out;
}

Matrix EuclideanGeometry::em_form(const JetPoint& p) const {
    validate(p);
    return eval_matrix(F_, binding_at(p));
}

MaxwellResiduals EuclideanGeometry::maxwell_residuals(const JetPoint& p) const {
    validate(p);
    const Bindings b = binding_at(p);
    MaxwellResiduals out;
    out.first = eval_matrix(res1_, b);
    out.cyclic = eval_tensor3(res2_, b);
    return out;
}

GeometryReport EuclideanGeometry::full_report(const JetPoint& p) const {
    validate(p);
    const Bindings b = binding_at(p);
    const int n = sys_.n;
    GeometryReport r;
    r.M = Vector::Zero(n);
    r.N = eval_matrix(N_, b);
    r.cartan.temporal = 0.0;
    r.cartan.spatial = Tensor3(n);
    r.R_temporal = eval_matrix(Rt_, b);
    r.R_spatial.reserve(n);
    for (int k = 0; k < n; ++k) r.R_spatial.push_back(eval_matrix(Rs_[k], b));
    r.curvature = Tensor4(n);
    r.F = eval_matrix(F_, b);
    r.maxwell_residual_1 = eval_matrix(res1_, b);
    r.maxwell_residual_2 = eval_tensor3(res2_, b);
    r.eym = yang_mills_energy(r.F);
    return r;
}

} // namespace jetgeo
