#include "jetgeo/metric.hpp"

namespace jetgeo {

namespace {

Bindings spatial_bindings(const Vector& x, const Bindings& params) {
    Bindings b = params;
    for (int i = 0; i < x.size(); ++i) b[spatial_var(i + 1)] = x(i);
    return b;
}

void check_symbols(const Expr& e, bool allow_t, int max_spatial, const char* what) {
    for (const auto& s : e.free_symbols()) {
        if (is_time_symbol(s)) {
            if (!allow_t)
                throw MetricError(std::string(what) + " must not reference t");
            continue;
        }
        if (fiber_index(s))
            throw MetricError(std::string(what) + " must not reference fiber velocity '" +
                              s + "'");
        if (auto idx = spatial_index(s)) {
            if (max_spatial == 0)
                throw MetricError(std::string(what) + " must not reference base coordinate '" +
                                  s + "'");
            if (*idx > max_spatial)
                throw MetricError(std::string(what) + " references '" + s +
                                  "' beyond dimension " + std::to_string(max_spatial));
        }
        // anything else is a parameter, bound at evaluation time
    }
}

} // namespace

MetricPair::MetricPair(Expr h_, ExprMatrix phi_) : h(std::move(h_)), phi(std::move(phi_)) {
    n = static_cast<int>(phi.size());
    if (n < 2) throw MetricError("spatial metric must have dimension n >= 2");
    for (const auto& row : phi)
        if (static_cast<int>(row.size()) != n)
            throw MetricError("spatial metric matrix must be square");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (!(phi[i][j] == phi[j][i]))
                throw MetricError("spatial metric must be structurally symmetric: entry (" +
                                  std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                  ") differs from its transpose");
    check_symbols(h, /*allow_t=*/true, /*max_spatial=*/0, "time metric h");
    for (const auto& row : phi)
        for (const auto& e : row)
            check_symbols(e, /*allow_t=*/false, /*max_spatial=*/n, "spatial metric phi");
}

MetricPair MetricPair::euclidean(int n) {
    ExprMatrix phi = expr_matrix(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) phi[i][j] = Expr::constant(i == j ? 1.0 : 0.0);
    return MetricPair(Expr::constant(1.0), std::move(phi));
}

bool MetricPair::is_euclidean() const {
    if (!h.is_constant(1.0)) return false;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!phi[i][j].is_constant(i == j ? 1.0 : 0.0)) return false;
    return true;
}

Expr temporal_christoffel_expr(const Expr& h) {
    return h.diff("t") / (Expr::constant(2.0) * h);
}

double temporal_christoffel(const Expr& h, double t, const Bindings& params) {
    Bindings b = params;
    b["t"] = t;
    const double hv = h.eval(b);
    if (hv <= 0.0)
        throw MetricError("time metric h(t) must be positive, got " + std::to_string(hv) +
                          " at t = " + std::to_string(t));
    return h.diff("t").eval(b) / (2.0 * hv);
}

// ---------------------------------------------------------------------------
// symbolic inverse

namespace {

ExprMatrix minor_of(const ExprMatrix& m, int row, int col) {
    const int n = static_cast<int>(m.size());
    ExprMatrix out = expr_matrix(n - 1, n - 1);
    int r = 0;
    for (int i = 0; i < n; ++i) {
        if (i == row) continue;
        int c = 0;
        for (int j = 0; j < n; ++j) {
            if (j == col) continue;
            out[r][c] = m[i][j];
            ++c;
        }
        ++r;
    }
    return out;
}

Expr determinant(const ExprMatrix& m) {
    const int n = static_cast<int>(m.size());
    if (n == 1) return m[0][0];
    if (n == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
    // cofactor expansion along the first row; fine for the small n used here
    Expr det = Expr::constant(0.0);
    for (int j = 0; j < n; ++j) {
        Expr term = m[0][j] * determinant(minor_of(m, 0, j));
        det = (j % 2 == 0) ? det + term : det - term;
    }
    return det;
}

} // namespace

ExprMatrix metric_inverse(const ExprMatrix& phi) {
    const int n = static_cast<int>(phi.size());
    const Expr det = determinant(phi);
    ExprMatrix inv = expr_matrix(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            // adj(phi)_ij = (-1)^(i+j) det(minor_ji)
            Expr cof = determinant(minor_of(phi, j, i));
            if ((i + j) % 2 == 1) cof = -cof;
            inv[i][j] = cof / det;
        }
    }
    return inv;
}

// ---------------------------------------------------------------------------
// Levi-Civita symbols

namespace {

// d_j phi_lk as trees, [l][k][j]
ExprTensor3 phi_partials(const ExprMatrix& phi) {
    const int n = static_cast<int>(phi.size());
    ExprTensor3 d = expr_tensor3(n);
    for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j) d[l][k][j] = phi[l][k].diff(spatial_var(j + 1));
    return d;
}

} // namespace

Matrix eval_phi(const ExprMatrix& phi, const Vector& x, const Bindings& params) {
    return eval_matrix(phi, spatial_bindings(x, params));
}

Tensor3 spatial_christoffel(const ExprMatrix& phi, const Vector& x, const Bindings& params) {
    const int n = static_cast<int>(phi.size());
    const Bindings b = spatial_bindings(x, params);
    const Matrix phi_x = eval_matrix(phi, b);

    // numeric inverse; reject non-positive-definite input first
    for (int k = 1; k <= n; ++k) {
        if (phi_x.topLeftCorner(k, k).determinant() <= 0.0)
            throw MetricError("spatial metric is not positive definite at the given point "
                              "(leading principal minor " + std::to_string(k) + ")");
    }
    const Matrix inv = phi_x.inverse();

    const ExprTensor3 dphi = phi_partials(phi);
    auto d = [&](int l, int k, int j) { return dphi[l][k][j].eval(b); };

    Tensor3 gamma(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double s = 0.0;
                for (int l = 0; l < n; ++l)
                    s += inv(i, l) * (d(l, k, j) + d(l, j, k) - d(j, k, l));
                gamma(i, j, k) = 0.5 * s;
            }
    return gamma;
}

ExprTensor3 spatial_christoffel_expr(const ExprMatrix& phi) {
    const int n = static_cast<int>(phi.size());
    const ExprMatrix inv = metric_inverse(phi);
    const ExprTensor3 dphi = phi_partials(phi);

    ExprTensor3 gamma = expr_tensor3(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                Expr s = Expr::constant(0.0);
                for (int l = 0; l < n; ++l)
                    s = s + inv[i][l] * (dphi[l][k][j] + dphi[l][j][k] - dphi[j][k][l]);
                gamma[i][j][k] = Expr::constant(0.5) * s;
            }
    return gamma;
}

ExprTensor4 curvature_tensor_expr(const ExprTensor3& gamma) {
    const int n = static_cast<int>(gamma.size());
    ExprTensor4 r = expr_tensor4(n);
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    Expr val = gamma[l][i][k].diff(spatial_var(j + 1)) -
                               gamma[l][i][j].diff(spatial_var(k + 1));
                    for (int m = 0; m < n; ++m)
                        val = val + (gamma[m][i][k] * gamma[l][m][j] -
                                     gamma[m][i][j] * gamma[l][m][k]);
                    r[l][i][j][k] = val;
                }
    return r;
}

Tensor4 curvature_tensor(const ExprMatrix& phi, const Vector& x, const Bindings& params) {
    const ExprTensor4 r = curvature_tensor_expr(spatial_christoffel_expr(phi));
    return eval_tensor4(r, spatial_bindings(x, params));
}

ChristoffelData christoffel_at(const MetricPair& m, double t, const Vector& x,
                               const Bindings& params) {
    ChristoffelData out;
    out.H = temporal_christoffel(m.h, t, params);
    out.gamma = spatial_christoffel(m.phi, x, params);
    out.r = curvature_tensor(m.phi, x, params);
    return out;
}

void require_positive_definite(const MetricPair& m, double t, const Vector& x,
                               const Bindings& params) {
    Bindings bt = params;
    bt["t"] = t;
    const double hv = m.h.eval(bt);
    if (hv <= 0.0)
        throw MetricError("time metric h(t) must be positive, got " + std::to_string(hv) +
                          " at t = " + std::to_string(t));
    const Matrix phi_x = eval_phi(m.phi, x, params);
    for (int k = 1; k <= m.n; ++k) {
        if (phi_x.topLeftCorner(k, k).determinant() <= 0.0)
            throw MetricError("spatial metric is not positive definite at the given point "
                              "(leading principal minor " + std::to_string(k) + ")");
    }
}

} // namespace jetgeo
