#include "jetgeo/systems.hpp"

#include <string>

namespace jetgeo {

namespace {

// Rejects fiber velocities everywhere; spatial indices must stay within n.
// allow_x = false additionally rejects spatial coordinates (t-only slots).
void check_system_symbols(const Expr& e, int n, bool allow_x, const std::string& where) {
    for (const auto& sym : e.free_symbols()) {
        if (fiber_index(sym))
            throw SpecError(where + " must not reference fiber velocity " + sym);
        if (const auto idx = spatial_index(sym)) {
            if (!allow_x)
                throw SpecError(where + " must depend on t only, found " + sym);
            if (*idx > n)
                throw SpecError(where + " references " + sym + " but the system has n = " +
                                std::to_string(n));
        }
    }
}

void require_dimension(int n) {
    if (n < 2) throw SpecError("system dimension must be at least 2, got " + std::to_string(n));
}

double eval_at_t(const Expr& e, double t, const Bindings& params) {
    Bindings b = params;
    b["t"] = t;
    return e.eval(b);
}

} // namespace

SystemSpec build_generic(ExprVector X) {
    const int n = static_cast<int>(X.size());
    require_dimension(n);
    for (int i = 0; i < n; ++i)
        check_system_symbols(X[i], n, true, "X" + std::to_string(i + 1));
    SystemSpec sys;
    sys.kind = SystemKind::Generic;
    sys.n = n;
    sys.X = std::move(X);
    return sys;
}

SystemSpec build_linear(ExprMatrix A, std::optional<ExprVector> forcing) {
    const int n = static_cast<int>(A.size());
    require_dimension(n);
    for (const auto& row : A)
        if (static_cast<int>(row.size()) != n)
            throw SpecError("coefficient matrix must be square");
    ExprVector f = forcing ? std::move(*forcing)
                           : ExprVector(n, Expr::constant(0.0));
    if (static_cast<int>(f.size()) != n)
        throw SpecError("forcing vector length must match the matrix dimension");
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k)
            check_system_symbols(A[i][k], n, false, "A[" + std::to_string(i + 1) + "][" +
                                                        std::to_string(k + 1) + "]");
        check_system_symbols(f[i], n, false, "f" + std::to_string(i + 1));
    }

    SystemSpec sys;
    sys.kind = SystemKind::Linear;
    sys.n = n;
    sys.X.reserve(n);
    for (int i = 0; i < n; ++i) {
        Expr xi = Expr::constant(0.0);
        for (int k = 0; k < n; ++k) xi = xi + A[i][k] * Expr::symbol(spatial_var(k + 1));
        sys.X.push_back(xi + f[i]);
    }
    sys.A = std::move(A);
    sys.forcing = std::move(f);
    return sys;
}

SystemSpec build_sode(int order, Expr f) {
    require_dimension(order);
    check_system_symbols(f, order, true, "f");
    SystemSpec sys;
    sys.kind = SystemKind::Sode;
    sys.n = order;
    sys.X.reserve(order);
    for (int i = 1; i < order; ++i) sys.X.push_back(Expr::symbol(spatial_var(i + 1)));
    sys.X.push_back(f);
    sys.f = std::move(f);
    return sys;
}

SystemSpec build_nhlsode(ExprVector a, Expr b) {
    const int n = static_cast<int>(a.size()) - 1;
    require_dimension(n);
    for (int i = 0; i <= n; ++i)
        check_system_symbols(a[i], n, false, "a" + std::to_string(i));
    check_system_symbols(b, n, false, "b");

    // y^(n) = b/a0 - (an/a0) x1 - (a_{n-1}/a0) x2 - ... - (a1/a0) xn
    Expr f = b / a[0];
    for (int j = 1; j <= n; ++j)
        f = f - (a[n - j + 1] / a[0]) * Expr::symbol(spatial_var(j));

    SystemSpec sys = build_sode(n, std::move(f));
    sys.kind = SystemKind::Nhlsode;
    sys.a = std::move(a);
    sys.b = std::move(b);
    return sys;
}

LinearClosedForm closed_form_linear(const SystemSpec& sys, double t, const Bindings& params) {
    if (sys.kind != SystemKind::Linear)
        throw SpecError("closed_form_linear requires a linear system");
    const int n = sys.n;
    Matrix A(n, n), Adot(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            A(i, j) = eval_at_t(sys.A[i][j], t, params);
            Adot(i, j) = eval_at_t(sys.A[i][j].diff("t"), t, params);
        }

    LinearClosedForm out;
    out.N = -0.5 * (A - A.transpose());
    out.R_temporal = 0.5 * (Adot - Adot.transpose());
    out.F = 0.5 * (A - A.transpose());
    out.eym = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double d = A(i, j) - A(j, i);
            out.eym += 0.25 * d * d;
        }
    return out;
}

SodeClosedForm closed_form_sode(const SystemSpec& sys, double t, const Vector& x,
                                const Bindings& params) {
    if (sys.kind != SystemKind::Sode && sys.kind != SystemKind::Nhlsode)
        throw SpecError("closed_form_sode requires a higher-order scalar system");
    const int n = sys.n;
    if (x.size() != n) throw SpecError("point dimension does not match the system");

    Bindings at = params;
    at["t"] = t;
    for (int i = 0; i < n; ++i) at[spatial_var(i + 1)] = x(i);

    // first partials f_j = df/dx^j and the mixed second partials
    std::vector<Expr> fj;
    fj.reserve(n);
    for (int j = 1; j <= n; ++j) fj.push_back(sys.f.diff(spatial_var(j)));
    Vector fx(n);
    for (int j = 0; j < n; ++j) fx(j) = fj[j].eval(at);

    SodeClosedForm out;

    // banded skew band plus a df/dx border, scaled by -1/2
    out.N = Matrix::Zero(n, n);
    for (int i = 0; i + 1 < n - 1; ++i) {
        out.N(i, i + 1) = -0.5;
        out.N(i + 1, i) = 0.5;
    }
    for (int i = 0; i < n - 1; ++i) {
        const double border = (i == n - 2 ? 1.0 - fx(i) : -fx(i));
        out.N(i, n - 1) = -0.5 * border;
        out.N(n - 1, i) = 0.5 * border;
    }
    out.F = -out.N;

    // torsion: last column -d2f/dtdx^i, last row +d2f/dtdx^j, scaled by 1/2
    out.R_temporal = Matrix::Zero(n, n);
    for (int i = 0; i < n - 1; ++i) {
        const double m = fj[i].diff("t").eval(at);
        out.R_temporal(i, n - 1) = -0.5 * m;
        out.R_temporal(n - 1, i) = 0.5 * m;
    }

    // spatial analogue per direction k, scaled by -1/2
    out.R_spatial.reserve(n);
    for (int k = 1; k <= n; ++k) {
        Matrix rk = Matrix::Zero(n, n);
        for (int i = 0; i < n - 1; ++i) {
            const double m = fj[i].diff(spatial_var(k)).eval(at);
            rk(i, n - 1) = 0.5 * m;
            rk(n - 1, i) = -0.5 * m;
        }
        out.R_spatial.push_back(std::move(rk));
    }

    out.eym = n - 1.0 - 2.0 * fx(n - 2);
    for (int j = 0; j < n - 1; ++j) out.eym += fx(j) * fx(j);
    out.eym *= 0.25;
    return out;
}

NhlsodeClosedForm closed_form_nhlsode(const SystemSpec& sys, double t, const Bindings& params) {
    if (sys.kind != SystemKind::Nhlsode)
        throw SpecError("closed_form_nhlsode requires scalar linear coefficients");
    const int n = sys.n;

    const double a0 = eval_at_t(sys.a[0], t, params);
    if (a0 == 0.0) throw EvalError("leading coefficient a0 vanishes at t = " + std::to_string(t));
    Vector av(n + 1), adot(n + 1);
    for (int i = 0; i <= n; ++i) {
        av(i) = eval_at_t(sys.a[i], t, params);
        adot(i) = eval_at_t(sys.a[i].diff("t"), t, params);
    }

    NhlsodeClosedForm out;

    // same band as the general higher-order display, border entries a_k/a0
    out.N = Matrix::Zero(n, n);
    for (int i = 0; i + 1 < n - 1; ++i) {
        out.N(i, i + 1) = -0.5;
        out.N(i + 1, i) = 0.5;
    }
    for (int i = 0; i < n - 1; ++i) {
        const double ratio = av(n - i) / a0;  // a_{n-i+1}/a0 with 1-based i
        const double border = (i == n - 2 ? 1.0 + ratio : ratio);
        out.N(i, n - 1) = -0.5 * border;
        out.N(n - 1, i) = 0.5 * border;
    }
    out.F = -out.N;

    // temporal torsion via the quotient rule on a_{n-i+1}/a0
    out.R_temporal = Matrix::Zero(n, n);
    for (int i = 0; i < n - 1; ++i) {
        const double num = adot(n - i) * a0 - av(n - i) * adot(0);
        out.R_temporal(i, n - 1) = num / (2.0 * a0 * a0);
        out.R_temporal(n - 1, i) = -num / (2.0 * a0 * a0);
    }

    out.eym = n - 1.0 + 2.0 * av(2) / a0;
    for (int j = 2; j <= n; ++j) out.eym += av(j) * av(j) / (a0 * a0);
    out.eym *= 0.25;
    return out;
}

} // namespace jetgeo
