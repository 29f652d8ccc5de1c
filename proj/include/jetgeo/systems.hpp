#pragma once

#include <optional>
#include <vector>

#include "jetgeo/errors.hpp"
#include "jetgeo/expr.hpp"
#include "jetgeo/tensors.hpp"

namespace jetgeo {

enum class SystemKind { Generic, Linear, Sode, Nhlsode };

// First-order ODE system dx^i/dt = X^i(t, x) in n spatial coordinates.
// X is always materialized so the general pipeline can run on any kind;
// the structured payloads feed the independent closed-form routes.
struct SystemSpec {
    SystemKind kind = SystemKind::Generic;
    int n = 0;
    ExprVector X;

    // linear: X^i = sum_k A[i][k](t) x^k + forcing[i](t)
    ExprMatrix A;
    ExprVector forcing;

    // sode / nhlsode: y^(n) = f(t, y, ..., y^(n-1)) with x^i = y^(i-1)
    Expr f = Expr::constant(0.0);

    // nhlsode: a[0] y^(n) + a[1] y^(n-1) + ... + a[n] y = b, all in t
    ExprVector a;
    Expr b = Expr::constant(0.0);
};

// Throws SpecError on shape or symbol violations (see each builder).
SystemSpec build_generic(ExprVector X);
SystemSpec build_linear(ExprMatrix A, std::optional<ExprVector> forcing = std::nullopt);
SystemSpec build_sode(int order, Expr f);
SystemSpec build_nhlsode(ExprVector a, Expr b);

// Closed-form geometric objects, built from the published matrix displays.
// These never touch the general pipeline; agreement with it is checked by
// the verify suites.
struct LinearClosedForm {
    Matrix N;
    Matrix R_temporal;
    Matrix F;
    double eym = 0.0;
};

struct SodeClosedForm {
    Matrix N;
    Matrix R_temporal;
    std::vector<Matrix> R_spatial;  // one matrix per k = 1..n
    Matrix F;
    double eym = 0.0;
};

struct NhlsodeClosedForm {
    Matrix N;
    Matrix R_temporal;
    Matrix F;
    double eym = 0.0;
};

LinearClosedForm closed_form_linear(const SystemSpec& sys, double t,
                                    const Bindings& params = {});
SodeClosedForm closed_form_sode(const SystemSpec& sys, double t, const Vector& x,
                                const Bindings& params = {});
// Throws EvalError when a0(t) vanishes at t.
NhlsodeClosedForm closed_form_nhlsode(const SystemSpec& sys, double t,
                                      const Bindings& params = {});

} // namespace jetgeo
