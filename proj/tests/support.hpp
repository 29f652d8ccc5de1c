#pragma once

// Shared helpers for the test suites: finite-difference oracles and
// seeded random generators for expressions and systems.

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "jetgeo/expr.hpp"

namespace testsupport {

// central difference, the independent oracle for every symbolic derivative
inline double central_diff(const std::function<double(double)>& f, double x,
                           double h = 1e-5) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double central_diff_expr(const jetgeo::Expr& e, const jetgeo::Bindings& at,
                                const std::string& sym, double h = 1e-5) {
    jetgeo::Bindings b = at;
    b[sym] = at.at(sym) + h;
    const double hi = e.eval(b);
    b[sym] = at.at(sym) - h;
    const double lo = e.eval(b);
    return (hi - lo) / (2.0 * h);
}

// mixed absolute/relative comparison for derivative checks
inline bool close_rel(double a, double b, double tol) {
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    return std::abs(a - b) <= tol * scale;
}

// Random polynomial in the given symbols, at most `terms` monomials of
// total degree <= degree.  Coefficients in [-2, 2] \ {0}.
inline jetgeo::Expr random_polynomial(std::mt19937& rng,
                                      const std::vector<std::string>& symbols,
                                      int degree = 3, int terms = 4) {
    using jetgeo::Expr;
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    std::uniform_int_distribution<int> nterms(2, terms);
    std::uniform_int_distribution<int> deg(0, degree);
    std::uniform_int_distribution<size_t> pick(0, symbols.empty() ? 0 : symbols.size() - 1);

    Expr sum = Expr::constant(0.0);
    const int m = nterms(rng);
    for (int k = 0; k < m; ++k) {
        double c = coeff(rng);
        if (std::abs(c) < 0.25) c = c < 0 ? c - 0.25 : c + 0.25;
        Expr mono = Expr::constant(c);
        if (!symbols.empty()) {
            int total = deg(rng);
            for (int d = 0; d < total; ++d)
                mono = mono * Expr::symbol(symbols[pick(rng)]);
        }
        sum = sum + mono;
    }
    return sum;
}

// Random expression mixing polynomials with sin/cos/exp wrappers; all
// functions stay defined on the whole real line so evaluation points
// can be sampled freely.
inline jetgeo::Expr random_expression(std::mt19937& rng,
                                      const std::vector<std::string>& symbols,
                                      int depth = 2) {
    using jetgeo::Expr;
    Expr p = random_polynomial(rng, symbols, 2, 3);
    if (depth <= 0) return p;
    std::uniform_int_distribution<int> choice(0, 4);
    switch (choice(rng)) {
    case 0: return p + sin(random_expression(rng, symbols, depth - 1));
    case 1: return p * cos(random_expression(rng, symbols, depth - 1));
    case 2: {
        // keep exponents small so values stay finite
        Expr inner = random_polynomial(rng, symbols, 1, 2);
        return p + exp(Expr::constant(0.25) * inner);
    }
    case 3: {
        Expr inner = random_expression(rng, symbols, depth - 1);
        // argument bounded away from zero: log(1 + e^2) style
        return p + log(Expr::constant(1.0) + inner * inner);
    }
    default:
        return p - random_polynomial(rng, symbols, 2, 3) * p;
    }
}

} // namespace testsupport
