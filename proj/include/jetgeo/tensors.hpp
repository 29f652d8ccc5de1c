#pragma once

#include <Eigen/Dense>
#include <vector>

#include "jetgeo/expr.hpp"

namespace jetgeo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

using ExprVector = std::vector<Expr>;
/// Row-major [i][j]; entries default to the zero constant.
using ExprMatrix = std::vector<std::vector<Expr>>;
/// [i][j][k]
using ExprTensor3 = std::vector<ExprMatrix>;
/// [l][i][j][k]
using ExprTensor4 = std::vector<ExprTensor3>;

/// Dense rank-3 tensor of doubles, n x n x n.
struct Tensor3 {
    explicit Tensor3(int n_ = 0) : n(n_), v(static_cast<std::size_t>(n_) * n_ * n_, 0.0) {}

    double& operator()(int i, int j, int k) { return v[idx(i, j, k)]; }
    double operator()(int i, int j, int k) const { return v[idx(i, j, k)]; }

    double max_abs() const {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }

    int n = 0;
    std::vector<double> v;

private:
    std::size_t idx(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * n + j) * n + k;
    }
};

/// Dense rank-4 tensor of doubles, n x n x n x n.
struct Tensor4 {
    explicit Tensor4(int n_ = 0)
        : n(n_), v(static_cast<std::size_t>(n_) * n_ * n_ * n_, 0.0) {}

    double& operator()(int l, int i, int j, int k) { return v[idx(l, i, j, k)]; }
    double operator()(int l, int i, int j, int k) const { return v[idx(l, i, j, k)]; }

    double max_abs() const {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }

    int n = 0;
    std::vector<double> v;

private:
    std::size_t idx(int l, int i, int j, int k) const {
        return ((static_cast<std::size_t>(l) * n + i) * n + j) * static_cast<std::size_t>(n) + k;
    }
};

inline ExprMatrix expr_matrix(int rows, int cols) {
    return ExprMatrix(rows, std::vector<Expr>(cols));
}

inline ExprTensor3 expr_tensor3(int n) { return ExprTensor3(n, expr_matrix(n, n)); }

inline ExprTensor4 expr_tensor4(int n) { return ExprTensor4(n, expr_tensor3(n)); }

inline Matrix eval_matrix(const ExprMatrix& m, const Bindings& b) {
    const int rows = static_cast<int>(m.size());
    const int cols = rows ? static_cast<int>(m[0].size()) : 0;
    Matrix out(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) out(i, j) = m[i][j].eval(b);
    return out;
}

inline Tensor3 eval_tensor3(const ExprTensor3& t, const Bindings& b) {
    const int n = static_cast<int>(t.size());
    Tensor3 out(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) out(i, j, k) = t[i][j][k].eval(b);
    return out;
}

inline Tensor4 eval_tensor4(const ExprTensor4& t, const Bindings& b) {
    const int n = static_cast<int>(t.size());
    Tensor4 out(n);
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) out(l, i, j, k) = t[l][i][j][k].eval(b);
    return out;
}

inline double max_abs(const Matrix& m) {
    return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

} // namespace jetgeo
