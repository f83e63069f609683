#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "sosmult/errors.hpp"

namespace sosmult {

struct SymEig {
    Eigen::VectorXd values;  // descending
    Eigen::MatrixXd vectors; // column i pairs with values[i]
};

inline double max_abs(const Eigen::MatrixXd& M) {
    return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff();
}

/// Full symmetric eigendecomposition with a reconstruction guarantee:
/// the returned (V, lambda) satisfy max|M - V diag(lambda) V^T| <=
/// 1e-10 * (1 + max|M|), otherwise the call refuses with ComputeError.
/// Eigenvalues are sorted in descending order.
inline SymEig sym_eig(const Eigen::MatrixXd& M) {
    if (M.rows() != M.cols()) throw ComputeError("sym_eig: matrix not square");
    const Eigen::MatrixXd S = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    if (es.info() != Eigen::Success) throw ComputeError("sym_eig: eigensolver failed");
    const int n = static_cast<int>(M.rows());
    SymEig out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (int i = 0; i < n; ++i) { // Eigen sorts ascending; flip
        out.values[i] = es.eigenvalues()[n - 1 - i];
        out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
    }
    const Eigen::MatrixXd R = out.vectors * out.values.asDiagonal() * out.vectors.transpose();
    if (max_abs(M - R) > 1e-10 * (1.0 + max_abs(M)))
        throw ComputeError("sym_eig: reconstruction tolerance exceeded (n=" + std::to_string(n) +
                           " max=" + std::to_string(max_abs(M)) +
                           " err=" + std::to_string(max_abs(M - R)) + ")");
    return out;
}

inline double min_eigenvalue(const Eigen::MatrixXd& M) {
    const SymEig e = sym_eig(M);
    return e.values[M.rows() - 1];
}

inline double max_eigenvalue(const Eigen::MatrixXd& M) {
    return sym_eig(M).values[0];
}

/// Number of eigenvalues with |lambda| <= tol * (1 + max_i |lambda_i|).
inline int corank(const Eigen::MatrixXd& M, double tol) {
    const SymEig e = sym_eig(M);
    double amax = 0.0;
    for (int i = 0; i < e.values.size(); ++i) amax = std::max(amax, std::abs(e.values[i]));
    int c = 0;
    for (int i = 0; i < e.values.size(); ++i)
        if (std::abs(e.values[i]) <= tol * (1.0 + amax)) ++c;
    return c;
}

/// Kernel direction of a corank-one matrix: the unit eigenvector for the
/// smallest-magnitude eigenvalue, signed so its first nonzero coordinate is
/// positive. Throws unless the corank at the given tolerance is exactly 1.
inline Eigen::VectorXd facet_normal(const Eigen::MatrixXd& M, double tol) {
    const SymEig e = sym_eig(M);
    double amax = 0.0;
    for (int i = 0; i < e.values.size(); ++i) amax = std::max(amax, std::abs(e.values[i]));
    int kernel_index = -1;
    int count = 0;
    for (int i = 0; i < e.values.size(); ++i)
        if (std::abs(e.values[i]) <= tol * (1.0 + amax)) {
            ++count;
            kernel_index = i;
        }
    if (count != 1) throw ComputeError("facet_normal: corank is not one");
    Eigen::VectorXd v = e.vectors.col(kernel_index);
    v.normalize();
    for (int i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > 1e-12) {
            if (v[i] < 0) v = -v;
            break;
        }
    }
    return v;
}

} // namespace sosmult
