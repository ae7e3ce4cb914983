// linalg.hpp — row-stacking vectorization, superoperator matrices, degenerate
// least-squares solves, and small threading helpers shared across the engines.
#pragma once

#include "oqw/types.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <functional>
#include <vector>

namespace oqw::linalg {

// --------------------------- vectorization ----------------------------------
// Row-stacking convention: vec(M)[i*n + j] = M(i, j), so that
// vec(A X B) = (A kron B^T) vec(X).

inline Vector vec_rows(const Matrix& M) {
    const auto r = M.rows(), c = M.cols();
    Vector v(r * c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) v[i * c + j] = M(i, j);
    return v;
}

inline Matrix unvec_rows(const Vector& v, Eigen::Index r, Eigen::Index c) {
    Matrix M(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) M(i, j) = v[i * c + j];
    return M;
}

// Matrix of X -> A X B under row-stacking.
inline Matrix sandwich_matrix(const Matrix& A, const Matrix& B) {
    return Eigen::kroneckerProduct(A, B.transpose());
}

// Vectorized coin map sum_j A_j (.) A_j^dag.
Matrix coin_map_matrix(const WalkModel& model);

// Vectorized dual map sum_j A_j^dag (.) A_j.
Matrix dual_map_matrix(const WalkModel& model);

// Vectorized GKSL generator -i[H,.] + sum_k (Q_k . Q_k^dag - 1/2 {Q_k^dag Q_k, .}).
Matrix gksl_matrix(const Matrix& H0, const std::vector<Matrix>& jumps);

// Vectorized adjoint generator +i[H,.] + sum_k (Q_k^dag . Q_k - 1/2 {Q_k^dag Q_k, .}).
Matrix gksl_adjoint_matrix(const Matrix& H0, const std::vector<Matrix>& jumps);

// GKSL generator applied directly to a matrix.
Matrix gksl_apply(const Matrix& H0, const std::vector<Matrix>& jumps, const Matrix& rho);

// --------------------------- hermitian utilities ----------------------------

inline Matrix hermitize(const Matrix& M) { return 0.5 * (M + M.adjoint()); }

inline double max_abs(const Matrix& M) { return M.cwiseAbs().maxCoeff(); }

// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const Matrix& hermitian);

// --------------------------- degenerate solves ------------------------------

struct DegenerateSolveResult {
    Matrix solution;  // Hermitized, trace-zero
    double residual;  // max-norm of K vec(L) - vec(R) after gauge fixing
};

// Minimum-norm least-squares solution of K vec(L) = vec(R) for a D x D matrix
// L, followed by Hermitization and the trace-zero gauge. The reported residual
// is measured on the original system after both post-steps; K must annihilate
// vec(I) and map Hermitian solutions to Hermitian ones for them to be exact.
DegenerateSolveResult solve_degenerate(const Matrix& K, const Matrix& R);

// --------------------------- threading --------------------------------------

// Worker cap: OQW_THREADS if set, else hardware concurrency, at least 1.
int thread_count();

// Runs fn(begin, end) over a deterministic partition of [0, n). The partition
// depends only on n and the worker count, never on scheduling, so any
// fixed-order merge done by the caller is reproducible.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn);

}  // namespace oqw::linalg
