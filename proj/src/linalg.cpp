#include "oqw/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cstdlib>
#include <thread>

namespace oqw::linalg {

Matrix coin_map_matrix(const WalkModel& model) {
    const int n = model.D * model.D;
    Matrix M = Matrix::Zero(n, n);
    for (const auto& A : model.ops) M += Eigen::kroneckerProduct(A, A.conjugate()).eval();
    return M;
}

Matrix dual_map_matrix(const WalkModel& model) {
    const int n = model.D * model.D;
    Matrix M = Matrix::Zero(n, n);
    for (const auto& A : model.ops)
        M += Eigen::kroneckerProduct(A.adjoint().eval(), A.transpose().eval()).eval();
    return M;
}

Matrix gksl_matrix(const Matrix& H0, const std::vector<Matrix>& jumps) {
    const auto D = H0.rows();
    const Matrix I = Matrix::Identity(D, D);
    const Complex i(0.0, 1.0);
    Matrix G = Matrix::Zero(D, D);
    Matrix M = -i * (sandwich_matrix(H0, I) - sandwich_matrix(I, H0));
    for (const auto& Q : jumps) {
        M += sandwich_matrix(Q, Q.adjoint());
        G += Q.adjoint() * Q;
    }
    M -= 0.5 * (sandwich_matrix(G, I) + sandwich_matrix(I, G));
    return M;
}

Matrix gksl_adjoint_matrix(const Matrix& H0, const std::vector<Matrix>& jumps) {
    const auto D = H0.rows();
    const Matrix I = Matrix::Identity(D, D);
    const Complex i(0.0, 1.0);
    Matrix G = Matrix::Zero(D, D);
    Matrix M = i * (sandwich_matrix(H0, I) - sandwich_matrix(I, H0));
    for (const auto& Q : jumps) {
        M += sandwich_matrix(Q.adjoint(), Q);
        G += Q.adjoint() * Q;
    }
    M -= 0.5 * (sandwich_matrix(G, I) + sandwich_matrix(I, G));
    return M;
}

Matrix gksl_apply(const Matrix& H0, const std::vector<Matrix>& jumps, const Matrix& rho) {
    const Complex i(0.0, 1.0);
    Matrix out = -i * (H0 * rho - rho * H0);
    for (const auto& Q : jumps) {
        const Matrix QdQ = Q.adjoint() * Q;
        out += Q * rho * Q.adjoint() - 0.5 * (QdQ * rho + rho * QdQ);
    }
    return out;
}

double min_eigenvalue(const Matrix& hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian);
    return es.eigenvalues().minCoeff();
}

DegenerateSolveResult solve_degenerate(const Matrix& K, const Matrix& R) {
    const auto D = R.rows();
    const Vector rhs = vec_rows(R);
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(K);
    Matrix L = unvec_rows(cod.solve(rhs), D, D);
    L = hermitize(L);
    L -= (L.trace() / static_cast<double>(D)) * Matrix::Identity(D, D);
    const double residual = (K * vec_rows(L) - rhs).cwiseAbs().maxCoeff();
    return {std::move(L), residual};
}

int thread_count() {
    if (const char* env = std::getenv("OQW_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn) {
    if (n <= 0) return;
    const int workers = std::min<std::int64_t>(thread_count(), n);
    if (workers <= 1) {
        fn(0, n);
        return;
    }
    const std::int64_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        const std::int64_t lo = w * chunk;
        const std::int64_t hi = std::min<std::int64_t>(lo + chunk, n);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace oqw::linalg
