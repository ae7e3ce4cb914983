// types.hpp — walk model, coin states, microscopic specification, error types
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace oqw {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// --------------------------- errors -----------------------------------------

// Malformed model or state: wrong operator count, dimension mismatch, ...
struct StructuralError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// The eigenvalue-1 eigenspace of the vectorized coin map has dimension > 1.
struct NonUniqueSteadyState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// No eigenvector near eigenvalue 1 yields a PSD, trace-normalizable matrix.
struct NoPhysicalFixedPoint : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The degenerate linear system for an L operator has no solution within
// tolerance; signals an inconsistent steady state or mean upstream.
struct InconsistentSystem : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Enumeration request larger than the configured work budget.
struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical breakdown along a trajectory (all jump probabilities vanished).
struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --------------------------- microscopic specification ----------------------

// Continuous-time ingredients of a discretized walk: a local Hamiltonian,
// 2d jump operators (positive directions first, then negative), and the
// discretization time step.
struct MicroscopicSpec {
    Matrix H0;                  // Hermitian D x D
    std::vector<Matrix> jumps;  // Q_1..Q_d (+e_i), Q_{d+1}..Q_{2d} (-e_i)
    double delta{0.0};          // time step, > 0

    int lattice_dim() const { return static_cast<int>(jumps.size()) / 2; }
    int coin_dim() const { return static_cast<int>(H0.rows()); }
};

// --------------------------- walk model -------------------------------------

// Homogeneous lazy open quantum walk on the d-dimensional integer lattice.
// ops holds the 2d+1 transition operators in the fixed order
//   ops[0]          stay put
//   ops[1..d]       move along +e_1 .. +e_d
//   ops[d+1..2d]    move along -e_1 .. -e_d
// and must satisfy sum_j ops[j]^dag ops[j] = I within tol_norm (max norm).
struct WalkModel {
    int d{0};
    int D{0};
    std::vector<Matrix> ops;
    double tol_norm{1e-12};
    std::optional<MicroscopicSpec> micro;  // present for discretized builds

    const Matrix& op(int j) const { return ops[static_cast<std::size_t>(j)]; }
    int op_count() const { return 2 * d + 1; }

    // Displacement vector e_j: e_0 = 0, e_j = +unit(j), e_{j+d} = -unit(j).
    std::vector<std::int64_t> displacement(int j) const {
        std::vector<std::int64_t> e(static_cast<std::size_t>(d), 0);
        if (j == 0) return e;
        if (j <= d)
            e[static_cast<std::size_t>(j - 1)] = +1;
        else
            e[static_cast<std::size_t>(j - d - 1)] = -1;
        return e;
    }
};

// Checks operator count and shapes, then measures the normalization defect.
// Throws StructuralError on malformed input; the returned model is accepted
// only if the residual is within tol_norm.
WalkModel make_walk_model(int d, std::vector<Matrix> ops, double tol_norm = 1e-12);

// max-norm of sum_j A_j^dag A_j - I
double normalization_residual(const WalkModel& model);

// One application of the coin-space map: sum_j A_j tau A_j^dag.
Matrix apply_coin_map(const WalkModel& model, const Matrix& tau);

// Dual (Heisenberg) map: sum_j A_j^dag X A_j.
Matrix apply_dual_map(const WalkModel& model, const Matrix& X);

// --------------------------- coin states ------------------------------------

// Validates a density matrix: Hermitian, eigenvalues >= -tol, trace 1.
// Throws StructuralError naming the violated property.
void validate_coin_state(const Matrix& rho, double tol = 1e-12);

// Maximally mixed coin state I/D.
Matrix maximally_mixed(int D);

}  // namespace oqw
