// clt.hpp — asymptotic Gaussian analytics for a walk model: unique steady
// state of the coin map, drift vector, the gauge-fixed L operators of the
// degenerate Heisenberg system, and the long-run covariance matrix.
#pragma once

#include "oqw/types.hpp"

#include <string>
#include <vector>

namespace oqw::clt {

// --------------------------- steady state -----------------------------------

struct SteadyStateResult {
    Matrix rho;                    // Hermitian, PSD, trace 1
    double fixed_point_residual;   // max-norm of L(rho) - rho
    std::string method;            // "spectral" or "power-iteration"
};

// Unique fixed point of the coin-space map. Spectral solve of the D^2 x D^2
// vectorized map, with a fixed-point-iteration fallback for D^2 > 64.
// Throws NonUniqueSteadyState when more than one eigenvalue clusters within
// 1e-8 of the one closest to 1, NoPhysicalFixedPoint when that eigenvalue is
// too far from 1 for the model's normalization quality or the eigenvector is
// not a density matrix.
SteadyStateResult steady_state_detailed(const WalkModel& model);
Matrix steady_state(const WalkModel& model);

// --------------------------- mean -------------------------------------------

// m_i = Tr((A_i^dag A_i - A_{i+d}^dag A_{i+d}) rho).
RealVector mean_vector(const WalkModel& model, const Matrix& rho_inf);

// Equivalent route sum_j Tr(A_j rho A_j^dag) e_j, used as a consistency check.
RealVector mean_vector_from_jump_probabilities(const WalkModel& model, const Matrix& rho_inf);

// --------------------------- L operators ------------------------------------

struct LSolveResult {
    std::vector<Matrix> L;    // d Hermitian trace-zero matrices
    RealVector residuals;     // per-direction max-norm residual
};

// For each direction i solves the degenerate system
//   L_i - sum_j A_j^dag L_i A_j = A_i^dag A_i - A_{i+d}^dag A_{i+d} - m_i I
// by minimum-norm least squares, then Hermitizes and applies the trace-zero
// gauge (solutions differ by multiples of I). Throws InconsistentSystem if a
// residual exceeds 1e-8.
LSolveResult solve_L(const WalkModel& model, const Matrix& rho_inf, const RealVector& m);

// --------------------------- covariance -------------------------------------

// Long-run covariance matrix assembled from the steady state, mean, and L
// operators; symmetrized on output and invariant under L_i -> L_i + alpha I.
RealMatrix covariance(const WalkModel& model, const Matrix& rho_inf, const RealVector& m,
                      const std::vector<Matrix>& L_ops);

// --------------------------- full report ------------------------------------

struct CltReport {
    Matrix rho_inf;
    RealVector m;
    std::vector<Matrix> L_ops;
    RealMatrix C;
    double steady_state_residual{0.0};
    RealVector L_residuals;
    std::string gauge{"trace-zero"};
    std::string method;  // "spectral" or "gksl"
};

// End-to-end pipeline. Exactly normalized models go through the discrete
// spectral route. Models carrying a MicroscopicSpec are handled at the level
// of their continuous generator: the steady state is the GKSL kernel, the L
// operators solve the adjoint-GKSL system, and the covariance keeps the
// leading order in the time step (the mean-squared term is below the
// discretization's own O(delta^2) accuracy). This is the regime in which the
// closed-form expressions of the model catalog are exact.
CltReport clt_report(const WalkModel& model);

}  // namespace oqw::clt
