// zoo.hpp — catalog of concrete walk models: the reference line walk, the
// generic discretized builder, the driven two-level circle walk, and two 2D
// walks with dissipative/decoherent transport, together with their closed-form
// mean and covariance used as independent oracles.
#pragma once

#include "oqw/types.hpp"

#include <array>
#include <utility>

namespace oqw::zoo {

// --------------------------- Pauli conventions -------------------------------
// sigma_minus = [[0,0],[1,0]], sigma_plus = [[0,1],[0,0]], sigma_z = diag(1,-1).

Matrix sigma_x();
Matrix sigma_y();
Matrix sigma_z();
Matrix sigma_plus();
Matrix sigma_minus();

// --------------------------- reference line walk -----------------------------

// Lazy walk on the line with a two-dimensional coin: three 1/sqrt(6) unitary-
// phase matrices satisfying the normalization exactly. Drift is zero and the
// long-run variance is 25/24.
WalkModel paper_line_walk();

// --------------------------- discretized builder -----------------------------

// A_i = sqrt(delta) Q_i, A_0 = I - (delta/2) sum Q_i^dag Q_i - i H0 delta.
// The normalization defect is O(delta^2); the build is rejected when it
// exceeds c_tol * delta^2. The spec is attached to the returned model so the
// analytics can work at the generator level.
WalkModel build_microscopic(const MicroscopicSpec& spec, double c_tol = 10.0);

// GKSL defect ||-i[H0,rho] + sum_j (Q_j rho Q_j^dag - 1/2 {Q_j^dag Q_j, rho})||_max
// for a model that carries its MicroscopicSpec. At the model's discrete steady
// state this is O(delta).
double gksl_residual(const WalkModel& model, const Matrix& rho);

// --------------------------- circle walk (d=1, D=2) --------------------------

// Two-level atom with thermal amplitude damping and a coherent drive along
// n_vec: forward jumps sqrt(delta gamma (nbar+1)) sigma_minus, backward jumps
// sqrt(delta gamma nbar) sigma_plus.
struct CircleParams {
    double gamma{0.1};
    double nbar{1.0};
    double lambda{0.3};
    std::array<double, 3> n_vec{0.0, 1.0, 0.0};
    double delta{0.05};
};

WalkModel build_circle(const CircleParams& p);

// Closed-form (mean, variance). Exact for the generator-level analytics at any
// unit n_vec; depends on n_vec only through n_z.
std::pair<double, double> circle_analytic(const CircleParams& p);

// --------------------------- example 2 (d=2, D=2) ----------------------------

// Dissipative transport along x (as in the circle walk) and decoherent
// sigma_z-mediated transport along y with asymmetric rates gamma_y_plus/minus.
struct Example2Params {
    double gamma{0.1};
    double gamma_y_plus{0.5};
    double gamma_y_minus{0.5};
    double nbar{1.0};
    double lambda{0.3};
    std::array<double, 3> n_vec{0.0, 1.0, 0.0};
    double delta{0.05};
};

WalkModel build_example2(const Example2Params& p);

std::pair<Eigen::Vector2d, Eigen::Matrix2d> example2_analytic(const Example2Params& p);

// --------------------------- example 3 (d=2, D=2) ----------------------------

// Dissipative transport along both axes with rates gamma_x, gamma_y and the
// drive fixed along sigma_y.
struct Example3Params {
    double gamma_x{0.55};
    double gamma_y{0.45};
    double nbar{1.0};
    double lambda{0.3};
    double delta{0.05};
};

WalkModel build_example3(const Example3Params& p);

std::pair<Eigen::Vector2d, Eigen::Matrix2d> example3_analytic(const Example3Params& p);

}  // namespace oqw::zoo
