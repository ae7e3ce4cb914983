#include "oqw/zoo.hpp"

#include "oqw/linalg.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace oqw::zoo {

namespace {

Matrix two_by_two(Complex a, Complex b, Complex c, Complex d) {
    Matrix M(2, 2);
    M << a, b, c, d;
    return M;
}

void require_unit_direction(const std::array<double, 3>& n) {
    const double norm2 = n[0] * n[0] + n[1] * n[1] + n[2] * n[2];
    if (std::abs(norm2 - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "drive direction must be a unit vector; |n|^2 = " << norm2;
        throw StructuralError(msg.str());
    }
}

Matrix drive_hamiltonian(double lambda, const std::array<double, 3>& n) {
    return lambda * (n[0] * sigma_x() + n[1] * sigma_y() + n[2] * sigma_z());
}

void require_nonnegative(double value, const char* name) {
    if (value < 0.0 || !std::isfinite(value)) {
        std::ostringstream msg;
        msg << name << " must be finite and nonnegative, got " << value;
        throw StructuralError(msg.str());
    }
}

}  // namespace

Matrix sigma_x() { return two_by_two(0, 1, 1, 0); }
Matrix sigma_y() { return two_by_two(0, Complex(0, -1), Complex(0, 1), 0); }
Matrix sigma_z() { return two_by_two(1, 0, 0, -1); }
Matrix sigma_plus() { return two_by_two(0, 1, 0, 0); }
Matrix sigma_minus() { return two_by_two(0, 0, 1, 0); }

WalkModel paper_line_walk() {
    const double s = 1.0 / std::sqrt(6.0);
    const auto phase = [](double turns) {
        return std::polar(1.0, turns * std::numbers::pi);
    };
    const Matrix stay = s * two_by_two(1, phase(2.0 / 3.0), 1, -1);
    const Matrix fwd = s * two_by_two(1, 1, 1, phase(1.0 / 3.0));
    const Matrix bwd = s * two_by_two(1, phase(-2.0 / 3.0), 1, phase(-1.0 / 3.0));
    return make_walk_model(1, {stay, fwd, bwd}, 1e-12);
}

WalkModel build_microscopic(const MicroscopicSpec& spec, double c_tol) {
    if (spec.delta <= 0.0 || !std::isfinite(spec.delta))
        throw StructuralError("time step must be positive");
    if (spec.jumps.empty() || spec.jumps.size() % 2 != 0)
        throw StructuralError("need 2d jump operators (positive directions first)");
    const int D = spec.coin_dim();
    if (spec.H0.rows() != D || spec.H0.cols() != D)
        throw StructuralError("local Hamiltonian must be square");
    if (linalg::max_abs(spec.H0 - spec.H0.adjoint()) > 1e-12)
        throw StructuralError("local Hamiltonian must be Hermitian");
    for (std::size_t k = 0; k < spec.jumps.size(); ++k) {
        if (spec.jumps[k].rows() != D || spec.jumps[k].cols() != D) {
            std::ostringstream msg;
            msg << "jump operator " << k << " has inconsistent dimensions";
            throw StructuralError(msg.str());
        }
    }
    const int d = spec.lattice_dim();
    const double dt = spec.delta;
    const double sq = std::sqrt(dt);

    Matrix G = Matrix::Zero(D, D);
    for (const auto& Q : spec.jumps) G += Q.adjoint() * Q;
    std::vector<Matrix> ops(static_cast<std::size_t>(2 * d + 1));
    ops[0] = Matrix::Identity(D, D) - 0.5 * dt * G - Complex(0, 1) * dt * spec.H0;
    for (int i = 1; i <= 2 * d; ++i)
        ops[static_cast<std::size_t>(i)] = sq * spec.jumps[static_cast<std::size_t>(i - 1)];

    const double tol = c_tol * dt * dt;
    WalkModel model = make_walk_model(d, std::move(ops), tol);
    const double res = normalization_residual(model);
    if (res > tol) {
        std::ostringstream msg;
        msg << "discretized model rejected: normalization residual " << res
            << " exceeds " << c_tol << " * delta^2 = " << tol;
        throw StructuralError(msg.str());
    }
    model.micro = spec;
    return model;
}

double gksl_residual(const WalkModel& model, const Matrix& rho) {
    if (!model.micro)
        throw StructuralError("gksl_residual requires a model built from a MicroscopicSpec");
    return linalg::max_abs(linalg::gksl_apply(model.micro->H0, model.micro->jumps, rho));
}

// --------------------------- circle walk -------------------------------------

WalkModel build_circle(const CircleParams& p) {
    require_nonnegative(p.gamma, "gamma");
    require_nonnegative(p.nbar, "nbar");
    require_unit_direction(p.n_vec);
    MicroscopicSpec spec;
    spec.H0 = drive_hamiltonian(p.lambda, p.n_vec);
    spec.jumps = {std::sqrt(p.gamma * (p.nbar + 1.0)) * sigma_minus(),
                  std::sqrt(p.gamma * p.nbar) * sigma_plus()};
    spec.delta = p.delta;
    return build_microscopic(spec);
}

std::pair<double, double> circle_analytic(const CircleParams& p) {
    const double g = p.gamma, l = p.lambda, dt = p.delta;
    const double z2 = p.n_vec[2] * p.n_vec[2];
    const double t_minus = 1.0 - z2, t_plus = 1.0 + z2;
    const double s1 = 1.0 + p.nbar, s2 = 1.0 + 2.0 * p.nbar;
    const double beta = g * g * s2 * s2 + 8.0 * l * l * t_plus;
    if (beta == 0.0) return {0.0, 0.0};
    const double m = dt * 4.0 * t_minus * g * l * l / beta;
    const double ns1 = p.nbar * s1;
    const double bracket =
        std::pow(g, 4) * std::pow(s2, 6) +
        8.0 * g * g * l * l * s2 * s2 * ((8.0 * ns1 - 1.0) + z2 * (8.0 * ns1 + 5.0)) +
        64.0 * std::pow(l, 4) * (4.0 * ns1 * t_plus * t_plus + 1.0 + 4.0 * z2 - z2 * z2);
    const double sigma2 = dt * 4.0 * t_minus * g * l * l * bracket / (s2 * std::pow(beta, 3));
    return {m, sigma2};
}

// --------------------------- example 2 ---------------------------------------

WalkModel build_example2(const Example2Params& p) {
    require_nonnegative(p.gamma, "gamma");
    require_nonnegative(p.gamma_y_plus, "gamma_y_plus");
    require_nonnegative(p.gamma_y_minus, "gamma_y_minus");
    require_nonnegative(p.nbar, "nbar");
    require_unit_direction(p.n_vec);
    MicroscopicSpec spec;
    spec.H0 = drive_hamiltonian(p.lambda, p.n_vec);
    spec.jumps = {std::sqrt(p.gamma * (p.nbar + 1.0)) * sigma_minus(),
                  std::sqrt(p.gamma_y_plus) * sigma_z(),
                  std::sqrt(p.gamma * p.nbar) * sigma_plus(),
                  std::sqrt(p.gamma_y_minus) * sigma_z()};
    spec.delta = p.delta;
    return build_microscopic(spec);
}

std::pair<Eigen::Vector2d, Eigen::Matrix2d> example2_analytic(const Example2Params& p) {
    const double g = p.gamma, l = p.lambda, dt = p.delta;
    const double z2 = p.n_vec[2] * p.n_vec[2];
    const double s1 = 1.0 + p.nbar, s2 = 1.0 + 2.0 * p.nbar;
    const double rp = p.gamma_y_plus + p.gamma_y_minus;
    const double rm = p.gamma_y_plus - p.gamma_y_minus;
    const double T = g * s2 + 4.0 * rp;
    const double eta_p = z2 + 1.0, eta_m = z2 - 1.0;
    const double t_minus = 1.0 - z2;
    const double l2 = l * l;

    const double mx_den = 8.0 * l2 * t_minus * T + g * s2 * (16.0 * l2 * z2 + T * T);
    const double mx = mx_den == 0.0 ? 0.0 : 4.0 * g * dt * l2 * t_minus * T / mx_den;
    const double my = dt * rm;

    const double ns1 = p.nbar * s1;
    const double cxx_den =
        std::pow(g * s2 * T * T + 8.0 * l2 * (g * s2 * eta_p - 4.0 * rp * eta_m), 3);
    const double cxx_bracket =
        64.0 * l2 * l2 *
            (-8.0 * g * rp * eta_m * ((8.0 * ns1 - s2 * s2 + 1.0) * z2 + s2 * s2) +
             g * g * s2 *
                 (s2 * s2 * (5.0 * z2 * z2 - 2.0 * z2 + 1.0) -
                  2.0 * (8.0 * ns1 + 3.0) * z2 * eta_m) +
             16.0 * rp * rp * s2 * eta_m * eta_m) +
        8.0 * g * l2 * (4.0 * rp + g * s2) * (4.0 * rp + g * s2) *
            (g * s2 * ((8.0 * p.nbar * (2.0 * p.nbar - s1 + 2.0) + 5.0) * z2 + 8.0 * ns1 - 1.0) -
             4.0 * rp * (8.0 * ns1 + 1.0) * eta_m) +
        g * g * std::pow(s2, 3) * std::pow(4.0 * rp + g * s2, 4);
    const double cxx = cxx_den == 0.0 ? 0.0 : -4.0 * g * dt * l2 * T * eta_m * cxx_bracket / cxx_den;

    const double cyy = dt * rp;

    const double cxy_den =
        std::pow(8.0 * l2 * (2.0 * g * z2 * s2 - z2 * T + T) + g * s2 * T * T, 2);
    const double cxy =
        cxy_den == 0.0
            ? 0.0
            : 16.0 * dt * g * g * l2 * eta_m * rm * s2 * (T * T - 16.0 * l2 * z2) / cxy_den;

    Eigen::Vector2d m(mx, my);
    Eigen::Matrix2d C;
    C << cxx, cxy, cxy, cyy;
    return {m, C};
}

// --------------------------- example 3 ---------------------------------------

WalkModel build_example3(const Example3Params& p) {
    require_nonnegative(p.gamma_x, "gamma_x");
    require_nonnegative(p.gamma_y, "gamma_y");
    require_nonnegative(p.nbar, "nbar");
    MicroscopicSpec spec;
    spec.H0 = p.lambda * sigma_y();  // drive fixed along y for this model
    spec.jumps = {std::sqrt(p.gamma_x * (p.nbar + 1.0)) * sigma_minus(),
                  std::sqrt(p.gamma_y * (p.nbar + 1.0)) * sigma_minus(),
                  std::sqrt(p.gamma_x * p.nbar) * sigma_plus(),
                  std::sqrt(p.gamma_y * p.nbar) * sigma_plus()};
    spec.delta = p.delta;
    return build_microscopic(spec);
}

std::pair<Eigen::Vector2d, Eigen::Matrix2d> example3_analytic(const Example3Params& p) {
    const double nb = p.nbar, l = p.lambda, dt = p.delta;
    const double r = p.gamma_x + p.gamma_y;
    const double s1 = 1.0 + nb, s2 = 1.0 + 2.0 * nb;
    const double l2 = l * l;
    const double A = 8.0 * l2 + r * r * s2 * s2;

    const double mx = 4.0 * p.gamma_x * dt * l2 / A;
    const double my = 4.0 * p.gamma_y * dt * l2 / A;

    const auto diag_entry = [&](double ga) {
        const double t1 = -2.0 * nb * r * s2 * s2 * ga * ga * (4.0 * l2 + s1 * r * r * s2);
        const double t2 = 8.0 * l2 * r * ga * ga *
                          (-4.0 * l2 * (4.0 * nb * (nb + 2.0) + 3.0) - nb * r * r * std::pow(s2, 3)) /
                          A;
        const double t3 = s1 * ga * A * (4.0 * l2 + nb * r * r * s2);
        const double t4 = nb * ga * (4.0 * l2 + r * r * s1 * s2) * A;
        return dt / (A * A) * (t1 + t2 + t3 + t4);
    };
    const double cxy = -2.0 * dt * p.gamma_x * p.gamma_y *
                       (8.0 * l2 * l2 * (8.0 * nb * nb + 8.0 * nb + 6.0) * r * s2 +
                        nb * std::pow(r, 5) * s1 * std::pow(s2, 5) +
                        16.0 * l2 * nb * std::pow(r, 3) * s1 * std::pow(s2, 3)) /
                       std::pow(A, 3);

    Eigen::Vector2d m(mx, my);
    Eigen::Matrix2d C;
    C << diag_entry(p.gamma_x), cxy, cxy, diag_entry(p.gamma_y);
    return {m, C};
}

}  // namespace oqw::zoo
