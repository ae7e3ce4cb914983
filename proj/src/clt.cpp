#include "oqw/clt.hpp"

#include "oqw/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace oqw::clt {

namespace {

constexpr double kClusterTol = 1e-8;       // eigenvalue clustering for uniqueness
constexpr double kResidualTol = 1e-8;      // InconsistentSystem threshold
constexpr double kFixedPointTol = 1e-10;

Matrix tilde_op(const Matrix& plus, const Matrix& minus) {
    return plus.adjoint() * plus - minus.adjoint() * minus;
}

// rho-candidate from an eigenvector: trace-normalize (kills the arbitrary
// phase), Hermitize, and insist on positivity.
Matrix physical_density(const Vector& v, int D, const char* context) {
    Matrix rho = linalg::unvec_rows(v, D, D);
    const Complex tr = rho.trace();
    if (std::abs(tr) < 1e-12 * rho.norm()) {
        std::ostringstream msg;
        msg << context << ": candidate fixed point is traceless";
        throw NoPhysicalFixedPoint(msg.str());
    }
    rho /= tr;
    rho = linalg::hermitize(rho);
    const double min_ev = linalg::min_eigenvalue(rho);
    if (min_ev < -1e-8) {
        std::ostringstream msg;
        msg << context << ": candidate fixed point has negative eigenvalue " << min_ev;
        throw NoPhysicalFixedPoint(msg.str());
    }
    return rho;
}

// Shared eigenvalue selection: index closest to `target`, uniqueness via
// clustering of the full spectrum around the selected eigenvalue.
Eigen::Index select_unique_eigenvalue(const Vector& evals, Complex target, const char* context) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < evals.size(); ++k)
        if (std::abs(evals[k] - target) < std::abs(evals[best] - target)) best = k;
    int cluster = 0;
    for (Eigen::Index k = 0; k < evals.size(); ++k)
        if (std::abs(evals[k] - evals[best]) <= kClusterTol) ++cluster;
    if (cluster > 1) {
        std::ostringstream msg;
        msg << context << ": " << cluster
            << " eigenvalues cluster at the fixed point; the steady state is not unique";
        throw NonUniqueSteadyState(msg.str());
    }
    return best;
}

SteadyStateResult steady_state_spectral(const WalkModel& model) {
    const Matrix M = linalg::coin_map_matrix(model);
    Eigen::ComplexEigenSolver<Matrix> es(M);
    if (es.info() != Eigen::Success)
        throw NoPhysicalFixedPoint("steady_state: eigendecomposition failed");
    const Eigen::Index best =
        select_unique_eigenvalue(es.eigenvalues(), Complex(1.0, 0.0), "steady_state");
    const double norm_res = normalization_residual(model);
    const double lead_tol = std::max(kClusterTol, 4.0 * model.D * norm_res);
    if (std::abs(es.eigenvalues()[best] - 1.0) > lead_tol) {
        std::ostringstream msg;
        msg << "steady_state: leading eigenvalue " << es.eigenvalues()[best]
            << " is too far from 1 for this model's normalization quality";
        throw NoPhysicalFixedPoint(msg.str());
    }
    SteadyStateResult out;
    out.rho = physical_density(es.eigenvectors().col(best), model.D, "steady_state");
    out.fixed_point_residual = linalg::max_abs(apply_coin_map(model, out.rho) - out.rho);
    out.method = "spectral";
    const double res_tol = std::max(kFixedPointTol, 4.0 * model.D * norm_res);
    if (out.fixed_point_residual > res_tol) {
        std::ostringstream msg;
        msg << "steady_state: fixed-point residual " << out.fixed_point_residual
            << " exceeds tolerance " << res_tol;
        throw NoPhysicalFixedPoint(msg.str());
    }
    return out;
}

// Large coin spaces: fixed-point iteration from two starts; agreement of the
// limits stands in for the spectral uniqueness check.
SteadyStateResult steady_state_power(const WalkModel& model) {
    const int D = model.D;
    const auto iterate = [&](Matrix rho) {
        for (int it = 0; it < 200000; ++it) {
            Matrix next = apply_coin_map(model, rho);
            next /= next.trace().real();
            next = linalg::hermitize(next);
            const double delta = linalg::max_abs(next - rho);
            rho = std::move(next);
            if (delta <= 1e-14) return rho;
        }
        throw NoPhysicalFixedPoint("steady_state: fixed-point iteration did not converge");
    };
    const Matrix from_mixed = iterate(maximally_mixed(D));
    // deterministic second start, diagonal weights 1..D
    Matrix seed = Matrix::Zero(D, D);
    for (int k = 0; k < D; ++k) seed(k, k) = static_cast<double>(k + 1);
    seed /= seed.trace().real();
    const Matrix from_ramp = iterate(seed);
    if (linalg::max_abs(from_mixed - from_ramp) > 1e-8)
        throw NonUniqueSteadyState(
            "steady_state: fixed-point iteration limits depend on the initial state");
    SteadyStateResult out;
    out.rho = from_mixed;
    const double min_ev = linalg::min_eigenvalue(out.rho);
    if (min_ev < -1e-8) throw NoPhysicalFixedPoint("steady_state: iterated state not PSD");
    out.fixed_point_residual = linalg::max_abs(apply_coin_map(model, out.rho) - out.rho);
    out.method = "power-iteration";
    return out;
}

// eqn-style covariance assembly shared by the discrete and generator-level
// routes: `plus`/`minus` hold the per-direction operators, `m` their drift,
// include_mm toggles the - m_i m_j term.
RealMatrix covariance_terms(const std::vector<Matrix>& plus, const std::vector<Matrix>& minus,
                            const Matrix& rho, const RealVector& m,
                            const std::vector<Matrix>& L, bool include_mm) {
    const int d = static_cast<int>(plus.size());
    RealMatrix C = RealMatrix::Zero(d, d);
    std::vector<Matrix> fwd(plus.size()), bwd(plus.size());
    for (int i = 0; i < d; ++i) {
        fwd[static_cast<std::size_t>(i)] =
            plus[static_cast<std::size_t>(i)] * rho * plus[static_cast<std::size_t>(i)].adjoint();
        bwd[static_cast<std::size_t>(i)] = minus[static_cast<std::size_t>(i)] * rho *
                                           minus[static_cast<std::size_t>(i)].adjoint();
    }
    for (int i = 0; i < d; ++i) {
        const auto si = static_cast<std::size_t>(i);
        for (int j = 0; j < d; ++j) {
            const auto sj = static_cast<std::size_t>(j);
            double c = 0.0;
            if (i == j) c += fwd[si].trace().real() + bwd[si].trace().real();
            if (include_mm) c -= m[i] * m[j];
            c += (fwd[si] * L[sj]).trace().real() + (fwd[sj] * L[si]).trace().real();
            c -= (bwd[si] * L[sj]).trace().real() + (bwd[sj] * L[si]).trace().real();
            c -= m[i] * (rho * L[sj]).trace().real() + m[j] * (rho * L[si]).trace().real();
            C(i, j) = c;
        }
    }
    return 0.5 * (C + C.transpose());
}

}  // namespace

SteadyStateResult steady_state_detailed(const WalkModel& model) {
    if (model.D * model.D > 64) return steady_state_power(model);
    return steady_state_spectral(model);
}

Matrix steady_state(const WalkModel& model) { return steady_state_detailed(model).rho; }

RealVector mean_vector(const WalkModel& model, const Matrix& rho_inf) {
    RealVector m(model.d);
    for (int i = 1; i <= model.d; ++i)
        m[i - 1] = (tilde_op(model.op(i), model.op(i + model.d)) * rho_inf).trace().real();
    return m;
}

RealVector mean_vector_from_jump_probabilities(const WalkModel& model, const Matrix& rho_inf) {
    RealVector m = RealVector::Zero(model.d);
    for (int j = 0; j < model.op_count(); ++j) {
        const double p = (model.op(j) * rho_inf * model.op(j).adjoint()).trace().real();
        const auto e = model.displacement(j);
        for (int i = 0; i < model.d; ++i) m[i] += p * static_cast<double>(e[static_cast<std::size_t>(i)]);
    }
    return m;
}

LSolveResult solve_L(const WalkModel& model, const Matrix& rho_inf, const RealVector& m) {
    const Matrix K = Matrix::Identity(model.D * model.D, model.D * model.D) -
                     linalg::dual_map_matrix(model);
    LSolveResult out;
    out.L.resize(static_cast<std::size_t>(model.d));
    out.residuals = RealVector(model.d);
    for (int i = 1; i <= model.d; ++i) {
        const Matrix rhs = tilde_op(model.op(i), model.op(i + model.d)) -
                           m[i - 1] * Matrix::Identity(model.D, model.D);
        auto solved = linalg::solve_degenerate(K, rhs);
        if (solved.residual > kResidualTol) {
            std::ostringstream msg;
            msg << "solve_L: direction " << i << " residual " << solved.residual
                << " exceeds " << kResidualTol << "; steady state or mean is inconsistent";
            throw InconsistentSystem(msg.str());
        }
        out.L[static_cast<std::size_t>(i - 1)] = std::move(solved.solution);
        out.residuals[i - 1] = solved.residual;
    }
    return out;
}

RealMatrix covariance(const WalkModel& model, const Matrix& rho_inf, const RealVector& m,
                      const std::vector<Matrix>& L_ops) {
    std::vector<Matrix> plus, minus;
    for (int i = 1; i <= model.d; ++i) {
        plus.push_back(model.op(i));
        minus.push_back(model.op(i + model.d));
    }
    return covariance_terms(plus, minus, rho_inf, m, L_ops, /*include_mm=*/true);
}

CltReport clt_report(const WalkModel& model) {
    CltReport report;
    if (model.micro) {
        const MicroscopicSpec& ms = *model.micro;
        const int d = ms.lattice_dim();
        const int D = ms.coin_dim();
        const double dt = ms.delta;

        const Matrix G = linalg::gksl_matrix(ms.H0, ms.jumps);
        Eigen::ComplexEigenSolver<Matrix> es(G);
        if (es.info() != Eigen::Success)
            throw NoPhysicalFixedPoint("clt_report: generator eigendecomposition failed");
        const Eigen::Index best =
            select_unique_eigenvalue(es.eigenvalues(), Complex(0.0, 0.0), "clt_report");
        if (std::abs(es.eigenvalues()[best]) > kClusterTol)
            throw NoPhysicalFixedPoint("clt_report: generator kernel is empty");
        report.rho_inf = physical_density(es.eigenvectors().col(best), D, "clt_report");
        report.steady_state_residual =
            linalg::max_abs(linalg::gksl_apply(ms.H0, ms.jumps, report.rho_inf));

        std::vector<Matrix> plus, minus;
        for (int i = 0; i < d; ++i) {
            plus.push_back(ms.jumps[static_cast<std::size_t>(i)]);
            minus.push_back(ms.jumps[static_cast<std::size_t>(i + d)]);
        }
        RealVector m_rate(d);
        for (int i = 0; i < d; ++i)
            m_rate[i] = (tilde_op(plus[static_cast<std::size_t>(i)],
                                  minus[static_cast<std::size_t>(i)]) *
                         report.rho_inf)
                            .trace()
                            .real();

        const Matrix Kadj = linalg::gksl_adjoint_matrix(ms.H0, ms.jumps);
        report.L_ops.resize(static_cast<std::size_t>(d));
        report.L_residuals = RealVector(d);
        for (int i = 0; i < d; ++i) {
            const Matrix rhs = -(tilde_op(plus[static_cast<std::size_t>(i)],
                                          minus[static_cast<std::size_t>(i)]) -
                                 m_rate[i] * Matrix::Identity(D, D));
            auto solved = linalg::solve_degenerate(Kadj, rhs);
            if (solved.residual > kResidualTol)
                throw InconsistentSystem("clt_report: generator-level L system inconsistent");
            report.L_ops[static_cast<std::size_t>(i)] = std::move(solved.solution);
            report.L_residuals[i] = solved.residual;
        }

        // leading order in the time step: the m_i m_j term is O(delta^2),
        // below the discretization's own normalization accuracy
        report.C = dt * covariance_terms(plus, minus, report.rho_inf, m_rate, report.L_ops,
                                         /*include_mm=*/false);
        report.m = dt * m_rate;
        report.method = "gksl";
        return report;
    }

    auto ss = steady_state_detailed(model);
    report.rho_inf = std::move(ss.rho);
    report.steady_state_residual = ss.fixed_point_residual;
    report.method = ss.method;
    report.m = mean_vector(model, report.rho_inf);
    auto lsol = solve_L(model, report.rho_inf, report.m);
    report.L_ops = std::move(lsol.L);
    report.L_residuals = std::move(lsol.residuals);
    report.C = covariance(model, report.rho_inf, report.m, report.L_ops);
    return report;
}

}  // namespace oqw::clt
