// acceptance — runs every acceptance criterion at its stated tolerance and
// prints one pass/fail line per criterion. The n = 50000 reference row is
// opt-in (--slow or OQW_RUN_SLOW=1). Exit code is the number of failed
// criteria.
#include "oqw/clt.hpp"
#include "oqw/lattice.hpp"
#include "oqw/linalg.hpp"
#include "oqw/trajectory.hpp"
#include "oqw/types.hpp"
#include "oqw/zoo.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace oqw;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void criterion(int id, bool pass, const std::string& detail) {
    std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << id << ": " << detail << "\n";
    if (!pass) ++g_failures;
}

Matrix mat2(Complex a, Complex b, Complex c, Complex d) {
    Matrix M(2, 2);
    M << a, b, c, d;
    return M;
}

double rel_gap(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12});
}

// CLT-scaled variance with the first map application counted as step zero.
double scaled_variance(const WalkModel& model, std::uint64_t n) {
    const auto state = evolve(model, default_initial_state(model), n + 1);
    const auto mom = distribution_moments(position_distribution(state));
    return mom.cov(0, 0) / static_cast<double>(n);
}

std::array<double, 3> unit_vector(traj::Xoshiro256pp& rng) {
    const double z = 2.0 * rng.uniform01() - 1.0;
    const double phi = 2.0 * M_PI * rng.uniform01();
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
}

// least-squares slope of log(y) against log(x)
double fitted_exponent(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

int main(int argc, char** argv) {
    bool slow = std::getenv("OQW_RUN_SLOW") != nullptr;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--slow") == 0) slow = true;

    const WalkModel line = zoo::paper_line_walk();

    // 1. steady state of the reference line walk
    {
        const auto t0 = Clock::now();
        const auto ss = clt::steady_state_detailed(line);
        const double dt = seconds_since(t0);
        const Matrix expect = mat2(0.5, Complex(0.375, -0.217), Complex(0.375, 0.217), 0.5);
        const double gap = linalg::max_abs(ss.rho - expect);
        std::ostringstream os;
        os << "steady state entrywise gap " << gap << " (tol 1e-3), " << dt << " s";
        criterion(1, gap <= 1e-3 && dt < 1.0, os.str());
    }

    // 2. gauge-fixed L matrix and its substitution residual
    {
        const auto t0 = Clock::now();
        const Matrix rho = clt::steady_state(line);
        const auto m = clt::mean_vector(line, rho);
        const auto sol = clt::solve_L(line, rho, m);
        const double dt = seconds_since(t0);
        const Matrix expect = mat2(0.25, Complex(0.25, 0.433), Complex(0.25, -0.433), -0.25);
        const double gap = linalg::max_abs(sol.L[0] - expect);
        std::ostringstream os;
        os << "L gap " << gap << " (tol 1e-3), residual " << sol.residuals[0]
           << " (tol 1e-10), " << dt << " s";
        criterion(2, gap <= 1e-3 && sol.residuals[0] <= 1e-10 && dt < 1.0, os.str());
    }

    // 3. covariance of the reference line walk
    {
        const auto t0 = Clock::now();
        const auto report = clt::clt_report(line);
        const double dt = seconds_since(t0);
        const double gap = std::abs(report.C(0, 0) - 1.04167);
        std::ostringstream os;
        os << "C = " << report.C(0, 0) << ", |C - 1.04167| = " << gap << " (tol 1e-5), " << dt
           << " s";
        criterion(3, gap <= 1e-5 && dt < 1.0, os.str());
    }

    // 4. reference-table reproduction by exact density evolution
    {
        const auto t0 = Clock::now();
        struct Row {
            std::uint64_t n;
            double target;
        };
        std::vector<Row> rows{{10, 1.08333}, {100, 1.04583}, {1000, 1.04208}, {10000, 1.04171}};
        bool pass = true;
        std::ostringstream os;
        os << "scaled variance rows (tol 1e-5):";
        for (const auto& row : rows) {
            const double got = scaled_variance(line, row.n);
            const bool ok = std::abs(got - row.target) <= 1e-5;
            pass = pass && ok;
            os << " n=" << row.n << " " << got << (ok ? " ok" : " MISS");
        }
        if (slow) {
            const double got = scaled_variance(line, 50000);
            const bool ok = std::abs(got - 1.04167) <= 1e-5;
            pass = pass && ok;
            os << " n=50000 " << got << (ok ? " ok" : " MISS");
        } else {
            os << " n=50000 skipped (opt-in: --slow or OQW_RUN_SLOW=1)";
        }
        os << ", " << seconds_since(t0) << " s";
        criterion(4, pass, os.str());
    }

    // 5. circle walk goldens and closed-form/pipeline agreement
    {
        zoo::CircleParams p;  // n_y = 1, lambda 0.3, gamma 0.1, nbar 1, delta 0.05
        const auto report = clt::clt_report(zoo::build_circle(p));
        const auto [ma, ca] = zoo::circle_analytic(p);
        const double gm = std::abs(report.m[0] - 0.00222);
        const double gc = std::abs(report.C(0, 0) - 0.00645);
        const double ra = std::max(rel_gap(report.m[0], ma), rel_gap(report.C(0, 0), ca));
        std::ostringstream os;
        os << "m gap " << gm << ", C gap " << gc << " (tol 5e-6); analytic-pipeline rel " << ra
           << " (tol 1e-9)";
        criterion(5, gm <= 5e-6 && gc <= 5e-6 && ra <= 1e-9, os.str());
    }

    // 6. decoherent-transport 2D walk goldens
    {
        zoo::Example2Params p;  // symmetric dephasing rates 0.5/0.5
        const auto report = clt::clt_report(zoo::build_example2(p));
        const double g_mx = std::abs(report.m[0] - 0.0009);
        const double g_my = std::abs(report.m[1] - 0.0);
        const double g_cxx = std::abs(report.C(0, 0) - 0.00261);
        const double g_cxy = std::abs(report.C(0, 1) - (-0.00011));
        const double g_cyy = std::abs(report.C(1, 1) - 0.05);
        const double g_cyy_exact =
            std::abs(report.C(1, 1) - p.delta * (p.gamma_y_plus + p.gamma_y_minus));
        const bool pass = g_mx <= 5e-6 && g_my <= 5e-6 && g_cxx <= 5e-6 && g_cxy <= 5e-6 &&
                          g_cyy <= 5e-6 && g_cyy_exact <= 1e-12;
        std::ostringstream os;
        os << "m gaps (" << g_mx << ", " << g_my << "), C_xx gap " << g_cxx << ", C_yy gap "
           << g_cyy << " with exact-rate-sum gap " << g_cyy_exact << "; C_xy = "
           << report.C(0, 1) << " vs reference -0.00011 (gap " << g_cxy << ")";
        if (g_cxy > 5e-6)
            os << " — the reference off-diagonal is inconsistent with m_y = 0 at equal "
                  "dephasing rates (it matches rates 0.6/0.4); see the decisions ledger";
        criterion(6, pass, os.str());
    }

    // 7. two-axis dissipative 2D walk goldens
    {
        zoo::Example3Params p;
        const auto report = clt::clt_report(zoo::build_example3(p));
        const double gaps[] = {std::abs(report.m[0] - 0.00102), std::abs(report.m[1] - 0.00083),
                               std::abs(report.C(0, 0) - 0.01829),
                               std::abs(report.C(0, 1) + 0.01531),
                               std::abs(report.C(1, 1) - 0.01775)};
        bool pass = true;
        double worst = 0.0;
        for (const double g : gaps) {
            pass = pass && g <= 5e-6;
            worst = std::max(worst, g);
        }
        std::ostringstream os;
        os << "m and C entrywise, worst gap " << worst << " (tol 5e-6)";
        criterion(7, pass, os.str());
    }

    // 8. trajectory ensemble consistency
    {
        const auto t0 = Clock::now();
        const auto report = clt::clt_report(line);
        const auto stats = traj::ensemble_stats(line, traj::initial_trajectory_state(line), 1000,
                                                100000, 2024, report.m);
        const double dt = seconds_since(t0);
        const double gap = std::abs(stats.scaled_cov(0, 0) - 1.04167);
        const double bound = 4.0 * stats.scaled_cov_stderr(0, 0);
        std::ostringstream os;
        os << "scaled covariance " << stats.scaled_cov(0, 0) << ", |gap| " << gap << " <= 4 se "
           << bound << ", " << dt << " s (budget 120)";
        criterion(8, gap <= bound && dt < 120.0, os.str());
    }

    // 9. branch enumeration equals density evolution
    {
        const auto out = traj::enumerate_branches(line, Site{0}, maximally_mixed(2), 6);
        const auto direct = evolve(line, default_initial_state(line), 6);
        double worst = 0.0;
        for (const auto& [x, tau] : direct.sites) {
            const auto it = out.averaged.sites.find(x);
            worst = std::max(worst, it == out.averaged.sites.end()
                                        ? linalg::max_abs(tau)
                                        : linalg::max_abs(tau - it->second));
        }
        std::ostringstream os;
        os << "six-step branch sum vs evolution, worst block gap " << worst << " (tol 1e-10)";
        criterion(9, worst <= 1e-10, os.str());
    }

    // 10. property suites
    {
        bool pass = true;
        std::ostringstream os;

        // trace preservation per step and accumulated
        {
            LatticeState state = default_initial_state(line);
            double worst = 0.0;
            for (int t = 0; t < 300; ++t) {
                const double before = state.total_trace();
                state = step_lattice(line, state);
                worst = std::max(worst, std::abs(state.total_trace() - before));
            }
            const auto deep = evolve(line, default_initial_state(line), 10000);
            const double drift = std::abs(deep.total_trace() - 1.0);
            double min_ev = 0.0;
            for (const auto& [x, tau] : deep.sites)
                min_ev = std::min(min_ev, linalg::min_eigenvalue(tau));
            os << "trace/step " << worst << " (tol 1e-12), drift(1e4) " << drift
               << " (tol 1e-10), min eigenvalue " << min_ev << " (tol -1e-10)";
            pass = pass && worst <= 1e-12 && drift <= 1e-10 && min_ev >= -1e-10;
        }

        // gauge invariance of the covariance
        {
            traj::Xoshiro256pp rng(555);
            double worst = 0.0;
            for (std::uint64_t seed : {71ull, 72ull, 73ull}) {
                WalkModel model;
                {
                    // random exactly normalized model (whitened Kraus set)
                    traj::Xoshiro256pp g(seed);
                    std::vector<Matrix> ops;
                    for (int j = 0; j < 3; ++j) {
                        Matrix A(2, 2);
                        for (int r = 0; r < 2; ++r)
                            for (int c = 0; c < 2; ++c)
                                A(r, c) = Complex(g.uniform01() - 0.5, g.uniform01() - 0.5);
                        ops.push_back(A);
                    }
                    Matrix S = Matrix::Zero(2, 2);
                    for (const auto& A : ops) S += A.adjoint() * A;
                    Eigen::SelfAdjointEigenSolver<Matrix> es(S);
                    const Matrix w = es.operatorInverseSqrt();
                    for (auto& A : ops) A = A * w;
                    model = make_walk_model(1, std::move(ops), 1e-12);
                }
                const Matrix rho = clt::steady_state(model);
                const auto m = clt::mean_vector(model, rho);
                auto sol = clt::solve_L(model, rho, m);
                const RealMatrix base = clt::covariance(model, rho, m, sol.L);
                for (auto& L : sol.L)
                    L += (2.0 * rng.uniform01() - 1.0) * Matrix::Identity(2, 2);
                const RealMatrix moved = clt::covariance(model, rho, m, sol.L);
                worst = std::max(worst, (base - moved).cwiseAbs().maxCoeff());
            }
            os << "; gauge shift " << worst << " (tol 1e-10)";
            pass = pass && worst <= 1e-10;
        }

        // the identity direction spans the kernel of the vectorized system
        {
            const Matrix K =
                Matrix::Identity(4, 4) - linalg::dual_map_matrix(line);
            const double witness =
                (K * linalg::vec_rows(Matrix::Identity(2, 2))).cwiseAbs().maxCoeff();
            os << "; kernel witness " << witness << " (tol 1e-12)";
            pass = pass && witness <= 1e-12;
        }

        // closed forms against the pipeline on 100 random catalog draws
        {
            traj::Xoshiro256pp rng(808);
            double worst = 0.0;
            for (int trial = 0; trial < 34; ++trial) {
                zoo::CircleParams p;
                p.gamma = 0.01 + 0.99 * rng.uniform01();
                p.nbar = 3.0 * rng.uniform01();
                p.lambda = 0.05 + 0.95 * rng.uniform01();
                p.delta = 0.01 + 0.09 * rng.uniform01();
                p.n_vec = unit_vector(rng);
                const auto report = clt::clt_report(zoo::build_circle(p));
                const auto [m, s2] = zoo::circle_analytic(p);
                worst = std::max({worst, rel_gap(report.m[0], m), rel_gap(report.C(0, 0), s2)});
            }
            for (int trial = 0; trial < 33; ++trial) {
                zoo::Example2Params p;
                p.gamma = 0.01 + 0.99 * rng.uniform01();
                p.gamma_y_plus = 0.01 + 0.99 * rng.uniform01();
                p.gamma_y_minus = 0.01 + 0.99 * rng.uniform01();
                p.nbar = 3.0 * rng.uniform01();
                p.lambda = 0.05 + 0.95 * rng.uniform01();
                p.delta = 0.01 + 0.09 * rng.uniform01();
                p.n_vec = unit_vector(rng);
                const auto report = clt::clt_report(zoo::build_example2(p));
                const auto [m, C] = zoo::example2_analytic(p);
                worst = std::max({worst, rel_gap(report.m[0], m[0]), rel_gap(report.m[1], m[1]),
                                  rel_gap(report.C(0, 0), C(0, 0)),
                                  rel_gap(report.C(0, 1), C(0, 1)),
                                  rel_gap(report.C(1, 1), C(1, 1))});
            }
            for (int trial = 0; trial < 33; ++trial) {
                zoo::Example3Params p;
                p.gamma_x = 0.01 + 0.99 * rng.uniform01();
                p.gamma_y = 0.01 + 0.99 * rng.uniform01();
                p.nbar = 3.0 * rng.uniform01();
                p.lambda = 0.05 + 0.95 * rng.uniform01();
                p.delta = 0.01 + 0.09 * rng.uniform01();
                const auto report = clt::clt_report(zoo::build_example3(p));
                const auto [m, C] = zoo::example3_analytic(p);
                worst = std::max({worst, rel_gap(report.m[0], m[0]), rel_gap(report.m[1], m[1]),
                                  rel_gap(report.C(0, 0), C(0, 0)),
                                  rel_gap(report.C(0, 1), C(0, 1)),
                                  rel_gap(report.C(1, 1), C(1, 1))});
            }
            os << "; 100-draw analytic-pipeline rel " << worst << " (tol 1e-8)";
            pass = pass && worst <= 1e-8;
        }

        // discretization scaling exponents
        {
            std::vector<double> deltas{0.08, 0.04, 0.02, 0.01};
            std::vector<double> norm_res, gksl_res;
            for (const double dt : deltas) {
                zoo::CircleParams p;
                p.delta = dt;
                const WalkModel model = zoo::build_circle(p);
                norm_res.push_back(normalization_residual(model));
                gksl_res.push_back(zoo::gksl_residual(model, clt::steady_state(model)));
            }
            const double e_norm = fitted_exponent(deltas, norm_res);
            const double e_gksl = fitted_exponent(deltas, gksl_res);
            os << "; scaling exponents " << e_norm << " (target 2 +/- 0.3) and " << e_gksl
               << " (target 1 +/- 0.3)";
            pass = pass && std::abs(e_norm - 2.0) <= 0.3 && std::abs(e_gksl - 1.0) <= 0.3;
        }

        criterion(10, pass, os.str());
    }

    std::cout << (g_failures == 0 ? "all criteria passed"
                                  : std::to_string(g_failures) + " criterion(s) failed")
              << "\n";
    return g_failures;
}
