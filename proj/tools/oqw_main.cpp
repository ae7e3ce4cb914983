// oqw — command-line front end: validate models, run exact evolution,
// trajectory ensembles, and the Gaussian analytics, and compare the three.
#include "oqw/clt.hpp"
#include "oqw/io.hpp"
#include "oqw/lattice.hpp"
#include "oqw/trajectory.hpp"
#include "oqw/types.hpp"
#include "oqw/zoo.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

// exit codes: 0 success, 1 usage, 2 validation failure, 3 non-unique steady
// state, 4 numerical residual failure
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNonUnique = 3;
constexpr int kExitResidual = 4;

oqw::io::json load_params(const std::string& path) {
    if (path.empty()) return oqw::io::json::object();
    std::ifstream in(path);
    if (!in) throw oqw::StructuralError("cannot open params file: " + path);
    oqw::io::json j;
    in >> j;
    return j;
}

std::array<double, 3> param_direction(const oqw::io::json& p) {
    std::array<double, 3> n{0.0, 1.0, 0.0};
    if (p.contains("n_vec")) {
        const auto& v = p.at("n_vec");
        for (int i = 0; i < 3; ++i) n[static_cast<std::size_t>(i)] = v.at(i).get<double>();
    }
    return n;
}

oqw::WalkModel resolve_model(const std::string& spec, const std::string& params_path) {
    const oqw::io::json p = load_params(params_path);
    if (spec == "paper-line") return oqw::zoo::paper_line_walk();
    if (spec == "circle") {
        oqw::zoo::CircleParams cp;
        cp.gamma = p.value("gamma", cp.gamma);
        cp.nbar = p.value("nbar", cp.nbar);
        cp.lambda = p.value("lambda", cp.lambda);
        cp.delta = p.value("delta", cp.delta);
        cp.n_vec = param_direction(p);
        return oqw::zoo::build_circle(cp);
    }
    if (spec == "example2") {
        oqw::zoo::Example2Params ep;
        ep.gamma = p.value("gamma", ep.gamma);
        ep.gamma_y_plus = p.value("gamma_y_plus", ep.gamma_y_plus);
        ep.gamma_y_minus = p.value("gamma_y_minus", ep.gamma_y_minus);
        ep.nbar = p.value("nbar", ep.nbar);
        ep.lambda = p.value("lambda", ep.lambda);
        ep.delta = p.value("delta", ep.delta);
        ep.n_vec = param_direction(p);
        return oqw::zoo::build_example2(ep);
    }
    if (spec == "example3") {
        oqw::zoo::Example3Params ep;
        ep.gamma_x = p.value("gamma_x", ep.gamma_x);
        ep.gamma_y = p.value("gamma_y", ep.gamma_y);
        ep.nbar = p.value("nbar", ep.nbar);
        ep.lambda = p.value("lambda", ep.lambda);
        ep.delta = p.value("delta", ep.delta);
        return oqw::zoo::build_example3(ep);
    }
    return oqw::io::load_model_file(spec);
}

void emit(const oqw::io::json& doc, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << doc.dump(2) << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw oqw::StructuralError("cannot write: " + out_path);
        out << doc.dump(2) << "\n";
    }
}

// CLT-scaled variance of the exactly evolved distribution; the first map
// application is counted as step zero, i.e. Var after n+1 applications over n.
oqw::RealMatrix evolved_scaled_cov(const oqw::WalkModel& model, std::uint64_t n) {
    const auto final_state = oqw::evolve(model, oqw::default_initial_state(model), n + 1);
    const auto mom = oqw::distribution_moments(oqw::position_distribution(final_state));
    return mom.cov / static_cast<double>(n);
}

int cmd_validate(const std::string& model_spec, const std::string& params,
                 std::optional<double> tol_override) {
    oqw::WalkModel model = resolve_model(model_spec, params);
    if (tol_override) model.tol_norm = *tol_override;
    const double res = oqw::normalization_residual(model);
    std::cout << "normalization residual: " << res << " (tolerance " << model.tol_norm << ")\n";
    return res <= model.tol_norm ? kExitOk : kExitValidation;
}

int cmd_evolve(const std::string& model_spec, const std::string& params, std::uint64_t steps,
               const std::string& out) {
    const oqw::WalkModel model = resolve_model(model_spec, params);
    const auto state = oqw::evolve(model, oqw::default_initial_state(model), steps);
    const auto dist = oqw::position_distribution(state);
    const auto mom = oqw::distribution_moments(dist);

    oqw::io::json j;
    j["format"] = "evolve-report/1";
    j["steps"] = steps;
    j["total_probability"] = dist.total();
    j["mean"] = oqw::io::json::array();
    for (int i = 0; i < model.d; ++i) j["mean"].push_back(mom.mean[i]);
    j["cov"] = oqw::io::json::array();
    for (int i = 0; i < model.d; ++i) {
        oqw::io::json row = oqw::io::json::array();
        for (int k = 0; k < model.d; ++k) row.push_back(mom.cov(i, k));
        j["cov"].push_back(row);
    }
    if (steps > 0) {
        j["cov_per_step"] = oqw::io::json::array();
        for (int i = 0; i < model.d; ++i) {
            oqw::io::json row = oqw::io::json::array();
            for (int k = 0; k < model.d; ++k)
                row.push_back(mom.cov(i, k) / static_cast<double>(steps));
            j["cov_per_step"].push_back(row);
        }
    }
    if (out.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        emit(j, out + ".json");
        std::ofstream csv(out + ".csv");
        if (!csv) throw oqw::StructuralError("cannot write: " + out + ".csv");
        oqw::io::write_distribution_csv(dist, csv);
        std::cout << "wrote " << out << ".json and " << out << ".csv\n";
    }
    return kExitOk;
}

int cmd_clt(const std::string& model_spec, const std::string& params, const std::string& out,
            const std::string& overlay) {
    const oqw::WalkModel model = resolve_model(model_spec, params);
    const auto report = oqw::clt::clt_report(model);
    emit(oqw::io::clt_report_to_json(report), out);
    if (!overlay.empty()) {
        std::ofstream csv(overlay);
        if (!csv) throw oqw::StructuralError("cannot write: " + overlay);
        oqw::io::write_gaussian_grid_csv(report.m, report.C, csv);
    }
    return kExitOk;
}

int cmd_traj(const std::string& model_spec, const std::string& params, std::uint64_t steps,
             std::uint64_t trajectories, std::uint64_t seed, const std::string& out,
             const std::string& dump_positions) {
    const oqw::WalkModel model = resolve_model(model_spec, params);
    const auto report = oqw::clt::clt_report(model);
    const auto init = oqw::traj::initial_trajectory_state(model);
    const auto stats =
        oqw::traj::ensemble_stats(model, init, steps, trajectories, seed, report.m);
    emit(oqw::io::traj_report_to_json(stats), out);
    if (!dump_positions.empty()) {
        const auto records = oqw::traj::sample_positions(model, init, steps, trajectories, seed);
        std::ofstream csv(dump_positions);
        if (!csv) throw oqw::StructuralError("cannot write: " + dump_positions);
        oqw::io::write_positions_csv(records, model.d, csv);
    }
    return kExitOk;
}

int cmd_compare(const std::string& model_spec, const std::string& params, std::uint64_t steps,
                std::uint64_t trajectories, std::uint64_t seed, double tol,
                const std::string& out) {
    const oqw::WalkModel model = resolve_model(model_spec, params);
    const auto report = oqw::clt::clt_report(model);
    const oqw::RealMatrix evolved = evolved_scaled_cov(model, steps);

    oqw::io::json j;
    j["format"] = "compare-report/1";
    j["steps"] = steps;
    j["tolerance"] = tol;
    j["analytic_m"] = oqw::io::json::array();
    for (int i = 0; i < model.d; ++i) j["analytic_m"].push_back(report.m[i]);

    bool pass = true;
    std::cout << "entry            analytic        evolved         |diff|     verdict\n";
    oqw::io::json entries = oqw::io::json::array();
    for (int i = 0; i < model.d; ++i) {
        for (int k = i; k < model.d; ++k) {
            const double a = report.C(i, k), e = evolved(i, k);
            const double diff = std::abs(a - e);
            const bool ok = diff <= tol;
            pass = pass && ok;
            std::cout << "C[" << i + 1 << "," << k + 1 << "]  " << std::scientific << a << "  "
                      << e << "  " << diff << "  " << (ok ? "pass" : "FAIL") << "\n"
                      << std::defaultfloat;
            entries.push_back({{"entry", "C"},
                               {"i", i + 1},
                               {"j", k + 1},
                               {"analytic", a},
                               {"evolved", e},
                               {"diff", diff},
                               {"pass", ok}});
        }
    }

    if (trajectories > 0) {
        const auto stats = oqw::traj::ensemble_stats(
            model, oqw::traj::initial_trajectory_state(model), steps, trajectories, seed,
            report.m);
        for (int i = 0; i < model.d; ++i) {
            for (int k = i; k < model.d; ++k) {
                const double a = report.C(i, k), t = stats.scaled_cov(i, k);
                const double se = stats.scaled_cov_stderr(i, k);
                const bool ok = std::abs(a - t) <= 4.0 * se;
                pass = pass && ok;
                std::cout << "traj C[" << i + 1 << "," << k + 1 << "]  " << std::scientific << a
                          << "  " << t << "  " << std::abs(a - t) << " (4se=" << 4.0 * se << ")  "
                          << (ok ? "pass" : "FAIL") << "\n"
                          << std::defaultfloat;
                entries.push_back({{"entry", "traj_C"},
                                   {"i", i + 1},
                                   {"j", k + 1},
                                   {"analytic", a},
                                   {"trajectory", t},
                                   {"stderr", se},
                                   {"pass", ok}});
            }
        }
    }
    j["entries"] = std::move(entries);
    j["pass"] = pass;
    if (!out.empty()) emit(j, out);
    return pass ? kExitOk : kExitResidual;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lazy open quantum walk simulator"};
    app.require_subcommand(1);

    std::string model_spec, params, out, overlay, dump_positions;
    std::uint64_t steps = 100, trajectories = 10000, seed = 1;
    double tol = 1e-3;
    std::optional<double> tol_override;

    auto add_model_flags = [&](CLI::App* cmd) {
        cmd->add_option("--model", model_spec,
                        "zoo name (paper-line, circle, example2, example3) or model JSON path")
            ->required();
        cmd->add_option("--params", params, "JSON parameter file for zoo models");
    };

    auto* validate = app.add_subcommand("validate", "check the normalization condition");
    add_model_flags(validate);
    validate->add_option("--tol", tol_override, "override the model's normalization tolerance");

    auto* evolve = app.add_subcommand("evolve", "exact density-matrix evolution");
    add_model_flags(evolve);
    evolve->add_option("--steps", steps, "number of map applications");
    evolve->add_option("--out", out, "output prefix (.json and .csv)");

    auto* cltcmd = app.add_subcommand("clt", "steady state, mean, L operators, covariance");
    add_model_flags(cltcmd);
    cltcmd->add_option("--out", out, "write the report JSON here (default stdout)");
    cltcmd->add_option("--overlay", overlay, "write a sampled Gaussian grid CSV here");

    auto* trajcmd = app.add_subcommand("traj", "Monte Carlo trajectory ensemble");
    add_model_flags(trajcmd);
    trajcmd->add_option("--steps", steps, "steps per trajectory");
    trajcmd->add_option("--trajectories", trajectories, "number of trajectories");
    trajcmd->add_option("--seed", seed, "ensemble seed");
    trajcmd->add_option("--out", out, "write the report JSON here (default stdout)");
    trajcmd->add_option("--dump-positions", dump_positions,
                        "write per-step positions CSV here (large)");

    auto* compare = app.add_subcommand("compare", "analytic vs evolved vs trajectory moments");
    add_model_flags(compare);
    compare->add_option("--steps", steps, "steps for the evolved/trajectory statistics");
    compare->add_option("--trajectories", trajectories,
                        "trajectories (0 disables the Monte Carlo column)");
    compare->add_option("--seed", seed, "ensemble seed");
    compare->add_option("--tol", tol, "pass/fail tolerance for analytic vs evolved");
    compare->add_option("--out", out, "write the comparison JSON here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (validate->parsed()) return cmd_validate(model_spec, params, tol_override);
        if (evolve->parsed()) return cmd_evolve(model_spec, params, steps, out);
        if (cltcmd->parsed()) return cmd_clt(model_spec, params, out, overlay);
        if (trajcmd->parsed())
            return cmd_traj(model_spec, params, steps, trajectories, seed, out, dump_positions);
        if (compare->parsed())
            return cmd_compare(model_spec, params, steps, trajectories, seed, tol, out);
    } catch (const oqw::NonUniqueSteadyState& e) {
        std::cerr << "error (non-unique steady state): " << e.what() << "\n";
        return kExitNonUnique;
    } catch (const oqw::NoPhysicalFixedPoint& e) {
        std::cerr << "error (no physical fixed point): " << e.what() << "\n";
        return kExitResidual;
    } catch (const oqw::InconsistentSystem& e) {
        std::cerr << "error (inconsistent system): " << e.what() << "\n";
        return kExitResidual;
    } catch (const oqw::NumericalFailure& e) {
        std::cerr << "error (numerical failure): " << e.what() << "\n";
        return kExitResidual;
    } catch (const oqw::StructuralError& e) {
        std::cerr << "error (invalid model or input): " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
