#include "oqw/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace oqw::io {

namespace {

void require(bool cond, const std::string& what) {
    if (!cond) throw StructuralError("model file: " + what);
}

std::string render(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

json real_vector_to_json(const RealVector& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

json real_matrix_to_json(const RealMatrix& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

json matrix_to_json(const Matrix& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j)
            row.push_back(json::array({M(i, j).real(), M(i, j).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    require(j.is_array() && !j.empty(), "matrix must be a nonempty array of rows");
    const auto rows = j.size();
    const auto cols = j.at(0).size();
    Matrix M(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        const auto& row = j.at(r);
        require(row.is_array() && row.size() == cols, "ragged matrix rows");
        for (std::size_t c = 0; c < cols; ++c) {
            const auto& entry = row.at(c);
            require(entry.is_array() && entry.size() == 2, "matrix entries must be [re, im]");
            M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                Complex(entry.at(0).get<double>(), entry.at(1).get<double>());
        }
    }
    return M;
}

json model_to_json(const WalkModel& model) {
    json j;
    j["d"] = model.d;
    j["D"] = model.D;
    j["tol_norm"] = model.tol_norm;
    json ops = json::array();
    for (const auto& A : model.ops) ops.push_back(matrix_to_json(A));
    j["ops"] = std::move(ops);
    if (model.micro) {
        json micro;
        micro["H0"] = matrix_to_json(model.micro->H0);
        json q = json::array();
        for (const auto& Q : model.micro->jumps) q.push_back(matrix_to_json(Q));
        micro["Q"] = std::move(q);
        micro["delta"] = model.micro->delta;
        j["microscopic"] = std::move(micro);
    }
    return j;
}

WalkModel model_from_json(const json& j) {
    require(j.is_object(), "document must be an object");
    require(j.contains("d") && j.at("d").is_number_integer(), "missing integer field 'd'");
    require(j.contains("D") && j.at("D").is_number_integer(), "missing integer field 'D'");
    require(j.contains("ops") && j.at("ops").is_array(), "missing array field 'ops'");
    const int d = j.at("d").get<int>();
    const int D = j.at("D").get<int>();
    const double tol = j.value("tol_norm", 1e-12);
    std::vector<Matrix> ops;
    for (const auto& mj : j.at("ops")) ops.push_back(matrix_from_json(mj));
    WalkModel model = make_walk_model(d, std::move(ops), tol);
    require(model.D == D, "field 'D' disagrees with the operator dimensions");
    if (j.contains("microscopic")) {
        const auto& mj = j.at("microscopic");
        MicroscopicSpec spec;
        spec.H0 = matrix_from_json(mj.at("H0"));
        for (const auto& qj : mj.at("Q")) spec.jumps.push_back(matrix_from_json(qj));
        spec.delta = mj.at("delta").get<double>();
        require(spec.lattice_dim() == model.d && spec.coin_dim() == model.D,
                "microscopic block disagrees with the model dimensions");
        model.micro = std::move(spec);
    }
    return model;
}

WalkModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StructuralError("cannot open model file: " + path);
    json j;
    in >> j;
    return model_from_json(j);
}

void save_model_file(const WalkModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw StructuralError("cannot write model file: " + path);
    out << model_to_json(model).dump(2) << "\n";
}

json clt_report_to_json(const clt::CltReport& report) {
    json j;
    j["format"] = "clt-report/1";
    j["rho_inf"] = matrix_to_json(report.rho_inf);
    j["m"] = real_vector_to_json(report.m);
    json lops = json::array();
    for (const auto& L : report.L_ops) lops.push_back(matrix_to_json(L));
    j["L_ops"] = std::move(lops);
    j["C"] = real_matrix_to_json(report.C);
    j["residuals"] = {{"steady_state_residual", report.steady_state_residual},
                      {"L_residual", real_vector_to_json(report.L_residuals)}};
    j["gauge"] = report.gauge;
    j["method"] = report.method;
    return j;
}

json traj_report_to_json(const traj::EnsembleStats& stats) {
    json j;
    j["format"] = "traj-report/1";
    j["n_traj"] = stats.n_traj;
    j["n_steps"] = stats.n_steps;
    j["seed"] = stats.seed;
    j["batches"] = stats.batches;
    j["emp_mean"] = real_vector_to_json(stats.emp_mean);
    j["emp_cov"] = real_matrix_to_json(stats.emp_cov);
    j["scaled_mean"] = real_vector_to_json(stats.scaled_mean);
    j["scaled_cov"] = real_matrix_to_json(stats.scaled_cov);
    j["scaled_cov_stderr"] = real_matrix_to_json(stats.scaled_cov_stderr);
    j["stderr"] = real_vector_to_json(stats.stderr_mean);
    j["kurtosis"] = real_vector_to_json(stats.kurtosis);
    return j;
}

void write_distribution_csv(const Distribution& dist, std::ostream& os) {
    for (int i = 1; i <= dist.d; ++i) os << "x_" << i << ",";
    os << "p\n";
    for (const auto& [x, p] : dist.probs) {
        for (const auto coord : x) os << coord << ",";
        os << render(p) << "\n";
    }
}

void write_positions_csv(const std::vector<traj::TrajectoryRecord>& records, int d,
                         std::ostream& os) {
    os << "traj_id,n";
    for (int i = 1; i <= d; ++i) os << ",x_" << i;
    os << "\n";
    for (const auto& rec : records) {
        os << rec.traj_id << "," << rec.n;
        for (const auto coord : rec.x) os << "," << coord;
        os << "\n";
    }
}

void write_gaussian_grid_csv(const RealVector& m, const RealMatrix& C, std::ostream& os,
                             int points_per_axis) {
    const int d = static_cast<int>(m.size());
    if (d != 1 && d != 2)
        throw StructuralError("gaussian grid emission supports d = 1 and d = 2 only");
    const double span = 4.0;
    if (d == 1) {
        const double sigma = std::sqrt(std::max(C(0, 0), 0.0));
        os << "x,p\n";
        for (int i = 0; i < points_per_axis; ++i) {
            const double x =
                m[0] + sigma * span * (2.0 * i / (points_per_axis - 1.0) - 1.0);
            const double p = sigma > 0.0
                                 ? std::exp(-0.5 * std::pow((x - m[0]) / sigma, 2)) /
                                       (sigma * std::sqrt(2.0 * M_PI))
                                 : (x == m[0] ? 1.0 : 0.0);
            os << render(x) << "," << render(p) << "\n";
        }
        return;
    }
    const RealMatrix Cinv = C.inverse();
    const double det = C.determinant();
    const double norm = 1.0 / (2.0 * M_PI * std::sqrt(std::max(det, 1e-300)));
    const double sx = std::sqrt(std::max(C(0, 0), 0.0));
    const double sy = std::sqrt(std::max(C(1, 1), 0.0));
    os << "x,y,p\n";
    for (int i = 0; i < points_per_axis; ++i) {
        const double x = m[0] + sx * span * (2.0 * i / (points_per_axis - 1.0) - 1.0);
        for (int jv = 0; jv < points_per_axis; ++jv) {
            const double y = m[1] + sy * span * (2.0 * jv / (points_per_axis - 1.0) - 1.0);
            Eigen::Vector2d dx(x - m[0], y - m[1]);
            const double p = norm * std::exp(-0.5 * dx.dot(Cinv * dx));
            os << render(x) << "," << render(y) << "," << render(p) << "\n";
        }
    }
}

}  // namespace oqw::io
