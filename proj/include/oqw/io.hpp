// io.hpp — JSON model files, versioned report documents, and CSV emitters.
#pragma once

#include "oqw/clt.hpp"
#include "oqw/lattice.hpp"
#include "oqw/trajectory.hpp"
#include "oqw/types.hpp"

#include "json.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace oqw::io {

using json = nlohmann::json;

// --------------------------- complex matrices --------------------------------
// A matrix is an array of rows; every entry is a [re, im] pair.

json matrix_to_json(const Matrix& M);
Matrix matrix_from_json(const json& j);

// --------------------------- model files -------------------------------------
// {"d": .., "D": .., "tol_norm": .., "ops": [matrix, ...]} with an optional
// "microscopic": {"H0": matrix, "Q": [matrix, ...], "delta": ..} block.

json model_to_json(const WalkModel& model);
WalkModel model_from_json(const json& j);
WalkModel load_model_file(const std::string& path);
void save_model_file(const WalkModel& model, const std::string& path);

// --------------------------- reports ------------------------------------------

// "clt-report/1"
json clt_report_to_json(const clt::CltReport& report);

// "traj-report/1"
json traj_report_to_json(const traj::EnsembleStats& stats);

// --------------------------- CSV ----------------------------------------------

// Header "x_1,...,x_d,p"; rows lexicographic in the site coordinates; values
// rendered with enough digits to round-trip exactly.
void write_distribution_csv(const Distribution& dist, std::ostream& os);

// "traj_id,n,x_1..x_d" endpoint dump.
void write_positions_csv(const std::vector<traj::TrajectoryRecord>& records, int d,
                         std::ostream& os);

// Sampled Gaussian density grid from analytic (m, C); plot-ready.
// d = 1: "x,p"; d = 2: "x,y,p".
void write_gaussian_grid_csv(const RealVector& m, const RealMatrix& C, std::ostream& os,
                             int points_per_axis = 201);

}  // namespace oqw::io
