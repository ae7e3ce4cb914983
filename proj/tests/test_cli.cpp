#include "doctest.h"

#include "oqw/io.hpp"
#include "oqw/types.hpp"
#include "oqw/zoo.hpp"
#include "test_helpers.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(OQW_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string write_temp_model(const oqw::io::json& j, const char* name) {
    const std::string path = std::string("/tmp/oqw_cli_test_") + name + ".json";
    std::ofstream out(path);
    out << j.dump();
    return path;
}

}  // namespace

TEST_CASE("cli exit codes form a stable contract") {
    CHECK(run("validate --model paper-line") == 0);
    CHECK(run("clt --model circle") == 0);
    CHECK(run("definitely-not-a-command") == 1);
    CHECK(run("validate") == 1);  // missing required --model

    // corrupted operators: validation failure
    oqw::io::json corrupt = oqw::io::model_to_json(oqw::zoo::paper_line_walk());
    corrupt["ops"][0][0][0][0] = 0.9;  // breaks the normalization
    CHECK(run("validate --model " + write_temp_model(corrupt, "corrupt")) == 2);

    // fully lazy walk: no unique steady state
    const oqw::io::json lazy = oqw::io::model_to_json(oqw::testutil::fully_lazy_model());
    CHECK(run("clt --model " + write_temp_model(lazy, "lazy")) == 3);
}

TEST_CASE("cli evolve writes the distribution artifacts") {
    const int code = run("evolve --model paper-line --steps 11 --out /tmp/oqw_cli_test_evolve");
    CHECK(code == 0);
    std::ifstream csv("/tmp/oqw_cli_test_evolve.csv");
    REQUIRE(csv.good());
    std::string header;
    std::getline(csv, header);
    CHECK(header == "x_1,p");
    std::ifstream js("/tmp/oqw_cli_test_evolve.json");
    REQUIRE(js.good());
    oqw::io::json j;
    js >> j;
    CHECK(j.at("format") == "evolve-report/1");
    // reference row: variance per step with the first application as step zero
    CHECK(std::abs(j.at("cov").at(0).at(0).get<double>() / 10.0 - 1.08333) <= 1e-5);
    std::remove("/tmp/oqw_cli_test_evolve.csv");
    std::remove("/tmp/oqw_cli_test_evolve.json");
}

TEST_CASE("cli traj is reproducible for a fixed seed") {
    const std::string args =
        "traj --model paper-line --steps 50 --trajectories 400 --seed 9 --out ";
    CHECK(run(args + "/tmp/oqw_cli_test_t1.json") == 0);
    CHECK(run(args + "/tmp/oqw_cli_test_t2.json") == 0);
    std::ifstream a("/tmp/oqw_cli_test_t1.json"), b("/tmp/oqw_cli_test_t2.json");
    oqw::io::json ja, jb;
    a >> ja;
    b >> jb;
    CHECK(ja == jb);
    CHECK(ja.at("format") == "traj-report/1");
    std::remove("/tmp/oqw_cli_test_t1.json");
    std::remove("/tmp/oqw_cli_test_t2.json");
}

TEST_CASE("cli compare passes the line walk against its analytics") {
    CHECK(run("compare --model paper-line --steps 1000 --trajectories 0 --tol 1e-3") == 0);
    // an absurd tolerance must fail with the residual exit code
    CHECK(run("compare --model paper-line --steps 10 --trajectories 0 --tol 1e-12") == 4);
}
