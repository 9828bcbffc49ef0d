#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "orcafl/controllers.hpp"
#include "orcafl/fis_json.hpp"

namespace fs = std::filesystem;

namespace {

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

CommandResult run_cli(const std::string& args) {
    const fs::path out = fs::temp_directory_path() / "orcafl_cli_out.txt";
    const std::string cmd =
        std::string(ORCAFL_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    CommandResult result;
    result.exit_code = WEXITSTATUS(status);
    std::ifstream in(out);
    std::ostringstream buf;
    buf << in.rdbuf();
    result.output = buf.str();
    return result;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::size_t count_lines(const std::string& text) {
    std::size_t lines = 0;
    for (char c : text) {
        if (c == '\n') {
            ++lines;
        }
    }
    return lines;
}

}  // namespace

TEST_CASE("run subcommand emits schema-correct metrics") {
    const auto result = run_cli("run --scenario circle --mode orca --vmax 10 --seed 1");
    REQUIRE(result.exit_code == 0);
    CHECK(result.output.rfind("scenario,mode,vmax,seed,steps,sim_elapsed_s,wall_elapsed_s,"
                              "obstacles,agents,collisions,converged",
                              0) == 0);
    // circle at vmax 10 finishes clean.
    CHECK(result.output.find("circle,orca,10,1,") != std::string::npos);
    CHECK(result.output.find(",0,16,0,true") != std::string::npos);
}

TEST_CASE("run writes trajectory and SVG artifacts") {
    const fs::path dir = fs::temp_directory_path() / "orcafl_cli_test";
    fs::create_directories(dir);
    const fs::path traj = dir / "t.jsonl";
    const fs::path svg = dir / "t.svg";
    const auto result = run_cli("run --scenario circle --mode orca-fl --vmax 10 --svg-out " +
                                svg.string() + " --traj-out " + traj.string());
    REQUIRE(result.exit_code == 0);
    const std::string svg_text = slurp(svg);
    std::size_t polylines = 0;
    for (std::size_t pos = svg_text.find("<polyline"); pos != std::string::npos;
         pos = svg_text.find("<polyline", pos + 1)) {
        ++polylines;
    }
    CHECK(polylines == 16);
    const std::string traj_text = slurp(traj);
    CHECK(traj_text.find("\"step\":0") != std::string::npos);
    CHECK(traj_text.find("\"done\":true") != std::string::npos);
}

TEST_CASE("missing scenario file exits 2 and names the path") {
    const auto result = run_cli("run --scenario /no/such/scenario.json");
    CHECK(result.exit_code == 2);
    CHECK(result.output.find("/no/such/scenario.json") != std::string::npos);
}

TEST_CASE("identical run specs produce byte-identical outputs across workers") {
    const fs::path dir = fs::temp_directory_path() / "orcafl_cli_test";
    fs::create_directories(dir);
    const fs::path a = dir / "a.jsonl";
    const fs::path b = dir / "b.jsonl";
    REQUIRE(run_cli("run --scenario circle --seed 7 --workers 1 --traj-out " + a.string())
                .exit_code == 0);
    REQUIRE(run_cli("run --scenario circle --seed 7 --workers 4 --traj-out " + b.string())
                .exit_code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(!slurp(a).empty());
}

TEST_CASE("compare emits per-seed rows plus median summaries") {
    const auto result = run_cli(
        "compare --scenarios circle --modes orca,orca-fl --vmax-list 10 --seeds 2 "
        "--max-steps 300");
    REQUIRE(result.exit_code == 0);
    // header + 2 modes x 2 seeds + 2 medians
    CHECK(count_lines(result.output) == 7);
    CHECK(result.output.find(",median,") != std::string::npos);
}

TEST_CASE("tune with zero episodes reproduces the built-in controller") {
    const fs::path dir = fs::temp_directory_path() / "orcafl_cli_test";
    fs::create_directories(dir);
    const fs::path out = dir / "tuned.json";
    const auto result = run_cli("tune --which flc1 --scenario circle --episodes 0 --out " +
                                out.string());
    REQUIRE(result.exit_code == 0);
    CHECK(result.output.find("episodes,0") != std::string::npos);
    const auto reparsed = orcafl::fis::parse_fis_file(out);
    CHECK(reparsed == orcafl::fis::build_flc1());
}

TEST_CASE("print-config dumps the resolved configuration") {
    const auto result = run_cli(
        "run --scenario circle --print-config --max-steps 5 --tau 3.5");
    REQUIRE(result.exit_code == 0);
    CHECK(result.output.find("\"tau\": 3.5") != std::string::npos);
    CHECK(result.output.find("\"flc1\": \"built-in\"") != std::string::npos);
}
