#include "dooc/config.hpp"
#include "dooc/csv.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string binary() {
    const char* path = std::getenv("DOOCSIM_BIN");
    REQUIRE(path != nullptr);
    return path;
}

std::string scenario_dir() {
    const char* path = std::getenv("DOOC_SCENARIO_DIR");
    REQUIRE(path != nullptr);
    return path;
}

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

CommandResult run_cli(const std::string& args) {
    const fs::path log = fs::temp_directory_path() / "doocsim_cli_test.log";
    const std::string cmd = binary() + " " + args + " > " + log.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    CommandResult result;
    result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    std::ifstream file(log);
    std::stringstream buffer;
    buffer << file.rdbuf();
    result.output = buffer.str();
    return result;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("run writes trajectory and metadata artifacts") {
    const fs::path out = fresh_dir("dooc_cli_run");
    const auto result =
        run_cli("run --scenario " + scenario_dir() + "/coordinator_only.json --out " +
                out.string() + " --set integration.t_final=1.0");
    CHECK(result.exit_code == 0);
    CHECK(fs::exists(out / "trajectory.csv"));
    CHECK(fs::exists(out / "metrics.json"));
}

TEST_CASE("run metadata reflects overrides") {
    const fs::path out = fresh_dir("dooc_cli_override");
    const auto result = run_cli("run --scenario " + scenario_dir() +
                                "/five_agent.json --out " + out.string() +
                                " --set controller.K=10 --set integration.t_final=0.01");
    REQUIRE(result.exit_code == 0);
    std::ifstream meta(out / "metrics.json");
    const auto doc = nlohmann::json::parse(meta);
    CHECK(doc["scenario"]["controller"]["K"] == 10.0);
}

TEST_CASE("validate rejects non-Hurwitz gains with exit 2") {
    // bad_gains: benchmark scenario with a sign-flipped gamma polynomial
    nlohmann::json doc = dooc::default_closed_loop_json();
    doc["controller"]["gamma"] =
        nlohmann::json::array({{-1.0}, {-1.0}, {-1.0, 2.0}, {-1.0, 2.0}, {-1.0, 2.0}});
    const fs::path bad = fs::temp_directory_path() / "bad_gains.json";
    dooc::write_text_file(bad.string(), doc.dump(2));

    const auto validate = run_cli("validate --scenario " + bad.string());
    CHECK(validate.exit_code == 2);
    CHECK(validate.output.find("Hurwitz") != std::string::npos);

    const auto run_result = run_cli("run --scenario " + bad.string() + " --out " +
                                    fresh_dir("dooc_cli_bad").string());
    CHECK(run_result.exit_code == 2);
}

TEST_CASE("validate never integrates and passes the shipped scenarios") {
    CHECK(run_cli("validate --scenario " + scenario_dir() + "/five_agent.json").exit_code == 0);
    CHECK(run_cli("validate --scenario " + scenario_dir() + "/coordinator_only.json").exit_code ==
          0);
}

TEST_CASE("unknown override keys exit with the validation code") {
    const auto result = run_cli("run --scenario " + scenario_dir() +
                                "/five_agent.json --set controller.KK=1");
    CHECK(result.exit_code == 2);
}

TEST_CASE("dry run prints the resolved scenario and writes nothing") {
    const fs::path out = fresh_dir("dooc_cli_dry");
    const auto result = run_cli("run --scenario " + scenario_dir() +
                                "/five_agent.json --dry-run --out " + out.string());
    CHECK(result.exit_code == 0);
    CHECK_FALSE(fs::exists(out));
    CHECK(result.output.find("\"controller\"") != std::string::npos);
}

TEST_CASE("oracle prints the minimizer and the left eigenvector") {
    const auto result = run_cli("oracle --scenario " + scenario_dir() + "/five_agent.json");
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("s* (bisection on aggregate gradient) = 2") != std::string::npos);
    CHECK(result.output.find("0.18181818181818") != std::string::npos);  // 2/11
    CHECK(result.output.find("Sylvester residual") != std::string::npos);
}

TEST_CASE("oracle reports disconnected graphs with exit 2") {
    nlohmann::json doc = dooc::default_coordinator_json();
    doc["graph"]["edges"] = nlohmann::json::array({{{"from", 1}, {"to", 2}}});
    const fs::path path = fs::temp_directory_path() / "disconnected.json";
    dooc::write_text_file(path.string(), doc.dump(2));
    const auto result = run_cli("oracle --scenario " + path.string());
    CHECK(result.exit_code == 2);
}

TEST_CASE("sweep fans out over parameter lists") {
    const fs::path out = fresh_dir("dooc_cli_sweep");
    const auto result = run_cli("sweep --scenario " + scenario_dir() +
                                "/coordinator_only.json --out " + out.string() +
                                " --set integration.t_final=0.5" +
                                " --param coordinator.alpha1=0.5,1.0");
    CHECK(result.exit_code == 0);
    int artifact_count = 0;
    for (const auto& entry : fs::directory_iterator(out))
        if (fs::exists(entry.path() / "trajectory.csv")) ++artifact_count;
    CHECK(artifact_count == 2);
}

TEST_CASE("reproduce-paper dry run prints both scenarios") {
    const auto result = run_cli("reproduce-paper --dry-run");
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("coordinator_only") != std::string::npos);
    CHECK(result.output.find("output_feedback") != std::string::npos);
}

TEST_CASE("runtime divergence exits with code 3 and names the block") {
    // Cubic chain with no meaningful feedback authority escapes in finite time.
    nlohmann::json doc = dooc::default_closed_loop_json();
    doc["graph"] = {{"n", 1}, {"edges", nlohmann::json::array()}};
    doc["costs"] = nlohmann::json::array({{{"kind", "quadratic"}, {"q", 0.25}, {"b", 1.5}}});
    doc["coordinator"]["y_r0"] = {1.5};
    doc["plants"] = nlohmann::json::array({{{"family", "third_order_chain"},
                                            {"p_bar", {1.0, 1.0, 1.0}},
                                            {"b", 1.0},
                                            {"w", {-2.0, -1.0, 4.0}},
                                            {"x0", {3.0, 0.0, 0.0}}}});
    doc["observer"] = {{"h", 100.0}, {"c", nlohmann::json::array({{64.0, 48.0, 12.0}})}};
    doc["controller"]["K"] = 1e-6;
    doc["controller"]["delta"] = 1e-6;
    doc["integration"]["t_final"] = 5.0;
    const fs::path path = fs::temp_directory_path() / "escaping.json";
    dooc::write_text_file(path.string(), doc.dump(2));
    const auto result = run_cli("run --scenario " + path.string() + " --out " +
                                fresh_dir("dooc_cli_diverge").string());
    CHECK(result.exit_code == 3);
    CHECK(result.output.find("agent1") != std::string::npos);
}

TEST_CASE("missing scenario files exit with the validation code") {
    CHECK(run_cli("run --scenario /nonexistent/nope.json").exit_code == 2);
}
