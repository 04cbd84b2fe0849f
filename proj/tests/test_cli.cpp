// End-to-end checks of the command-line tool: exit codes, validation
// diagnostics, output determinism.
#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct CliResult {
    int exit_code = -1;
    std::string stdout_text;
};

CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    static int counter = 0;
    fs::path tmp = fs::temp_directory_path() / ("regenlab_cli_" + std::to_string(counter++));
    std::string cmd = env_prefix + std::string(REGENLAB_CLI_PATH) + " " + args + " > " +
                      tmp.string() + " 2>/dev/null";
    int rc = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WEXITSTATUS(rc);
    std::ifstream in(tmp);
    std::stringstream ss;
    ss << in.rdbuf();
    r.stdout_text = ss.str();
    fs::remove(tmp);
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::string config = std::string(REGENLAB_CONFIG_DIR) + "/default.toml";

}  // namespace

TEST_CASE("usage errors exit with code 2") {
    REQUIRE(run_cli("no-such-subcommand").exit_code == 2);
    REQUIRE(run_cli("covering-check --config /does/not/exist.toml").exit_code == 2);
    REQUIRE(run_cli("covering-check --set covering_check.beta=1.5 --set "
                    "covering_check.replications=10")
                .exit_code == 2);
    REQUIRE(run_cli("covering-check --set covering_check.bogus_key=1").exit_code == 2);
    REQUIRE(run_cli("covering-check --set covering_check.beta=oops").exit_code == 2);
    REQUIRE(run_cli("covering-check --set bogus_table.key=1").exit_code == 2);
    // the interval-map backend is orbit-statistics only
    REQUIRE(run_cli("flow-convergence --set flow_convergence.backend=\"thaler\"").exit_code ==
            2);
}

TEST_CASE("thread count can come from the environment") {
    fs::path out = fs::temp_directory_path() / "regenlab_cli_env";
    fs::remove_all(out);
    auto r = run_cli("covering-check --set covering_check.replications=2000 --seed 5 --out " +
                         out.string(),
                     "REGEN_STABLE_THREADS=2 ");
    REQUIRE(r.exit_code == 0);
    fs::remove_all(out);
}

TEST_CASE("info prints the derived parameter table") {
    auto r = run_cli("info --config " + config);
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.stdout_text.find("\"experiment\":\"info\"") != std::string::npos);
    REQUIRE(r.stdout_text.find("\"hurst\":1.125") != std::string::npos);
    REQUIRE(r.stdout_text.find("\"beta_p\":0.5") != std::string::npos);
}

TEST_CASE("covering check runs end to end and is seed-deterministic") {
    fs::path out1 = fs::temp_directory_path() / "regenlab_cli_out1";
    fs::path out2 = fs::temp_directory_path() / "regenlab_cli_out2";
    fs::remove_all(out1);
    fs::remove_all(out2);
    std::string base = "covering-check --config " + config +
                       " --set covering_check.replications=5000 --seed 42 --out ";
    auto r1 = run_cli(base + out1.string());
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r1.stdout_text.find("\"pass\":true") != std::string::npos);
    auto r2 = run_cli(base + out2.string());
    REQUIRE(r2.exit_code == 0);
    REQUIRE(slurp(out1 / "covering_check.csv") == slurp(out2 / "covering_check.csv"));
    REQUIRE(slurp(out1 / "covering_check_summary.json") ==
            slurp(out2 / "covering_check_summary.json"));
    // stdout lines agree except for the out_dir echo
    auto strip = [](std::string s, const std::string& dir) {
        auto pos = s.find(dir);
        if (pos != std::string::npos) s.erase(pos, dir.size());
        return s;
    };
    REQUIRE(strip(r1.stdout_text, out1.string()) == strip(r2.stdout_text, out2.string()));
    fs::remove_all(out1);
    fs::remove_all(out2);
}

TEST_CASE("simulate-z writes the path table and metadata") {
    fs::path out = fs::temp_directory_path() / "regenlab_cli_zout";
    fs::remove_all(out);
    auto r = run_cli("simulate-z --config " + config +
                     " --set simulate_z.replications=5 --seed 7 --out " + out.string());
    REQUIRE(r.exit_code == 0);
    auto csv = slurp(out / "z_paths.csv");
    REQUIRE(csv.rfind("replication,t,Z", 0) == 0);
    // 5 replications x 5 grid points + header
    REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 26);
    // Z(0) = 0 on the first row
    REQUIRE(csv.find("0,0,0\n") != std::string::npos);
    auto meta = slurp(out / "z_run.json");
    REQUIRE(meta.find("\"hurst\"") != std::string::npos);
    fs::remove_all(out);
}

TEST_CASE("experiment failure surfaces as exit code 1") {
    // an absurdly tight z tolerance cannot be met
    fs::path out = fs::temp_directory_path() / "regenlab_cli_fail";
    fs::remove_all(out);
    auto r = run_cli("covering-check --config " + config +
                     " --set covering_check.replications=20000"
                     " --set covering_check.z_tolerance=0.0001 --seed 3 --out " +
                     out.string());
    REQUIRE(r.exit_code == 1);
    REQUIRE(r.stdout_text.find("\"pass\":false") != std::string::npos);
    fs::remove_all(out);
}

TEST_CASE("runs without a config file fall back to built-in defaults") {
    fs::path out = fs::temp_directory_path() / "regenlab_cli_nocfg";
    fs::remove_all(out);
    auto r = run_cli("covering-check --set covering_check.replications=2000 --seed 5 --out " +
                     out.string());
    REQUIRE(r.exit_code == 0);
    fs::remove_all(out);
}
