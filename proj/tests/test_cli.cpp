#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

const std::filesystem::path kOut = std::filesystem::temp_directory_path() / "divcorr_cli_test.out";

int run(const std::string &args)
{
    const std::string cmd = std::string(DIVCORR_CLI_PATH) + " " + args + " > " + kOut.string() + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string output()
{
    std::ifstream in(kOut);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("exit codes")
{
    CHECK(run("lemma --which 2 --ladder 1e3,1e4") == 0);
    CHECK(run("lemma --which 9") == 2);
    CHECK(run("correlate --n 1.5 --r-level 3 --pattern 0") == 2);
    CHECK(run("bogus") == 2);
    CHECK(run("singular --sn 2 --j 0") == 3);
    CHECK(run("singular --sn 5 --j 2") == 3);
    CHECK(run("omega --n 1e5 --h 5 --r-level 100 --rho 0.3 --C -0.5") == 3);
    CHECK(run("--help") == 0);
}

TEST_CASE("json output carries the schema and config")
{
    REQUIRE(run("singular --pattern 0,2") == 0);
    const auto doc = nlohmann::json::parse(output());
    CHECK(doc["schema_version"] == 1);
    CHECK(doc["command"] == "singular");
    CHECK(doc["config"]["euler_p_cut"] == 1000000);
    CHECK(doc["result"]["value"].get<double>() == doctest::Approx(1.3203236316937).epsilon(1e-10));
}

TEST_CASE("csv header echoes the resolved config")
{
    REQUIRE(run("correlate --n 1e4 --r-exp 0.25 --pattern 0:1,2:1") == 0);
    const auto text = output();
    CHECK(text.find("# config.R=10") != std::string::npos);
    CHECK(text.find("# config.prime_sum_cut=") != std::string::npos);
    CHECK(text.find("normalized_residual") != std::string::npos);
}

TEST_CASE("exact identity passes through the CLI")
{
    CHECK(run("moments --k 2 --h 5 --r-level 50 --n 1e3 --exact") == 0);
    CHECK(output().find("# computed_exact=") != std::string::npos);
    CHECK(run("singular --tuple-r 2 --h 200") == 0);
}
