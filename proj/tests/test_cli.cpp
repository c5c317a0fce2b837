#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace {

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

// Runs the tool under test with the given arguments. The binary path comes
// from the environment so the same test source works from any build tree.
CommandResult run_cli(const std::string& args, bool merge_stderr = false) {
    const char* binary = std::getenv("IADOF_CLI");
    REQUIRE_MESSAGE(binary != nullptr, "IADOF_CLI must point at the built binary");
    const std::string command =
        std::string(binary) + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CommandResult result;
    char buffer[4096];
    size_t got;
    while ((got = fread(buffer, 1, sizeof buffer, pipe)) > 0) result.output.append(buffer, got);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

const std::string kCyclicSpec =
    "5\n1 0 0 0 1\n1 1 0 0 0\n0 1 1 0 0\n0 0 1 1 0\n0 0 0 1 1\n\n"
    "1 0 0 0 1\n1 1 0 0 0\n0 1 1 0 0\n0 0 1 1 0\n0 0 0 1 1\n";

const std::string kCyclicFilling =
    "5\n1 0 0 0 1\n2 2 0 0 0\n0 1 1 0 0\n0 0 2 2 0\n0 0 0 1 0\n";

const std::string kThreeUserSpec = "3\n1 0 0\n0 1 0\n0 0 1\n\n1 1 1\n1 1 1\n1 1 1\n";

const std::string kDiagonalFilling = "3\n1 0 0\n0 1 0\n0 0 1\n";

}  // namespace

TEST_CASE("construct emits the cyclic filling on stdout") {
    const CommandResult result = run_cli("construct --K 5 --m 2");
    CHECK(result.exit_code == 0);
    CHECK(result.output == kCyclicFilling);

    const CommandResult with_scores = run_cli("construct --K 5 --m 2", true);
    CHECK(with_scores.output.find("formula score: 3 (3)") != std::string::npos);
    CHECK(with_scores.output.find("recomputed score: 3 (3)") != std::string::npos);
}

TEST_CASE("construct writes a file and reports scores on stdout") {
    const CommandResult result =
        run_cli("construct --K 6 --m 4 --variant corollary --out cli_construct_out.txt");
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("formula score: 22/7") != std::string::npos);
    CHECK(read_file("cli_construct_out.txt").substr(0, 2) == "6\n");
    std::remove("cli_construct_out.txt");
}

TEST_CASE("score prints the per-row table") {
    write_file("cli_score_spec.txt", kCyclicSpec);
    write_file("cli_score_g.txt", kCyclicFilling);
    const CommandResult result = run_cli("score --spec cli_score_spec.txt --g cli_score_g.txt");
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("score: 3 (3)") != std::string::npos);
    CHECK(result.output.find("row  support  interference  cost") != std::string::npos);

    const CommandResult json =
        run_cli("score --spec cli_score_spec.txt --g cli_score_g.txt --json");
    CHECK(json.exit_code == 0);
    CHECK(json.output.find("\"numerator\": 9") != std::string::npos);
    CHECK(json.output.find("\"denominator\": 3") != std::string::npos);
    std::remove("cli_score_spec.txt");
    std::remove("cli_score_g.txt");
}

TEST_CASE("scoring an invalid filling exits 1 and names the cells") {
    write_file("cli_bad_spec.txt", kThreeUserSpec);
    write_file("cli_bad_g.txt", "3\n1 1 0\n0 1 0\n0 0 1\n");
    const CommandResult result =
        run_cli("score --spec cli_bad_spec.txt --g cli_bad_g.txt", true);
    CHECK(result.exit_code == 1);
    CHECK(result.output.find("(1, 2)") != std::string::npos);
    std::remove("cli_bad_spec.txt");
    std::remove("cli_bad_g.txt");
}

TEST_CASE("solve finds the shared-label diagonal and honors --out") {
    write_file("cli_solve_spec.txt", kThreeUserSpec);
    const CommandResult result =
        run_cli("solve --spec cli_solve_spec.txt --mode exact --out cli_solve_g.txt");
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("score: 3/2 (1.5)") != std::string::npos);
    CHECK(result.output.find("optimal: yes") != std::string::npos);
    CHECK(read_file("cli_solve_g.txt") == kDiagonalFilling);
    std::remove("cli_solve_spec.txt");
    std::remove("cli_solve_g.txt");
}

TEST_CASE("solve --json is byte-identical across runs at one job") {
    write_file("cli_det_spec.txt", kCyclicSpec);
    const std::string args = "solve --spec cli_det_spec.txt --seed 9 --jobs 1 --json";
    const CommandResult a = run_cli(args);
    const CommandResult b = run_cli(args);
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);
    CHECK(a.output.find("elapsed") == std::string::npos);
    std::remove("cli_det_spec.txt");
}

TEST_CASE("solve brute mode refuses oversized supports with exit 1") {
    write_file("cli_refuse_spec.txt", "4\n1 1 1 1\n1 1 1 1\n1 1 1 1\n1 1 1 1\n\n"
                                      "1 1 1 1\n1 1 1 1\n1 1 1 1\n1 1 1 1\n");
    const CommandResult result =
        run_cli("solve --spec cli_refuse_spec.txt --mode brute", true);
    CHECK(result.exit_code == 1);
    std::remove("cli_refuse_spec.txt");
}

TEST_CASE("verify passes the shared diagonal and exits 0") {
    write_file("cli_verify_spec.txt", kThreeUserSpec);
    write_file("cli_verify_g.txt", kDiagonalFilling);
    const CommandResult result = run_cli(
        "verify --spec cli_verify_spec.txt --g cli_verify_g.txt --eta 1 --trials 1 --backend exact");
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("overall: pass") != std::string::npos);
    CHECK(result.output.find("block length: 65") != std::string::npos);

    const std::string json_args =
        "verify --spec cli_verify_spec.txt --g cli_verify_g.txt --trials 1 --seed 3 --json";
    const CommandResult a = run_cli(json_args);
    const CommandResult b = run_cli(json_args);
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);
    std::remove("cli_verify_spec.txt");
    std::remove("cli_verify_g.txt");
}

TEST_CASE("verify fails structurally broken fillings with exit 1") {
    write_file("cli_vfail_spec.txt", kThreeUserSpec);
    write_file("cli_vfail_g.txt", "3\n1 1 0\n0 1 0\n0 0 1\n");
    const CommandResult result =
        run_cli("verify --spec cli_vfail_spec.txt --g cli_vfail_g.txt", true);
    CHECK(result.exit_code == 1);
    CHECK(result.output.find("overall: fail") != std::string::npos);
    std::remove("cli_vfail_spec.txt");
    std::remove("cli_vfail_g.txt");
}

TEST_CASE("sweep emits one csv row per m") {
    const CommandResult result = run_cli("sweep --K 20");
    CHECK(result.exit_code == 0);
    std::istringstream in(result.output);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "K,m,corollary_num,corollary_den,classic_num,classic_den");
    int rows = 0;
    while (std::getline(in, line)) {
        long long K, m, cn, cd, bn, bd;
        REQUIRE(std::sscanf(line.c_str(), "%lld,%lld,%lld,%lld,%lld,%lld", &K, &m, &cn, &cd, &bn,
                            &bd) == 6);
        CHECK(K == 20);
        CHECK(cn * bd >= bn * cd);
        ++rows;
    }
    CHECK(rows == 20);
}

TEST_CASE("sweep writes csv and gnuplot files") {
    const CommandResult result =
        run_cli("sweep --K 6 --out cli_sweep.csv --gnuplot cli_sweep.gp");
    CHECK(result.exit_code == 0);
    CHECK(read_file("cli_sweep.csv").rfind("K,m,", 0) == 0);
    CHECK(read_file("cli_sweep.gp").find("plot $scores") != std::string::npos);
    std::remove("cli_sweep.csv");
    std::remove("cli_sweep.gp");
}

TEST_CASE("usage and parse problems exit 2") {
    CHECK(run_cli("construct --K 5", true).exit_code == 2);
    CHECK(run_cli("nonsense", true).exit_code == 2);
    CHECK(run_cli("score --spec missing.txt --g missing.txt", true).exit_code == 2);
    write_file("cli_garbled.txt", "3\n1 0\n");
    write_file("cli_fine_g.txt", kDiagonalFilling);
    const CommandResult result =
        run_cli("score --spec cli_garbled.txt --g cli_fine_g.txt", true);
    CHECK(result.exit_code == 2);
    CHECK(result.output.find("parse error") != std::string::npos);
    std::remove("cli_garbled.txt");
    std::remove("cli_fine_g.txt");

    write_file("cli_nonbinary.txt", "1\n2\n\n1\n");
    write_file("cli_one_g.txt", "1\n1\n");
    CHECK(run_cli("score --spec cli_nonbinary.txt --g cli_one_g.txt", true).exit_code == 2);
    std::remove("cli_nonbinary.txt");
    std::remove("cli_one_g.txt");
}

TEST_CASE("construct rejects out-of-range family parameters with exit 2") {
    CHECK(run_cli("construct --K 3 --m 9", true).exit_code == 2);
}
