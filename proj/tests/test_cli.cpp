#include <catch2/catch_amalgamated.hpp>

#include <crowdcode/analytic.hpp>
#include <crowdcode/codebook.hpp>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <sys/wait.h>
#include <fstream>
#include <sstream>
#include <string>

#ifndef CROWDCODE_CLI_PATH
#error "CROWDCODE_CLI_PATH must point at the built binary"
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(CROWDCODE_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string temp_dir() {
    static const std::string dir = [] {
        char tmpl[] = "/tmp/crowdcode_cli_XXXXXX";
        REQUIRE(mkdtemp(tmpl) != nullptr);
        return std::string(tmpl);
    }();
    return dir;
}

std::string write_m4_matrix() {
    const std::string path = temp_dir() + "/m4.json";
    const auto a =
        crowdcode::CodeMatrix::from_column_ints({5, 12, 3, 10, 12, 9, 9, 10, 9, 12}, 4);
    std::ofstream f(path);
    f << a.to_json().dump();
    return path;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    REQUIRE(f.good());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("unknown flags and missing subcommands exit 2 with usage text") {
    CHECK(run_cli("--no-such-flag").exit_code == 2);
    const auto r = run_cli("eval-exact --bogus 1");
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("Usage") != std::string::npos);
}

TEST_CASE("help exits 0") {
    const auto r = run_cli("--help");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("design") != std::string::npos);
}

TEST_CASE("eval-exact prints 0 for a perfect crowd") {
    const std::string matrix = write_m4_matrix();
    const auto r = run_cli("eval-exact --matrix " + matrix + " --mu 1.0");
    REQUIRE(r.exit_code == 0);
    CHECK(std::stod(r.out) == 0.0);
}

TEST_CASE("eval-exact matches the library value") {
    const std::string matrix = write_m4_matrix();
    const auto r = run_cli("eval-exact --matrix " + matrix + " --mu 0.9");
    REQUIRE(r.exit_code == 0);
    const auto a =
        crowdcode::CodeMatrix::from_column_ints({5, 12, 3, 10, 12, 9, 9, 10, 9, 12}, 4);
    CHECK_THAT(std::stod(r.out), Catch::Matchers::WithinAbs(
                                     crowdcode::pe_iid_coding(a, 0.9).value, 1e-12));
    const auto maj = run_cli("eval-exact --majority --m 2 --n 3 --mu 0.9");
    REQUIRE(maj.exit_code == 0);
    CHECK_THAT(std::stod(maj.out), Catch::Matchers::WithinAbs(0.028, 1e-12));
}

TEST_CASE("eval-exact rejects a missing matrix file with exit 2") {
    CHECK(run_cli("eval-exact --matrix /nonexistent.json --mu 0.9").exit_code == 2);
    const std::string matrix = write_m4_matrix();
    CHECK(run_cli("eval-exact --matrix " + matrix + " --mu 0.5 --rho 0.01 --rho-corr 0.5")
              .exit_code == 2);
}

TEST_CASE("bound emits JSON with the dominance condition") {
    const std::string matrix = write_m4_matrix();
    const auto r = run_cli("bound --matrix " + matrix + " --mu 0.9");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("condition_holds").get<bool>());
    const auto a =
        crowdcode::CodeMatrix::from_column_ints({5, 12, 3, 10, 12, 9, 9, 10, 9, 12}, 4);
    CHECK(j.at("value").get<double>() >= crowdcode::pe_iid_coding(a, 0.9).value);
}

TEST_CASE("simulate is byte-identical across reruns and writes a manifest") {
    const std::string matrix = write_m4_matrix();
    const std::string out1 = temp_dir() + "/sim1.csv";
    const std::string out2 = temp_dir() + "/sim2.csv";
    const std::string flags = " --majority --q 0.7 --p-spammer 0.25 --trials 2000 --seed 7";
    REQUIRE(run_cli("simulate --matrix " + matrix + flags + " --out " + out1).exit_code == 0);
    REQUIRE(run_cli("simulate --matrix " + matrix + flags + " --out " + out2).exit_code == 0);
    const std::string csv = slurp(out1);
    CHECK(csv == slurp(out2));
    CHECK(csv.rfind("param,pe_code_mc,se_code,pe_maj_mc,se_maj,pe_code_exact,pe_maj_exact,bound",
                    0) == 0);
    const auto manifest = nlohmann::json::parse(slurp(out1 + ".manifest.json"));
    CHECK(manifest.at("subcommand") == "simulate");
    CHECK(manifest.at("seed") == 7);
    CHECK(manifest.at("outputs")[0] == out1);
    CHECK(manifest.at("params").contains("crowd"));
}

TEST_CASE("sweep writes one row per grid value with the pinned header") {
    const std::string matrix = write_m4_matrix();
    const std::string out = temp_dir() + "/sweep.csv";
    REQUIRE(run_cli("sweep --matrix " + matrix +
                    " --majority --axis q --grid 0.2,0.6,1.0 --p-spammer 0.25"
                    " --trials 500 --seed 3 --out " +
                    out)
                .exit_code == 0);
    std::istringstream in(slurp(out));
    std::string line;
    std::getline(in, line);
    CHECK(line == "param,pe_code_mc,se_code,pe_maj_mc,se_maj,pe_code_exact,pe_maj_exact,bound");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3);
}

TEST_CASE("design writes a valid matrix file plus metadata") {
    const std::string out = temp_dir() + "/designed.json";
    const auto r = run_cli("design --m 4 --n 6 --mu 0.8 --seed 5 --cooling 0.8 --moves 20"
                           " --tmin 0.01 --out " +
                           out);
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(slurp(out));
    CHECK(j.at("m") == 4);
    CHECK(j.at("columns").size() == 6);
    const auto mat = crowdcode::CodeMatrix::from_json(j);
    for (int col = 0; col < 6; ++col) CHECK(mat.column_weight(col) == 2);
    const auto manifest = nlohmann::json::parse(slurp(out + ".manifest.json"));
    CHECK(manifest.at("params").at("schedule").at("cooling") == 0.8);
    CHECK(manifest.at("params").contains("objective_value"));
}

TEST_CASE("dataset scores a small CSV and honors its seed") {
    const std::string csv = temp_dir() + "/tiny.csv";
    {
        std::ofstream f(csv);
        f << "task_id,gold,w1,w2,w3,w4,w5,w6\n";
        for (int t = 0; t < 8; ++t) {
            const double v = (t % 8) * 12.5 + 6.0;
            f << 't' << t << ',' << v;
            for (int j = 0; j < 6; ++j) f << ',' << v;
            f << '\n';
        }
    }
    const auto r = run_cli("dataset --csv " + csv + " --m 8 --seed 2");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("coding_error_fraction") == 0.0);
    CHECK(j.at("majority_error_fraction") == 0.0);
    CHECK(j.at("task_count") == 8);
    const auto again = run_cli("dataset --csv " + csv + " --m 8 --seed 2");
    CHECK(again.out == r.out);
}

TEST_CASE("reproduce-figure fig3 emits the quality grid with exact columns") {
    const std::string out = temp_dir() + "/fig3.csv";
    REQUIRE(run_cli("reproduce-figure fig3 --trials 400 --seed 1 --out " + out).exit_code == 0);
    std::istringstream in(slurp(out));
    std::string line;
    std::getline(in, line);
    CHECK(line == "param,pe_code_mc,se_code,pe_maj_mc,se_maj,pe_code_exact,pe_maj_exact,bound");
    int rows = 0;
    double last_param = -1.0;
    while (std::getline(in, line)) {
        ++rows;
        std::istringstream cells(line);
        std::string cell;
        std::getline(cells, cell, ',');
        const double param = std::stod(cell);
        CHECK(param > last_param);
        last_param = param;
        for (int k = 0; k < 5; ++k) std::getline(cells, cell, ',');
        CHECK_FALSE(cell.empty());  // exact coding value present at N=10
    }
    CHECK(rows == 11);
    CHECK(nlohmann::json::parse(slurp(out + ".manifest.json")).at("params").at("figure") ==
          "fig3");
    CHECK(run_cli("reproduce-figure fig99").exit_code == 2);
}
