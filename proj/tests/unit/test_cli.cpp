#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "support.hpp"

using namespace specfreq;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return Result{code, out.str(), err.str()};
}

class TempDir {
public:
    TempDir() : path_(fs::temp_directory_path() / ("specfreq_cli_" + std::to_string(std::rand()))) {
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    [[nodiscard]] std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

std::string write_panel(const TempDir& dir, const std::string& name, const TimePanel& panel) {
    const std::string path = dir.file(name);
    std::ofstream out(path);
    write_csv(out, panel);
    return path;
}

int run_binary(const std::string& args) {
    const std::string command = std::string(SPECFREQ_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("frequency tokens") {
    CHECK(cli::parse_frequency_token("0") == 0.0);
    CHECK(cli::parse_frequency_token("0.5pi") == doctest::Approx(kPi / 2));
    CHECK(cli::parse_frequency_token("-pi") == -kPi);
    CHECK(cli::parse_frequency_token("pi/2") == doctest::Approx(kPi / 2));
    CHECK(cli::parse_frequency_token("-2pi/3") == doctest::Approx(-2 * kPi / 3));
    CHECK(cli::parse_frequency_token("1.25") == 1.25);
    CHECK_THROWS_AS((void)cli::parse_frequency_token("half"), Error);
    CHECK_THROWS_AS((void)cli::parse_frequency_token("0.5pie"), Error);

    CHECK(cli::parse_frequencies("quarterly", 100).size() == 4);
    CHECK(cli::parse_frequencies("monthly", 100).size() == 12);
    CHECK(cli::parse_frequencies("0.5pi, 0", 100).grid() == std::vector<double>{0.0, kPi / 2});
    CHECK(cli::parse_frequencies("interval:-pi:pi", 100).size() == 100);
    CHECK(cli::parse_frequencies("interval:0:pi/2:5", 100).size() == 5);
    CHECK_THROWS_AS((void)cli::parse_frequencies("interval:0", 100), Error);
    CHECK_THROWS_AS((void)cli::parse_frequencies("pi", 100), Error);
}

TEST_CASE("pair selections") {
    const std::vector<std::string> labels{"a", "b", "c"};
    CHECK(cli::parse_pairs("all-off-diagonal", labels).size() == 3);
    CHECK(cli::parse_pairs("diagonal", labels).size() == 3);
    CHECK(cli::parse_pairs("all", labels).size() == 6);
    const IndexSet explicit_pairs = cli::parse_pairs("2:1, c:a", labels);
    CHECK(explicit_pairs[0] == SeriesPair{1, 0});
    CHECK(explicit_pairs[1] == SeriesPair{2, 0});
    CHECK_THROWS_AS((void)cli::parse_pairs("1:4", labels), Error);
    CHECK_THROWS_AS((void)cli::parse_pairs("1-2", labels), Error);
}

TEST_CASE("estimate writes a spectrum CSV that round-trips") {
    TempDir dir;
    const TimePanel panel(support::random_matrix(50, 2, 3), {"x", "y"});
    const std::string input = write_panel(dir, "panel.csv", panel);
    const Result r = run({"estimate", "-i", input, "--freqs", "0,0.5pi", "--lags", "2"});
    REQUIRE(r.code == 0);

    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "omega,i,j,re,im");
    const auto est = estimate_spectrum(panel, Bandwidth{2}, FlatTopKernel(0.5), FrequencySet::discrete({0.0, kPi / 2}));
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(fields, cell, ',')) v.push_back(std::stod(cell));
        const std::size_t f = v[0] == 0.0 ? 0 : 1;
        const Complex expected = est.value(static_cast<std::size_t>(v[1]) - 1, static_cast<std::size_t>(v[2]) - 1, f);
        CHECK(std::abs(v[3] - expected.real()) < 1e-12);
        CHECK(std::abs(v[4] - expected.imag()) < 1e-12);
        ++rows;
    }
    CHECK(rows == 2 * 4);

    const Result bad = run({"estimate", "-i", input, "--freqs", "0,halfpi"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("error") != std::string::npos);
}

TEST_CASE("test subcommand emits deterministic JSON") {
    TempDir dir;
    const std::string input = write_panel(dir, "panel.csv", TimePanel(support::random_matrix(80, 4, 5)));
    const std::vector<std::string> args{"test", "-i", input, "--seed", "7", "--B", "200"};
    const Result a = run(args);
    const Result b = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const auto j = nlohmann::json::parse(a.out);
    CHECK(j["schema"] == "specfreq/1");
    CHECK(j["reject"].is_boolean());
    CHECK(j["config"]["seed"] == 7);

    const auto panel = TimePanel(support::random_matrix(80, 4, 5));
    TestConfig cfg;
    cfg.multipliers.replicates = 200;
    cfg.multipliers.seed = 7;
    const auto report = global_test(panel, IndexSet::lower_off_diagonal(4), FrequencySet::quarterly(), 0.05, cfg);
    CHECK(j["p_value"].get<double>() == report.p_value);
    CHECK(j["statistic"].get<double>() == report.statistic);

    const std::string out_path = dir.file("report.json");
    CHECK(run({"test", "-i", input, "--seed", "7", "--B", "200", "-o", out_path}).code == 0);
    std::ifstream written(out_path);
    std::stringstream text;
    text << written.rdbuf();
    CHECK(text.str() == a.out);
}

TEST_CASE("seasonal over-adjustment check on the diagonal") {
    TempDir dir;
    const TimePanel raw = simulate(DgpSpec{Model::M1, 404, 3, 1.0}, StreamKey{31, 0});
    const std::string input = write_panel(dir, "panel.csv", raw);
    const Result r = run({"test", "-i", input, "--difference", "seasonal", "--period", "4", "--freqs", "quarterly",
                          "--pairs", "diagonal", "--lags", "8", "--B", "300", "--seed", "1"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["config"]["pairs"] == 3);
    CHECK(j["config"]["l_n"] == 8);
    CHECK(j["reject"] == false);

    const Result raw_run = run({"test", "-i", input, "--freqs", "quarterly", "--pairs", "diagonal", "--lags", "8",
                                "--B", "300", "--seed", "1"});
    REQUIRE(raw_run.code == 0);
    CHECK(nlohmann::json::parse(raw_run.out)["reject"] == true);
}

TEST_CASE("fdr batch mode writes the report and the p-value matrix") {
    TempDir dir;
    Matrix x = support::random_matrix(200, 6, 8);
    x.col(2) = 0.8 * x.col(0) + 0.6 * x.col(2);
    x.col(3) = 0.8 * x.col(1) + 0.6 * x.col(3);
    const TimePanel panel(x, {"A_1", "A_2", "B_1", "B_2", "C_1", "C_2"});
    const std::string input = write_panel(dir, "panel.csv", panel);
    const std::string matrix = dir.file("matrix.csv");
    const Result r = run({"fdr", "-i", input, "--matrix", matrix, "--B", "500", "--seed", "3"});
    REQUIRE(r.code == 0);

    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "q,label_i,label_j,T,pv,V,rejected,star");
    std::map<std::string, int> rejected;
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::vector<std::string> cells;
        std::string cell;
        while (std::getline(fields, cell, ',')) cells.push_back(cell);
        REQUIRE(cells.size() == 8);
        rejected[cells[1] + cells[2]] = std::stoi(cells[6]);
        CHECK(cells[7] == (cells[6] == "1" ? "0" : "1"));
    }
    CHECK(rejected.size() == 3);
    CHECK(rejected["AB"] == 1);

    std::ifstream m(matrix);
    std::getline(m, line);
    CHECK(line == "group,A,B,C");
    std::size_t rows = 0;
    while (std::getline(m, line)) ++rows;
    CHECK(rows == 3);
}

TEST_CASE("fdr with one hypothesis matches the test subcommand") {
    TempDir dir;
    const std::string input = write_panel(dir, "panel.csv", TimePanel(support::random_matrix(80, 3, 2)));
    const Result t = run({"test", "-i", input, "--pairs", "2:1", "--B", "300", "--seed", "4"});
    const Result f = run({"fdr", "-i", input, "--mode", "pairs", "--pairs", "2:1", "--B", "300", "--seed", "4"});
    REQUIRE(t.code == 0);
    REQUIRE(f.code == 0);
    const double pv = nlohmann::json::parse(t.out)["p_value"].get<double>();
    std::istringstream in(f.out);
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    std::vector<std::string> cells;
    std::istringstream fields(line);
    std::string cell;
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    CHECK(std::stod(cells[4]) == pv);
}

TEST_CASE("simulate subcommand") {
    const Result size = run({"simulate", "--model", "M1", "--p", "5", "--reps", "5", "--B", "100", "--seed", "2"});
    REQUIRE(size.code == 0);
    CHECK(size.out.rfind("experiment,model,n,p,param,K,c,alpha,B,reps,rate,fdr,power\nsize,M1,300,5,", 0) == 0);
    CHECK(size.out == run({"simulate", "--model", "M1", "--p", "5", "--reps", "5", "--B", "100", "--seed", "2"}).out);

    const Result power = run({"simulate", "--model", "M4", "--param", "0.3", "--p", "5", "--experiment", "power",
                              "--reps", "3", "--B", "100"});
    REQUIRE(power.code == 0);
    CHECK(power.out.find("power,M4") != std::string::npos);

    const Result fdr = run({"simulate", "--model", "M4", "--param", "0.3", "--p", "10", "--experiment", "fdr",
                            "--reps", "2", "--B", "100", "--blocks", "5"});
    REQUIRE(fdr.code == 0);
    CHECK(fdr.out.find("fdr,M4") != std::string::npos);

    const Result panel = run({"simulate", "--model", "M2", "--param", "0.4", "--experiment", "panel", "--n", "20",
                              "--p", "3"});
    REQUIRE(panel.code == 0);
    std::istringstream in(panel.out);
    CHECK(parse_csv(in, true).n() == 20);

    CHECK(run({"simulate", "--model", "M9"}).code == 2);
    CHECK(run({"simulate", "--model", "M2", "--param", "1.5"}).code == 2);
}

TEST_CASE("exit codes of the built binary") {
    TempDir dir;
    const std::string input = write_panel(dir, "panel.csv", TimePanel(support::random_matrix(40, 3, 1)));
    CHECK(run_binary("--help") == 0);
    CHECK(run_binary("") == 2);
    CHECK(run_binary("frobnicate") == 2);
    CHECK(run_binary("test -i " + input + " --B 100") == 0);
    CHECK(run_binary("test -i " + input + " --alpha 0") == 2);
    CHECK(run_binary("test -i " + dir.file("missing.csv")) == 1);
    CHECK(run_binary("test -i " + input + " --B 100 -o " + dir.file("no/such/dir/out.json")) == 1);
    CHECK(run_binary("estimate -i " + input + " --freqs bogus") == 2);
}
