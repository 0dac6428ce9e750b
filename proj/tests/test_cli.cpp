#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "balmetric/table_io.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run_cli(const std::string& args) {
    const std::string cmd = std::string(BALMETRIC_CLI) + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path scratch_dir() {
    auto dir = fs::temp_directory_path() / ("balmetric_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST(CliIterate, TKTableAsCsv) {
    const auto r = run_cli("iterate --op TK --k 2 --coeffs 1,17,36 --steps 5 --normalize balanced");
    ASSERT_EQ(r.code, 0);
    std::stringstream ss(r.out);
    const auto rows = balmetric::read_csv(ss);
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_NEAR(rows[0].coeffs[0], 0.8826, 1e-4);
    EXPECT_NEAR(rows[5].coeffs[1], 12.0010, 1e-4);
    EXPECT_NEAR(rows[0].err, 0.2848, 5e-4);
    EXPECT_NEAR(*rows[0].bnd, 1.0180, 5e-4);
}

TEST(CliIterate, RoundFamilyIsConstant) {
    const auto r = run_cli("iterate --op Tnu --k 3 --family round --steps 2");
    ASSERT_EQ(r.code, 0);
    std::stringstream ss(r.out);
    const auto rows = balmetric::read_csv(ss);
    ASSERT_EQ(rows.size(), 3u);
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(row.coeffs[i], rows[0].coeffs[i], 1e-9 * rows[0].coeffs[i]);
    }
}

TEST(CliIterate, Cp3TableWithCoordinateRatio) {
    const auto r = run_cli("iterate --op Tnu --n 3 --k 4 --class-coeffs 1,20,30,40,50 --steps 8 --normalize first");
    ASSERT_EQ(r.code, 0);
    std::stringstream ss(r.out);
    const auto rows = balmetric::read_csv(ss);
    ASSERT_EQ(rows.size(), 9u);
    ASSERT_EQ(rows[0].coeffs.size(), 35u);
    EXPECT_NEAR(rows[1].coeffs[1], 4.3071170, 1e-4);
    EXPECT_NEAR(rows[1].coeffs[14], 25.9850356, 1e-4);
    EXPECT_NEAR(*rows[8].sigma_tilde, 0.1667, 5e-4);
}

TEST(CliIterate, JsonToFile) {
    const auto path = scratch_dir() / "tk.json";
    const auto r = run_cli("iterate --op TK --k 2 --coeffs 1,17,36 --steps 2 --format json --out " + path.string());
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(slurp(path));
    EXPECT_EQ(j["meta"]["operator"], "TK");
    EXPECT_EQ(j["rows"].size(), 3u);
}

TEST(CliIterate, IdenticalRunsAreByteIdentical) {
    const std::string args = "iterate --op T --k 4 --coeffs 1,300,300,300,1 --steps 6";
    EXPECT_EQ(run_cli(args).out, run_cli(args).out);
}

TEST(CliIterate, ValidationErrors) {
    EXPECT_EQ(run_cli("iterate --op TK --k 3 --coeffs 1,2,2,1").code, 1);
    EXPECT_EQ(run_cli("iterate --op TK --coeffs 1,-2,1").code, 1);
    EXPECT_EQ(run_cli("iterate --op TK --k 3 --coeffs 1,2,1").code, 1);
    EXPECT_EQ(run_cli("iterate --op Q --coeffs 1,2,1").code, 1);
    EXPECT_EQ(run_cli("iterate --op T --n 2 --k 2 --family round").code, 1);
    EXPECT_EQ(run_cli("iterate --op Tnu --n 3 --k 4 --class-coeffs 1,2,3").code, 1);
    EXPECT_EQ(run_cli("iterate --op Tnu --coeffs 1,2,1 --format xml").code, 1);
    EXPECT_EQ(run_cli("iterate --bogus").code, 1);
    EXPECT_EQ(run_cli("").code, 1);
}

TEST(CliIterate, NumericalFailureExitCode) {
    EXPECT_EQ(run_cli("iterate --op T --k 6 --coeffs 1,6000,150000,2e10,150000,6000,1 --steps 1 --max-iter 3").code, 2);
}

TEST(CliSigma, Reports) {
    const auto r = run_cli("sigma --op T --k 6 --seed 4");
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("sigma_predicted,0.83333333333333337"), std::string::npos);
    const auto r2 = run_cli("sigma --op Tnu --n 2 --k 3 --symmetric false");
    ASSERT_EQ(r2.code, 0);
    EXPECT_NE(r2.out.find("sigma_predicted,0.5\n"), std::string::npos);
    const auto r3 = run_cli("sigma --op Tnu --n 2 --k 2 --symmetric true");
    ASSERT_EQ(r3.code, 0);
    EXPECT_NE(r3.out.find("sigma_predicted,0.066666666666666666"), std::string::npos);
    EXPECT_EQ(run_cli("sigma --op T --k 6 --max-iter 5").code, 2);
}

TEST(CliReproduce, PassAndUnknown) {
    const auto r = run_cli("reproduce tk-k2");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("max |dev| a_0"), std::string::npos);
    EXPECT_NE(r.out.find("PASS"), std::string::npos);
    EXPECT_EQ(run_cli("reproduce t-k6").code, 0);
    EXPECT_EQ(run_cli("reproduce nothing").code, 1);
}

TEST(CliProfile, WritesOneFilePerIterate) {
    const auto prefix = scratch_dir() / "fig";
    const auto r = run_cli("profile --op T --k 4 --coeffs 1,300,300,300,1 --steps 4 --out " + prefix.string());
    ASSERT_EQ(r.code, 0);
    for (int i = 0; i <= 4; ++i) {
        const fs::path p = prefix.string() + "_r" + std::to_string(i) + ".csv";
        ASSERT_TRUE(fs::exists(p)) << p;
        const auto text = slurp(p);
        EXPECT_EQ(text.rfind("x,rho\n", 0), 0u);
    }
    EXPECT_FALSE(fs::exists(prefix.string() + "_r5.csv"));
}

TEST(CliProfile, RoundProfileIsInversionSymmetric) {
    const auto r = run_cli("profile --op Tnu --k 4 --family round --steps 0 --x-min 0.01 --x-max 100 --points 5");
    ASSERT_EQ(r.code, 0);
    std::stringstream ss(r.out);
    std::string line;
    std::getline(ss, line);
    std::vector<std::pair<double, double>> samples;
    while (std::getline(ss, line)) {
        const auto cells = balmetric::parse_number_list(line);
        samples.emplace_back(cells[1], cells[2]);
    }
    ASSERT_EQ(samples.size(), 5u);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto [x, rho] = samples[i];
        const double rho_inv = samples[samples.size() - 1 - i].second;
        EXPECT_NEAR(rho_inv, x * x * rho, 1e-12 * x * x * rho);
    }
}
