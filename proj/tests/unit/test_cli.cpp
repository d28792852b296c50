#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "scqc/cli/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "scqc");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = scqc::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "scqc_cli_test" / name;
    fs::remove_all(p);
    fs::create_directories(p.parent_path());
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

std::vector<std::vector<double>> read_csv(const fs::path& p) {
    std::ifstream f(p);
    std::string line;
    std::getline(f, line);
    std::vector<std::vector<double>> rows;
    while (std::getline(f, line)) {
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST(Cli, FamilyBesselParameters) {
    const Result r = run({"family", "bessel", "--index", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_NEAR(j["params"]["x_i"].get<double>(), 5.5201, 5e-5);
    EXPECT_NEAR(j["params"]["q"].get<double>(), 0.5660, 5e-4);
    EXPECT_EQ(j["provenance"]["tool"], "scqc");
    EXPECT_EQ(j["provenance"]["version"], scqc::cli::version());
    EXPECT_EQ(j["provenance"]["config"]["index"], 2);
}

TEST(Cli, FamilySpecFeedsBackIntoCheck) {
    const fs::path spec = scratch("tilted.json");
    ASSERT_EQ(run({"family", "tilted", "--theta", "1.5707963267948966", "--out", spec.string()}).code, 0);
    const Result r = run({"check", "--curve", spec.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("closure: PASS"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("tangent-area: PASS"), std::string::npos);
    EXPECT_NE(r.out.find("closability: PASS (interior)"), std::string::npos);
}

TEST(Cli, CheckClassification) {
    const Result parity = run({"check", "--family", "parity"});
    EXPECT_NE(parity.out.find("closure: PASS"), std::string::npos);
    EXPECT_NE(parity.out.find("tangent-area: PASS"), std::string::npos);
    EXPECT_NE(parity.out.find("projected-area: PASS"), std::string::npos);
    EXPECT_NE(parity.out.find("closability: PASS"), std::string::npos);

    const Result eq21 = run({"check", "--family", "eq21"});
    EXPECT_NE(eq21.out.find("closure: FAIL"), std::string::npos) << eq21.out;
    EXPECT_NE(eq21.out.find("tangent-area: PASS"), std::string::npos);
    EXPECT_NE(eq21.out.find("closability: FAIL"), std::string::npos);

    const Result eq22 = run({"check", "--family", "eq22"});
    EXPECT_NE(eq22.out.find("closure: PASS"), std::string::npos);
    EXPECT_NE(eq22.out.find("tangent-area: FAIL"), std::string::npos);
}

TEST(Cli, CheckJsonAndToleranceOverride) {
    const fs::path out = scratch("check.json");
    ASSERT_EQ(run({"check", "--family", "bessel", "--out", out.string()}).code, 0);
    json j = json::parse(slurp(out));
    EXPECT_FALSE(j["closure_residual"]["pass"].get<bool>());  // the central-difference q is only approximate
    EXPECT_EQ(j["provenance"]["config"]["tolerance"], 1e-6);

    ::setenv("SCQC_TOL", "1e-2", 1);
    ASSERT_EQ(run({"check", "--family", "bessel", "--out", out.string()}).code, 0);
    j = json::parse(slurp(out));
    EXPECT_TRUE(j["closure_residual"]["pass"].get<bool>());
    EXPECT_EQ(j["provenance"]["config"]["tolerance"], 1e-2);
    // The flag wins over the environment.
    ASSERT_EQ(run({"check", "--family", "bessel", "--tol", "1e-8", "--out", out.string()}).code, 0);
    EXPECT_EQ(json::parse(slurp(out))["provenance"]["config"]["tolerance"], 1e-8);
    ::setenv("SCQC_TOL", "abc", 1);
    EXPECT_EQ(run({"check", "--family", "parity"}).code, 2);
    ::unsetenv("SCQC_TOL");
}

TEST(Cli, FieldsCircleHasUnitOmega) {
    const fs::path spec = scratch("circle.json");
    {
        std::ofstream f(spec);
        f << R"j({"kind": "analytic", "components": ["cos(l)", "sin(l)", "0"], "domain": [0, 6.283185307179586]})j";
    }
    const fs::path dir = scratch("circle_fields");
    const Result r = run({"fields", "--curve", spec.string(), "--out", dir.string(), "--samples", "65"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = read_csv(dir / "fields.csv");
    ASSERT_EQ(rows.size(), 65u);
    for (const auto& row : rows) EXPECT_NEAR(row[1], 1.0, 1e-9);
    const auto pulse = read_csv(dir / "pulse.csv");
    for (const auto& row : pulse) EXPECT_NEAR(std::hypot(row[1], row[2]), 1.0, 1e-9);
    const json prof = json::parse(slurp(dir / "profile.json"));
    EXPECT_EQ(prof["provenance"]["config"]["command"], "fields");
    EXPECT_NEAR(prof["duration"].get<double>(), 2.0 * M_PI, 1e-10);
}

TEST(Cli, FieldsBesselVanishAtEnds) {
    const fs::path dir = scratch("bessel_fields");
    ASSERT_EQ(run({"fields", "--family", "bessel", "--index", "2", "--out", dir.string()}).code, 0);
    const auto rows = read_csv(dir / "fields.csv");
    EXPECT_NEAR(rows.front()[1], 0.0, 1e-8);
    EXPECT_NEAR(rows.back()[1], 0.0, 1e-8);
    double peak = 0.0;
    for (const auto& row : rows) peak = std::max(peak, std::abs(row[1]));
    EXPECT_GT(peak, 10.0);
}

TEST(Cli, SimulateReportsTargetFidelity) {
    const Result r = run({"simulate", "--family", "tilted"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_LT(json::parse(r.out)["infidelity"].get<double>(), 1e-8);
    const Result noisy = run({"simulate", "--family", "eq20", "--eps", "0.1", "--dz", "0.1"});
    const json j = json::parse(noisy.out);
    EXPECT_GT(j["infidelity"].get<double>(), 1e-4);
    EXPECT_EQ(j["provenance"]["config"]["noise"]["epsilon"], 0.1);
}

TEST(Cli, GaugeRotatesTargetAlong) {
    const Result r = run({"simulate", "--family", "bessel", "--gauge", R"({"kind": "linear", "slope": 1.3})",
                          "--eps", "0.05", "--dz", "0.05"});
    const Result plain = run({"simulate", "--family", "bessel", "--eps", "0.05", "--dz", "0.05"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(json::parse(r.out)["infidelity"].get<double>(), json::parse(plain.out)["infidelity"].get<double>(),
                1e-10);
    EXPECT_EQ(run({"simulate", "--family", "bessel", "--gauge", "{\"kind\": 3"}).code, 2);
}

TEST(Cli, SweepIsDeterministicAcrossJobs) {
    const fs::path a = scratch("s1/grid.csv"), b = scratch("s2/grid.csv");
    const std::vector<std::string> base = {"sweep", "--family", "eq22", "--grid", "7", "--eps-range", "0:0.3",
                                           "--dz-range", "-0.2:0.2", "--average-z", "4"};
    auto args_a = base, args_b = base;
    args_a.insert(args_a.end(), {"--out", a.string(), "--jobs", "1", "--svg", (a.parent_path() / "g.svg").string()});
    args_b.insert(args_b.end(), {"--out", b.string(), "--jobs", "3"});
    ASSERT_EQ(run(args_a).code, 0);
    ASSERT_EQ(run(args_b).code, 0);
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_EQ(read_csv(a).size(), 49u);
    const json meta = json::parse(slurp(a.parent_path() / "grid.json"));
    EXPECT_EQ(meta["metadata"]["config"]["average_z"], 4);
    EXPECT_EQ(meta["metadata"]["version"], scqc::cli::version());
    EXPECT_NE(slurp(a.parent_path() / "g.svg").find("<svg"), std::string::npos);
}

TEST(Cli, AverageZDefaultsToSixteen) {
    const fs::path a = scratch("avg/grid.csv");
    ASSERT_EQ(run({"sweep", "--family", "parity", "--grid", "2", "--average-z", "--out", a.string()}).code, 0);
    EXPECT_EQ(json::parse(slurp(a.parent_path() / "grid.json"))["metadata"]["config"]["average_z"], 16);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run({"sweep", "--family", "parity", "--grid", "0"}).code, 2);
    EXPECT_EQ(run({"sweep", "--family", "parity", "--eps-range", "1:0"}).code, 2);
    EXPECT_EQ(run({"check"}).code, 2);
    EXPECT_EQ(run({"check", "--family", "helix"}).code, 2);
    EXPECT_EQ(run({"check", "--family", "parity", "--curve", "x.json"}).code, 2);
    EXPECT_EQ(run({"family", "bessel", "--index", "1"}).code, 2);
    EXPECT_EQ(run({"family", "tilted", "--theta", "4"}).code, 2);
    EXPECT_EQ(run({"bogus"}).code, 2);
    EXPECT_EQ(run({"check", "--family", "parity", "--frobnicate"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
    // theta = pi admits no closing speed profile: a numerical failure, not bad input.
    EXPECT_EQ(run({"family", "tilted", "--theta", "3.141592653589793"}).code, 3);
}

TEST(Cli, MalformedSpecReportsLocation) {
    const fs::path spec = scratch("bad.json");
    {
        std::ofstream f(spec);
        f << "{\n  \"kind\": \"analytic\",\n  \"components\": [\"l\", \"l\" \"0\"]\n}\n";
    }
    Result r = run({"check", "--curve", spec.string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
    {
        std::ofstream f(spec);
        f << R"({"kind": "analytic", "components": ["l", "cos(", "0"], "domain": [0, 1]})";
    }
    r = run({"check", "--curve", spec.string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("components[1]"), std::string::npos) << r.err;
}
