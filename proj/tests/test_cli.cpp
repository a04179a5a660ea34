#include "cli.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

struct Result {
    int code = -1;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args, const std::string& config_env = {})
{
    args.insert(args.begin(), "ncring");
    std::ostringstream out;
    std::ostringstream err;
    Result r;
    r.code = ncring::cli::run(args, out, err, config_env);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string tmp(const std::string& name)
{
    return std::string(NCRING_TEST_TMPDIR) + "/cli_" + name;
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const std::string& path, const std::string& text)
{
    std::ofstream(path, std::ios::binary) << text;
}

std::vector<std::string> lines_of(const std::string& text)
{
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        lines.push_back(line);
    return lines;
}

std::string first_data_header(const std::string& text)
{
    for (const auto& line : lines_of(text))
        if (!line.empty() && line.front() != '#')
            return line;
    return {};
}

} // namespace

TEST(Cli, VerifyAlgebraCanonical)
{
    const auto r = invoke({"verify-algebra", "--alpha", "1", "--theta-tilde", "0"});
    ASSERT_EQ(r.code, ncring::cli::exit_ok) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["heisenberg_residual"].get<double>(), 0.0);
    EXPECT_EQ(j["comm_xy"].get<double>(), 0.0);
    EXPECT_EQ(j["comm_pxpy"].get<double>(), 0.0);
    EXPECT_TRUE(j.contains("comm_xpx"));
    EXPECT_TRUE(j.contains("config"));
}

TEST(Cli, VerifyAlgebraConstraints)
{
    const auto standard = json::parse(invoke({"verify-algebra", "--alpha", "0.9", "--theta-tilde", "1e-30"}).out);
    EXPECT_NEAR(standard["heisenberg_residual"].get<double>(), 0.095, 1e-12);
    const auto closing = json::parse(
        invoke({"verify-algebra", "--alpha", "0.9", "--theta-tilde", "1e-30", "--constraint", "heisenberg-closing"}).out);
    EXPECT_LE(closing["heisenberg_residual"].get<double>(), 1e-12);
    EXPECT_EQ(invoke({"verify-algebra", "--alpha", "0.5", "--theta-tilde", "0"}).code, ncring::cli::exit_validation);
    EXPECT_EQ(invoke({"verify-algebra", "--alpha", "1.5"}).code, ncring::cli::exit_validation);
}

TEST(Cli, UsageErrors)
{
    EXPECT_EQ(invoke({}).code, ncring::cli::exit_validation);
    EXPECT_EQ(invoke({"frobnicate"}).code, ncring::cli::exit_validation);
    EXPECT_EQ(invoke({"simulate", "--no-such-flag"}).code, ncring::cli::exit_validation);
    EXPECT_EQ(invoke({"simulate", "--radius-m", "-1"}).code, ncring::cli::exit_validation);
    EXPECT_EQ(invoke({"--help"}).code, ncring::cli::exit_ok);
}

TEST(Cli, SimulateColumns)
{
    const auto r = invoke({"simulate", "--n-electrons", "3", "--theta-tilde", "0", "--n-points", "11"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(first_data_header(r.out), "f,E_g_joule,J_ampere");
    int rows = 0;
    for (const auto& line : lines_of(r.out))
        if (!line.empty() && line.front() != '#' && line != "f,E_g_joule,J_ampere")
            ++rows;
    EXPECT_EQ(rows, 11);
    EXPECT_NE(r.out.find("# config.n_electrons=3\n"), std::string::npos);
}

TEST(Cli, SignaturesColumns)
{
    const auto r = invoke({"signatures", "--n-points", "8"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(first_data_header(r.out), "f,lambda,sigma,log10f,log10_abs_lambda,log10_abs_sigma");
}

TEST(Cli, FigureDataLayout)
{
    const auto r = invoke({"figure-data", "--figure", "1", "--n", "10001", "--n-points", "16"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(first_data_header(r.out), "n_electrons,f,lambda,sigma,log10f,log10_abs_lambda,log10_abs_sigma");
    int rows = 0;
    for (const auto& line : lines_of(r.out))
        if (line.rfind("10001,", 0) == 0)
            ++rows;
    EXPECT_EQ(rows, 16);

    const auto defaults = invoke({"figure-data", "--figure", "2", "--n-points", "4"});
    ASSERT_EQ(defaults.code, 0) << defaults.err;
    for (const char* n : {"10000,", "50000,", "100000,"})
        EXPECT_NE(defaults.out.find(std::string("\n") + n), std::string::npos) << n;

    EXPECT_EQ(invoke({"figure-data", "--figure", "1", "--n", "10000"}).code, ncring::cli::exit_validation);
    EXPECT_EQ(invoke({"figure-data", "--figure", "3"}).code, ncring::cli::exit_validation);
}

TEST(Cli, GenerateThenAnalyze)
{
    const auto csv = tmp("gen.csv");
    ASSERT_EQ(invoke({"generate", "--n-electrons", "100001", "--n-points", "256", "--output", csv}).code, 0);
    const auto r = invoke({"analyze", csv});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_TRUE(j["verdict"]["nc_detected"].get<bool>());
    EXPECT_EQ(j["verdict"]["parity"], "odd");
    EXPECT_EQ(j["verdict"]["branch"], "criterion-1");
    EXPECT_NEAR(j["f_nc_hat"].get<double>(), 1.5828e-5, 0.005 * 1.5828e-5);
    EXPECT_EQ(j["n_hat"].get<long long>(), 100001);
    for (const char* key : {"lambda_fit", "sigma_fit", "theta_tilde_hat", "n_source", "notes", "max_identity_residual"})
        EXPECT_TRUE(j.contains(key)) << key;

    const auto null_csv = tmp("gen_null.csv");
    ASSERT_EQ(invoke({"generate", "--n-electrons", "100000", "--theta-tilde", "0", "--output", null_csv}).code, 0);
    const auto jn = json::parse(invoke({"analyze", null_csv}).out);
    EXPECT_FALSE(jn["verdict"]["nc_detected"].get<bool>());
    EXPECT_EQ(jn["verdict"]["branch"], "null-even");
}

TEST(Cli, AnalyzeWithoutNEstimates)
{
    const auto csv = tmp("gen_omit.csv");
    ASSERT_EQ(invoke({"generate", "--n-electrons", "10000", "--omit-n", "--output", csv}).code, 0);
    EXPECT_EQ(slurp(csv).find("# n_electrons="), std::string::npos);
    const auto j = json::parse(invoke({"analyze", csv}).out);
    EXPECT_EQ(j["n_source"], "estimated");
    EXPECT_EQ(j["n_hat"].get<long long>(), 10000);
    EXPECT_EQ(j["verdict"]["branch"], "criterion-2");
}

TEST(Cli, SignaturesCsvOutput)
{
    const auto csv = tmp("gen_sig.csv");
    const auto sig = tmp("sig_out.csv");
    ASSERT_EQ(invoke({"generate", "--output", csv}).code, 0);
    ASSERT_EQ(invoke({"analyze", csv, "--signatures-csv", sig, "--output", tmp("report.json")}).code, 0);
    EXPECT_EQ(first_data_header(slurp(sig)), "f,lambda_hat,sigma_hat");
    EXPECT_TRUE(json::parse(slurp(tmp("report.json"))).contains("verdict"));
}

TEST(Cli, ByteIdenticalReruns)
{
    const std::vector<std::string> gen{"generate", "--relative-sigma", "0.01", "--seed", "9", "--n-points", "128"};
    const auto a = invoke(gen);
    const auto b = invoke(gen);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    spit(tmp("det.csv"), a.out);
    const auto ra = invoke({"analyze", tmp("det.csv")});
    const auto rb = invoke({"analyze", tmp("det.csv")});
    ASSERT_EQ(ra.code, 0) << ra.err;
    EXPECT_EQ(ra.out, rb.out);
}

TEST(Cli, ConfigFileAndFlagPrecedence)
{
    const auto cfg = tmp("run.cfg");
    spit(cfg, "# ring\nn_electrons = 7\nn_points=9\ntheta_tilde=0\n");
    const auto r = invoke({"simulate", "--config", cfg});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("# config.n_electrons=7\n"), std::string::npos);
    EXPECT_NE(r.out.find("# config.n_points=9\n"), std::string::npos);

    const auto flag_wins = invoke({"simulate", "--config", cfg, "--n-electrons", "8"});
    ASSERT_EQ(flag_wins.code, 0) << flag_wins.err;
    EXPECT_NE(flag_wins.out.find("# config.n_electrons=8\n"), std::string::npos);

    // NCRING_CONFIG supplies the same file when --config is absent.
    const auto env = invoke({"simulate"}, cfg);
    EXPECT_EQ(env.out, r.out);

    // Keys for other subcommands are ignored; keys nobody knows are rejected.
    spit(tmp("other.cfg"), "seed=4\n");
    EXPECT_EQ(invoke({"simulate", "--config", tmp("other.cfg")}).code, 0);
    spit(tmp("bad.cfg"), "colour=blue\n");
    const auto bad = invoke({"simulate", "--config", tmp("bad.cfg")});
    EXPECT_EQ(bad.code, ncring::cli::exit_validation);
    EXPECT_NE(bad.err.find("colour"), std::string::npos);
    spit(tmp("junk.cfg"), "no equals sign\n");
    EXPECT_EQ(invoke({"simulate", "--config", tmp("junk.cfg")}).code, ncring::cli::exit_validation);
    EXPECT_EQ(invoke({"simulate", "--config", tmp("missing.cfg")}).code, ncring::cli::exit_validation);
}

TEST(Cli, ConfigEchoInGeneratedHeader)
{
    const auto r = invoke({"generate", "--seed", "5", "--n-points", "8"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("# config.seed=5\n"), std::string::npos);
    EXPECT_NE(r.out.find("# config.mass_kg=9.1093837015000008e-31\n"), std::string::npos);
}

TEST(Cli, ThresholdsFile)
{
    const auto csv = tmp("thr.csv");
    ASSERT_EQ(invoke({"generate", "--output", csv}).code, 0);
    // An impossible exponent target defeats every branch.
    spit(tmp("thr.txt"), "exponent_target=-1\nexponent_tolerance=0.01\n");
    const auto j = json::parse(invoke({"analyze", csv, "--thresholds", tmp("thr.txt")}).out);
    EXPECT_EQ(j["verdict"]["branch"], "inconclusive");
    spit(tmp("thr_bad.txt"), "loudness=3\n");
    EXPECT_EQ(invoke({"analyze", csv, "--thresholds", tmp("thr_bad.txt")}).code, ncring::cli::exit_validation);
}

TEST(Cli, AnalyzeErrorCodes)
{
    spit(tmp("short.csv"), "f,current_A\n0.1,1\n0.2,2\n");
    const auto shortfile = invoke({"analyze", tmp("short.csv")});
    EXPECT_EQ(shortfile.code, ncring::cli::exit_validation);
    EXPECT_NE(shortfile.err.find("line"), std::string::npos);
    EXPECT_EQ(invoke({"analyze", tmp("does_not_exist.csv")}).code, ncring::cli::exit_validation);

    // Every sample is below the default f_floor: a pipeline failure.
    const auto low = tmp("low.csv");
    ASSERT_EQ(invoke({"generate", "--f-min", "0.001", "--f-max", "0.005", "--output", low}).code, 0);
    EXPECT_EQ(invoke({"analyze", low}).code, ncring::cli::exit_pipeline);
}

TEST(Cli, GenerateGridValidation)
{
    EXPECT_EQ(invoke({"generate", "--f-max", "0.7"}).code, ncring::cli::exit_validation);
    EXPECT_EQ(invoke({"generate", "--n-points", "4"}).code, ncring::cli::exit_validation);
    EXPECT_EQ(invoke({"generate", "--spacing", "cubic"}).code, ncring::cli::exit_validation);
}
