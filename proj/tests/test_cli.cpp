#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "nodal/lab_cli.hpp"

using namespace nodal;
namespace fs = std::filesystem;

namespace {

struct result {
    int code;
    std::string out;
    std::string err;
};

result lab(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir = fs::temp_directory_path() / ("nodal_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir);
        save_ensemble(wave_ensemble({plane_wave_term(1, {1, 0}, 0), plane_wave_term(1.05, {0, 1}, 0)}),
                      path("figure1.json"));
        save_ensemble(wave_ensemble({plane_wave_term(1, {1, 0}, 0), plane_wave_term(1, {0, 1}, 0)}),
                      path("checker.json"));
        save_ensemble(build_three_wave({1, 0}, {0, 1}, {std::sqrt(0.5), std::sqrt(0.5)}, 0.2, 1.0),
                      path("triangle.json"));
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string path(const std::string& name) const { return (dir / name).string(); }

    fs::path dir;
};

} // namespace

TEST_F(Cli, UsageErrors)
{
    EXPECT_EQ(lab({}).code, cli::usage);
    EXPECT_EQ(lab({"frobnicate"}).code, cli::usage);
    const auto r = lab({"census"});
    EXPECT_EQ(r.code, cli::usage);
    EXPECT_NE(r.err.find("--ensemble"), std::string::npos);
    EXPECT_EQ(lab({"census", "--ensemble", path("figure1.json"), "--eps", "abc"}).code, cli::usage);
    EXPECT_EQ(lab({"domination"}).code, cli::usage);
    EXPECT_EQ(lab({"--help"}).code, cli::ok);
}

TEST_F(Cli, DomainErrors)
{
    const auto missing = lab({"eval", "--ensemble", path("nope.json")});
    EXPECT_EQ(missing.code, cli::domain_failure);
    EXPECT_NE(missing.err.find("IoFailure"), std::string::npos);
    std::ofstream(path("bad.json")) << "{\"terms\": [{\"a\": 1}]}";
    EXPECT_EQ(lab({"eval", "--ensemble", path("bad.json")}).code, cli::domain_failure);
    EXPECT_EQ(lab({"census", "--ensemble", path("figure1.json"), "--radius", "1e6", "--step", "0.01"}).code,
              cli::domain_failure);
    EXPECT_EQ(lab({"lemma3", "--k3", "1", "0"}).code, cli::domain_failure);
}

TEST_F(Cli, Eval)
{
    const auto r = lab({"eval", "--ensemble", path("checker.json"), "--x", "0", "--y", "0"});
    ASSERT_EQ(r.code, cli::ok) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_DOUBLE_EQ(j["value"].get<double>(), 2.0);
    EXPECT_DOUBLE_EQ(j["gradient"][0].get<double>(), 0.0);
}

TEST_F(Cli, CensusOfFigure1HasNoCompactDomain)
{
    const auto r = lab({"census", "--ensemble", path("figure1.json"), "--radius", "10"});
    ASSERT_EQ(r.code, cli::ok) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["plain_count"].get<std::size_t>(), 0u);
    EXPECT_EQ(j["certified_count"].get<std::size_t>(), 0u);
}

TEST_F(Cli, CensusWithRefinement)
{
    const auto r = lab({"census", "--ensemble", path("triangle.json"), "--radius", "6.3", "--eps", "0.001", "--step",
                        "0.04", "--refine", "0.005"});
    ASSERT_EQ(r.code, cli::ok) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_GE(j["certified_count"].get<std::size_t>(), 1u);
    EXPECT_GE(j["refinement"].size(), 2u);
}

TEST_F(Cli, CheckReportsSupport)
{
    const auto r = lab({"check", "--ensemble", path("figure1.json")});
    EXPECT_EQ(r.code, cli::domain_failure);
    EXPECT_NE(r.err.find("support 4 < 6"), std::string::npos) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_FALSE(j["passed"].get<bool>());
}

TEST_F(Cli, IndependenceAndDomination)
{
    const auto ind = lab({"independence", "--ensemble", path("figure1.json"), "--height", "5"});
    ASSERT_EQ(ind.code, cli::ok) << ind.err;
    EXPECT_TRUE(nlohmann::json::parse(ind.out).contains("outcome"));
    const auto dom = lab({"domination", "--amplitudes", "1,2,3.005"});
    ASSERT_EQ(dom.code, cli::ok) << dom.err;
    const auto j = nlohmann::json::parse(dom.out);
    EXPECT_TRUE(j["non_dominated"].get<bool>());
    EXPECT_NEAR(j["residual"].get<double>(), 0.005, 1e-12);
    const auto dom2 = lab({"domination", "--amplitudes", "1,2,10"});
    EXPECT_FALSE(nlohmann::json::parse(dom2.out)["non_dominated"].get<bool>());
}

TEST_F(Cli, Lemma3EmitsEnsembleAndTrace)
{
    const auto r = lab({"lemma3", "--epsilon", "0.01"});
    ASSERT_EQ(r.code, cli::ok) << r.err;
    const auto e = parse_ensemble(r.out);
    ASSERT_EQ(e.size(), 3u);
    EXPECT_NEAR(e.terms()[2].amplitude, 0.038020, 1e-6);
    EXPECT_NE(r.err.find("SameSign"), std::string::npos);
    EXPECT_NE(r.err.find("lambda'"), std::string::npos);
}

TEST_F(Cli, TorusEmitsEnsembleAndTrace)
{
    const auto r = lab({"torus", "--targets", "10,40,75", "--tolerance", "0.2", "--m-max", "100000"});
    ASSERT_EQ(r.code, cli::ok) << r.err;
    const auto e = parse_ensemble(r.out);
    ASSERT_EQ(e.size(), 6u);
    const double m = dot(e.terms()[0].wavevector, e.terms()[0].wavevector);
    for (const auto& t : e.terms())
        EXPECT_EQ(dot(t.wavevector, t.wavevector), m);
    EXPECT_NE(r.err.find("accepted"), std::string::npos);
    EXPECT_NE(r.err.find("lambda_p"), std::string::npos);
}

TEST_F(Cli, ScalingCsv)
{
    const auto refused = lab({"scaling", "--ensemble", path("triangle.json"), "--radii", "5,10"});
    EXPECT_EQ(refused.code, cli::domain_failure);
    EXPECT_NE(refused.err.find("HypothesesFailed"), std::string::npos);

    const std::vector<std::string> args{"scaling", "--ensemble", path("triangle.json"), "--radii", "5,10",
                                        "--eps", "0.001", "--step", "0.04", "--unchecked", "--omit-timing"};
    const auto a = lab(args);
    ASSERT_EQ(a.code, cli::ok) << a.err;
    EXPECT_EQ(a.out.substr(0, a.out.find('\n')), "r,plain,certified,seconds");
    EXPECT_NE(a.err.find("warning: bucket 0 dominated"), std::string::npos) << a.err;
    EXPECT_EQ(lab(args).out, a.out);
    const auto rows = parse_scaling_csv(a.out);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].r, 5.0);

    auto to_file = args;
    to_file.insert(to_file.end(), {"-o", path("s.csv")});
    ASSERT_EQ(lab(to_file).code, cli::ok);
    EXPECT_EQ(slurp(path("s.csv")), a.out);
}

TEST_F(Cli, RenderIsDeterministic)
{
    const std::vector<std::string> base{"render", "--ensemble", path("figure1.json"), "--radius", "9.42477796",
                                        "--eps", "0.06", "--step", "0.02"};
    auto a = base, b = base;
    a.insert(a.end(), {"-o", path("a.pgm")});
    b.insert(b.end(), {"-o", path("b.pgm")});
    ASSERT_EQ(lab(a).code, cli::ok);
    ASSERT_EQ(lab(b).code, cli::ok);
    const auto img = slurp(path("a.pgm"));
    EXPECT_EQ(img, slurp(path("b.pgm")));
    EXPECT_EQ(img.rfind("P5 ", 0), 0u);
}

TEST_F(Cli, BinaryExitCodes)
{
    auto status = [](const std::string& cmd) {
        const int s = std::system((cmd + " >/dev/null 2>&1").c_str());
        return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
    };
    const std::string exe = NODAL_LAB_PATH;
    EXPECT_EQ(status(exe + " eval --ensemble " + path("checker.json")), 0);
    EXPECT_EQ(status(exe + " check --ensemble " + path("checker.json")), 1);
    EXPECT_EQ(status(exe + " census"), 2);
}
