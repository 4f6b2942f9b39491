#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include <qpmut/json_io.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace
{

struct run_result {
    int code;
    std::string out;
    std::string err;
};

class Cli : public ::testing::Test
{
protected:
    void SetUp() override
    {
        dir = fs::temp_directory_path() / ("qpmut_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    void TearDown() override
    {
        fs::remove_all(dir);
    }

    std::string file(const std::string &name, const json &j)
    {
        const auto p = (dir / name).string();
        std::ofstream(p) << j.dump();
        return p;
    }

    std::string path(const std::string &name) const
    {
        return (dir / name).string();
    }

    run_result run(const std::string &args, const std::string &env = "")
    {
        const auto err = path("stderr.txt");
        const std::string cmd = env + " " + QPMUT_CLI + " " + args + " 2>" + err;
        FILE *pipe = ::popen(cmd.c_str(), "r");
        std::string out;
        std::array<char, 4096> buf{};
        while (const auto n = std::fread(buf.data(), 1, buf.size(), pipe)) {
            out.append(buf.data(), n);
        }
        const int status = ::pclose(pipe);
        std::ifstream e(err);
        std::string errs((std::istreambuf_iterator<char>(e)), std::istreambuf_iterator<char>());
        return {WEXITSTATUS(status), out, errs};
    }

    fs::path dir;
};

json a2()
{
    return {{"vertices", {"1", "2"}}, {"arrows", {{{"id", "a"}, {"tail", "1"}, {"head", "2"}}}}};
}

json triangle_qp()
{
    return {{"quiver",
             {{"vertices", {"1", "2", "3"}},
              {"arrows",
               {{{"id", "a"}, {"tail", "1"}, {"head", "2"}},
                {{"id", "b"}, {"tail", "2"}, {"head", "3"}},
                {{"id", "c"}, {"tail", "3"}, {"head", "1"}}}}}},
            {"potential", {{"order", 8}, {"terms", {{{"path", {"c", "b", "a"}}, {"coeff", "1"}}}}}}};
}

json two_cycle_qp()
{
    return {{"quiver",
             {{"vertices", {"1", "2"}},
              {"arrows", {{{"id", "a"}, {"tail", "1"}, {"head", "2"}}, {{"id", "b"}, {"tail", "2"}, {"head", "1"}}}}}},
            {"potential", {{"terms", {{{"path", {"b", "a"}}, {"coeff", "1"}}}}}}};
}

} // namespace

TEST_F(Cli, MutateSinkReverses)
{
    const auto in = file("a2.json", a2());
    const auto r = run("mutate --in " + in + " --vertex 2 --out " + path("out.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto out = qpmut::io::read_file(path("out.json"));
    EXPECT_EQ(out, json({{"vertices", {"1", "2"}}, {"arrows", {{{"id", "a*"}, {"tail", "2"}, {"head", "1"}}}}}));
}

TEST_F(Cli, JacDimsTrivialTwoCycle)
{
    const auto r = run("jac-dims --in " + file("t.json", two_cycle_qp()) + " --order 6");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["dims"], json({2, 0, 0, 0, 0}));
    EXPECT_EQ(j["order"], 6);
    EXPECT_EQ(j["trusted_below_degree"], 5);
}

TEST_F(Cli, DefaultOrderFromEnvironment)
{
    const auto in = file("t.json", two_cycle_qp());
    EXPECT_EQ(json::parse(run("jac-dims --in " + in).out)["order"], 10);
    EXPECT_EQ(json::parse(run("jac-dims --in " + in, "QPMUT_DEFAULT_ORDER=5").out)["order"], 5);
    EXPECT_EQ(run("jac-dims --in " + in, "QPMUT_DEFAULT_ORDER=x").code, 2);
}

TEST_F(Cli, CheckInvolutionTriangle)
{
    const auto r = run("check-involution --in " + file("tri.json", triangle_qp()) + " --vertex 2");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_TRUE(j["passed"].get<bool>());
    EXPECT_TRUE(j["arrows_match"].get<bool>());
    EXPECT_TRUE(j["dims_match"].get<bool>());
    EXPECT_TRUE(j["profile_match"].get<bool>());
    const auto lifted = run("check-involution --in " + path("tri.json") + " --vertex 2 --lift 16");
    ASSERT_EQ(lifted.code, 0) << lifted.err;
    EXPECT_EQ(json::parse(lifted.out)["compared_order"], 8);
}

TEST_F(Cli, MutateQpWithProvenanceRoundTrips)
{
    const auto r = run("mutate-qp --in " + file("tri.json", triangle_qp()) + " --vertex 2 --order 8 --out "
                       + path("mu.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = qpmut::io::read_file(path("mu.json"));
    EXPECT_EQ(j["provenance"]["a*"]["kind"], "reversed");
    EXPECT_EQ(j["quiver"]["arrows"].size(), 2u);
    EXPECT_TRUE(j["potential"]["terms"].empty());
    const auto x = qpmut::io::qp_from_json(j);
    auto again = qpmut::io::to_json(x);
    EXPECT_EQ(again["quiver"], j["quiver"]);
    EXPECT_EQ(again["potential"], j["potential"]);
    // Mutating the output back returns the original quiver.
    const auto back = run("mutate-qp --in " + path("mu.json") + " --vertex 2");
    ASSERT_EQ(back.code, 0) << back.err;
    EXPECT_EQ(json::parse(back.out)["quiver"]["arrows"].size(), 3u);
}

TEST_F(Cli, ReduceEmitsSplit)
{
    const auto r = run("reduce --in " + file("t.json", two_cycle_qp()) + " --order 8");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["trivial_pairs"], json::parse(R"([{"a":"a","b":"b"}])"));
    EXPECT_TRUE(j["reduced"]["quiver"]["arrows"].empty());
    EXPECT_TRUE(j["witness"]["images"].contains("a"));
}

TEST_F(Cli, RandomPotentialDeterministic)
{
    const auto q = file("tri_q.json", triangle_qp()["quiver"]);
    const auto r1 = run("random-potential --quiver " + q + " --seed 7 --max-degree 3");
    const auto r2 = run("random-potential --quiver " + q + " --seed 7 --max-degree 3");
    ASSERT_EQ(r1.code, 0) << r1.err;
    EXPECT_EQ(r1.out, r2.out);
    EXPECT_EQ(json::parse(r1.out)["potential"]["terms"].size(), 1u);
}

TEST_F(Cli, RepMutate)
{
    const json qp{{"quiver", a2()}};
    const json rep{{"dims", {{"1", 1}, {"2", 1}}}, {"maps", {{"a", {{"1"}}}}}, {"decoration", {{"1", 0}, {"2", 0}}}};
    const auto r = run("rep-mutate --qp " + file("q.json", qp) + " --rep " + file("r.json", rep) + " --vertex 2");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["dims"], json({{"1", 1}, {"2", 0}}));
    EXPECT_EQ(j["decoration"], json({{"1", 0}, {"2", 0}}));
    EXPECT_EQ(j["quiver"]["arrows"][0]["id"], "a*");
}

TEST_F(Cli, RepMutateRejectsNonModule)
{
    const json rep{{"dims", {{"1", 1}, {"2", 1}, {"3", 1}}}, {"maps", {{"a", {{"1"}}}, {"b", {{"1"}}}, {"c", {{"1"}}}}}};
    const auto r = run("rep-mutate --qp " + file("q.json", triangle_qp()) + " --rep " + file("r.json", rep)
                       + " --vertex 2");
    EXPECT_EQ(r.code, 3);
    EXPECT_EQ(json::parse(r.err)["error"], "NotAModule");
}

TEST_F(Cli, ErrorsAndExitCodes)
{
    const auto tri = file("tri.json", triangle_qp());
    auto r = run("mutate-qp --in " + tri + " --vertex 9");
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(json::parse(r.err)["error"], "UnknownVertex");

    r = run("mutate-qp --in " + file("t.json", two_cycle_qp()) + " --vertex 1");
    EXPECT_EQ(r.code, 3);
    EXPECT_EQ(json::parse(r.err)["error"], "TwoCycleAtVertex");
    EXPECT_TRUE(json::parse(r.err).contains("detail"));

    std::ofstream(path("bad.json")) << "{not json";
    r = run("jac-dims --in " + path("bad.json"));
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(json::parse(r.err)["error"], "ParseError");

    r = run("jac-dims --in " + path("missing.json"));
    EXPECT_EQ(r.code, 2);

    r = run("mutate-qp --in " + tri + " --vertex 2 --order 3");
    EXPECT_EQ(r.code, 3);
    EXPECT_EQ(json::parse(r.err)["error"], "InsufficientOrder");
}
