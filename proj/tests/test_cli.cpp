#include "corrscreen/cli.hpp"
#include "corrscreen/ingest.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <sstream>

using namespace corrscreen;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome call(std::vector<std::string> args) {
    args.insert(args.begin(), "corrscreen");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

void write_random(const std::filesystem::path& path, std::size_t n, std::size_t p, unsigned seed) {
    std::mt19937_64 rng(seed);
    write_matrix(path, oracle::matrix(oracle::gaussian(n, p, rng)));
}

}  // namespace

TEST(Cli, RangeAndListParsing) {
    EXPECT_EQ(cli::parse_size_list("10:35:5"), (std::vector<std::size_t>{10, 15, 20, 25, 30, 35}));
    EXPECT_EQ(cli::parse_size_list("3,7:9:1"), (std::vector<std::size_t>{3, 7, 8, 9}));
    const auto r = cli::parse_real_list("0:1:0.25");
    ASSERT_EQ(r.size(), 5u);
    EXPECT_DOUBLE_EQ(r[4], 1.0);
    EXPECT_THROW(cli::parse_size_list("2.5"), std::invalid_argument);
    EXPECT_THROW(cli::parse_real_list("1:2"), std::invalid_argument);
    EXPECT_THROW(cli::parse_real_list("abc"), std::invalid_argument);
    EXPECT_THROW(cli::parse_real_list("5:1:1"), std::invalid_argument);
}

TEST(Cli, ScreenHappyPath) {
    oracle::TempDir tmp("cli");
    write_random(tmp / "a.csv", 10, 40, 1);
    const auto edges = (tmp / "e.csv").string(), summary = (tmp / "s.json").string();
    const auto o = call({"screen", "--mode", "auto", "--input", (tmp / "a.csv").string(), "--rho", "0.6", "--edges",
                         edges, "--summary", summary, "--discoveries", (tmp / "d.csv").string()});
    ASSERT_EQ(o.code, 0) << o.err;
    const auto s = nlohmann::json::parse(oracle::slurp(summary));
    EXPECT_EQ(s["mode"], "auto");
    EXPECT_EQ(s["p"], 40);
    EXPECT_EQ(s["threshold"]["kind"], "user");
    EXPECT_EQ(s["provenance"]["version"], std::string(cli::kVersion));
    const auto text = oracle::slurp(edges);
    EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), s["N_e"].get<std::size_t>() + 1);
    EXPECT_TRUE(std::filesystem::exists(tmp / "d.csv"));

    // Identical provenance gives identical bytes.
    ASSERT_EQ(call({"screen", "--mode", "auto", "--input", (tmp / "a.csv").string(), "--rho", "0.6", "--edges",
                    (tmp / "e2.csv").string(), "--summary", (tmp / "s2.json").string()})
                  .code,
              0);
    EXPECT_EQ(oracle::slurp(tmp / "e2.csv"), text);
}

TEST(Cli, ScreenAlphaAndCritical) {
    oracle::TempDir tmp("cli");
    write_random(tmp / "a.csv", 20, 50, 2);
    auto o = call({"screen", "--input", (tmp / "a.csv").string(), "--alpha", "0.05"});
    ASSERT_EQ(o.code, 0) << o.err;
    auto s = nlohmann::json::parse(o.out);
    EXPECT_EQ(s["threshold"]["kind"], "fwer_solved");
    EXPECT_NEAR(s["threshold"]["alpha"].get<double>(), 0.05, 1e-9);
    o = call({"screen", "--input", (tmp / "a.csv").string(), "--critical"});
    ASSERT_EQ(o.code, 0) << o.err;
    s = nlohmann::json::parse(o.out);
    EXPECT_EQ(s["threshold"]["kind"], "critical_point");
    EXPECT_EQ(s["threshold"]["variant"], "table_matching");
    EXPECT_EQ(call({"screen", "--input", (tmp / "a.csv").string()}).code, cli::kExitUsage);
    EXPECT_EQ(call({"screen", "--input", (tmp / "a.csv").string(), "--rho", "0.5", "--alpha", "0.1"}).code,
              cli::kExitUsage);
}

TEST(Cli, CrossUnequalSampleCountsExit65) {
    oracle::TempDir tmp("cli");
    write_random(tmp / "a.csv", 10, 20, 3);
    write_random(tmp / "b.csv", 12, 20, 4);
    const auto o = call({"screen", "--mode", "cross", "--input", (tmp / "a.csv").string(), "--input",
                         (tmp / "b.csv").string(), "--rho", "0.9"});
    EXPECT_EQ(o.code, cli::kExitData);
    EXPECT_NE(o.err.find("n_a = n_b"), std::string::npos);
}

TEST(Cli, CrossAndPersistentViaManifest) {
    oracle::TempDir tmp("cli");
    write_random(tmp / "a.csv", 10, 30, 5);
    write_random(tmp / "b.csv", 10, 30, 6);
    oracle::spit(tmp / "m.json", R"({"treatments":[{"label":"A","path":"a.csv"},{"label":"B","path":"b.csv"}]})");
    auto o = call({"screen", "--mode", "cross", "--manifest", (tmp / "m.json").string(), "--rho", "0.7"});
    ASSERT_EQ(o.code, 0) << o.err;
    auto s = nlohmann::json::parse(o.out);
    EXPECT_EQ(s["N_counts_side"], "a");
    EXPECT_TRUE(s.contains("N_b"));
    o = call({"screen", "--mode", "persistent", "--manifest", (tmp / "m.json").string(), "--alpha", "0.1"});
    ASSERT_EQ(o.code, 0) << o.err;
    s = nlohmann::json::parse(o.out);
    EXPECT_EQ(s["rho"].size(), 2u);
    EXPECT_EQ(s["treatments"], (std::vector<std::string>{"A", "B"}));
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(call({}).code, cli::kExitUsage);
    EXPECT_EQ(call({"frobnicate"}).code, cli::kExitUsage);
    EXPECT_EQ(call({"p0", "--rho", "0.5", "--n", "10", "--bogus"}).code, cli::kExitUsage);
    EXPECT_EQ(call({"screen", "--input", "/nonexistent/x.csv", "--rho", "0.5"}).code, cli::kExitIo);
    EXPECT_EQ(call({"phase", "--p", "2", "--n", "3", "--alpha", "0.99"}).code, cli::kExitData);
    EXPECT_EQ(call({"--help"}).code, cli::kExitOk);
    const auto v = call({"--version"});
    EXPECT_EQ(v.code, cli::kExitOk);
    EXPECT_NE(v.out.find(std::string(cli::kVersion)), std::string::npos);
    oracle::TempDir tmp("cli");
    oracle::spit(tmp / "bad.csv", "a,b\n1,2\n3\n4,5\n");
    EXPECT_EQ(call({"screen", "--input", (tmp / "bad.csv").string(), "--rho", "0.5"}).code, cli::kExitData);
    write_random(tmp / "a.csv", 10, 5, 1);
    EXPECT_EQ(call({"screen", "--input", (tmp / "a.csv").string(), "--rho", "0.5", "--edges", "/nonexistent/dir/e.csv"})
                  .code,
              cli::kExitIo);
}

TEST(Cli, PowerTableShape) {
    const auto o = call({"power-table", "--p", "500", "--n", "10:35:5", "--alpha", "0.01,0.025,0.05,0.075,0.1",
                         "--beta", "0.8"});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_EQ(std::count(o.out.begin(), o.out.end(), '\n'), 31);
    EXPECT_EQ(o.out.substr(0, o.out.find('\n')), "n,alpha,rho,rho1,beta,p");
}

TEST(Cli, PhaseAndTable1) {
    auto o = call({"phase", "table1", "--p", "500"});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_NE(o.out.find("550,0.1881,"), std::string::npos);
    EXPECT_NE(o.out.find("\n6,0.9997,"), std::string::npos);
    o = call({"phase", "--mode", "persistent", "--p", "500", "--n", "10,10", "--alpha", "0.01"});
    ASSERT_EQ(o.code, 0) << o.err;
    const auto j = nlohmann::json::parse(o.out);
    EXPECT_NEAR(j["rho"][0].get<double>(), 0.9617, 1e-4);
    o = call({"p0", "--rho", "0.5", "--n", "4"});
    ASSERT_EQ(o.code, 0);
    EXPECT_NEAR(nlohmann::json::parse(o.out)["exact"].get<double>(), 0.5, 1e-14);
}

TEST(Cli, SimulateFromSpec) {
    oracle::TempDir tmp("cli");
    oracle::spit(tmp / "spec.json", R"({"p":30,"n":10,"rho":0.8,"replicates":20,"master_seed":3})");
    const auto a = call({"simulate", "--spec", (tmp / "spec.json").string(), "--seeds"});
    ASSERT_EQ(a.code, 0) << a.err;
    const auto j = nlohmann::json::parse(a.out);
    EXPECT_EQ(j["seeds"].size(), 20u);
    EXPECT_EQ(j["provenance"]["seed"], 3);
    EXPECT_EQ(call({"simulate", "--spec", (tmp / "spec.json").string(), "--seeds"}).out, a.out);
    oracle::spit(tmp / "bad.json", R"({"p":"many"})");
    EXPECT_EQ(call({"simulate", "--spec", (tmp / "bad.json").string()}).code, cli::kExitData);
}

TEST(Cli, InclusionGraphWritesArtifacts) {
    oracle::TempDir tmp("cli");
    std::string manifest = R"({"treatments":[)";
    for (int t = 0; t < 3; ++t) {
        write_random(tmp / ("t" + std::to_string(t) + ".csv"), 10, 25, 10 + static_cast<unsigned>(t));
        manifest += (t ? "," : "") + std::string(R"({"label":"T)") + std::to_string(t) + R"(","path":"t)" +
                    std::to_string(t) + R"(.csv"})";
    }
    manifest += "]}";
    oracle::spit(tmp / "m.json", manifest);
    const auto o = call({"inclusion-graph", "--manifest", (tmp / "m.json").string(), "--rho", "0.6", "--csv",
                         (tmp / "g.csv").string(), "--dot", (tmp / "g.dot").string(), "--subnetwork-csv",
                         (tmp / "s.csv").string()});
    ASSERT_EQ(o.code, 0) << o.err;
    const auto j = nlohmann::json::parse(o.out);
    EXPECT_EQ(j["inclusion_graph"]["nodes"].size(), 7u);
    EXPECT_TRUE(std::filesystem::exists(tmp / "g.dot"));
    EXPECT_TRUE(std::filesystem::exists(tmp / "s.csv"));
}
