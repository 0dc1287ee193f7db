#include "corrscreen/error.hpp"
#include "corrscreen/ingest.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace corrscreen;

TEST(Ingest, ParsesHeaderAndValues) {
    const auto r = parse_matrix("a,b,c\n1,2,3\n4,5,7\n+1e1,-2.5,0\n", {});
    const auto& d = r.data;
    ASSERT_EQ(d.n(), 3u);
    ASSERT_EQ(d.p(), 3u);
    EXPECT_EQ(d.variable_ids(), (std::vector<std::string>{"a", "b", "c"}));
    EXPECT_DOUBLE_EQ(d.values()(2, 0), 10.0);
    EXPECT_DOUBLE_EQ(d.values()(2, 1), -2.5);
    EXPECT_TRUE(r.dropped_ids.empty());
}

TEST(Ingest, HeaderlessGetsDefaultIds) {
    LoadOptions o;
    o.header = false;
    const auto r = parse_matrix("1 2\n3 5\n4 4\n", [&] { o.delimiter = ' '; return o; }());
    EXPECT_EQ(r.data.variable_ids(), (std::vector<std::string>{"V1", "V2"}));
}

TEST(Ingest, RaggedRowIsDataError) {
    EXPECT_THROW(parse_matrix("a,b\n1,2\n3\n4,5\n", {}), DataError);
}

TEST(Ingest, NonFiniteCellIsDataError) {
    EXPECT_THROW(parse_matrix("a,b\n1,2\nnan,3\n4,5\n", {}), DataError);
    EXPECT_THROW(parse_matrix("a,b\n1,2\nx,3\n4,5\n", {}), DataError);
}

TEST(Ingest, TooFewSamples) {
    EXPECT_THROW(parse_matrix("a,b\n1,2\n3,4\n", {}), DataError);
}

TEST(Ingest, ConstantColumnPolicies) {
    const std::string text = "a,b,c\n1,5,2\n2,5,1\n3,5,7\n";
    EXPECT_THROW(parse_matrix(text, {}), DataError);
    LoadOptions drop;
    drop.constant_policy = ConstantColumnPolicy::drop;
    const auto r = parse_matrix(text, drop);
    EXPECT_EQ(r.data.variable_ids(), (std::vector<std::string>{"a", "c"}));
    EXPECT_EQ(r.dropped_ids, (std::vector<std::string>{"b"}));
}

TEST(Ingest, DuplicateIdsRejected) {
    EXPECT_THROW(parse_matrix("a,a\n1,2\n2,1\n3,7\n", {}), DataError);
}

TEST(Ingest, MissingFileIsIoError) {
    EXPECT_THROW(load_matrix("/nonexistent/definitely/missing.csv"), IoError);
}

TEST(Ingest, WriteReadRoundTripIsExact) {
    std::mt19937_64 rng(3);
    const auto d = oracle::matrix(oracle::gaussian(7, 5, rng));
    oracle::TempDir tmp("ingest");
    write_matrix(tmp / "x.csv", d);
    const auto back = load_matrix(tmp / "x.csv").data;
    EXPECT_EQ(back.variable_ids(), d.variable_ids());
    EXPECT_TRUE((back.values().array() == d.values().array()).all());
}

TEST(Ingest, TsvExtensionPicksTab) {
    oracle::TempDir tmp("ingest");
    oracle::spit(tmp / "x.tsv", "a\tb\n1\t2\n2\t1\n3\t9\n");
    EXPECT_EQ(load_matrix(tmp / "x.tsv").data.p(), 2u);
}

TEST(Ingest, AlignReordersToFirstTreatment) {
    Eigen::MatrixXd x(3, 3), y(3, 3);
    x << 1, 2, 3, 2, 1, 4, 3, 5, 1;
    y << 10, 20, 30, 20, 10, 40, 30, 50, 10;
    DataMatrix a(x, {"g1", "g2", "g3"}, "A");
    DataMatrix b(y, {"g3", "g1", "g2"}, "B");
    const auto set = align_treatments({a, b});
    EXPECT_EQ(set[1].variable_ids(), set[0].variable_ids());
    // g1 in b was column 1.
    EXPECT_DOUBLE_EQ(set[1].values()(0, 0), 20.0);
    EXPECT_EQ(set.labels(), (std::vector<std::string>{"A", "B"}));
    EXPECT_EQ(&set.by_label("B"), &set[1]);
}

TEST(Ingest, AlignRejectsMismatchedIds) {
    Eigen::MatrixXd x(3, 2);
    x << 1, 2, 2, 1, 3, 5;
    EXPECT_THROW(align_treatments({DataMatrix(x, {"a", "b"}, "A"), DataMatrix(x, {"a", "c"}, "B")}), DataError);
    EXPECT_THROW(align_treatments({DataMatrix(x, {"a", "b"}, "A"), DataMatrix(x, {"a", "b"}, "A")}), DataError);
}

TEST(Ingest, ManifestLoadsAndDropsUnionOfConstants) {
    oracle::TempDir tmp("manifest");
    oracle::spit(tmp / "a.csv", "g1,g2,g3\n1,2,3\n2,2,1\n3,2,7\n");
    oracle::spit(tmp / "b.csv", "g3,g1,g2\n1,9,3\n1,8,1\n1,7,2\n");
    oracle::spit(tmp / "m.json",
                 R"({"treatments":[{"label":"A","path":"a.csv"},{"label":"B","path":"b.csv"}],
                     "constant_policy":"drop"})");
    const auto r = load_treatments(tmp / "m.json");
    EXPECT_EQ(r.set.m(), 2u);
    EXPECT_EQ(r.set.variable_ids(), (std::vector<std::string>{"g1"}));
    EXPECT_EQ(r.dropped_ids, (std::vector<std::string>{"g2", "g3"}));
    EXPECT_DOUBLE_EQ(r.set[1].values()(2, 0), 7.0);
}

TEST(Ingest, ManifestErrors) {
    oracle::TempDir tmp("manifest");
    oracle::spit(tmp / "bad.json", "{not json");
    EXPECT_THROW(load_treatments(tmp / "bad.json"), DataError);
    oracle::spit(tmp / "nolabel.json", R"({"treatments":[{"path":"a.csv"}]})");
    EXPECT_THROW(load_treatments(tmp / "nolabel.json"), DataError);
    EXPECT_THROW(load_treatments(tmp / "missing.json"), IoError);
}
