#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "pat/error.hpp"
#include "pat/report_io.hpp"

using namespace pat;

namespace {

EvaluationReport report(std::string dataset, std::string condition, Method m, double value,
                        MetricName metric = MetricName::Accuracy) {
    EvaluationReport r;
    r.dataset_name = std::move(dataset);
    r.condition = std::move(condition);
    r.method = m;
    r.metric = metric;
    r.value = value;
    r.n_samples = 10;
    r.n_prompts = 4;
    r.datastore_version = "v";
    return r;
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error";
    return ErrorKind::Io;
}

} // namespace

TEST(ReportIo, JsonRoundTrip) {
    auto r = report("ESC-50", "clean", Method::Pat, 94.8);
    r.betas = {0.01, 0.1};
    r.prompt_weights_ref = "w.json";
    r.split = "dev";
    EXPECT_EQ(report_from_json(report_to_json(r)), r);
    const auto j = nlohmann::json::parse(report_line(r, {{"created_at", "now"}}));
    EXPECT_EQ(j["metadata"]["created_at"], "now");
    EXPECT_EQ(j["method"], "pat");
    EXPECT_EQ(j["metric_name"], "accuracy");
    EXPECT_EQ(j["runs"], 1);
    EXPECT_EQ(report_from_json(j), r);
}

TEST(ReportIo, RejectsInvalidReports) {
    auto j = report_to_json(report("d", "clean", Method::Pat, 50));
    j["value"] = 101.0;
    EXPECT_EQ(kind_of([&] { report_from_json(j); }), ErrorKind::SchemaError);
    j["value"] = 50.0;
    j["n_samples"] = 0;
    EXPECT_EQ(kind_of([&] { report_from_json(j); }), ErrorKind::SchemaError);
    j.erase("n_samples");
    EXPECT_EQ(kind_of([&] { report_from_json(j); }), ErrorKind::SchemaError);
}

TEST(ReportIo, ReadLinesSkipsBlanksAndNamesBadLines) {
    fixtures::TempDir dir("rep");
    const auto r = report("d", "clean", Method::ZeroShot, 50);
    fixtures::write_file(dir / "r.jsonl", report_line(r) + "\n\n" + report_line(r) + "\n");
    EXPECT_EQ(read_report_lines(dir / "r.jsonl").size(), 2u);
    fixtures::write_file(dir / "bad.jsonl", report_line(r) + "\n{oops\n");
    try {
        read_report_lines(dir / "bad.jsonl");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
    }
}

TEST(ReportIo, WeightsExportSortedByWeight) {
    PromptWeights w;
    w.prompt_ids = {"a", "b", "c"};
    w.scores = {0.4, 1.4, 0.9};
    w.weights = {0.1, 0.6, 0.3};
    const auto j = weights_to_json(w);
    ASSERT_EQ(j.size(), 3u);
    EXPECT_EQ(j[0]["prompt_id"], "b");
    EXPECT_EQ(j[1]["prompt_id"], "c");
    EXPECT_EQ(j[2]["prompt_id"], "a");
    EXPECT_DOUBLE_EQ(j[0]["score"].get<double>(), 1.4);
}

TEST(Grid, ParsesBothFormsAndRejectsDuplicates) {
    EXPECT_EQ(parse_grid("[[0.01, 0.1], [0.05, 0.5]]").pairs.size(), 2u);
    const auto g = parse_grid(R"([{"beta_audio": 0.1, "beta_text": 0.02}])");
    EXPECT_EQ(g.pairs[0], (BetaPair{0.1, 0.02}));
    EXPECT_EQ(kind_of([] { parse_grid("[[0.01, 0.1], [0.01, 0.1]]"); }), ErrorKind::DuplicatePair);
    EXPECT_EQ(kind_of([] { parse_grid("[]"); }), ErrorKind::InvalidArgument);
    EXPECT_EQ(kind_of([] { parse_grid("[[0.1]]"); }), ErrorKind::InvalidArgument);
    EXPECT_EQ(kind_of([] { parse_grid("[[-0.1, 0.1]]"); }), ErrorKind::InvalidArgument);
    EXPECT_EQ(kind_of([] { parse_grid("{"); }), ErrorKind::InvalidArgument);
}

TEST(Delta, Formatting) {
    EXPECT_EQ(format_delta(94.80 - 91.80), "+3.00");
    EXPECT_EQ(format_delta(60.76 - 58.28), "+2.48");
    EXPECT_EQ(format_delta(-0.114), "-0.11");
    EXPECT_EQ(format_delta(0.0), "+0.00");
    EXPECT_EQ(format_delta(-0.001), "+0.00");
}

TEST(CompareTable, PublishedExample) {
    const std::vector<EvaluationReport> reports = {report("ESC-50", "clean", Method::ZeroShot, 91.80),
                                                   report("ESC-50", "clean", Method::Pat, 94.80)};
    const auto table = comparison_table(reports);
    EXPECT_NE(table.find("| ESC-50 | accuracy | 91.80 | 94.80 (+3.00) |"), std::string::npos) << table;
    EXPECT_NE(table.find("clean zs"), std::string::npos);
    EXPECT_NE(table.find("clean pat"), std::string::npos);
}

TEST(CompareTable, IdenticalReportsGiveZeroDeltas) {
    const auto r = report("US8K", "clean", Method::Pat, 80.0);
    const std::vector<EvaluationReport> reports = {r, r};
    EXPECT_NE(comparison_table(reports).find("80.00 (+0.00)"), std::string::npos);
}

TEST(CompareTable, ConditionColumnsAndMissingCells) {
    const std::vector<EvaluationReport> reports = {
        report("ESC-50", "clean", Method::ZeroShot, 90), report("ESC-50", "clean", Method::Pat, 93),
        report("ESC-50", "noise", Method::ZeroShot, 70), report("ESC-50", "noise", Method::Pat, 71.5),
        report("TUT", "clean", Method::ZeroShot, 30)};
    const auto table = comparison_table(reports);
    EXPECT_NE(table.find("| ESC-50 | accuracy | 90.00 | 93.00 (+3.00) | 70.00 | 71.50 (+1.50) |"), std::string::npos)
        << table;
    EXPECT_NE(table.find("| TUT | accuracy | 30.00 | - | - | - |"), std::string::npos) << table;
}

TEST(CompareTable, Errors) {
    const auto a = report("d", "clean", Method::ZeroShot, 50);
    const auto b = report("d", "clean", Method::Pat, 60, MetricName::MeanAveragePrecision);
    const std::vector<EvaluationReport> mismatch = {a, b};
    EXPECT_EQ(kind_of([&] { comparison_table(mismatch); }), ErrorKind::MetricMismatch);
    const std::vector<EvaluationReport> one = {a};
    EXPECT_EQ(kind_of([&] { comparison_table(one); }), ErrorKind::InvalidArgument);
    const std::vector<EvaluationReport> unrelated = {a, report("e", "clean", Method::Pat, 60)};
    EXPECT_EQ(kind_of([&] { comparison_table(unrelated); }), ErrorKind::InvalidArgument);
}
