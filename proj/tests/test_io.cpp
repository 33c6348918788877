/*
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    https://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/


#include "support.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <limits>
#include <random>
#include <sstream>

using namespace fastdata;
using fixtures::make_sample;

namespace {

template <typename F>
errc code_of(F&& f) {
    try {
        f();
    } catch (const error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return errc::io_error;
}

SampleTable awkward_table() {
    SampleTable t;
    t.kind = "dataset";
    t.dimension = 3;
    t.meta = {{"strategy", "x"}, {"nested", {{"a", 1}}}};
    t.samples.push_back(make_sample(0, {0.1, -0.0, 1e-310}, 2, {"night", "rain"}));
    t.samples.push_back(make_sample(4, {std::numeric_limits<double>::max(),
                                        std::numeric_limits<double>::lowest(), 1.0 / 3.0},
                                    0, {}));
    t.samples.push_back(make_sample(9, {2.0, 0.0, -7.25}, 1));
    return t;
}

} // namespace

TEST(DoubleFormat, ShortestRoundTrip) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 100000; ++i) {
        const auto bits = rng();
        double v;
        std::memcpy(&v, &bits, sizeof v);
        if (!std::isfinite(v))
            continue;
        const double back = parse_double(format_double(v));
        ASSERT_EQ(std::memcmp(&v, &back, sizeof v), 0) << format_double(v);
    }
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_THROW(parse_double("1.0x"), error);
    EXPECT_THROW(parse_double(""), error);
}

TEST(SampleTableIo, RoundTripExact) {
    const auto t = awkward_table();
    std::stringstream ss;
    write_sample_table(ss, t);
    const auto back = read_sample_table(ss);
    EXPECT_EQ(back, t);
    // signed zero survives
    EXPECT_TRUE(std::signbit(back.samples[0].features[1]));
}

TEST(SampleTableIo, GeneratedStreamRoundTrip) {
    StreamConfig cfg;
    cfg.num_classes = 4;
    cfg.dimension = 8;
    cfg.length = 500;
    cfg.seed = 3;
    cfg.tag_rules = {{1, {"night"}}};
    SampleTable t;
    t.dimension = 8;
    t.meta = {{"stream_config", to_json(cfg)}};
    t.samples = generate(cfg);
    std::stringstream ss;
    write_sample_table(ss, t);
    const auto back = read_sample_table(ss);
    EXPECT_EQ(back, t);
    EXPECT_EQ(stream_hash(back.samples), stream_hash(t.samples));
    EXPECT_EQ(stream_config_from_json(back.meta["stream_config"]), cfg);
}

TEST(SampleTableIo, CrlfTolerated) {
    std::stringstream ss;
    write_sample_table(ss, awkward_table());
    std::string text = ss.str(), crlf;
    for (char c : text) {
        if (c == '\n')
            crlf += '\r';
        crlf += c;
    }
    std::stringstream in(crlf);
    EXPECT_EQ(read_sample_table(in), awkward_table());
}

TEST(SampleTableIo, MalformedInputs) {
    std::stringstream full;
    write_sample_table(full, awkward_table());
    const std::string text = full.str();
    auto read = [](std::string s) {
        std::stringstream ss(s);
        return read_sample_table(ss);
    };
    auto replace = [&](const std::string& from, const std::string& to) {
        std::string s = text;
        s.replace(s.find(from), from.size(), to);
        return s;
    };
    EXPECT_EQ(code_of([&] { read(replace("fastdata-samples/1", "fastdata-samples/9")); }),
              errc::io_error);
    EXPECT_EQ(code_of([&] { read(replace("#dimension\t3", "#dimension\t4")); }), errc::io_error);
    EXPECT_EQ(code_of([&] { read(replace("9\t9\t1", "3\t9\t1")); }), errc::io_error);
    EXPECT_EQ(code_of([&] { read(replace("-7.25", "-7.25x")); }), errc::io_error);
    EXPECT_EQ(code_of([&] { read(replace(" -7.25", "")); }), errc::io_error);
    EXPECT_EQ(code_of([&] { read(text.substr(0, 20)); }), errc::io_error);
    try {
        read(replace("-7.25", "abc"));
        ADD_FAILURE() << "malformed feature accepted";
    } catch (const error& e) {
        EXPECT_NE(std::string(e.what()).find("line 8"), std::string::npos) << e.what();
    }
}

TEST(SampleTableIo, RejectsUnwritableTags) {
    auto t = awkward_table();
    t.samples[0].tags.insert("two words");
    std::stringstream ss;
    EXPECT_EQ(code_of([&] { write_sample_table(ss, t); }), errc::io_error);
    t = awkward_table();
    t.samples[0].features = FeatureVector{1.0};
    EXPECT_EQ(code_of([&] { write_sample_table(ss, t); }), errc::dimension_mismatch);
}

TEST(StreamHash, SensitiveToContent) {
    auto a = awkward_table().samples;
    const auto h = stream_hash(a);
    EXPECT_EQ(h.size(), 16u);
    EXPECT_EQ(stream_hash(a), h);
    a[2].tags.insert("x");
    EXPECT_NE(stream_hash(a), h);
    EXPECT_EQ(stream_hash({}), "cbf29ce484222325");
}

TEST(DecisionLogIo, RoundTripExact) {
    DecisionLog log;
    log.strategy = "fast";
    DecisionRecord r;
    r.step = 0;
    r.sample_id = 10;
    r.value = {2.75, 0.8, 1.0 / 3.0, 1.0, 2.0 / 3.0, "ABOVE_THRESHOLD+SUBSAMPLED", 256, true};
    r.threshold = 0.1 + 0.2;
    r.decision = Decision::retain;
    log.records.push_back(r);
    r.step = 1;
    r.sample_id = 11;
    r.value = {-0.5, 0.0, 0.0, 0.0, 1.0, "BUDGET_FULL", 0, false};
    r.decision = Decision::discard;
    log.records.push_back(r);
    std::stringstream ss;
    write_decision_log(ss, log);
    EXPECT_EQ(read_decision_log(ss), log);
}

TEST(DecisionLogIo, StrategyLogsRoundTrip) {
    StreamConfig cfg;
    cfg.num_classes = 3;
    cfg.dimension = 4;
    cfg.length = 400;
    cfg.seed = 9;
    const auto stream = generate(cfg);
    ControllerParams p;
    p.step_budget = 8;
    ClosedLoopStrategy s(fixtures::make_target(3, 100, 0.2, 16), p);
    DecisionLog log{"cl", run_strategy(s, stream).log};
    std::stringstream ss;
    write_decision_log(ss, log);
    EXPECT_EQ(read_decision_log(ss), log);
}

TEST(DecisionLogIo, Malformed) {
    std::stringstream ss("#schema\tfastdata-decisions/1\n#strategy\tx\nstep\n");
    EXPECT_EQ(code_of([&] { read_decision_log(ss); }), errc::io_error);
}

TEST(ReportIo, RoundTripExactWithNulls) {
    QualityReport r;
    r.dataset_size = 3;
    r.vendi_score = 2.0000000000000004;
    r.vendi_sample_size = 3;
    r.balance_entropy = 1.0 / 3.0;
    r.relevance_fraction = 0.1;
    r.class_counts = {1, 2, 0};
    r.provenance = {18446744073709551615ULL, "abc", "s1", "0123456789abcdef"};
    const auto back = report_from_json(nlohmann::json::parse(to_json(r).dump(2)));
    EXPECT_EQ(back, r);
    EXPECT_FALSE(back.mean_max_similarity);
}

TEST(ReportIo, StableFieldNames) {
    const auto j = to_json(QualityReport{});
    for (const char* key : {"dataset_size", "vendi_score", "balance_entropy", "mean_max_similarity",
                            "relevance_fraction", "class_counts", "seed", "config_hash",
                            "strategy", "stream_hash", "schema"})
        EXPECT_TRUE(j.contains(key)) << key;
}

TEST(ReportIo, WrongSchema) {
    EXPECT_EQ(code_of([] { report_from_json(nlohmann::json{{"schema", "other"}}); }),
              errc::io_error);
    auto j = to_json(QualityReport{});
    j.erase("class_counts");
    EXPECT_EQ(code_of([&] { report_from_json(j); }), errc::io_error);
}

TEST(FileIo, MissingFileIsIoError) {
    EXPECT_EQ(code_of([] { load_sample_table("/nonexistent/x.tsv"); }), errc::io_error);
    EXPECT_EQ(code_of([] { load_report("/nonexistent/x.json"); }), errc::io_error);
    EXPECT_EQ(code_of([] { save_sample_table("/nonexistent/dir/x.tsv", {}); }), errc::io_error);
}

TEST(FileIo, FileRoundTrip) {
    fixtures::TempDir dir("io");
    const auto t = awkward_table();
    save_sample_table(dir / "d.tsv", t);
    EXPECT_EQ(load_sample_table(dir / "d.tsv"), t);
}
