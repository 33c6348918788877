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


#include <fastdata/fastdata.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace fastdata;

namespace {

int exit_code(errc c) {
    switch (c) {
    case errc::config_error: return 2;
    case errc::state_corruption: return 3;
    default: return 1;
    }
}

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string stream;
    std::vector<std::string> reports;
};

// Accepts a bare stream block or an experiment document with a "stream" member.
StreamConfig load_stream_config(const fs::path& path, std::optional<std::uint64_t> seed) {
    nlohmann::json doc = read_json_file(path);
    std::string where = "";
    if (doc.is_object() && doc.contains("stream")) {
        if (doc.contains("seed"))
            doc["stream"]["seed"] = doc["seed"];
        doc = doc["stream"];
        where = "/stream";
    }
    if (const char* env = std::getenv("FASTDATA_SEED"); env && *env && !seed)
        seed = parse_unsigned<std::uint64_t>(env);
    if (seed && doc.is_object())
        doc["seed"] = *seed;
    try {
        return stream_config_from_json(doc, where);
    } catch (const error& e) {
        throw error(e.code(), path.string() + ": " + e.message());
    }
}

int cmd_generate(const Options& o) {
    const StreamConfig cfg = load_stream_config(o.config, o.seed);
    fs::path target;
    if (!o.stream.empty()) {
        target = o.stream;
    } else {
        fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
        fs::create_directories(dir);
        target = dir / "stream.tsv";
    }
    SampleTable t;
    t.kind = "stream";
    t.dimension = cfg.dimension;
    t.meta = {{"stream_config", to_json(cfg)}};
    t.samples = generate(cfg);
    save_sample_table(target, t);
    std::cout << target.string() << '\t' << t.samples.size() << " samples\t"
              << stream_hash(t.samples) << '\n';
    return 0;
}

int cmd_run(const Options& o) {
    ConfigOverrides ov;
    ov.seed = o.seed;
    if (!o.out.empty())
        ov.output_dir = o.out;
    if (!o.stream.empty())
        ov.stream_file = o.stream;
    const ExperimentConfig cfg = load_experiment_config(o.config, ov);
    const ExperimentResult res = run_experiment(cfg);
    write_summary(std::cout, res.summary);
    return 0;
}

int cmd_score(const Options& o) {
    if (o.stream.empty())
        throw error(errc::config_error, "score: --stream names the dataset file to evaluate");
    const TargetState target = load_target_state(o.config);
    const SampleTable ds = load_sample_table(o.stream);

    Provenance p;
    p.seed = o.seed.value_or(0);
    Fnv1a h;
    h.update(read_json_file(o.config).dump());
    p.config_hash = h.hex();
    p.strategy = ds.meta.is_object() && ds.meta.contains("strategy") && ds.meta["strategy"].is_string()
                     ? ds.meta["strategy"].get<std::string>()
                     : fs::path(o.stream).stem().string();
    p.stream_hash = ds.meta.is_object() && ds.meta.contains("stream_hash") &&
                            ds.meta["stream_hash"].is_string()
                        ? ds.meta["stream_hash"].get<std::string>()
                        : stream_hash(ds.samples);
    const QualityReport report = evaluate_dataset(ds.samples, target, p);
    if (!o.out.empty()) {
        fs::create_directories(o.out);
        save_report(fs::path(o.out) / (p.strategy + ".report.json"), report);
    }
    std::cout << to_json(report).dump(2) << '\n';
    return 0;
}

int cmd_compare(const Options& o) {
    std::vector<QualityReport> reports;
    for (const auto& r : o.reports)
        reports.push_back(load_report(r));
    const Summary s = compare_strategies(reports);
    if (!o.out.empty()) {
        fs::create_directories(o.out);
        auto os = open_output(fs::path(o.out) / "summary.tsv");
        write_summary(os, s);
    }
    write_summary(std::cout, s);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fastdata: closed-loop data collection experiments"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", o.seed, "experiment seed (overrides config and FASTDATA_SEED)");
        sub->add_option("--out", o.out, "output directory");
    };

    auto* gen = app.add_subcommand("generate", "write a synthetic stream file");
    gen->add_option("--config", o.config, "stream or experiment config (JSON)")->required();
    gen->add_option("--stream", o.stream, "stream file to write (default <out>/stream.tsv)");
    add_common(gen);

    auto* run = app.add_subcommand("run", "execute an experiment config");
    run->add_option("--config", o.config, "experiment config (JSON)")->required();
    run->add_option("--stream", o.stream, "use this stream file instead of the config's stream");
    add_common(run);

    auto* score = app.add_subcommand("score", "evaluate a dataset file against a target state");
    score->add_option("--config", o.config, "target or experiment config (JSON)")->required();
    score->add_option("--stream", o.stream, "dataset file to evaluate")->required();
    add_common(score);

    auto* cmp = app.add_subcommand("compare", "rank existing reports");
    cmp->add_option("reports", o.reports, "report files")->required();
    cmp->add_option("--out", o.out, "directory for summary.tsv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*gen)
            return cmd_generate(o);
        if (*run)
            return cmd_run(o);
        if (*score)
            return cmd_score(o);
        return cmd_compare(o);
    } catch (const error& e) {
        std::cerr << "fastdata: " << e.what() << '\n';
        return exit_code(e.code());
    } catch (const fs::filesystem_error& e) {
        std::cerr << "fastdata: io_error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "fastdata: " << e.what() << '\n';
        return 1;
    }
}
