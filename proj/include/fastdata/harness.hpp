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

#pragma once

#include <fastdata/controller.hpp>
#include <fastdata/detail/json_fields.hpp>
#include <fastdata/io.hpp>
#include <fastdata/metrics.hpp>
#include <fastdata/simgen.hpp>
#include <fastdata/strategy.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <future>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

// Experiment orchestration. An experiment config is one JSON document:
//
//   {
//     "seed": 42,
//     "output_dir": "out",
//     "stream": { ...StreamConfig... }            or  "stream_file": "s.tsv",
//     "target": {
//       "class_distribution": "uniform" | [p0, p1, ...],
//       "num_classes": 10,                        (only with "uniform" and stream_file)
//       "relevance": <tag predicate>,             (default true)
//       "max_dataset_size": 1000,
//       "target_accept_rate": 0.01,
//       "sketch_capacity": 256,
//       "weights": {"balance": 1, "novelty": 1, "relevance": 1, "redundancy": 1}
//     },
//     "strategies": [
//       {"name": "all",    "kind": "RECORD_ALL"},
//       {"name": "rand",   "kind": "RANDOM_P", "p": 0.01},
//       {"name": "rule",   "kind": "RULE", "feature_index": 0, "comparator": ">", "threshold": 0.2},
//       {"name": "tags",   "kind": "SEMANTIC", "tags": ["night"], "mode": "ANY"},
//       {"name": "err",    "kind": "ERROR", "window": 8, "epsilon": 0.3, "feature_index": 0},
//       {"name": "frozen", "kind": "FROZEN_NOVELTY", "warmup": 100, "threshold": 0.5},
//       {"name": "fast",   "kind": "CLOSED_LOOP", "initial_threshold": 0, "ema_alpha": 0.01,
//                          "threshold_gain": 0.05, "step_budget": 256, "oracle_labels": false}
//     ]
//   }
//
// The experiment seed drives the stream (overriding any seed in the stream
// block) and every strategy's private RNG. FASTDATA_SEED and FASTDATA_OUT
// override seed and output directory.

namespace fastdata {

struct RecordAllParams {
    friend bool operator==(const RecordAllParams&, const RecordAllParams&) = default;
};
struct RandomParams {
    double p = 0.0;
    friend bool operator==(const RandomParams&, const RandomParams&) = default;
};
struct RuleParams {
    std::size_t feature_index = 0;
    Comparator comparator = Comparator::greater;
    double threshold = 0.0;
    friend bool operator==(const RuleParams&, const RuleParams&) = default;
};
struct SemanticParams {
    TagSet tags;
    TagMatch mode = TagMatch::any;
    friend bool operator==(const SemanticParams&, const SemanticParams&) = default;
};
struct ErrorParams {
    std::size_t window = 2;
    double epsilon = 1.0;
    std::size_t feature_index = 0;
    friend bool operator==(const ErrorParams&, const ErrorParams&) = default;
};
struct FrozenNoveltyParams {
    std::size_t warmup = 1;
    double threshold = 0.5;
    friend bool operator==(const FrozenNoveltyParams&, const FrozenNoveltyParams&) = default;
};

// Alternative order matches StrategyKind.
using StrategyParams = std::variant<RecordAllParams, RandomParams, RuleParams, SemanticParams,
                                    ErrorParams, FrozenNoveltyParams, ControllerParams>;

struct StrategySpec {
    std::string name;
    StrategyParams params;

    StrategyKind kind() const noexcept { return static_cast<StrategyKind>(params.index()); }

    friend bool operator==(const StrategySpec&, const StrategySpec&) = default;
};

struct ExperimentConfig {
    std::variant<StreamConfig, std::filesystem::path> stream;
    TargetState target;
    std::vector<StrategySpec> strategies;
    std::filesystem::path output_dir = "out";
    std::uint64_t seed = 0;
    nlohmann::json source; // effective config document, hashed into provenance

    std::string config_hash() const {
        Fnv1a h;
        h.update(source.dump());
        return h.hex();
    }
};

// --- parsing

namespace detail {

inline TargetState target_from_json(const nlohmann::json& j, const std::string& path,
                                     std::optional<std::size_t> stream_classes) {
    JsonFieldReader r(j, path);
    r.reject_unknown({"class_distribution", "num_classes", "relevance", "max_dataset_size",
                      "target_accept_rate", "sketch_capacity", "weights"});
    TargetState t;
    const nlohmann::json dist = r.has("class_distribution") ? r.raw("class_distribution")
                                                            : nlohmann::json("uniform");
    if (dist.is_string()) {
        if (dist.get<std::string>() != "uniform")
            throw r.fail("class_distribution", "expected \"uniform\" or an array of probabilities");
        std::optional<std::size_t> classes = stream_classes;
        if (r.has("num_classes"))
            classes = r.get<std::size_t>("num_classes");
        if (!classes)
            throw r.fail("num_classes", "required when the class count is not known from a stream block");
        if (stream_classes && *classes != *stream_classes)
            throw r.fail("num_classes", "disagrees with the stream's num_classes");
        if (*classes < 2)
            throw r.fail("num_classes", "must be >= 2");
        t.class_distribution = TargetState::uniform_distribution(*classes);
    } else if (dist.is_array()) {
        for (std::size_t i = 0; i < dist.size(); ++i)
            t.class_distribution.push_back(
                r.convert<double>(dist[i], "class_distribution/" + std::to_string(i)));
        if (stream_classes && t.class_distribution.size() != *stream_classes)
            throw r.fail("class_distribution", "length differs from the stream's num_classes");
    } else {
        throw r.fail("class_distribution", "expected \"uniform\" or an array of probabilities");
    }
    if (r.has("relevance"))
        t.relevance = TagPredicate::from_json(r.raw("relevance"), r.child("relevance"));
    t.max_dataset_size = r.get<std::size_t>("max_dataset_size");
    t.target_accept_rate = r.get<double>("target_accept_rate");
    t.sketch_capacity = r.get<std::size_t>("sketch_capacity", std::size_t{256});
    if (r.has("weights")) {
        JsonFieldReader w(r.raw("weights"), r.child("weights"));
        w.reject_unknown({"balance", "novelty", "relevance", "redundancy"});
        t.weights.balance = w.get<double>("balance", 1.0);
        t.weights.novelty = w.get<double>("novelty", 1.0);
        t.weights.relevance = w.get<double>("relevance", 1.0);
        t.weights.redundancy = w.get<double>("redundancy", 1.0);
    }
    try {
        validate(t);
    } catch (const error& e) {
        throw error(errc::config_error, (path.empty() ? "/" : path) + ": " + e.message());
    }
    return t;
}

inline StrategySpec strategy_from_json(const nlohmann::json& j, const std::string& path,
                                       std::uint64_t seed) {
    JsonFieldReader r(j, path);
    StrategySpec spec;
    spec.name = r.get<std::string>("name");
    if (spec.name.empty() || spec.name.find_first_of("/\\\t\n ") != std::string::npos)
        throw r.fail("name", "must be nonempty and free of path separators and whitespace");
    const auto kind_text = r.get<std::string>("kind");
    const auto kind = parse_strategy_kind(kind_text);
    if (!kind)
        throw r.fail("kind", "unknown strategy kind '" + kind_text + "'");
    switch (*kind) {
    case StrategyKind::record_all:
        r.reject_unknown({"name", "kind"});
        spec.params = RecordAllParams{};
        break;
    case StrategyKind::random_p: {
        r.reject_unknown({"name", "kind", "p"});
        const double p = r.get<double>("p");
        if (!(p >= 0.0 && p <= 1.0))
            throw r.fail("p", "must lie in [0, 1]");
        spec.params = RandomParams{p};
        break;
    }
    case StrategyKind::rule: {
        r.reject_unknown({"name", "kind", "feature_index", "comparator", "threshold"});
        const auto cmp_text = r.get<std::string>("comparator");
        const auto cmp = parse_comparator(cmp_text);
        if (!cmp)
            throw r.fail("comparator", "expected one of >, <, >=, <=");
        spec.params = RuleParams{r.get<std::size_t>("feature_index"), *cmp, r.get<double>("threshold")};
        break;
    }
    case StrategyKind::semantic: {
        r.reject_unknown({"name", "kind", "tags", "mode"});
        if (!r.has("tags"))
            throw r.fail("tags", "missing required field");
        SemanticParams p;
        p.tags = tag_set_from_json(r.raw("tags"), r.child("tags"));
        if (p.tags.empty())
            throw r.fail("tags", "needs at least one tag");
        const auto mode = r.get<std::string>("mode", std::string("ANY"));
        if (mode != "ALL" && mode != "ANY")
            throw r.fail("mode", "expected ALL or ANY");
        p.mode = mode == "ALL" ? TagMatch::all : TagMatch::any;
        spec.params = std::move(p);
        break;
    }
    case StrategyKind::error: {
        r.reject_unknown({"name", "kind", "window", "epsilon", "feature_index"});
        ErrorParams p{r.get<std::size_t>("window"), r.get<double>("epsilon"),
                      r.get<std::size_t>("feature_index")};
        if (p.window < 2)
            throw r.fail("window", "must be >= 2");
        if (!(p.epsilon > 0.0))
            throw r.fail("epsilon", "must be > 0");
        spec.params = p;
        break;
    }
    case StrategyKind::frozen_novelty: {
        r.reject_unknown({"name", "kind", "warmup", "threshold"});
        FrozenNoveltyParams p{r.get<std::size_t>("warmup"), r.get<double>("threshold")};
        if (p.warmup < 1)
            throw r.fail("warmup", "must be >= 1");
        if (!(p.threshold > 0.0 && p.threshold < 1.0))
            throw r.fail("threshold", "must lie in (0, 1)");
        spec.params = p;
        break;
    }
    case StrategyKind::closed_loop: {
        r.reject_unknown({"name", "kind", "initial_threshold", "ema_alpha", "threshold_gain",
                          "step_budget", "oracle_labels"});
        ControllerParams p;
        p.initial_threshold = r.get<double>("initial_threshold", 0.0);
        p.ema_alpha = r.get<double>("ema_alpha", 0.01);
        p.threshold_gain = r.get<double>("threshold_gain", 0.05);
        p.step_budget = r.get<std::size_t>("step_budget", std::size_t{256});
        p.oracle_labels = r.get<bool>("oracle_labels", false);
        p.seed = seed;
        try {
            validate(p);
        } catch (const error& e) {
            throw error(errc::config_error, path + ": " + e.message());
        }
        spec.params = p;
        break;
    }
    }
    return spec;
}

inline std::optional<std::uint64_t> env_seed() {
    const char* v = std::getenv("FASTDATA_SEED");
    if (!v || !*v)
        return std::nullopt;
    try {
        return parse_unsigned<std::uint64_t>(v);
    } catch (const error&) {
        throw error(errc::config_error, "FASTDATA_SEED: expected an unsigned 64-bit integer");
    }
}

inline std::optional<std::filesystem::path> env_output_dir() {
    const char* v = std::getenv("FASTDATA_OUT");
    if (!v || !*v)
        return std::nullopt;
    return std::filesystem::path(v);
}

} // namespace detail

struct ConfigOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> output_dir;
    std::optional<std::filesystem::path> stream_file;
};

/// Builds an experiment from a parsed document. Precedence for seed and
/// output directory: explicit override, then environment, then document.
inline ExperimentConfig parse_experiment_config(const nlohmann::json& doc,
                                                const std::filesystem::path& base_dir = {},
                                                const ConfigOverrides& overrides = {}) {
    detail::JsonFieldReader r(doc, "");
    r.reject_unknown({"seed", "output_dir", "stream", "stream_file", "target", "strategies"});
    ExperimentConfig cfg;
    cfg.source = doc;

    cfg.seed = r.get<std::uint64_t>("seed", std::uint64_t{0});
    if (auto s = detail::env_seed())
        cfg.seed = *s;
    if (overrides.seed)
        cfg.seed = *overrides.seed;
    cfg.source["seed"] = cfg.seed;

    cfg.output_dir = r.get<std::string>("output_dir", std::string("out"));
    if (auto o = detail::env_output_dir())
        cfg.output_dir = *o;
    if (overrides.output_dir)
        cfg.output_dir = *overrides.output_dir;
    cfg.source.erase("output_dir");

    std::optional<std::size_t> stream_classes;
    if (overrides.stream_file) {
        // a stream block that is being replaced still names the class count
        if (r.has("stream") && r.raw("stream").is_object() && r.raw("stream").contains("num_classes"))
            stream_classes = detail::JsonFieldReader(r.raw("stream"), "/stream")
                                 .get<std::size_t>("num_classes");
        cfg.stream = *overrides.stream_file;
        cfg.source.erase("stream");
        cfg.source["stream_file"] = overrides.stream_file->string();
    } else if (r.has("stream") && r.has("stream_file")) {
        throw r.fail("stream_file", "give either a stream block or a stream_file, not both");
    } else if (r.has("stream")) {
        nlohmann::json block = r.raw("stream");
        if (block.is_object())
            block["seed"] = cfg.seed;
        StreamConfig sc = stream_config_from_json(block, "/stream");
        stream_classes = sc.num_classes;
        cfg.stream = std::move(sc);
    } else if (r.has("stream_file")) {
        std::filesystem::path p = r.get<std::string>("stream_file");
        cfg.stream = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    } else {
        throw r.fail("stream", "missing stream block or stream_file");
    }

    if (!r.has("target"))
        throw r.fail("target", "missing required field");
    cfg.target = detail::target_from_json(r.raw("target"), "/target", stream_classes);

    if (!r.has("strategies") || !r.raw("strategies").is_array() || r.raw("strategies").empty())
        throw r.fail("strategies", "expected a nonempty array");
    std::set<std::string> names;
    const auto& arr = r.raw("strategies");
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string path = "/strategies/" + std::to_string(i);
        auto spec = detail::strategy_from_json(arr[i], path, cfg.seed);
        if (!names.insert(spec.name).second)
            throw error(errc::config_error, path + "/name: duplicate strategy name '" + spec.name + "'");
        cfg.strategies.push_back(std::move(spec));
    }
    return cfg;
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
    auto is = open_input(path);
    try {
        return nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        // nlohmann's message already carries "line L, column C".
        throw error(errc::config_error, path.string() + ": " + e.what());
    }
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                               const ConfigOverrides& overrides = {}) {
    const auto doc = read_json_file(path);
    try {
        return parse_experiment_config(doc, path.parent_path(), overrides);
    } catch (const error& e) {
        throw error(e.code(), path.string() + ": " + e.message());
    }
}

/// Reads a target block, either a bare target object or the "target" member
/// of an experiment document.
inline TargetState load_target_state(const std::filesystem::path& path) {
    const auto doc = read_json_file(path);
    try {
        if (doc.is_object() && doc.contains("target")) {
            std::optional<std::size_t> classes;
            if (doc.contains("stream") && doc["stream"].is_object() &&
                doc["stream"].contains("num_classes"))
                classes = stream_config_from_json(doc["stream"], "/stream").num_classes;
            return detail::target_from_json(doc["target"], "/target", classes);
        }
        return detail::target_from_json(doc, "", std::nullopt);
    } catch (const error& e) {
        throw error(e.code(), path.string() + ": " + e.message());
    }
}

// --- strategy construction

inline std::unique_ptr<CollectionStrategy> make_strategy(const StrategySpec& spec,
                                                         const TargetState& target,
                                                         std::size_t dimension,
                                                         std::uint64_t seed) {
    const std::size_t budget = target.max_dataset_size;
    auto wrap = [&](auto make) -> std::unique_ptr<CollectionStrategy> {
        try {
            return make();
        } catch (const error& e) {
            throw error(errc::config_error, "strategy '" + spec.name + "': " + e.message());
        }
    };
    return std::visit(
        [&](const auto& p) -> std::unique_ptr<CollectionStrategy> {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, RecordAllParams>)
                return wrap([&] { return std::make_unique<RecordAllStrategy>(budget); });
            else if constexpr (std::is_same_v<P, RandomParams>)
                return wrap([&] { return std::make_unique<RandomStrategy>(budget, p.p, seed); });
            else if constexpr (std::is_same_v<P, RuleParams>)
                return wrap([&] {
                    return std::make_unique<RuleStrategy>(
                        budget, RuleTrigger(p.feature_index, p.comparator, p.threshold, dimension));
                });
            else if constexpr (std::is_same_v<P, SemanticParams>)
                return wrap([&] {
                    return std::make_unique<SemanticStrategy>(budget, SemanticTrigger(p.tags, p.mode));
                });
            else if constexpr (std::is_same_v<P, ErrorParams>)
                return wrap([&] {
                    return std::make_unique<ErrorStrategy>(
                        budget, ErrorTrigger(p.window, p.epsilon, p.feature_index, dimension));
                });
            else if constexpr (std::is_same_v<P, FrozenNoveltyParams>)
                return wrap([&] {
                    return std::make_unique<FrozenNoveltyStrategy>(
                        budget, FrozenNoveltyTrigger(p.warmup, p.threshold));
                });
            else {
                ControllerParams cp = p;
                cp.seed = seed;
                return wrap([&] { return std::make_unique<ClosedLoopStrategy>(target, cp); });
            }
        },
        spec.params);
}

// --- comparison

/// Composite ranking column: |balance - 1| + (1 - relevance) + mean max
/// similarity. A harness convention for ordering strategies.
inline std::optional<double> target_gap(const QualityReport& r) {
    if (!r.balance_entropy || !r.relevance_fraction || !r.mean_max_similarity)
        return std::nullopt;
    return std::abs(*r.balance_entropy - 1.0) + (1.0 - *r.relevance_fraction) +
           *r.mean_max_similarity;
}

struct SummaryRow {
    std::string strategy;
    std::size_t dataset_size = 0;
    std::optional<double> vendi_score;
    std::size_t vendi_rank = 0;
    std::optional<double> balance_entropy;
    std::size_t balance_rank = 0;
    std::optional<double> mean_max_similarity;
    std::size_t similarity_rank = 0;
    std::optional<double> relevance_fraction;
    std::size_t relevance_rank = 0;
    std::optional<double> target_gap;
    std::size_t target_gap_rank = 0;

    friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

struct Summary {
    std::string stream_hash;
    std::vector<SummaryRow> rows; // input order

    friend bool operator==(const Summary&, const Summary&) = default;
};

namespace detail {

// Competition ranking (1 + number of strictly better entries); missing
// values rank behind every present one and tie among themselves.
inline std::vector<std::size_t> competition_ranks(const std::vector<std::optional<double>>& v,
                                                  bool higher_is_better) {
    auto better = [&](const std::optional<double>& a, const std::optional<double>& b) {
        if (!a)
            return false;
        if (!b)
            return true;
        return higher_is_better ? *a > *b : *a < *b;
    };
    std::vector<std::size_t> ranks(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j)
            if (better(v[j], v[i]))
                ++ranks[i];
    return ranks;
}

} // namespace detail

namespace detail {

inline Summary rank_reports(std::span<const QualityReport> reports) {
    Summary s;
    s.stream_hash = reports.front().provenance.stream_hash;
    for (const auto& r : reports)
        if (r.provenance.stream_hash != s.stream_hash)
            throw error(errc::comparison_error,
                        "reports '" + reports.front().provenance.strategy + "' and '" +
                            r.provenance.strategy + "' were collected from different streams");

    std::vector<std::optional<double>> vendi, bal, sim, rel, gap;
    for (const auto& r : reports) {
        vendi.push_back(r.vendi_score);
        bal.push_back(r.balance_entropy);
        sim.push_back(r.mean_max_similarity);
        rel.push_back(r.relevance_fraction);
        gap.push_back(target_gap(r));
    }
    const auto rv = competition_ranks(vendi, true);
    const auto rb = competition_ranks(bal, true);
    const auto rs = competition_ranks(sim, false);
    const auto rr = competition_ranks(rel, true);
    const auto rg = competition_ranks(gap, false);
    for (std::size_t i = 0; i < reports.size(); ++i) {
        SummaryRow row;
        row.strategy = reports[i].provenance.strategy;
        row.dataset_size = reports[i].dataset_size;
        row.vendi_score = vendi[i];
        row.vendi_rank = rv[i];
        row.balance_entropy = bal[i];
        row.balance_rank = rb[i];
        row.mean_max_similarity = sim[i];
        row.similarity_rank = rs[i];
        row.relevance_fraction = rel[i];
        row.relevance_rank = rr[i];
        row.target_gap = gap[i];
        row.target_gap_rank = rg[i];
        s.rows.push_back(std::move(row));
    }
    return s;
}

} // namespace detail

/// Ranks reports collected from one stream. Fewer than two reports, or
/// reports from different streams, is a comparison error.
inline Summary compare_strategies(std::span<const QualityReport> reports) {
    if (reports.size() < 2)
        throw error(errc::comparison_error, "comparison needs at least 2 reports");
    return detail::rank_reports(reports);
}

inline constexpr std::string_view summary_columns =
    "strategy\tdataset_size\tvendi_score\tvendi_rank\tbalance_entropy\tbalance_rank\t"
    "mean_max_similarity\tsimilarity_rank\trelevance_fraction\trelevance_rank\ttarget_gap\t"
    "target_gap_rank";

inline void write_summary(std::ostream& os, const Summary& s) {
    auto num = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("NA"); };
    os << "#schema\tfastdata-summary/1\n";
    os << "#stream_hash\t" << s.stream_hash << '\n';
    os << summary_columns << '\n';
    for (const auto& r : s.rows)
        os << r.strategy << '\t' << r.dataset_size << '\t' << num(r.vendi_score) << '\t'
           << r.vendi_rank << '\t' << num(r.balance_entropy) << '\t' << r.balance_rank << '\t'
           << num(r.mean_max_similarity) << '\t' << r.similarity_rank << '\t'
           << num(r.relevance_fraction) << '\t' << r.relevance_rank << '\t' << num(r.target_gap)
           << '\t' << r.target_gap_rank << '\n';
}

inline std::string summary_text(const Summary& s) {
    std::ostringstream os;
    write_summary(os, s);
    return os.str();
}

// --- running

struct StrategyOutcome {
    std::string name;
    StrategyKind kind = StrategyKind::record_all;
    QualityReport report;
    std::vector<Sample> dataset;
    std::filesystem::path dataset_path, log_path, report_path;
};

struct ExperimentResult {
    std::string stream_hash;
    std::vector<StrategyOutcome> outcomes; // config order
    Summary summary;
    std::filesystem::path summary_path;
};

/// Materializes the experiment's stream (generated or loaded).
inline SampleTable resolve_stream(const ExperimentConfig& cfg) {
    if (const auto* sc = std::get_if<StreamConfig>(&cfg.stream)) {
        SampleTable t;
        t.kind = "stream";
        t.dimension = sc->dimension;
        t.meta = {{"stream_config", to_json(*sc)}};
        t.samples = generate(*sc);
        return t;
    }
    return load_sample_table(std::get<std::filesystem::path>(cfg.stream));
}

namespace detail {

inline StrategyOutcome run_one(const ExperimentConfig& cfg, const StrategySpec& spec,
                               const SampleTable& stream, const std::string& hash) {
    StrategyOutcome out;
    out.name = spec.name;
    out.kind = spec.kind();
    out.dataset_path = cfg.output_dir / (spec.name + ".dataset.tsv");
    out.log_path = cfg.output_dir / (spec.name + ".log.tsv");
    out.report_path = cfg.output_dir / (spec.name + ".report.json");

    auto strategy = make_strategy(spec, cfg.target, stream.dimension, cfg.seed);
    auto log = open_output(out.log_path);
    write_decision_log_header(log, spec.name);
    StrategyRun run;
    try {
        run = run_strategy(*strategy, stream.samples, [&](const DecisionRecord& r) {
            log << decision_record_line(r) << '\n';
        });
    } catch (...) {
        log.flush();
        throw;
    }
    log.flush();

    SampleTable ds;
    ds.kind = "dataset";
    ds.dimension = stream.dimension;
    ds.meta = {{"strategy", spec.name},
               {"kind", std::string(to_string(spec.kind()))},
               {"stream_hash", hash}};
    ds.samples = std::move(run.dataset);
    save_sample_table(out.dataset_path, ds);

    out.report = evaluate_dataset(ds.samples, cfg.target,
                                  Provenance{cfg.seed, cfg.config_hash(), spec.name, hash});
    save_report(out.report_path, out.report);
    out.dataset = std::move(ds.samples);
    return out;
}

} // namespace detail

/// Runs every strategy over the identical stream, writes per-strategy
/// dataset/log/report files, then the summary. On failure no summary is
/// written and the first error (in config order) is rethrown.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, bool parallel = true) {
    SampleTable stream = resolve_stream(cfg);
    for (const auto& s : stream.samples)
        if (s.label >= cfg.target.num_classes())
            throw error(errc::config_error, "stream sample " + std::to_string(s.id) +
                                                " has class " + std::to_string(s.label) +
                                                " outside the target's " +
                                                std::to_string(cfg.target.num_classes()) +
                                                " classes");

    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec)
        throw error(errc::io_error, "cannot create output directory '" + cfg.output_dir.string() +
                                        "': " + ec.message());

    ExperimentResult result;
    result.stream_hash = stream_hash(stream.samples);

    std::vector<std::future<StrategyOutcome>> jobs;
    for (const auto& spec : cfg.strategies)
        jobs.push_back(std::async(parallel ? std::launch::async : std::launch::deferred,
                                  [&, spec_ptr = &spec] {
                                      return detail::run_one(cfg, *spec_ptr, stream,
                                                             result.stream_hash);
                                  }));
    std::exception_ptr first_failure;
    for (auto& job : jobs) {
        try {
            result.outcomes.push_back(job.get());
        } catch (...) {
            if (!first_failure)
                first_failure = std::current_exception();
        }
    }
    if (first_failure)
        std::rethrow_exception(first_failure);

    // Fair-comparison guard: every report must name the same stream.
    std::vector<QualityReport> reports;
    for (const auto& o : result.outcomes) {
        if (o.report.provenance.stream_hash != result.stream_hash)
            throw error(errc::comparison_error, "strategy '" + o.name + "' saw a different stream");
        reports.push_back(o.report);
    }
    result.summary = detail::rank_reports(reports);
    result.summary_path = cfg.output_dir / "summary.tsv";
    auto os = open_output(result.summary_path);
    write_summary(os, result.summary);
    if (!os.flush())
        throw error(errc::io_error, "write to '" + result.summary_path.string() + "' failed");
    return result;
}

} // namespace fastdata
