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
#include <fastdata/core.hpp>
#include <fastdata/metrics.hpp>

#include <json.hpp>

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

// Text formats. Sample tables and decision logs are tab-separated with a
// '#'-prefixed header block carrying the schema version; reports are flat
// JSON objects. Doubles are written in shortest round-trip form, so
// parse(serialize(x)) reproduces every bit.

namespace fastdata {

inline constexpr std::string_view sample_table_schema = "fastdata-samples/1";
inline constexpr std::string_view decision_log_schema = "fastdata-decisions/1";
inline constexpr std::string_view report_schema = "fastdata-report/1";

inline std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{})
        throw error(errc::io_error, "cannot format double");
    return std::string(buf, end);
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size())
        throw error(errc::io_error, "malformed number '" + std::string(s) + "'");
    return v;
}

template <typename T>
T parse_unsigned(std::string_view s) {
    T v{};
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size())
        throw error(errc::io_error, "malformed integer '" + std::string(s) + "'");
    return v;
}

/// FNV-1a 64, rendered as 16 hex digits.
class Fnv1a {
public:
    void update(std::string_view bytes) noexcept {
        for (unsigned char c : bytes) {
            state_ ^= c;
            state_ *= 0x100000001b3ULL;
        }
    }

    std::string hex() const {
        char buf[17];
        static constexpr char digits[] = "0123456789abcdef";
        for (int i = 0; i < 16; ++i)
            buf[i] = digits[(state_ >> (60 - 4 * i)) & 0xF];
        buf[16] = '\0';
        return buf;
    }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

inline void check_tag(std::string_view tag) {
    if (tag.empty() || tag.find_first_of(",\t\r\n ") != std::string_view::npos)
        throw error(errc::io_error, "tag '" + std::string(tag) +
                                        "' is empty or contains a separator character");
}

inline std::string join_tags(const TagSet& tags) {
    std::string out;
    for (const auto& t : tags) {
        check_tag(t);
        if (!out.empty())
            out += ',';
        out += t;
    }
    return out;
}

inline std::string format_features(const FeatureVector& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out += ' ';
        out += format_double(v[i]);
    }
    return out;
}

inline std::string sample_record(const Sample& s) {
    std::string line = std::to_string(s.id);
    line += '\t';
    line += std::to_string(s.timestamp);
    line += '\t';
    line += std::to_string(s.label);
    line += '\t';
    line += join_tags(s.tags);
    line += '\t';
    line += format_features(s.features);
    return line;
}

inline void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
}

} // namespace detail

/// Identity of a stream's content: hash over its canonical sample records.
inline std::string stream_hash(std::span<const Sample> samples) {
    Fnv1a h;
    for (const auto& s : samples) {
        h.update(detail::sample_record(s));
        h.update("\n");
    }
    return h.hex();
}

/// A stream or dataset file. `kind` is "stream" or "dataset"; `meta` is a
/// free-form JSON object (stream config echo, strategy name, ...).
struct SampleTable {
    std::string kind = "stream";
    std::size_t dimension = 0;
    nlohmann::json meta = nlohmann::json::object();
    std::vector<Sample> samples;

    friend bool operator==(const SampleTable&, const SampleTable&) = default;
};

inline void write_sample_table(std::ostream& os, const SampleTable& t) {
    os << "#schema\t" << sample_table_schema << '\n';
    os << "#kind\t" << t.kind << '\n';
    os << "#dimension\t" << t.dimension << '\n';
    os << "#meta\t" << t.meta.dump() << '\n';
    os << "id\ttimestamp\tlabel\ttags\tfeatures\n";
    for (const auto& s : t.samples) {
        if (s.features.size() != t.dimension)
            throw error(errc::dimension_mismatch, "sample " + std::to_string(s.id) + " has " +
                                                      std::to_string(s.features.size()) +
                                                      " features, table dimension is " +
                                                      std::to_string(t.dimension));
        os << detail::sample_record(s) << '\n';
    }
}

inline SampleTable read_sample_table(std::istream& is) {
    SampleTable t;
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& what) {
        return error(errc::io_error, "sample table line " + std::to_string(line_no) + ": " + what);
    };
    auto header = [&](std::string_view key) {
        ++line_no;
        if (!std::getline(is, line))
            throw fail("truncated header");
        detail::strip_cr(line);
        const std::string prefix = "#" + std::string(key) + "\t";
        if (line.rfind(prefix, 0) != 0)
            throw fail("expected '" + prefix + "'");
        return line.substr(prefix.size());
    };
    if (header("schema") != sample_table_schema)
        throw fail("unsupported schema (expected " + std::string(sample_table_schema) + ")");
    t.kind = header("kind");
    t.dimension = parse_unsigned<std::size_t>(header("dimension"));
    try {
        t.meta = nlohmann::json::parse(header("meta"));
    } catch (const nlohmann::json::exception& e) {
        throw fail(std::string("bad meta json: ") + e.what());
    }
    ++line_no;
    if (!std::getline(is, line))
        throw fail("missing column header");
    detail::strip_cr(line);
    if (line != "id\ttimestamp\tlabel\ttags\tfeatures")
        throw fail("unexpected column header");
    while (std::getline(is, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (line.empty())
            continue;
        const auto cols = detail::split(line, '\t');
        if (cols.size() != 5)
            throw fail("expected 5 columns, got " + std::to_string(cols.size()));
        Sample s;
        try {
            s.id = parse_unsigned<std::uint64_t>(cols[0]);
            s.timestamp = parse_unsigned<std::uint64_t>(cols[1]);
            s.label = parse_unsigned<ClassId>(cols[2]);
            if (!cols[3].empty())
                for (auto tag : detail::split(cols[3], ',')) {
                    detail::check_tag(tag);
                    s.tags.emplace(tag);
                }
            std::vector<double> values;
            values.reserve(t.dimension);
            if (!cols[4].empty())
                for (auto x : detail::split(cols[4], ' '))
                    values.push_back(parse_double(x));
            s.features = FeatureVector(std::move(values));
        } catch (const error& e) {
            throw fail(e.message());
        }
        if (s.features.size() != t.dimension)
            throw fail("expected " + std::to_string(t.dimension) + " features, got " +
                       std::to_string(s.features.size()));
        if (!t.samples.empty() && s.id <= t.samples.back().id)
            throw fail("sample ids must be strictly increasing");
        t.samples.push_back(std::move(s));
    }
    return t;
}

inline std::string decision_record_line(const DecisionRecord& r) {
    std::string line = std::to_string(r.step);
    auto col = [&](const std::string& v) {
        line += '\t';
        line += v;
    };
    col(std::to_string(r.sample_id));
    col(format_double(r.value.balance_gain));
    col(format_double(r.value.novelty_gain));
    col(format_double(r.value.relevance_score));
    col(format_double(r.value.redundancy_penalty));
    col(format_double(r.value.total));
    col(format_double(r.threshold));
    col(std::string(to_string(r.decision)));
    col(r.value.reason);
    col(std::to_string(r.value.comparisons));
    return line;
}

inline constexpr std::string_view decision_log_columns =
    "step\tsample_id\tbalance_gain\tnovelty_gain\trelevance_score\tredundancy_penalty\ttotal\t"
    "threshold\tdecision\treason\tcomparisons";

inline void write_decision_log_header(std::ostream& os, std::string_view strategy) {
    os << "#schema\t" << decision_log_schema << '\n';
    os << "#strategy\t" << strategy << '\n';
    os << decision_log_columns << '\n';
}

struct DecisionLog {
    std::string strategy;
    std::vector<DecisionRecord> records;

    friend bool operator==(const DecisionLog&, const DecisionLog&) = default;
};

inline void write_decision_log(std::ostream& os, const DecisionLog& log) {
    write_decision_log_header(os, log.strategy);
    for (const auto& r : log.records)
        os << decision_record_line(r) << '\n';
}

inline DecisionLog read_decision_log(std::istream& is) {
    DecisionLog log;
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& what) {
        return error(errc::io_error, "decision log line " + std::to_string(line_no) + ": " + what);
    };
    auto next = [&]() {
        ++line_no;
        if (!std::getline(is, line))
            throw fail("truncated header");
        detail::strip_cr(line);
    };
    next();
    if (line != "#schema\t" + std::string(decision_log_schema))
        throw fail("unsupported schema");
    next();
    if (line.rfind("#strategy\t", 0) != 0)
        throw fail("missing strategy header");
    log.strategy = line.substr(10);
    next();
    if (line != decision_log_columns)
        throw fail("unexpected column header");
    while (std::getline(is, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (line.empty())
            continue;
        const auto c = detail::split(line, '\t');
        if (c.size() != 11)
            throw fail("expected 11 columns, got " + std::to_string(c.size()));
        DecisionRecord r;
        try {
            r.step = parse_unsigned<std::uint64_t>(c[0]);
            r.sample_id = parse_unsigned<std::uint64_t>(c[1]);
            r.value.balance_gain = parse_double(c[2]);
            r.value.novelty_gain = parse_double(c[3]);
            r.value.relevance_score = parse_double(c[4]);
            r.value.redundancy_penalty = parse_double(c[5]);
            r.value.total = parse_double(c[6]);
            r.threshold = parse_double(c[7]);
            if (c[8] == "RETAIN")
                r.decision = Decision::retain;
            else if (c[8] == "DISCARD")
                r.decision = Decision::discard;
            else
                throw error(errc::io_error, "unknown decision '" + std::string(c[8]) + "'");
            r.value.reason = std::string(c[9]);
            r.value.subsampled = r.value.reason.ends_with(reason::subsampled);
            r.value.comparisons = parse_unsigned<std::size_t>(c[10]);
        } catch (const error& e) {
            throw fail(e.message());
        }
        log.records.push_back(std::move(r));
    }
    return log;
}

// --- quality reports

inline nlohmann::json to_json(const QualityReport& r) {
    auto opt = [](const std::optional<double>& v) -> nlohmann::json {
        return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    nlohmann::json j = nlohmann::json::object();
    j["schema"] = report_schema;
    j["dataset_size"] = r.dataset_size;
    j["vendi_score"] = opt(r.vendi_score);
    j["vendi_sample_size"] = r.vendi_sample_size;
    j["balance_entropy"] = opt(r.balance_entropy);
    j["mean_max_similarity"] = opt(r.mean_max_similarity);
    j["relevance_fraction"] = opt(r.relevance_fraction);
    j["class_counts"] = r.class_counts;
    j["seed"] = r.provenance.seed;
    j["config_hash"] = r.provenance.config_hash;
    j["strategy"] = r.provenance.strategy;
    j["stream_hash"] = r.provenance.stream_hash;
    return j;
}

inline QualityReport report_from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("schema", "") != report_schema)
        throw error(errc::io_error, "not a " + std::string(report_schema) + " document");
    auto opt = [&](const char* key) -> std::optional<double> {
        const auto& v = j.at(key);
        if (v.is_null())
            return std::nullopt;
        return v.get<double>();
    };
    try {
        QualityReport r;
        r.dataset_size = j.at("dataset_size").get<std::size_t>();
        r.vendi_score = opt("vendi_score");
        r.vendi_sample_size = j.at("vendi_sample_size").get<std::size_t>();
        r.balance_entropy = opt("balance_entropy");
        r.mean_max_similarity = opt("mean_max_similarity");
        r.relevance_fraction = opt("relevance_fraction");
        r.class_counts = j.at("class_counts").get<std::vector<std::uint64_t>>();
        r.provenance.seed = j.at("seed").get<std::uint64_t>();
        r.provenance.config_hash = j.at("config_hash").get<std::string>();
        r.provenance.strategy = j.at("strategy").get<std::string>();
        r.provenance.stream_hash = j.at("stream_hash").get<std::string>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw error(errc::io_error, std::string("malformed report: ") + e.what());
    }
}

// --- file helpers

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw error(errc::io_error, "cannot open '" + path.string() + "' for writing");
    return os;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw error(errc::io_error, "cannot open '" + path.string() + "' for reading");
    return is;
}

inline SampleTable load_sample_table(const std::filesystem::path& path) {
    auto is = open_input(path);
    try {
        return read_sample_table(is);
    } catch (const error& e) {
        throw error(e.code(), path.string() + ": " + e.message());
    }
}

inline void save_sample_table(const std::filesystem::path& path, const SampleTable& t) {
    auto os = open_output(path);
    write_sample_table(os, t);
    if (!os.flush())
        throw error(errc::io_error, "write to '" + path.string() + "' failed");
}

inline QualityReport load_report(const std::filesystem::path& path) {
    auto is = open_input(path);
    try {
        return report_from_json(nlohmann::json::parse(is));
    } catch (const nlohmann::json::exception& e) {
        throw error(errc::io_error, path.string() + ": " + e.what());
    }
}

inline void save_report(const std::filesystem::path& path, const QualityReport& r) {
    auto os = open_output(path);
    os << to_json(r).dump(2) << '\n';
    if (!os.flush())
        throw error(errc::io_error, "write to '" + path.string() + "' failed");
}

} // namespace fastdata
