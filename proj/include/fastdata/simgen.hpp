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

#include <fastdata/core.hpp>
#include <fastdata/random.hpp>

#include <fastdata/detail/json_fields.hpp>

#include <json.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace fastdata {

/// A class that is absent until `step`, then appears with `probability`.
struct DriftSpec {
    std::uint64_t step = 0;
    ClassId drift_class = 0;
    double probability = 0.0;

    friend bool operator==(const DriftSpec&, const DriftSpec&) = default;
};

struct StreamConfig {
    std::size_t num_classes = 10;
    std::size_t dimension = 32;
    double zipf_exponent = 1.0;
    std::vector<FeatureVector> cluster_centers; // empty: generated from the seed
    double noise_sigma = 0.1;
    std::size_t length = 1000;
    std::optional<DriftSpec> drift;
    std::map<ClassId, TagSet> tag_rules;
    std::optional<std::set<ClassId>> relevant_classes; // unset: every class
    std::string relevant_tag = "relevant";
    double max_center_cosine = 0.3;
    std::uint64_t seed = 0;

    friend bool operator==(const StreamConfig&, const StreamConfig&) = default;
};

/// Zipf class frequencies p(c) proportional to (c+1)^-s.
inline std::vector<double> class_frequencies(std::size_t classes, double exponent) {
    if (classes < 2)
        throw error(errc::config_error, "class frequencies need at least 2 classes");
    if (!(exponent >= 0.0) || !std::isfinite(exponent))
        throw error(errc::config_error, "zipf exponent must be finite and >= 0");
    std::vector<double> p(classes);
    double z = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
        p[c] = std::pow(static_cast<double>(c + 1), -exponent);
        z += p[c];
    }
    for (double& v : p)
        v /= z;
    return p;
}

inline void validate(const StreamConfig& cfg) {
    auto fail = [](const std::string& what) { return error(errc::config_error, "stream: " + what); };
    if (cfg.num_classes < 2)
        throw fail("num_classes must be >= 2");
    if (cfg.dimension < 1)
        throw fail("dimension must be >= 1");
    if (!(cfg.zipf_exponent >= 0.0) || !std::isfinite(cfg.zipf_exponent))
        throw fail("zipf_exponent must be finite and >= 0");
    if (!(cfg.noise_sigma >= 0.0) || !std::isfinite(cfg.noise_sigma))
        throw fail("noise_sigma must be finite and >= 0");
    if (!(cfg.max_center_cosine > -1.0 && cfg.max_center_cosine <= 1.0))
        throw fail("max_center_cosine must lie in (-1, 1]");
    if (!cfg.cluster_centers.empty()) {
        if (cfg.cluster_centers.size() != cfg.num_classes)
            throw fail("expected " + std::to_string(cfg.num_classes) + " cluster centers, got " +
                       std::to_string(cfg.cluster_centers.size()));
        for (std::size_t i = 0; i < cfg.cluster_centers.size(); ++i) {
            const auto& c = cfg.cluster_centers[i];
            if (c.size() != cfg.dimension || !c.all_finite() || c.is_zero())
                throw fail("cluster center " + std::to_string(i) +
                           " must be a finite nonzero vector of the stream dimension");
            for (std::size_t j = 0; j < i; ++j)
                if (normalize(c) == normalize(cfg.cluster_centers[j]))
                    throw fail("cluster centers " + std::to_string(j) + " and " +
                               std::to_string(i) + " coincide");
        }
    }
    if (cfg.drift) {
        if (cfg.drift->step >= cfg.length)
            throw fail("drift step must precede the stream end");
        if (cfg.drift->drift_class >= cfg.num_classes)
            throw fail("drift class out of range");
        if (!(cfg.drift->probability > 0.0 && cfg.drift->probability <= 1.0))
            throw fail("drift probability must lie in (0, 1]");
    }
    for (const auto& [cls, tags] : cfg.tag_rules)
        if (cls >= cfg.num_classes)
            throw fail("tag rule for unknown class " + std::to_string(cls));
    if (cfg.relevant_classes)
        for (auto cls : *cfg.relevant_classes)
            if (cls >= cfg.num_classes)
                throw fail("relevant class " + std::to_string(cls) + " out of range");
}

/// Seeded long-tail stream: class ~ Zipf (plus optional drift class),
/// features = normalize(center_c + sigma * N(0, I)).
class StreamGenerator {
public:
    explicit StreamGenerator(StreamConfig cfg) : cfg_(std::move(cfg)), rng_(cfg_.seed) {
        validate(cfg_);
        if (cfg_.cluster_centers.empty()) {
            generate_centers();
        } else {
            for (const auto& c : cfg_.cluster_centers)
                centers_.push_back(normalize(c));
        }
        base_ = class_frequencies(cfg_.num_classes, cfg_.zipf_exponent);
        if (cfg_.drift) {
            base_[cfg_.drift->drift_class] = 0.0;
            double z = 0.0;
            for (double p : base_)
                z += p;
            for (double& p : base_)
                p /= z;
        }
        for (ClassId c = 0; c < cfg_.num_classes; ++c) {
            TagSet tags;
            if (auto it = cfg_.tag_rules.find(c); it != cfg_.tag_rules.end())
                tags = it->second;
            if (!cfg_.relevant_classes || cfg_.relevant_classes->contains(c))
                tags.insert(cfg_.relevant_tag);
            class_tags_.push_back(std::move(tags));
        }
    }

    const StreamConfig& config() const noexcept { return cfg_; }
    const std::vector<FeatureVector>& centers() const noexcept { return centers_; }
    /// Class pmf before drift (drift class removed and renormalized).
    const std::vector<double>& base_frequencies() const noexcept { return base_; }
    bool done() const noexcept { return step_ >= cfg_.length; }

    Sample next() {
        Sample s;
        s.id = step_;
        s.timestamp = step_;
        ClassId c;
        if (cfg_.drift && step_ >= cfg_.drift->step && uniform01(rng_) < cfg_.drift->probability)
            c = cfg_.drift->drift_class;
        else
            c = draw_class();
        s.label = c;
        if (cfg_.noise_sigma == 0.0) {
            s.features = centers_[c];
        } else {
            std::vector<double> v(cfg_.dimension);
            for (std::size_t i = 0; i < v.size(); ++i)
                v[i] = centers_[c][i] + cfg_.noise_sigma * standard_normal(rng_);
            s.features = normalize(FeatureVector(std::move(v)));
        }
        s.tags = class_tags_[c];
        ++step_;
        return s;
    }

private:
    void generate_centers() {
        constexpr int max_attempts = 10000;
        for (std::size_t c = 0; c < cfg_.num_classes; ++c) {
            for (int attempt = 0;; ++attempt) {
                if (attempt == max_attempts)
                    throw error(errc::config_error,
                                "stream: could not place " + std::to_string(cfg_.num_classes) +
                                    " centers with pairwise cosine < " +
                                    std::to_string(cfg_.max_center_cosine) + " in dimension " +
                                    std::to_string(cfg_.dimension));
                std::vector<double> v(cfg_.dimension);
                for (double& x : v)
                    x = standard_normal(rng_);
                FeatureVector candidate = normalize(FeatureVector(std::move(v)));
                bool separated = true;
                for (const auto& prev : centers_)
                    if (cosine_similarity(candidate, prev) >= cfg_.max_center_cosine) {
                        separated = false;
                        break;
                    }
                if (separated) {
                    centers_.push_back(std::move(candidate));
                    break;
                }
            }
        }
    }

    ClassId draw_class() {
        const double u = uniform01(rng_);
        double acc = 0.0;
        ClassId last = 0;
        for (ClassId c = 0; c < base_.size(); ++c) {
            if (base_[c] > 0.0)
                last = c;
            acc += base_[c];
            if (u < acc)
                return c;
        }
        return last;
    }

    StreamConfig cfg_;
    Rng rng_;
    std::vector<FeatureVector> centers_;
    std::vector<double> base_;
    std::vector<TagSet> class_tags_;
    std::uint64_t step_ = 0;
};

inline std::vector<Sample> generate(const StreamConfig& cfg) {
    StreamGenerator gen(cfg);
    std::vector<Sample> out;
    out.reserve(cfg.length);
    while (!gen.done())
        out.push_back(gen.next());
    return out;
}

// --- JSON form of the stream configuration (config files, stream headers)

inline nlohmann::json to_json(const StreamConfig& cfg) {
    nlohmann::json j;
    j["num_classes"] = cfg.num_classes;
    j["dimension"] = cfg.dimension;
    j["zipf_exponent"] = cfg.zipf_exponent;
    j["noise_sigma"] = cfg.noise_sigma;
    j["length"] = cfg.length;
    j["seed"] = cfg.seed;
    j["max_center_cosine"] = cfg.max_center_cosine;
    j["relevant_tag"] = cfg.relevant_tag;
    if (!cfg.cluster_centers.empty()) {
        auto arr = nlohmann::json::array();
        for (const auto& c : cfg.cluster_centers)
            arr.push_back(std::vector<double>(c.values().begin(), c.values().end()));
        j["cluster_centers"] = std::move(arr);
    }
    if (cfg.drift)
        j["drift"] = {{"step", cfg.drift->step},
                      {"class", cfg.drift->drift_class},
                      {"probability", cfg.drift->probability}};
    if (!cfg.tag_rules.empty()) {
        nlohmann::json rules = nlohmann::json::object();
        for (const auto& [cls, tags] : cfg.tag_rules)
            rules[std::to_string(cls)] = std::vector<std::string>(tags.begin(), tags.end());
        j["tag_rules"] = std::move(rules);
    }
    if (cfg.relevant_classes)
        j["relevant_classes"] =
            std::vector<ClassId>(cfg.relevant_classes->begin(), cfg.relevant_classes->end());
    return j;
}

inline StreamConfig stream_config_from_json(const nlohmann::json& j, const std::string& path = "") {
    detail::JsonFieldReader r(j, path);
    r.reject_unknown({"num_classes", "dimension", "zipf_exponent", "noise_sigma", "length", "seed",
                      "max_center_cosine", "relevant_tag", "cluster_centers", "drift", "tag_rules",
                      "relevant_classes"});
    StreamConfig cfg;
    cfg.num_classes = r.get<std::size_t>("num_classes");
    cfg.dimension = r.get<std::size_t>("dimension");
    cfg.zipf_exponent = r.get<double>("zipf_exponent", 1.0);
    cfg.noise_sigma = r.get<double>("noise_sigma", 0.1);
    cfg.length = r.get<std::size_t>("length");
    cfg.seed = r.get<std::uint64_t>("seed", std::uint64_t{0});
    cfg.max_center_cosine = r.get<double>("max_center_cosine", 0.3);
    cfg.relevant_tag = r.get<std::string>("relevant_tag", std::string("relevant"));
    if (r.has("cluster_centers")) {
        const auto& arr = r.raw("cluster_centers");
        if (!arr.is_array())
            throw r.fail("cluster_centers", "expected an array of vectors");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const auto& row = arr[i];
            if (!row.is_array())
                throw r.fail("cluster_centers/" + std::to_string(i), "expected an array of numbers");
            std::vector<double> v;
            for (const auto& x : row) {
                if (!x.is_number())
                    throw r.fail("cluster_centers/" + std::to_string(i), "expected numbers");
                v.push_back(x.get<double>());
            }
            cfg.cluster_centers.emplace_back(std::move(v));
        }
    }
    if (r.has("drift")) {
        detail::JsonFieldReader d(r.raw("drift"), r.child("drift"));
        d.reject_unknown({"step", "class", "probability"});
        cfg.drift = DriftSpec{d.get<std::uint64_t>("step"), d.get<ClassId>("class"),
                              d.get<double>("probability")};
    }
    if (r.has("tag_rules")) {
        const auto& rules = r.raw("tag_rules");
        if (!rules.is_object())
            throw r.fail("tag_rules", "expected an object mapping class ids to tag arrays");
        for (const auto& [key, tags] : rules.items()) {
            ClassId cls = 0;
            try {
                std::size_t used = 0;
                const unsigned long v = std::stoul(key, &used);
                if (used != key.size())
                    throw std::invalid_argument(key);
                cls = static_cast<ClassId>(v);
            } catch (const std::exception&) {
                throw r.fail("tag_rules/" + key, "class key must be a nonnegative integer");
            }
            cfg.tag_rules[cls] = detail::tag_set_from_json(tags, r.child("tag_rules/" + key));
        }
    }
    if (r.has("relevant_classes")) {
        const auto& arr = r.raw("relevant_classes");
        if (!arr.is_array())
            throw r.fail("relevant_classes", "expected an array of class ids");
        std::set<ClassId> rel;
        for (std::size_t i = 0; i < arr.size(); ++i)
            rel.insert(r.convert<ClassId>(arr[i], "relevant_classes/" + std::to_string(i)));
        cfg.relevant_classes = std::move(rel);
    }
    validate(cfg);
    return cfg;
}

} // namespace fastdata
