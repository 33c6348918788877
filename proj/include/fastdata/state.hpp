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
#include <fastdata/predicate.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

namespace fastdata {

struct ObjectiveWeights {
    double balance = 1.0;
    double novelty = 1.0;
    double relevance = 1.0;
    double redundancy = 1.0;

    // Largest value score a sample can reach; redundancy only subtracts.
    double max_score() const noexcept { return balance + novelty + relevance; }

    friend bool operator==(const ObjectiveWeights&, const ObjectiveWeights&) = default;
};

/// Desired properties of the dataset being collected (the control reference).
struct TargetState {
    std::vector<double> class_distribution;
    TagPredicate relevance;
    std::size_t max_dataset_size = 1;
    double target_accept_rate = 1.0;
    std::size_t sketch_capacity = 1;
    ObjectiveWeights weights;

    std::size_t num_classes() const noexcept { return class_distribution.size(); }

    static std::vector<double> uniform_distribution(std::size_t classes) {
        return std::vector<double>(classes, 1.0 / static_cast<double>(classes));
    }

    friend bool operator==(const TargetState&, const TargetState&) = default;
};

inline void validate(const TargetState& t) {
    auto fail = [](const std::string& what) { return error(errc::config_error, "target state: " + what); };
    if (t.class_distribution.size() < 2)
        throw fail("class distribution needs at least 2 classes");
    double sum = 0.0;
    for (double p : t.class_distribution) {
        if (!std::isfinite(p) || p < 0.0)
            throw fail("class distribution entries must be finite and nonnegative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw fail("class distribution sums to " + std::to_string(sum) + ", expected 1");
    if (t.max_dataset_size < 1)
        throw fail("max dataset size must be >= 1");
    if (!(t.target_accept_rate > 0.0 && t.target_accept_rate <= 1.0))
        throw fail("target accept rate must lie in (0, 1]");
    if (t.sketch_capacity < 1)
        throw fail("sketch capacity must be >= 1");
    const auto& w = t.weights;
    for (double v : {w.balance, w.novelty, w.relevance, w.redundancy})
        if (!std::isfinite(v) || v < 0.0)
            throw fail("objective weights must be finite and nonnegative");
    if (w.balance + w.novelty + w.relevance + w.redundancy == 0.0)
        throw fail("objective weights must not all be zero");
}

struct SketchEntry {
    FeatureVector embedding; // unit norm (or all-zero)
    ClassId label = 0;

    friend bool operator==(const SketchEntry&, const SketchEntry&) = default;
};

/// Compact online summary of the retained dataset.
struct DatasetStateEstimate {
    std::vector<std::uint64_t> class_counts;
    std::vector<SketchEntry> sketch;
    std::uint64_t retained_count = 0;
    std::uint64_t offered_count = 0;
    double accept_threshold = 0.0;
    double accept_rate_ema = 0.0;

    static DatasetStateEstimate initial(std::size_t classes, double threshold) {
        DatasetStateEstimate s;
        s.class_counts.assign(classes, 0);
        s.accept_threshold = threshold;
        return s;
    }

    friend bool operator==(const DatasetStateEstimate&, const DatasetStateEstimate&) = default;
};

/// Checks every structural invariant of the estimate against its target.
/// O(C + |sketch|); throws state_corruption.
inline void validate(const DatasetStateEstimate& s, const TargetState& t) {
    auto fail = [](const std::string& what) { return error(errc::state_corruption, what); };
    if (s.class_counts.size() != t.num_classes())
        throw fail("class histogram has " + std::to_string(s.class_counts.size()) +
                   " bins, target has " + std::to_string(t.num_classes()) + " classes");
    const auto total =
        std::accumulate(s.class_counts.begin(), s.class_counts.end(), std::uint64_t{0});
    if (total != s.retained_count)
        throw fail("class histogram sums to " + std::to_string(total) + " but " +
                   std::to_string(s.retained_count) + " samples are retained");
    if (s.sketch.size() > t.sketch_capacity)
        throw fail("sketch holds " + std::to_string(s.sketch.size()) + " entries, capacity " +
                   std::to_string(t.sketch_capacity));
    if (s.retained_count > s.offered_count || s.retained_count > t.max_dataset_size)
        throw fail("retained count " + std::to_string(s.retained_count) +
                   " exceeds offered count or budget");
    if (!(s.accept_rate_ema >= 0.0 && s.accept_rate_ema <= 1.0))
        throw fail("acceptance-rate estimate outside [0, 1]");
    if (!std::isfinite(s.accept_threshold))
        throw fail("non-finite acceptance threshold");
    for (const auto& e : s.sketch)
        if (e.label >= t.num_classes())
            throw fail("sketch entry with out-of-range class " + std::to_string(e.label));
}

} // namespace fastdata
