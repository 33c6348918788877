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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Baseline trigger functions. Rule, semantic and error triggers look at one
// sample (plus, for the error trigger, the raw stream history) and never at
// what has been retained. The frozen novelty trigger compares against a
// reference captured during warmup and never updated afterwards.

namespace fastdata {

enum class Comparator { greater, less, greater_equal, less_equal };

inline std::string_view to_string(Comparator c) noexcept {
    switch (c) {
    case Comparator::greater: return ">";
    case Comparator::less: return "<";
    case Comparator::greater_equal: return ">=";
    case Comparator::less_equal: return "<=";
    }
    return "?";
}

inline std::optional<Comparator> parse_comparator(std::string_view s) noexcept {
    if (s == ">") return Comparator::greater;
    if (s == "<") return Comparator::less;
    if (s == ">=") return Comparator::greater_equal;
    if (s == "<=") return Comparator::less_equal;
    return std::nullopt;
}

/// Threshold test on one raw feature.
class RuleTrigger {
public:
    RuleTrigger(std::size_t feature_index, Comparator comparator, double threshold,
                std::size_t dimension)
        : index_(feature_index), comparator_(comparator), threshold_(threshold) {
        if (feature_index >= dimension)
            throw error(errc::config_error, "rule trigger feature index " +
                                                std::to_string(feature_index) +
                                                " out of range for dimension " +
                                                std::to_string(dimension));
        if (!std::isfinite(threshold))
            throw error(errc::config_error, "rule trigger threshold must be finite");
    }

    bool operator()(const Sample& x) const {
        const double v = x.features[index_];
        switch (comparator_) {
        case Comparator::greater: return v > threshold_;
        case Comparator::less: return v < threshold_;
        case Comparator::greater_equal: return v >= threshold_;
        case Comparator::less_equal: return v <= threshold_;
        }
        return false;
    }

    std::size_t feature_index() const noexcept { return index_; }
    Comparator comparator() const noexcept { return comparator_; }
    double threshold() const noexcept { return threshold_; }

private:
    std::size_t index_;
    Comparator comparator_;
    double threshold_;
};

enum class TagMatch { all, any };

/// Stand-in for concept detectors: fires on metadata tags.
class SemanticTrigger {
public:
    SemanticTrigger(TagSet required, TagMatch mode) : required_(std::move(required)), mode_(mode) {
        if (required_.empty())
            throw error(errc::config_error, "semantic trigger needs at least one tag");
    }

    bool operator()(const Sample& x) const {
        auto present = [&](const std::string& t) { return x.tags.contains(t); };
        return mode_ == TagMatch::all ? std::all_of(required_.begin(), required_.end(), present)
                                      : std::any_of(required_.begin(), required_.end(), present);
    }

    const TagSet& required_tags() const noexcept { return required_; }
    TagMatch mode() const noexcept { return mode_; }

private:
    TagSet required_;
    TagMatch mode_;
};

/// Expected-vs-observed trigger: the expectation is the trailing mean of the
/// last `window` observations of one feature. Silent until the window is full.
class ErrorTrigger {
public:
    ErrorTrigger(std::size_t window, double epsilon, std::size_t monitored_index,
                 std::size_t dimension)
        : window_(window), epsilon_(epsilon), index_(monitored_index) {
        if (window < 2)
            throw error(errc::config_error, "error trigger window must be >= 2");
        if (!(epsilon > 0.0) || !std::isfinite(epsilon))
            throw error(errc::config_error, "error trigger residual threshold must be > 0");
        if (monitored_index >= dimension)
            throw error(errc::config_error, "error trigger index " +
                                                std::to_string(monitored_index) +
                                                " out of range for dimension " +
                                                std::to_string(dimension));
    }

    std::optional<double> expected() const {
        if (history_.size() < window_)
            return std::nullopt;
        double sum = 0.0;
        for (double v : history_)
            sum += v;
        return sum / static_cast<double>(history_.size());
    }

    /// Evaluates x, then pushes its value into the window.
    bool evaluate(const Sample& x) {
        const double observed = x.features[index_];
        const auto exp = expected();
        const bool fire = exp && std::abs(observed - *exp) > epsilon_;
        history_.push_back(observed);
        if (history_.size() > window_)
            history_.pop_front();
        return fire;
    }

    std::size_t window() const noexcept { return window_; }

private:
    std::size_t window_;
    double epsilon_;
    std::size_t index_;
    std::deque<double> history_;
};

/// Static learned-normality baseline: novelty relative to the first
/// `warmup` stream samples, which are frozen as the reference.
class FrozenNoveltyTrigger {
public:
    enum class Outcome { warmup, novel, known };

    struct Result {
        Outcome outcome;
        double novelty;
        std::size_t comparisons;
    };

    FrozenNoveltyTrigger(std::size_t warmup, double threshold)
        : warmup_(warmup), threshold_(threshold) {
        if (warmup < 1)
            throw error(errc::config_error, "frozen novelty warmup must be >= 1");
        if (!(threshold > 0.0 && threshold < 1.0))
            throw error(errc::config_error, "frozen novelty threshold must lie in (0, 1)");
        reference_.reserve(warmup);
    }

    bool warming_up() const noexcept { return reference_.size() < warmup_; }

    /// 1 - max(0, max cosine to the reference); 1 for an empty reference.
    double novelty(const FeatureVector& features) const {
        const FeatureVector z = normalize(features);
        double best = 0.0;
        for (const auto& r : reference_)
            best = std::max(best, cosine_similarity(z, r));
        return 1.0 - best;
    }

    Result evaluate(const Sample& x) {
        if (warming_up()) {
            reference_.push_back(normalize(x.features));
            return {Outcome::warmup, 1.0, 0};
        }
        const double nov = novelty(x.features);
        return {nov > threshold_ ? Outcome::novel : Outcome::known, nov, reference_.size()};
    }

    std::span<const FeatureVector> reference() const noexcept { return reference_; }
    std::size_t warmup() const noexcept { return warmup_; }
    double threshold() const noexcept { return threshold_; }

private:
    std::size_t warmup_;
    double threshold_;
    std::vector<FeatureVector> reference_;
};

} // namespace fastdata
