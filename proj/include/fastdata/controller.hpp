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
#include <fastdata/state.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fastdata {

enum class Decision { retain, discard };

inline std::string_view to_string(Decision d) noexcept {
    return d == Decision::retain ? "RETAIN" : "DISCARD";
}

// Reason codes written to decision logs.
namespace reason {
inline constexpr std::string_view above_threshold = "ABOVE_THRESHOLD";
inline constexpr std::string_view below_threshold = "BELOW_THRESHOLD";
inline constexpr std::string_view budget_full = "BUDGET_FULL";
inline constexpr std::string_view warmup = "WARMUP";
inline constexpr std::string_view trigger_fired = "TRIGGER_FIRED";
inline constexpr std::string_view trigger_quiet = "TRIGGER_QUIET";
inline constexpr std::string_view sampled = "SAMPLED";
inline constexpr std::string_view not_sampled = "NOT_SAMPLED";
inline constexpr std::string_view record = "RECORD";
// Appended when the sketch was subsampled to respect the step budget.
inline constexpr std::string_view subsampled = "SUBSAMPLED";
} // namespace reason

/// Per-sample utility psi[k] and its components, each in [0, 1].
struct ValueScore {
    double total = 0.0;
    double balance_gain = 0.0;
    double novelty_gain = 0.0;
    double relevance_score = 0.0;
    double redundancy_penalty = 0.0;
    std::string reason;
    std::size_t comparisons = 0;
    bool subsampled = false;

    friend bool operator==(const ValueScore&, const ValueScore&) = default;
};

struct CollectionAction {
    Decision decision = Decision::discard;
    ValueScore value;
    double threshold = 0.0; // threshold in force when the decision was taken

    friend bool operator==(const CollectionAction&, const CollectionAction&) = default;
};

/// One decision-log line.
struct DecisionRecord {
    std::uint64_t step = 0;
    std::uint64_t sample_id = 0;
    ValueScore value;
    double threshold = 0.0;
    Decision decision = Decision::discard;

    friend bool operator==(const DecisionRecord&, const DecisionRecord&) = default;
};

struct ControllerParams {
    double initial_threshold = 0.0;
    double ema_alpha = 0.01;
    double threshold_gain = 0.05;
    std::size_t step_budget = 256; // max sketch comparisons per sample
    bool oracle_labels = false;    // use ground truth instead of 1-NN class estimate
    std::uint64_t seed = 0;

    friend bool operator==(const ControllerParams&, const ControllerParams&) = default;
};

inline void validate(const ControllerParams& p) {
    auto fail = [](const std::string& what) { return error(errc::config_error, "controller: " + what); };
    if (!std::isfinite(p.initial_threshold) || p.initial_threshold < 0.0)
        throw fail("initial threshold must be finite and >= 0");
    if (!(p.ema_alpha > 0.0 && p.ema_alpha <= 1.0))
        throw fail("ema alpha must lie in (0, 1]");
    if (!std::isfinite(p.threshold_gain) || p.threshold_gain < 0.0)
        throw fail("threshold gain must be finite and >= 0");
    if (p.step_budget < 1)
        throw fail("step budget must be >= 1");
}

struct ValuationOptions {
    std::size_t step_budget = std::numeric_limits<std::size_t>::max();
    bool oracle_labels = false;
};

/// psi = V(state, target, z).
///
/// `z` must be the normalized feature vector. `label` is the ground truth and
/// is only consulted when `opts.oracle_labels` is set; otherwise the class is
/// estimated as the label of the most similar compared sketch entry. When
/// the sketch is larger than the step budget, a uniform subsample of budget
/// entries (partial Fisher-Yates on `rng`) is compared instead.
inline ValueScore value_of(const DatasetStateEstimate& state, const TargetState& target,
                           const FeatureVector& z, const TagSet& tags, ClassId label,
                           const ValuationOptions& opts, Rng& rng) {
    validate(state, target);
    if (!z.all_finite())
        throw error(errc::invalid_feature, "non-finite feature entry");

    ValueScore v;
    const auto& sketch = state.sketch;
    std::vector<std::size_t> order(sketch.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t compared = sketch.size();
    if (sketch.size() > opts.step_budget) {
        for (std::size_t i = 0; i < opts.step_budget; ++i)
            std::swap(order[i], order[i + uniform_index(rng, sketch.size() - i)]);
        compared = opts.step_budget;
        v.subsampled = true;
    }

    double best = -std::numeric_limits<double>::infinity();
    std::optional<std::size_t> nearest;
    for (std::size_t q = 0; q < compared; ++q) {
        const double s = cosine_similarity(z, sketch[order[q]].embedding);
        if (s > best) {
            best = s;
            nearest = order[q];
        }
    }
    v.comparisons = compared;

    if (compared == 0) {
        v.novelty_gain = 1.0;
        v.redundancy_penalty = 0.0;
    } else {
        v.redundancy_penalty = std::max(0.0, best);
        v.novelty_gain = 1.0 - v.redundancy_penalty;
    }

    std::optional<ClassId> predicted;
    if (opts.oracle_labels)
        predicted = label;
    else if (nearest)
        predicted = sketch[*nearest].label;

    if (state.retained_count == 0 || !predicted) {
        v.balance_gain = 1.0;
    } else {
        if (*predicted >= target.num_classes())
            throw error(errc::state_corruption, "class " + std::to_string(*predicted) +
                                                    " outside the target distribution");
        const double share = target.class_distribution[*predicted];
        if (share <= 0.0) {
            v.balance_gain = 0.0;
        } else {
            const double current = static_cast<double>(state.class_counts[*predicted]) /
                                   static_cast<double>(state.retained_count);
            v.balance_gain = std::max(0.0, share - current) / share;
        }
    }

    v.relevance_score = target.relevance(tags) ? 1.0 : 0.0;

    const auto& w = target.weights;
    v.total = w.balance * v.balance_gain + w.novelty * v.novelty_gain +
              w.relevance * v.relevance_score - w.redundancy * v.redundancy_penalty;
    return v;
}

/// u = F(psi): retain iff psi >= threshold (ties retain) and the budget has room.
inline CollectionAction decide(const DatasetStateEstimate& state, const TargetState& target,
                               ValueScore value) {
    CollectionAction action;
    action.threshold = state.accept_threshold;
    std::string_view why;
    if (state.retained_count >= target.max_dataset_size) {
        action.decision = Decision::discard;
        why = reason::budget_full;
    } else if (value.total >= state.accept_threshold) {
        action.decision = Decision::retain;
        why = reason::above_threshold;
    } else {
        action.decision = Decision::discard;
        why = reason::below_threshold;
    }
    value.reason = std::string(why);
    if (value.subsampled)
        value.reason += "+" + std::string(reason::subsampled);
    action.value = std::move(value);
    return action;
}

/// Fast Data closed-loop collector: valuation, policy, recursive state
/// estimation and threshold control over one stream. Single writer; one
/// engine per stream.
class ClosedLoopEngine {
public:
    ClosedLoopEngine(TargetState target, ControllerParams params)
        : target_(std::move(target)), params_(params),
          rng_(derive_seed(params.seed, SeedSalt::controller)) {
        validate(target_);
        validate(params_);
        state_ = DatasetStateEstimate::initial(target_.num_classes(), params_.initial_threshold);
    }

    const TargetState& target() const noexcept { return target_; }
    const ControllerParams& params() const noexcept { return params_; }
    const DatasetStateEstimate& state() const noexcept { return state_; }
    const std::vector<Sample>& dataset() const noexcept { return dataset_; }

    ValueScore value_of(const FeatureVector& z, const TagSet& tags, ClassId label) {
        return fastdata::value_of(state_, target_, z, tags, label,
                                  {params_.step_budget, params_.oracle_labels}, rng_);
    }

    CollectionAction decide(ValueScore value) const {
        return fastdata::decide(state_, target_, std::move(value));
    }

    /// theta[k] = E(theta[k-1], z[k]) plus the dataset union update. The
    /// sketch only changes on retention; counters change on every offer.
    void update_state(const Sample& x, const FeatureVector& z, const CollectionAction& action) {
        ++state_.offered_count;
        const bool keep = action.decision == Decision::retain;
        if (keep) {
            if (dataset_.size() >= target_.max_dataset_size)
                throw error(errc::state_corruption, "retention beyond the dataset budget");
            if (x.label >= target_.num_classes())
                throw error(errc::state_corruption, "retained sample has class " +
                                                        std::to_string(x.label) +
                                                        " outside the target distribution");
            dataset_.push_back(x);
            ++state_.retained_count;
            ++state_.class_counts[x.label];
            state_.sketch.push_back({z, x.label});
            if (state_.sketch.size() > target_.sketch_capacity)
                evict_from_modal_class();
        }
        const double alpha = params_.ema_alpha;
        state_.accept_rate_ema = (1.0 - alpha) * state_.accept_rate_ema + alpha * (keep ? 1.0 : 0.0);
    }

    /// Integral law on the acceptance-rate error, clamped to [0, max psi].
    double adapt_threshold() {
        const double error = state_.accept_rate_ema - target_.target_accept_rate;
        state_.accept_threshold =
            std::clamp(state_.accept_threshold + params_.threshold_gain * error, 0.0,
                       target_.weights.max_score());
        return state_.accept_threshold;
    }

    DecisionRecord step(const Sample& x) {
        const FeatureVector z = normalize(x.features);
        CollectionAction action = decide(value_of(z, x.tags, x.label));
        update_state(x, z, action);
        adapt_threshold();
        DecisionRecord rec;
        rec.step = state_.offered_count - 1;
        rec.sample_id = x.id;
        rec.threshold = action.threshold;
        rec.decision = action.decision;
        rec.value = std::move(action.value);
        return rec;
    }

private:
    void evict_from_modal_class() {
        std::vector<std::size_t> per_class(target_.num_classes(), 0);
        for (const auto& e : state_.sketch)
            ++per_class[e.label];
        const std::size_t modal = *std::max_element(per_class.begin(), per_class.end());
        std::vector<std::size_t> candidates;
        for (std::size_t i = 0; i < state_.sketch.size(); ++i)
            if (per_class[state_.sketch[i].label] == modal)
                candidates.push_back(i);
        const std::size_t victim = candidates[uniform_index(rng_, candidates.size())];
        state_.sketch.erase(state_.sketch.begin() + static_cast<std::ptrdiff_t>(victim));
    }

    TargetState target_;
    ControllerParams params_;
    Rng rng_;
    DatasetStateEstimate state_;
    std::vector<Sample> dataset_;
};

struct StreamRun {
    std::vector<Sample> dataset;
    std::vector<DecisionRecord> log;
    DatasetStateEstimate final_state;
};

/// Runs a fresh engine over the whole stream in order.
inline StreamRun process_stream(ClosedLoopEngine engine, std::span<const Sample> stream) {
    StreamRun run;
    run.log.reserve(stream.size());
    for (const auto& x : stream)
        run.log.push_back(engine.step(x));
    run.dataset = engine.dataset();
    run.final_state = engine.state();
    return run;
}

} // namespace fastdata
