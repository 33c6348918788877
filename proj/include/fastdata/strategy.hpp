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
#include <fastdata/random.hpp>
#include <fastdata/triggers.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fastdata {

enum class StrategyKind { record_all, random_p, rule, semantic, error, frozen_novelty, closed_loop };

inline std::string_view to_string(StrategyKind k) noexcept {
    switch (k) {
    case StrategyKind::record_all: return "RECORD_ALL";
    case StrategyKind::random_p: return "RANDOM_P";
    case StrategyKind::rule: return "RULE";
    case StrategyKind::semantic: return "SEMANTIC";
    case StrategyKind::error: return "ERROR";
    case StrategyKind::frozen_novelty: return "FROZEN_NOVELTY";
    case StrategyKind::closed_loop: return "CLOSED_LOOP";
    }
    return "?";
}

inline std::optional<StrategyKind> parse_strategy_kind(std::string_view s) noexcept {
    for (auto k : {StrategyKind::record_all, StrategyKind::random_p, StrategyKind::rule,
                   StrategyKind::semantic, StrategyKind::error, StrategyKind::frozen_novelty,
                   StrategyKind::closed_loop})
        if (to_string(k) == s)
            return k;
    return std::nullopt;
}

/// A data collection strategy F: S_T -> D, fed one sample at a time.
/// Every strategy enforces the shared dataset budget.
class CollectionStrategy {
public:
    explicit CollectionStrategy(std::size_t max_dataset_size) : max_size_(max_dataset_size) {
        if (max_dataset_size < 1)
            throw error(errc::config_error, "dataset budget must be >= 1");
    }
    virtual ~CollectionStrategy() = default;

    virtual StrategyKind kind() const noexcept = 0;
    virtual DecisionRecord offer(const Sample& x) = 0;

    const std::vector<Sample>& dataset() const noexcept { return dataset_; }
    std::size_t max_dataset_size() const noexcept { return max_size_; }

protected:
    bool has_room() const noexcept { return dataset_.size() < max_size_; }

    // Shared bookkeeping for baselines: `wants` is the trigger outcome,
    // the budget check is applied here.
    DecisionRecord settle(const Sample& x, bool wants, ValueScore value, double threshold,
                          std::string_view yes, std::string_view no) {
        DecisionRecord r;
        r.step = step_++;
        r.sample_id = x.id;
        r.threshold = threshold;
        if (wants && has_room()) {
            r.decision = Decision::retain;
            value.reason = std::string(yes);
            dataset_.push_back(x);
        } else {
            r.decision = Decision::discard;
            value.reason = std::string(wants ? reason::budget_full : no);
        }
        r.value = std::move(value);
        return r;
    }

    std::vector<Sample> dataset_;
    std::uint64_t step_ = 0;

private:
    std::size_t max_size_;
};

class RecordAllStrategy final : public CollectionStrategy {
public:
    using CollectionStrategy::CollectionStrategy;
    StrategyKind kind() const noexcept override { return StrategyKind::record_all; }

    DecisionRecord offer(const Sample& x) override {
        ValueScore v;
        v.total = 1.0;
        return settle(x, true, std::move(v), 1.0, reason::record, reason::record);
    }
};

/// Keeps each sample independently with probability p. One uniform draw is
/// consumed per offered sample, even once the budget is full.
class RandomStrategy final : public CollectionStrategy {
public:
    RandomStrategy(std::size_t max_dataset_size, double p, std::uint64_t seed)
        : CollectionStrategy(max_dataset_size), p_(p),
          rng_(derive_seed(seed, SeedSalt::random_strategy)) {
        if (!(p >= 0.0 && p <= 1.0))
            throw error(errc::config_error, "random strategy probability must lie in [0, 1]");
    }
    StrategyKind kind() const noexcept override { return StrategyKind::random_p; }

    DecisionRecord offer(const Sample& x) override {
        const double u = uniform01(rng_);
        ValueScore v;
        v.total = u;
        return settle(x, u < p_, std::move(v), p_, reason::sampled, reason::not_sampled);
    }

private:
    double p_;
    Rng rng_;
};

/// Adapts a stateless or history-only trigger (rule, semantic, error).
template <typename Trigger, StrategyKind Kind>
class TriggerStrategy final : public CollectionStrategy {
public:
    TriggerStrategy(std::size_t max_dataset_size, Trigger trigger)
        : CollectionStrategy(max_dataset_size), trigger_(std::move(trigger)) {}
    StrategyKind kind() const noexcept override { return Kind; }

    DecisionRecord offer(const Sample& x) override {
        bool fired;
        if constexpr (requires(Trigger& t) { t.evaluate(x); })
            fired = trigger_.evaluate(x);
        else
            fired = trigger_(x);
        ValueScore v;
        v.total = fired ? 1.0 : 0.0;
        return settle(x, fired, std::move(v), 0.5, reason::trigger_fired, reason::trigger_quiet);
    }

    const Trigger& trigger() const noexcept { return trigger_; }

private:
    Trigger trigger_;
};

using RuleStrategy = TriggerStrategy<RuleTrigger, StrategyKind::rule>;
using SemanticStrategy = TriggerStrategy<SemanticTrigger, StrategyKind::semantic>;
using ErrorStrategy = TriggerStrategy<ErrorTrigger, StrategyKind::error>;

/// Static-normality baseline. Warmup samples are retained (subject to the
/// budget) and become the frozen reference.
class FrozenNoveltyStrategy final : public CollectionStrategy {
public:
    FrozenNoveltyStrategy(std::size_t max_dataset_size, FrozenNoveltyTrigger trigger)
        : CollectionStrategy(max_dataset_size), trigger_(std::move(trigger)) {}
    StrategyKind kind() const noexcept override { return StrategyKind::frozen_novelty; }

    DecisionRecord offer(const Sample& x) override {
        const auto res = trigger_.evaluate(x);
        ValueScore v;
        v.novelty_gain = res.novelty;
        v.redundancy_penalty = 1.0 - res.novelty;
        v.total = res.novelty;
        v.comparisons = res.comparisons;
        if (res.outcome == FrozenNoveltyTrigger::Outcome::warmup)
            return settle(x, true, std::move(v), trigger_.threshold(), reason::warmup,
                          reason::warmup);
        return settle(x, res.outcome == FrozenNoveltyTrigger::Outcome::novel, std::move(v),
                      trigger_.threshold(), reason::trigger_fired, reason::trigger_quiet);
    }

    const FrozenNoveltyTrigger& trigger() const noexcept { return trigger_; }

private:
    FrozenNoveltyTrigger trigger_;
};

class ClosedLoopStrategy final : public CollectionStrategy {
public:
    ClosedLoopStrategy(TargetState target, ControllerParams params)
        : CollectionStrategy(target.max_dataset_size), engine_(std::move(target), params) {}
    StrategyKind kind() const noexcept override { return StrategyKind::closed_loop; }

    DecisionRecord offer(const Sample& x) override {
        auto rec = engine_.step(x);
        if (rec.decision == Decision::retain)
            dataset_.push_back(x);
        return rec;
    }

    const ClosedLoopEngine& engine() const noexcept { return engine_; }

private:
    ClosedLoopEngine engine_;
};

struct StrategyRun {
    std::vector<Sample> dataset;
    std::vector<DecisionRecord> log;
};

using DecisionObserver = std::function<void(const DecisionRecord&)>;

/// Feeds the stream in order. The observer (if any) sees each record as it
/// is produced, so a caller can persist a partial log if a step throws.
inline StrategyRun run_strategy(CollectionStrategy& strategy, std::span<const Sample> stream,
                                const DecisionObserver& observer = {}) {
    StrategyRun run;
    run.log.reserve(stream.size());
    for (const auto& x : stream) {
        run.log.push_back(strategy.offer(x));
        if (observer)
            observer(run.log.back());
    }
    run.dataset = strategy.dataset();
    return run;
}

} // namespace fastdata
