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

using namespace fastdata;
using fixtures::make_sample;

TEST(RuleTrigger, Comparators) {
    const auto x = make_sample(0, {0.5, -1.0});
    EXPECT_TRUE(RuleTrigger(0, Comparator::greater, 0.4, 2)(x));
    EXPECT_FALSE(RuleTrigger(0, Comparator::greater, 0.5, 2)(x));
    EXPECT_TRUE(RuleTrigger(0, Comparator::greater_equal, 0.5, 2)(x));
    EXPECT_TRUE(RuleTrigger(1, Comparator::less, 0.0, 2)(x));
    EXPECT_TRUE(RuleTrigger(1, Comparator::less_equal, -1.0, 2)(x));
    EXPECT_FALSE(RuleTrigger(1, Comparator::less, -1.0, 2)(x));
}

TEST(RuleTrigger, IndexOutOfRange) {
    try {
        RuleTrigger(2, Comparator::greater, 0.0, 2);
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::config_error);
    }
}

TEST(RuleTrigger, ComparatorNames) {
    for (auto c : {Comparator::greater, Comparator::less, Comparator::greater_equal,
                   Comparator::less_equal})
        EXPECT_EQ(parse_comparator(to_string(c)), c);
    EXPECT_FALSE(parse_comparator("=="));
}

TEST(SemanticTrigger, AllAndAny) {
    const SemanticTrigger all({"night", "rain"}, TagMatch::all);
    const SemanticTrigger any({"night", "rain"}, TagMatch::any);
    const auto both = make_sample(0, {0.0}, 0, {"night", "rain"});
    const auto one = make_sample(1, {0.0}, 0, {"night"});
    const auto none = make_sample(2, {0.0}, 0, {"day"});
    EXPECT_TRUE(all(both));
    EXPECT_FALSE(all(one));
    EXPECT_TRUE(any(one));
    EXPECT_FALSE(any(none));
    EXPECT_THROW(SemanticTrigger({}, TagMatch::any), error);
}

TEST(ErrorTrigger, SilentUntilWindowFull) {
    ErrorTrigger t(3, 0.5, 0, 1);
    EXPECT_FALSE(t.evaluate(make_sample(0, {0.0})));
    EXPECT_FALSE(t.evaluate(make_sample(1, {10.0})));
    EXPECT_FALSE(t.evaluate(make_sample(2, {0.0})));
    // window {0, 10, 0}: mean 10/3
    EXPECT_NEAR(*t.expected(), 10.0 / 3.0, 1e-15);
    EXPECT_TRUE(t.evaluate(make_sample(3, {0.0})));
    // window {10, 0, 0}
    EXPECT_FALSE(t.evaluate(make_sample(4, {3.4})));
}

TEST(ErrorTrigger, ResidualAtEpsilonDoesNotFire) {
    ErrorTrigger t(2, 0.5, 0, 1);
    t.evaluate(make_sample(0, {1.0}));
    t.evaluate(make_sample(1, {1.0}));
    EXPECT_FALSE(t.evaluate(make_sample(2, {1.5})));
    EXPECT_TRUE(t.evaluate(make_sample(3, {2.0})));
}

TEST(ErrorTrigger, Validation) {
    EXPECT_THROW(ErrorTrigger(1, 0.5, 0, 1), error);
    EXPECT_THROW(ErrorTrigger(2, 0.0, 0, 1), error);
    EXPECT_THROW(ErrorTrigger(2, 0.5, 1, 1), error);
}

TEST(FrozenNovelty, ReferenceNeverChangesAfterWarmup) {
    FrozenNoveltyTrigger t(2, 0.5);
    EXPECT_TRUE(t.warming_up());
    EXPECT_EQ(t.evaluate(make_sample(0, {1.0, 0.0})).outcome, FrozenNoveltyTrigger::Outcome::warmup);
    EXPECT_EQ(t.evaluate(make_sample(1, {2.0, 0.0})).outcome, FrozenNoveltyTrigger::Outcome::warmup);
    EXPECT_FALSE(t.warming_up());
    const auto novel = t.evaluate(make_sample(2, {0.0, 1.0}));
    EXPECT_EQ(novel.outcome, FrozenNoveltyTrigger::Outcome::novel);
    EXPECT_EQ(novel.comparisons, 2u);
    // the novel sample did not join the reference
    EXPECT_EQ(t.evaluate(make_sample(3, {0.0, 1.0})).outcome, FrozenNoveltyTrigger::Outcome::novel);
    EXPECT_EQ(t.reference().size(), 2u);
}

TEST(FrozenNovelty, FortyFiveDegreeNovelty) {
    FrozenNoveltyTrigger t(1, 0.25);
    t.evaluate(make_sample(0, {1.0, 0.0}));
    const auto r = t.evaluate(make_sample(1, {1.0, 1.0}));
    EXPECT_NEAR(r.novelty, 0.2928932188134524, 1e-15);
    EXPECT_EQ(r.outcome, FrozenNoveltyTrigger::Outcome::novel);
}

TEST(FrozenNovelty, RepeatedVectorRetainsAtMostWarmup) {
    FrozenNoveltyStrategy s(1000, FrozenNoveltyTrigger(5, 0.1));
    for (std::uint64_t i = 0; i < 1000; ++i)
        s.offer(make_sample(i, {0.3, 0.4, 0.5}));
    EXPECT_EQ(s.dataset().size(), 5u);
}

TEST(FrozenNovelty, Validation) {
    EXPECT_THROW(FrozenNoveltyTrigger(0, 0.5), error);
    EXPECT_THROW(FrozenNoveltyTrigger(3, 0.0), error);
    EXPECT_THROW(FrozenNoveltyTrigger(3, 1.0), error);
}
