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

#include <limits>

using namespace fastdata;

TEST(FeatureVector, NormalizeThreeFourFive) {
    const auto z = normalize(FeatureVector{3.0, 4.0});
    EXPECT_DOUBLE_EQ(z[0], 0.6);
    EXPECT_DOUBLE_EQ(z[1], 0.8);
}

TEST(FeatureVector, NormalizeZeroIsZero) {
    const FeatureVector zero{0.0, 0.0};
    EXPECT_EQ(normalize(zero), zero);
}

TEST(FeatureVector, NormalizeDiagonal) {
    const auto z = normalize(FeatureVector{1.0, 1.0});
    EXPECT_NEAR(z[0], 0.7071067811865475, 1e-15);
    EXPECT_NEAR(z[1], 0.7071067811865475, 1e-15);
}

TEST(FeatureVector, NormalizeRejectsNonFinite) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    for (double bad : {nan, inf, -inf}) {
        try {
            normalize(FeatureVector{1.0, bad});
            FAIL() << "accepted " << bad;
        } catch (const error& e) {
            EXPECT_EQ(e.code(), errc::invalid_feature);
        }
    }
    EXPECT_THROW(normalize(FeatureVector{}), error);
}

TEST(FeatureVector, NormalizeHugeEntriesOverflowIsReported) {
    const double big = std::numeric_limits<double>::max();
    try {
        normalize(FeatureVector{big, big});
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::invalid_feature);
    }
}

TEST(Cosine, Identical) { EXPECT_EQ(cosine_similarity({1.0, 0.0}, {1.0, 0.0}), 1.0); }

TEST(Cosine, Orthogonal) { EXPECT_EQ(cosine_similarity({1.0, 0.0}, {0.0, 1.0}), 0.0); }

TEST(Cosine, FortyFiveDegrees) {
    EXPECT_NEAR(cosine_similarity({1.0, 1.0}, {1.0, 0.0}), 0.7071067811865476, 1e-15);
}

TEST(Cosine, ZeroVectorIsZero) {
    EXPECT_EQ(cosine_similarity({0.0, 0.0}, {1.0, 2.0}), 0.0);
    EXPECT_EQ(cosine_similarity({0.0, 0.0}, {0.0, 0.0}), 0.0);
}

TEST(Cosine, Opposite) { EXPECT_EQ(cosine_similarity({2.0, 0.0}, {-3.0, 0.0}), -1.0); }

TEST(Cosine, DimensionMismatch) {
    try {
        cosine_similarity({1.0, 0.0}, {1.0, 0.0, 0.0});
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::dimension_mismatch);
    }
    EXPECT_THROW(dot({1.0}, {1.0, 2.0}), error);
}

TEST(Cosine, ClampedToUnitInterval) {
    // nearly parallel vectors whose naive ratio can round past 1
    const FeatureVector a{0.1, 0.2, 0.3};
    const FeatureVector b{0.1 * 3.0, 0.2 * 3.0, 0.3 * 3.0};
    const double c = cosine_similarity(a, b);
    EXPECT_LE(c, 1.0);
    EXPECT_NEAR(c, 1.0, 1e-12);
}

TEST(Error, MessageKeepsCodeSeparate) {
    const error e(errc::config_error, "bad field");
    EXPECT_EQ(e.code(), errc::config_error);
    EXPECT_EQ(e.message(), "bad field");
    EXPECT_STREQ(e.what(), "ConfigError: bad field");
}

TEST(TargetStateValidation, AcceptsUniform) {
    auto t = fixtures::make_target(4, 10, 0.1, 8);
    EXPECT_NO_THROW(validate(t));
    EXPECT_DOUBLE_EQ(t.weights.max_score(), 3.0);
}

TEST(TargetStateValidation, RejectsBadFields) {
    auto base = fixtures::make_target(3, 10, 0.1, 8);
    auto expect_config_error = [](const TargetState& t) {
        try {
            validate(t);
            FAIL();
        } catch (const error& e) {
            EXPECT_EQ(e.code(), errc::config_error);
        }
    };
    auto t = base;
    t.class_distribution = {1.0};
    expect_config_error(t);
    t = base;
    t.class_distribution = {0.5, 0.4, 0.05};
    expect_config_error(t);
    t = base;
    t.class_distribution = {1.2, -0.2, 0.0};
    expect_config_error(t);
    t = base;
    t.max_dataset_size = 0;
    expect_config_error(t);
    t = base;
    t.target_accept_rate = 0.0;
    expect_config_error(t);
    t = base;
    t.target_accept_rate = 1.5;
    expect_config_error(t);
    t = base;
    t.sketch_capacity = 0;
    expect_config_error(t);
    t = base;
    t.weights = {0, 0, 0, 0};
    expect_config_error(t);
    t = base;
    t.weights.novelty = -1.0;
    expect_config_error(t);
}

TEST(StateValidation, DetectsEveryInconsistency) {
    const auto target = fixtures::make_target(2, 5, 0.5, 2);
    auto good = DatasetStateEstimate::initial(2, 0.0);
    EXPECT_NO_THROW(validate(good, target));
    auto expect_corrupt = [&](const DatasetStateEstimate& s) {
        try {
            validate(s, target);
            FAIL();
        } catch (const error& e) {
            EXPECT_EQ(e.code(), errc::state_corruption);
        }
    };
    auto s = good;
    s.class_counts = {0, 0, 0};
    expect_corrupt(s);
    s = good;
    s.class_counts = {1, 0};
    expect_corrupt(s);
    s = good;
    s.sketch.assign(3, SketchEntry{FeatureVector{1.0, 0.0}, 0});
    expect_corrupt(s);
    s = good;
    s.class_counts = {1, 0};
    s.retained_count = 1;
    s.offered_count = 0;
    expect_corrupt(s);
    s = good;
    s.accept_rate_ema = 1.5;
    expect_corrupt(s);
}
