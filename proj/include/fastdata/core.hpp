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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fastdata {

enum class errc {
    invalid_feature,
    dimension_mismatch,
    empty_dataset,
    insufficient_data,
    config_error,
    state_corruption,
    comparison_error,
    io_error,
};

constexpr std::string_view to_string(errc code) noexcept {
    switch (code) {
    case errc::invalid_feature: return "InvalidFeature";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::empty_dataset: return "EmptyDataset";
    case errc::insufficient_data: return "InsufficientData";
    case errc::config_error: return "ConfigError";
    case errc::state_corruption: return "StateCorruption";
    case errc::comparison_error: return "ComparisonError";
    case errc::io_error: return "IoError";
    }
    return "Unknown";
}

class error : public std::runtime_error {
public:
    error(errc code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code),
          message_(message) {}

    errc code() const noexcept { return code_; }
    /// Text without the code prefix, for wrapping with more context.
    const std::string& message() const noexcept { return message_; }

private:
    errc code_;
    std::string message_;
};

/// Dense real-valued embedding of one sample. Entries are expected to be
/// finite; operations that depend on it check and throw invalid_feature.
class FeatureVector {
public:
    FeatureVector() = default;
    explicit FeatureVector(std::vector<double> values) : values_(std::move(values)) {}
    FeatureVector(std::initializer_list<double> values) : values_(values) {}

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }

    bool all_finite() const noexcept {
        return std::all_of(values_.begin(), values_.end(),
                           [](double v) { return std::isfinite(v); });
    }

    // Sequential accumulation; the summation order is part of the
    // reproducibility contract for logged runs.
    double norm() const noexcept {
        double sum = 0.0;
        for (double v : values_)
            sum += v * v;
        return std::sqrt(sum);
    }

    bool is_zero() const noexcept {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
    }

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

private:
    std::vector<double> values_;
};

inline double dot(const FeatureVector& a, const FeatureVector& b) {
    if (a.size() != b.size())
        throw error(errc::dimension_mismatch, "dot of vectors with dimensions " +
                                                  std::to_string(a.size()) + " and " +
                                                  std::to_string(b.size()));
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        sum += a[i] * b[i];
    return sum;
}

/// Scales v to unit L2 norm. The all-zero vector is returned unchanged.
inline FeatureVector normalize(const FeatureVector& v) {
    if (v.empty())
        throw error(errc::invalid_feature, "cannot normalize an empty vector");
    if (!v.all_finite())
        throw error(errc::invalid_feature, "non-finite feature entry");
    const double n = v.norm();
    if (!std::isfinite(n))
        throw error(errc::invalid_feature, "feature norm overflows");
    if (n == 0.0)
        return v;
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = v[i] / n;
    return FeatureVector(std::move(out));
}

/// Cosine of the angle between a and b, clamped to [-1, 1]. A zero vector
/// has similarity 0 with everything.
inline double cosine_similarity(const FeatureVector& a, const FeatureVector& b) {
    if (a.size() != b.size())
        throw error(errc::dimension_mismatch, "cosine of vectors with dimensions " +
                                                  std::to_string(a.size()) + " and " +
                                                  std::to_string(b.size()));
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0)
        return 0.0;
    const double c = dot(a, b) / (na * nb);
    if (!std::isfinite(c))
        throw error(errc::invalid_feature, "non-finite cosine similarity");
    return std::clamp(c, -1.0, 1.0);
}

using ClassId = std::uint32_t;
using TagSet = std::set<std::string, std::less<>>;

/// One stream element x[k]. `label` is simulator ground truth; collection
/// strategies only read it where they are explicitly allowed to.
struct Sample {
    std::uint64_t id = 0;
    std::uint64_t timestamp = 0;
    FeatureVector features;
    TagSet tags;
    ClassId label = 0;

    friend bool operator==(const Sample&, const Sample&) = default;
};

} // namespace fastdata
