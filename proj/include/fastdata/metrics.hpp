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
#include <fastdata/random.hpp>
#include <fastdata/state.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fastdata {

enum class QualityCharacteristic { relevance, balance, diversity, similarity };

inline constexpr std::array<QualityCharacteristic, 4> quality_characteristics{
    QualityCharacteristic::relevance, QualityCharacteristic::balance,
    QualityCharacteristic::diversity, QualityCharacteristic::similarity};

namespace detail {

inline std::size_t common_dimension(std::span<const FeatureVector> data) {
    const std::size_t d = data.front().size();
    for (const auto& v : data) {
        if (v.size() != d)
            throw error(errc::dimension_mismatch, "dataset mixes dimensions " +
                                                      std::to_string(d) + " and " +
                                                      std::to_string(v.size()));
        if (!v.all_finite())
            throw error(errc::invalid_feature, "non-finite feature entry in dataset");
    }
    return d;
}

// Shannon entropy (nats) of a spectrum that sums to one.
inline double spectrum_entropy(std::span<const double> eigenvalues) {
    double h = 0.0;
    for (double lambda : eigenvalues) {
        lambda = std::clamp(lambda, 0.0, 1.0);
        if (lambda > 0.0)
            h -= lambda * std::log(lambda);
    }
    return h;
}

} // namespace detail

/// Vendi score: exp of the entropy of the eigenvalues of K/n, where K is the
/// cosine-similarity kernel with unit diagonal. Returns 0 for an empty set.
///
/// The nonzero spectrum of X X^T equals that of X^T X, so when n exceeds the
/// dimension the d x d Gram matrix of the normalized nonzero rows is
/// decomposed instead; each all-zero row contributes an isolated eigenvalue 1.
inline double vendi_score(std::span<const FeatureVector> data) {
    if (data.empty())
        return 0.0;
    const std::size_t n = data.size();
    const std::size_t d = detail::common_dimension(data);

    std::vector<FeatureVector> unit;
    unit.reserve(n);
    std::size_t zero_rows = 0;
    for (const auto& v : data) {
        if (v.is_zero())
            ++zero_rows;
        else
            unit.push_back(normalize(v));
    }
    const auto m = static_cast<Eigen::Index>(unit.size());

    std::vector<double> spectrum(zero_rows, 1.0);
    if (m > 0) {
        Eigen::MatrixXd x(m, static_cast<Eigen::Index>(d));
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(d); ++j)
                x(i, j) = unit[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        Eigen::MatrixXd kernel;
        if (static_cast<std::size_t>(m) > d) {
            kernel = x.transpose() * x;
        } else {
            kernel = x * x.transpose();
            kernel.diagonal().setOnes();
        }
        if (!kernel.allFinite())
            throw error(errc::invalid_feature, "non-finite similarity kernel entry");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(kernel, Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success)
            throw error(errc::invalid_feature, "eigendecomposition did not converge");
        const auto& ev = solver.eigenvalues();
        spectrum.insert(spectrum.end(), ev.data(), ev.data() + ev.size());
    }
    for (double& lambda : spectrum)
        lambda /= static_cast<double>(n);
    return std::exp(detail::spectrum_entropy(spectrum));
}

/// Normalized Shannon entropy H(p) / log C of a class histogram.
inline double balance_entropy(std::span<const std::uint64_t> counts) {
    if (counts.size() < 2)
        throw error(errc::insufficient_data, "balance needs at least 2 classes");
    const auto total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    if (total == 0)
        throw error(errc::empty_dataset, "balance of an empty histogram");
    const double n = static_cast<double>(total);
    double h = 0.0;
    for (auto c : counts) {
        if (c == 0)
            continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log(p);
    }
    return h / std::log(static_cast<double>(counts.size()));
}

/// Mean over points of the largest nonnegative cosine similarity to any
/// other point.
inline double mean_max_similarity(std::span<const FeatureVector> data) {
    if (data.size() < 2)
        throw error(errc::insufficient_data, "mean max similarity needs at least 2 points");
    detail::common_dimension(data);
    const std::size_t n = data.size();
    std::vector<double> best(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double s = std::max(0.0, cosine_similarity(data[i], data[j]));
            best[i] = std::max(best[i], s);
            best[j] = std::max(best[j], s);
        }
    double sum = 0.0;
    for (double b : best)
        sum += b;
    return sum / static_cast<double>(n);
}

inline double relevance_fraction(std::span<const Sample> data, const TagPredicate& relevant) {
    if (data.empty())
        throw error(errc::empty_dataset, "relevance of an empty dataset");
    const auto hits = std::count_if(data.begin(), data.end(),
                                    [&](const Sample& s) { return relevant(s.tags); });
    return static_cast<double>(hits) / static_cast<double>(data.size());
}

struct Provenance {
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string strategy;
    std::string stream_hash;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Q(D, P) for each characteristic. A metric that is undefined for the
/// dataset (too few samples) is left empty rather than failing the run.
struct QualityReport {
    std::size_t dataset_size = 0;
    std::optional<double> vendi_score;
    std::size_t vendi_sample_size = 0;
    std::optional<double> balance_entropy;
    std::optional<double> mean_max_similarity;
    std::optional<double> relevance_fraction;
    std::vector<std::uint64_t> class_counts;
    Provenance provenance;

    friend bool operator==(const QualityReport&, const QualityReport&) = default;
};

// Largest set handed to the dense eigensolver; bigger datasets are
// subsampled (seeded) for the diversity metric only.
inline constexpr std::size_t max_exact_vendi_size = 2048;

inline QualityReport evaluate_dataset(std::span<const Sample> data, const TargetState& target,
                                      Provenance provenance) {
    QualityReport report;
    report.dataset_size = data.size();
    report.class_counts.assign(target.num_classes(), 0);
    for (const auto& s : data) {
        if (s.label >= report.class_counts.size())
            throw error(errc::config_error, "sample " + std::to_string(s.id) + " has class " +
                                                std::to_string(s.label) + " outside the target's " +
                                                std::to_string(report.class_counts.size()) +
                                                " classes");
        ++report.class_counts[s.label];
    }

    if (!data.empty()) {
        std::vector<FeatureVector> features;
        features.reserve(data.size());
        for (const auto& s : data)
            features.push_back(s.features);

        if (features.size() > max_exact_vendi_size) {
            Rng rng(derive_seed(provenance.seed, SeedSalt::metric_subsample));
            std::vector<std::size_t> idx(features.size());
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            std::vector<FeatureVector> subset;
            subset.reserve(max_exact_vendi_size);
            for (std::size_t i = 0; i < max_exact_vendi_size; ++i) {
                std::swap(idx[i], idx[i + uniform_index(rng, idx.size() - i)]);
                subset.push_back(features[idx[i]]);
            }
            report.vendi_score = vendi_score(subset);
            report.vendi_sample_size = subset.size();
        } else {
            report.vendi_score = vendi_score(features);
            report.vendi_sample_size = features.size();
        }
        report.balance_entropy = balance_entropy(report.class_counts);
        if (features.size() >= 2)
            report.mean_max_similarity = mean_max_similarity(features);
        report.relevance_fraction = relevance_fraction(data, target.relevance);
    }
    report.provenance = std::move(provenance);
    return report;
}

} // namespace fastdata
