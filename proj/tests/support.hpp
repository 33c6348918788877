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

#include <fastdata/fastdata.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <iterator>
#include <string>
#include <vector>

#include <unistd.h>

namespace fastdata::fixtures {

inline Sample make_sample(std::uint64_t id, std::vector<double> f, ClassId label = 0,
                          TagSet tags = {"relevant"}) {
    Sample s;
    s.id = id;
    s.timestamp = id;
    s.features = FeatureVector(std::move(f));
    s.tags = std::move(tags);
    s.label = label;
    return s;
}

inline TargetState make_target(std::size_t classes, std::size_t n_max, double rate,
                               std::size_t sketch, ObjectiveWeights w = {}) {
    TargetState t;
    t.class_distribution = TargetState::uniform_distribution(classes);
    t.relevance = TagPredicate::tag("relevant");
    t.max_dataset_size = n_max;
    t.target_accept_rate = rate;
    t.sketch_capacity = sketch;
    t.weights = w;
    return t;
}

// Cyclic Jacobi rotations on a dense symmetric matrix; slow and simple.
inline std::vector<double> jacobi_eigenvalues(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                off += a[i][j] * a[i][j];
        if (off < 1e-30)
            break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300)
                    continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i)
        ev[i] = a[i][i];
    return ev;
}

// Full n x n cosine kernel, decomposed directly.
inline double brute_force_vendi(const std::vector<FeatureVector>& data) {
    const std::size_t n = data.size();
    std::vector<std::vector<double>> k(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            k[i][j] = i == j ? 1.0 : cosine_similarity(data[i], data[j]);
    for (auto& row : k)
        for (double& v : row)
            v /= static_cast<double>(n);
    double h = 0.0;
    for (double l : jacobi_eigenvalues(std::move(k))) {
        l = std::clamp(l, 0.0, 1.0);
        if (l > 0.0)
            h -= l * std::log(l);
    }
    return std::exp(h);
}

inline std::vector<FeatureVector> random_vectors(std::mt19937_64& rng, std::size_t n,
                                                 std::size_t d) {
    std::normal_distribution<double> nd;
    std::vector<FeatureVector> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> v(d);
        for (double& x : v)
            x = nd(rng);
        out.emplace_back(std::move(v));
    }
    return out;
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::uint64_t counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("fastdata-" + tag + "-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    auto is = open_input(p);
    return std::string(std::istreambuf_iterator<char>(is), {});
}

} // namespace fastdata::fixtures
