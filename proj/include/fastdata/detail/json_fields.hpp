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

#include <json.hpp>

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>

// Typed field access on JSON config objects with JSON-pointer diagnostics.

namespace fastdata {
namespace detail {

class JsonFieldReader {
public:
    JsonFieldReader(const nlohmann::json& obj, std::string path)
        : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object())
            throw fail("", "expected an object");
    }

    error fail(const std::string& key, const std::string& what) const {
        return error(errc::config_error,
                     (key.empty() ? (path_.empty() ? std::string("/") : path_) : path_ + "/" + key) +
                         ": " + what);
    }

    bool has(const std::string& key) const { return obj_.contains(key); }
    const nlohmann::json& raw(const std::string& key) const { return obj_.at(key); }
    std::string child(const std::string& key) const { return path_ + "/" + key; }

    template <typename T>
    T get(const std::string& key, std::optional<T> fallback = std::nullopt) const {
        if (!obj_.contains(key)) {
            if (fallback)
                return *fallback;
            throw fail(key, "missing required field");
        }
        return convert<T>(obj_.at(key), key);
    }

    template <typename T>
    T convert(const nlohmann::json& v, const std::string& key) const {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean())
                throw fail(key, "expected a boolean");
            return v.get<bool>();
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                           v.get<std::int64_t>() < 0))
                throw fail(key, "expected a nonnegative integer");
            const auto u = v.get<std::uint64_t>();
            if (u > static_cast<std::uint64_t>(std::numeric_limits<T>::max()))
                throw fail(key, "integer out of range");
            return static_cast<T>(u);
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number())
                throw fail(key, "expected a number");
            return v.get<T>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string())
                throw fail(key, "expected a string");
            return v.get<std::string>();
        } else {
            static_assert(sizeof(T) == 0, "unsupported field type");
        }
    }

    void reject_unknown(std::initializer_list<std::string_view> known) const {
        for (const auto& [k, _] : obj_.items()) {
            bool ok = false;
            for (auto name : known)
                ok = ok || k == name;
            if (!ok)
                throw fail(k, "unknown field");
        }
    }

private:
    const nlohmann::json& obj_;
    std::string path_;
};

inline TagSet tag_set_from_json(const nlohmann::json& j, const std::string& path) {
    if (!j.is_array())
        throw error(errc::config_error, path + ": expected an array of tag strings");
    TagSet out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_string() || j[i].get<std::string>().empty())
            throw error(errc::config_error,
                        path + "/" + std::to_string(i) + ": expected a nonempty tag string");
        out.insert(j[i].get<std::string>());
    }
    return out;
}

} // namespace detail

} // namespace fastdata
