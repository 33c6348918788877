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

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

namespace fastdata {

/// Declarative boolean predicate over a sample's tag set.
///
/// JSON form (also used in experiment configs):
///   true                       always satisfied
///   "night"                    tag present
///   {"all": [p, ...]}          conjunction
///   {"any": [p, ...]}          disjunction
///   {"not": p}                 negation
class TagPredicate {
public:
    enum class Kind { always, has_tag, all_of, any_of, negate };

    TagPredicate() = default;

    static TagPredicate always() { return {}; }

    static TagPredicate tag(std::string name) {
        TagPredicate p;
        p.kind_ = Kind::has_tag;
        p.tag_ = std::move(name);
        return p;
    }

    static TagPredicate all_of(std::vector<TagPredicate> terms) {
        return compound(Kind::all_of, std::move(terms));
    }

    static TagPredicate any_of(std::vector<TagPredicate> terms) {
        return compound(Kind::any_of, std::move(terms));
    }

    static TagPredicate negate(TagPredicate inner) {
        return compound(Kind::negate, {std::move(inner)});
    }

    Kind kind() const noexcept { return kind_; }

    bool operator()(const TagSet& tags) const {
        switch (kind_) {
        case Kind::always: return true;
        case Kind::has_tag: return tags.contains(tag_);
        case Kind::all_of:
            return std::all_of(terms_.begin(), terms_.end(),
                               [&](const TagPredicate& t) { return t(tags); });
        case Kind::any_of:
            return std::any_of(terms_.begin(), terms_.end(),
                               [&](const TagPredicate& t) { return t(tags); });
        case Kind::negate: return !terms_.front()(tags);
        }
        return false;
    }

    nlohmann::json to_json() const {
        switch (kind_) {
        case Kind::always: return true;
        case Kind::has_tag: return tag_;
        case Kind::all_of:
        case Kind::any_of: {
            auto arr = nlohmann::json::array();
            for (const auto& t : terms_)
                arr.push_back(t.to_json());
            return {{kind_ == Kind::all_of ? "all" : "any", std::move(arr)}};
        }
        case Kind::negate: return {{"not", terms_.front().to_json()}};
        }
        return true;
    }

    /// `path` is a JSON pointer used in diagnostics.
    static TagPredicate from_json(const nlohmann::json& j, const std::string& path = "") {
        auto fail = [&](const std::string& what) {
            return error(errc::config_error, (path.empty() ? "/" : path) + ": " + what);
        };
        if (j.is_boolean()) {
            if (!j.get<bool>())
                throw fail("predicate 'false' is not supported; use {\"not\": true}");
            return always();
        }
        if (j.is_string()) {
            auto name = j.get<std::string>();
            if (name.empty())
                throw fail("empty tag name");
            return tag(std::move(name));
        }
        if (!j.is_object() || j.size() != 1)
            throw fail("expected true, a tag string, or an object with one of all/any/not");
        const auto& [key, value] = *j.items().begin();
        const std::string sub = path + "/" + key;
        if (key == "not")
            return negate(from_json(value, sub));
        if (key != "all" && key != "any")
            throw fail("unknown predicate operator '" + key + "'");
        if (!value.is_array() || value.empty())
            throw fail("'" + key + "' needs a nonempty array");
        std::vector<TagPredicate> terms;
        for (std::size_t i = 0; i < value.size(); ++i)
            terms.push_back(from_json(value[i], sub + "/" + std::to_string(i)));
        return key == "all" ? all_of(std::move(terms)) : any_of(std::move(terms));
    }

    friend bool operator==(const TagPredicate&, const TagPredicate&) = default;

private:
    static TagPredicate compound(Kind kind, std::vector<TagPredicate> terms) {
        TagPredicate p;
        p.kind_ = kind;
        p.terms_ = std::move(terms);
        return p;
    }

    Kind kind_ = Kind::always;
    std::string tag_;
    std::vector<TagPredicate> terms_;
};

} // namespace fastdata
