#pragma once

// Internal helpers shared by the JSON readers.

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "gridminer/errors.hpp"

namespace gridminer::detail {

template <class Json = nlohmann::json>
Json parse_json(std::string_view text, const std::string& source) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        auto upto = std::min<std::size_t>(e.byte, text.size());
        auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
        throw ParseError(source + ": line " + std::to_string(line), "malformed JSON");
    }
}

template <class Json>
const Json& require(const Json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) throw ParseError(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(path + "." + key, "missing field");
    return *it;
}

template <class Json>
std::uint64_t as_uint(const Json& value, const std::string& path) {
    if (!value.is_number_unsigned() && !(value.is_number_integer() && value.template get<std::int64_t>() >= 0))
        throw ParseError(path, "expected a non-negative integer");
    return value.template get<std::uint64_t>();
}

template <class Json>
std::string as_string(const Json& value, const std::string& path) {
    if (!value.is_string()) throw ParseError(path, "expected a string");
    return value.template get<std::string>();
}

}  // namespace gridminer::detail
