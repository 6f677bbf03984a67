#pragma once

// Internal helpers for strict JSON parsing: unknown or missing keys and type
// mismatches become ConfigError with a dotted path pointing at the offender.

#include <charconv>
#include <initializer_list>
#include <string>
#include <system_error>

#include <json.hpp>

#include "collsim/errors.hpp"
#include "collsim/random.hpp"

namespace collsim::jsonutil {

using nlohmann::json;

// Shortest round-trip decimal form of a double.
inline std::string fmt_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw Error("number formatting failed");
    return std::string(buf, end);
}

[[noreturn]] inline void fail(const std::string& origin, const std::string& what) {
    throw ConfigError(origin + ": " + what);
}

inline const json& member(const json& obj, const std::string& key, const std::string& origin) {
    if (!obj.is_object()) fail(origin, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(origin, "missing key \"" + key + "\"");
    return *it;
}

inline void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                       const std::string& origin) {
    if (!obj.is_object()) fail(origin, "expected an object");
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) fail(origin, "unknown key \"" + item.key() + "\"");
    }
}

inline double get_number(const json& obj, const std::string& key, const std::string& origin) {
    const json& v = member(obj, key, origin);
    if (!v.is_number()) fail(origin, "\"" + key + "\" must be a number");
    return v.get<double>();
}

inline int get_int(const json& obj, const std::string& key, const std::string& origin) {
    const json& v = member(obj, key, origin);
    if (!v.is_number_integer()) fail(origin, "\"" + key + "\" must be an integer");
    return v.get<int>();
}

inline std::uint64_t get_u64(const json& obj, const std::string& key, const std::string& origin) {
    const json& v = member(obj, key, origin);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        fail(origin, "\"" + key + "\" must be a non-negative integer");
    return v.get<std::uint64_t>();
}

inline std::string get_string(const json& obj, const std::string& key, const std::string& origin) {
    const json& v = member(obj, key, origin);
    if (!v.is_string()) fail(origin, "\"" + key + "\" must be a string");
    return v.get<std::string>();
}

inline bool get_bool(const json& obj, const std::string& key, const std::string& origin) {
    const json& v = member(obj, key, origin);
    if (!v.is_boolean()) fail(origin, "\"" + key + "\" must be a boolean");
    return v.get<bool>();
}

inline TruncatedNormal get_tuple(const json& obj, const std::string& key,
                                 const std::string& origin) {
    const json& v = member(obj, key, origin);
    const std::string path = origin + "." + key;
    check_keys(v, {"mean", "stddev", "low", "high"}, path);
    TruncatedNormal t;
    t.mean = get_number(v, "mean", path);
    t.stddev = get_number(v, "stddev", path);
    t.low = get_number(v, "low", path);
    t.high = get_number(v, "high", path);
    return t;
}

inline json tuple_to_json(const TruncatedNormal& t) {
    return json{{"mean", t.mean}, {"stddev", t.stddev}, {"low", t.low}, {"high", t.high}};
}

} // namespace collsim::jsonutil
