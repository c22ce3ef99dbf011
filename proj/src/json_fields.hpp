#pragma once

// Typed field access for the JSON documents. Every failure is a ParseError naming the path.

#include "cyberirl/error.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cyberirl::detail {

inline void require_object(const nlohmann::json& j, const std::string& where)
{
    if (!j.is_object()) throw ParseError(where + ": expected an object");
}

inline void require_array(const nlohmann::json& j, const std::string& where)
{
    if (!j.is_array()) throw ParseError(where + ": expected an array");
}

inline const nlohmann::json& field(const nlohmann::json& j, const char* key, const std::string& where)
{
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(where + "." + key + ": missing field");
    return *it;
}

inline std::string get_string(const nlohmann::json& j, const char* key, const std::string& where)
{
    const auto& v = field(j, key, where);
    if (!v.is_string()) throw ParseError(where + "." + key + ": expected a string");
    return v.get<std::string>();
}

inline std::string get_string(const nlohmann::json& j, const char* key, const std::string& where,
                              const std::string& fallback)
{
    return j.contains(key) ? get_string(j, key, where) : fallback;
}

inline bool get_bool(const nlohmann::json& j, const char* key, const std::string& where, bool fallback)
{
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_boolean()) throw ParseError(where + "." + key + ": expected a boolean");
    return it->get<bool>();
}

inline bool get_bool(const nlohmann::json& j, const char* key, const std::string& where)
{
    const auto& v = field(j, key, where);
    if (!v.is_boolean()) throw ParseError(where + "." + key + ": expected a boolean");
    return v.get<bool>();
}

inline double get_double(const nlohmann::json& j, const char* key, const std::string& where)
{
    const auto& v = field(j, key, where);
    if (!v.is_number()) throw ParseError(where + "." + key + ": expected a number");
    return v.get<double>();
}

inline double get_double(const nlohmann::json& j, const char* key, const std::string& where,
                         double fallback)
{
    return j.contains(key) ? get_double(j, key, where) : fallback;
}

inline std::int64_t get_int(const nlohmann::json& j, const char* key, const std::string& where)
{
    const auto& v = field(j, key, where);
    if (!v.is_number_integer()) throw ParseError(where + "." + key + ": expected an integer");
    return v.get<std::int64_t>();
}

inline std::uint64_t get_uint(const nlohmann::json& j, const char* key, const std::string& where)
{
    const auto& v = field(j, key, where);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        throw ParseError(where + "." + key + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
}

inline std::vector<std::string> get_string_list(const nlohmann::json& j, const char* key,
                                                const std::string& where)
{
    std::vector<std::string> out;
    auto it = j.find(key);
    if (it == j.end()) return out;
    require_array(*it, where + "." + key);
    for (std::size_t i = 0; i < it->size(); ++i) {
        if (!(*it)[i].is_string())
            throw ParseError(where + "." + key + "[" + std::to_string(i) + "]: expected a string");
        out.push_back((*it)[i].get<std::string>());
    }
    return out;
}

inline std::vector<double> get_double_list(const nlohmann::json& j, const char* key,
                                            const std::string& where)
{
    const auto& v = field(j, key, where);
    require_array(v, where + "." + key);
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number())
            throw ParseError(where + "." + key + "[" + std::to_string(i) + "]: expected a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

}  // namespace cyberirl::detail
