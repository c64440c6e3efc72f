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

#include <streamql/value.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace streamql {

std::string_view dataTypeName(DataType type) {
    switch (type) {
        case DataType::Int64: return "INT64";
        case DataType::Float64: return "FLOAT64";
        case DataType::String: return "STRING";
        case DataType::Bool: return "BOOL";
    }
    return "?";
}

std::optional<DataType> parseDataType(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "int64") return DataType::Int64;
    if (lower == "float64") return DataType::Float64;
    if (lower == "string") return DataType::String;
    if (lower == "bool") return DataType::Bool;
    return std::nullopt;
}

bool isNumeric(DataType type) { return type == DataType::Int64 || type == DataType::Float64; }

double asDouble(const Value& v) {
    if (const auto* i = std::get_if<int64_t>(&v)) return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(&v)) return *d;
    return std::nan("");
}

Json valueToJson(const Value& v) {
    return std::visit(
        [](const auto& x) -> Json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return nullptr;
            } else {
                return x;
            }
        },
        v);
}

std::optional<Value> valueFromJson(const Json& j, DataType type) {
    if (j.is_null()) return Value{};
    switch (type) {
        case DataType::Int64:
            if (j.is_number_integer()) return Value{j.get<int64_t>()};
            return std::nullopt;
        case DataType::Float64:
            if (j.is_number()) return Value{j.get<double>()};
            return std::nullopt;
        case DataType::String:
            if (j.is_string()) return Value{j.get<std::string>()};
            return std::nullopt;
        case DataType::Bool:
            if (j.is_boolean()) return Value{j.get<bool>()};
            return std::nullopt;
    }
    return std::nullopt;
}

Value valueFromJsonUntyped(const Json& j) {
    if (j.is_null()) return Value{};
    if (j.is_boolean()) return Value{j.get<bool>()};
    if (j.is_number_integer()) return Value{j.get<int64_t>()};
    if (j.is_number_float()) return Value{j.get<double>()};
    if (j.is_string()) return Value{j.get<std::string>()};
    return Value{};
}

Json rowToJson(const Row& row) {
    Json out = Json::array();
    for (const auto& v : row) out.push_back(valueToJson(v));
    return out;
}

Row rowFromJson(const Json& j) {
    Row row;
    row.reserve(j.size());
    for (const auto& v : j) row.push_back(valueFromJsonUntyped(v));
    return row;
}

std::string keyText(const Value& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return {};
            } else if constexpr (std::is_same_v<T, std::string>) {
                return x;
            } else if constexpr (std::is_same_v<T, bool>) {
                return x ? "true" : "false";
            } else if constexpr (std::is_same_v<T, double>) {
                return formatDouble(x);
            } else {
                return std::to_string(x);
            }
        },
        v);
}

std::string formatDouble(double d) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), d);
    std::string out(buf, end);
    if (out.find_first_of(".eEn") == std::string::npos) {
        out += ".0";
    }
    return out;
}

bool rowLess(const Row& a, const Row& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}// namespace streamql
