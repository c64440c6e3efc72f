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

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace streamql {

using Json = nlohmann::ordered_json;

enum class DataType { Int64, Float64, String, Bool };

std::string_view dataTypeName(DataType type);
/// Accepts int64/float64/string/bool in any case.
std::optional<DataType> parseDataType(std::string_view text);
bool isNumeric(DataType type);

/// SQL value. std::monostate is NULL.
using Value = std::variant<std::monostate, int64_t, double, std::string, bool>;
using Row = std::vector<Value>;

inline bool isNull(const Value& v) { return std::holds_alternative<std::monostate>(v); }

/// Numeric view of an INT64 or FLOAT64 value.
double asDouble(const Value& v);

Json valueToJson(const Value& v);
/// Converts a JSON scalar, checking it against the declared column type. Returns nullopt on mismatch.
std::optional<Value> valueFromJson(const Json& j, DataType type);
/// Type-preserving decode used by checkpoints (integers stay INT64, reals stay FLOAT64).
Value valueFromJsonUntyped(const Json& j);

Json rowToJson(const Row& row);
Row rowFromJson(const Json& j);

/// Text used for partition routing: strings verbatim, numbers in decimal, bools as true/false.
std::string keyText(const Value& v);

/// Renders a double so that it re-lexes as a decimal literal.
std::string formatDouble(double d);

/// Total order over rows used for deterministic output ordering (NULL sorts first).
bool rowLess(const Row& a, const Row& b);

inline constexpr int64_t kMinTimestamp = std::numeric_limits<int64_t>::min();
inline constexpr int64_t kMaxTimestamp = std::numeric_limits<int64_t>::max();

}// namespace streamql
