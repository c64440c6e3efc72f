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

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <streamql/value.hpp>

namespace streamql {

struct Column {
    std::string name;
    DataType type = DataType::Int64;
    friend bool operator==(const Column&, const Column&) = default;
};

struct Schema {
    std::vector<Column> columns;

    /// Case-insensitive lookup.
    std::optional<size_t> indexOf(std::string_view name) const;
    const Column* find(std::string_view name) const;
    size_t size() const { return columns.size(); }

    /// Parses "name:type,name:type,...". Throws InvalidSchema.
    static Schema parse(std::string_view spec);
    std::string str() const;

    friend bool operator==(const Schema&, const Schema&) = default;
};

struct StreamDef {
    std::string name;
    Schema schema;
    std::string timestampColumn;
    std::optional<std::string> partitionKeyColumn;
    int partitionCount = 1;

    friend bool operator==(const StreamDef&, const StreamDef&) = default;
};

struct TableDef {
    std::string name;
    Schema schema;
    std::vector<Row> rows;

    friend bool operator==(const TableDef&, const TableDef&) = default;
};

using CatalogEntry = std::variant<StreamDef, TableDef>;

std::string toLower(std::string_view s);
bool equalsIgnoreCase(std::string_view a, std::string_view b);

/// Registry of streams and tables. Names are unique across both kinds and compared case-insensitively.
class Catalog {
  public:
    void registerStream(StreamDef def);
    void registerTable(TableDef def);

    /// Throws Error(UnknownName).
    const CatalogEntry& resolve(std::string_view name) const;
    const StreamDef* findStream(std::string_view name) const;
    const TableDef* findTable(std::string_view name) const;
    bool contains(std::string_view name) const;

    std::vector<const StreamDef*> streams() const;
    std::vector<const TableDef*> tables() const;

    Json toJson() const;
    static Catalog fromJson(const Json& j);

  private:
    void checkUnique(const std::string& name) const;

    std::map<std::string, CatalogEntry> entries_;// keyed by lower-case name
};

Json streamDefToJson(const StreamDef& def);
StreamDef streamDefFromJson(const Json& j);
Json tableDefToJson(const TableDef& def);
TableDef tableDefFromJson(const Json& j);

}// namespace streamql
