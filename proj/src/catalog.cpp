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

#include <streamql/catalog.hpp>

#include <algorithm>
#include <cctype>
#include <set>

#include <streamql/error.hpp>

namespace streamql {

std::string toLower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

bool equalsIgnoreCase(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
        std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
               return std::tolower(x) == std::tolower(y);
           });
}

std::optional<size_t> Schema::indexOf(std::string_view name) const {
    for (size_t i = 0; i < columns.size(); ++i) {
        if (equalsIgnoreCase(columns[i].name, name)) return i;
    }
    return std::nullopt;
}

const Column* Schema::find(std::string_view name) const {
    auto i = indexOf(name);
    return i ? &columns[*i] : nullptr;
}

namespace {

std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

bool validIdentifier(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c == '_'; });
}

void validateSchema(const Schema& schema, const std::string& owner) {
    if (schema.columns.empty()) {
        throw Error(ErrorCode::InvalidSchema, owner + ": schema has no columns");
    }
    std::set<std::string> seen;
    for (const auto& c : schema.columns) {
        if (!validIdentifier(c.name)) {
            throw Error(ErrorCode::InvalidSchema, owner + ": invalid column name '" + c.name + "'");
        }
        if (!seen.insert(toLower(c.name)).second) {
            throw Error(ErrorCode::InvalidSchema, owner + ": duplicate column '" + c.name + "'");
        }
    }
}

}// namespace

Schema Schema::parse(std::string_view spec) {
    Schema schema;
    size_t start = 0;
    while (start <= spec.size()) {
        size_t comma = spec.find(',', start);
        std::string_view part = spec.substr(start, comma == std::string_view::npos ? spec.npos : comma - start);
        auto colon = part.find(':');
        if (colon == std::string_view::npos) {
            throw Error(ErrorCode::InvalidSchema, "column spec '" + trim(part) + "' is not name:type");
        }
        auto type = parseDataType(trim(part.substr(colon + 1)));
        if (!type) {
            throw Error(ErrorCode::InvalidSchema, "unknown type '" + trim(part.substr(colon + 1)) + "'");
        }
        std::string name = trim(part.substr(0, colon));
        if (name.empty()) throw Error(ErrorCode::InvalidSchema, "empty column name in '" + trim(part) + "'");
        if (schema.indexOf(name)) throw Error(ErrorCode::InvalidSchema, "duplicate column '" + name + "'");
        schema.columns.push_back({std::move(name), *type});
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return schema;
}

std::string Schema::str() const {
    std::string out;
    for (size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ",";
        out += columns[i].name + ":" + toLower(dataTypeName(columns[i].type));
    }
    return out;
}

void Catalog::checkUnique(const std::string& name) const {
    if (!validIdentifier(name)) {
        throw Error(ErrorCode::InvalidSchema, "invalid name '" + name + "'");
    }
    if (entries_.count(toLower(name))) {
        throw Error(ErrorCode::DuplicateName, "'" + name + "' is already registered");
    }
}

void Catalog::registerStream(StreamDef def) {
    checkUnique(def.name);
    validateSchema(def.schema, def.name);
    const Column* ts = def.schema.find(def.timestampColumn);
    if (def.timestampColumn.empty() || !ts) {
        throw Error(ErrorCode::InvalidSchema,
                    def.name + ": timestamp column '" + def.timestampColumn + "' is not in the schema");
    }
    if (ts->type != DataType::Int64) {
        throw Error(ErrorCode::InvalidSchema, def.name + ": timestamp column '" + ts->name + "' must be INT64");
    }
    if (def.partitionKeyColumn && !def.schema.find(*def.partitionKeyColumn)) {
        throw Error(ErrorCode::InvalidSchema,
                    def.name + ": partition key column '" + *def.partitionKeyColumn + "' is not in the schema");
    }
    if (def.partitionCount < 1) {
        throw Error(ErrorCode::InvalidSchema, def.name + ": partition count must be positive");
    }
    // store canonical column spelling
    def.timestampColumn = ts->name;
    if (def.partitionKeyColumn) def.partitionKeyColumn = def.schema.find(*def.partitionKeyColumn)->name;
    std::string key = toLower(def.name);
    entries_.emplace(std::move(key), std::move(def));
}

void Catalog::registerTable(TableDef def) {
    checkUnique(def.name);
    validateSchema(def.schema, def.name);
    for (size_t r = 0; r < def.rows.size(); ++r) {
        const Row& row = def.rows[r];
        if (row.size() != def.schema.size()) {
            throw Error(ErrorCode::InvalidSchema, def.name + ": row " + std::to_string(r + 1) + " has " +
                            std::to_string(row.size()) + " values, schema has " +
                            std::to_string(def.schema.size()));
        }
        for (size_t c = 0; c < row.size(); ++c) {
            if (isNull(row[c])) continue;
            if (!valueFromJson(valueToJson(row[c]), def.schema.columns[c].type)) {
                throw Error(ErrorCode::InvalidSchema, def.name + ": row " + std::to_string(r + 1) + " column '" +
                                def.schema.columns[c].name + "' is not " +
                                std::string(dataTypeName(def.schema.columns[c].type)));
            }
            // widen integer literals stored in FLOAT64 columns
            if (def.schema.columns[c].type == DataType::Float64) def.rows[r][c] = asDouble(row[c]);
        }
    }
    std::string key = toLower(def.name);
    entries_.emplace(std::move(key), std::move(def));
}

const CatalogEntry& Catalog::resolve(std::string_view name) const {
    auto it = entries_.find(toLower(name));
    if (it == entries_.end()) {
        throw Error(ErrorCode::UnknownName, "no stream or table named '" + std::string(name) + "'");
    }
    return it->second;
}

const StreamDef* Catalog::findStream(std::string_view name) const {
    auto it = entries_.find(toLower(name));
    return it == entries_.end() ? nullptr : std::get_if<StreamDef>(&it->second);
}

const TableDef* Catalog::findTable(std::string_view name) const {
    auto it = entries_.find(toLower(name));
    return it == entries_.end() ? nullptr : std::get_if<TableDef>(&it->second);
}

bool Catalog::contains(std::string_view name) const { return entries_.count(toLower(name)) > 0; }

std::vector<const StreamDef*> Catalog::streams() const {
    std::vector<const StreamDef*> out;
    for (const auto& [_, e] : entries_) {
        if (const auto* s = std::get_if<StreamDef>(&e)) out.push_back(s);
    }
    return out;
}

std::vector<const TableDef*> Catalog::tables() const {
    std::vector<const TableDef*> out;
    for (const auto& [_, e] : entries_) {
        if (const auto* t = std::get_if<TableDef>(&e)) out.push_back(t);
    }
    return out;
}

namespace {

Json schemaToJson(const Schema& s) {
    Json cols = Json::array();
    for (const auto& c : s.columns) {
        cols.push_back({{"name", c.name}, {"type", std::string(dataTypeName(c.type))}});
    }
    return cols;
}

Schema schemaFromJson(const Json& j) {
    Schema s;
    for (const auto& c : j) {
        auto type = parseDataType(c.at("type").get<std::string>());
        if (!type) throw Error(ErrorCode::InvalidSchema, "bad column type in catalog");
        s.columns.push_back({c.at("name").get<std::string>(), *type});
    }
    return s;
}

}// namespace

Json streamDefToJson(const StreamDef& def) {
    Json j;
    j["name"] = def.name;
    j["schema"] = schemaToJson(def.schema);
    j["timestampColumn"] = def.timestampColumn;
    j["partitionKeyColumn"] = def.partitionKeyColumn ? Json(*def.partitionKeyColumn) : Json(nullptr);
    j["partitionCount"] = def.partitionCount;
    return j;
}

StreamDef streamDefFromJson(const Json& j) {
    StreamDef def;
    def.name = j.at("name").get<std::string>();
    def.schema = schemaFromJson(j.at("schema"));
    def.timestampColumn = j.at("timestampColumn").get<std::string>();
    if (j.contains("partitionKeyColumn") && !j["partitionKeyColumn"].is_null()) {
        def.partitionKeyColumn = j["partitionKeyColumn"].get<std::string>();
    }
    def.partitionCount = j.at("partitionCount").get<int>();
    return def;
}

Json tableDefToJson(const TableDef& def) {
    Json j;
    j["name"] = def.name;
    j["schema"] = schemaToJson(def.schema);
    Json rows = Json::array();
    for (const auto& r : def.rows) rows.push_back(rowToJson(r));
    j["rows"] = std::move(rows);
    return j;
}

TableDef tableDefFromJson(const Json& j) {
    TableDef def;
    def.name = j.at("name").get<std::string>();
    def.schema = schemaFromJson(j.at("schema"));
    for (const auto& r : j.at("rows")) {
        Row row;
        for (size_t c = 0; c < r.size(); ++c) {
            auto type = c < def.schema.size() ? def.schema.columns[c].type : DataType::String;
            auto v = valueFromJson(r[c], type);
            row.push_back(v ? *v : valueFromJsonUntyped(r[c]));
        }
        def.rows.push_back(std::move(row));
    }
    return def;
}

Json Catalog::toJson() const {
    Json streams = Json::array();
    Json tables = Json::array();
    for (const auto& [_, e] : entries_) {
        if (const auto* s = std::get_if<StreamDef>(&e)) streams.push_back(streamDefToJson(*s));
        if (const auto* t = std::get_if<TableDef>(&e)) tables.push_back(tableDefToJson(*t));
    }
    Json j;
    j["streams"] = std::move(streams);
    j["tables"] = std::move(tables);
    return j;
}

Catalog Catalog::fromJson(const Json& j) {
    Catalog c;
    for (const auto& s : j.value("streams", Json::array())) c.registerStream(streamDefFromJson(s));
    for (const auto& t : j.value("tables", Json::array())) c.registerTable(tableDefFromJson(t));
    return c;
}

}// namespace streamql
