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

#include <streamql/engine.hpp>

#include <algorithm>

#include <streamql/error.hpp>
#include <streamql/sql/parser.hpp>

namespace streamql {

Engine::Engine(std::filesystem::path dataDir) : store_(std::move(dataDir)) {}

void Engine::createStream(StreamDef def) { store_.registerStream(std::move(def)); }

void Engine::createTable(TableDef def) { store_.registerTable(std::move(def)); }

namespace {

struct Pending {
    int partition = 0;
    int64_t ts = 0;
    std::optional<std::string> key;
    Json value;
};

[[noreturn]] void lineError(int64_t line, const std::string& what) {
    throw Error(ErrorCode::InvalidArgument, "line " + std::to_string(line) + ": " + what);
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r") == std::string::npos; }

}// namespace

int64_t Engine::ingest(std::string_view streamName, std::istream& in) {
    const StreamDef* def = store_.catalog().findStream(streamName);
    if (!def) throw Error(ErrorCode::UnknownStream, "unknown stream '" + std::string(streamName) + "'");
    std::vector<Pending> batch;
    std::string line;
    int64_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (blank(line)) continue;
        Json obj = Json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) lineError(lineNo, "not a JSON object");
        for (const auto& [field, _] : obj.items()) {
            if (!def->schema.find(field)) lineError(lineNo, "unknown column '" + field + "'");
        }
        Pending p;
        p.value = Json::object();
        for (const auto& col : def->schema.columns) {
            auto it = std::find_if(obj.items().begin(), obj.items().end(),
                                   [&](const auto& kv) { return equalsIgnoreCase(kv.key(), col.name); });
            if (it == obj.items().end()) lineError(lineNo, "missing column '" + col.name + "'");
            auto v = valueFromJson(it.value(), col.type);
            if (!v) lineError(lineNo, "column '" + col.name + "' is not " + std::string(dataTypeName(col.type)));
            if (equalsIgnoreCase(col.name, def->timestampColumn)) {
                if (isNull(*v)) lineError(lineNo, "missing column '" + col.name + "'");
                p.ts = std::get<int64_t>(*v);
                if (p.ts < 0) lineError(lineNo, "negative timestamp in '" + col.name + "'");
            }
            if (def->partitionKeyColumn && equalsIgnoreCase(col.name, *def->partitionKeyColumn) && !isNull(*v)) {
                p.key = keyText(*v);
            }
            p.value[col.name] = valueToJson(*v);
        }
        p.partition = physical::partitionForKey(p.key ? std::optional<std::string_view>(*p.key) : std::nullopt,
                                                def->partitionCount);
        batch.push_back(std::move(p));
    }
    if (in.bad()) throw Error(ErrorCode::IoFailure, "read error after line " + std::to_string(lineNo));
    for (auto& p : batch) store_.append(def->name, p.partition, p.ts, std::move(p.key), std::move(p.value));
    store_.flush();
    return static_cast<int64_t>(batch.size());
}

PreparedQuery Engine::prepare(std::string_view text, bool rewrite) const {
    PreparedQuery q;
    q.ast = sql::parse(text);
    q.logical = plan::buildLogicalPlan(q.ast, store_.catalog());
    plan::requireExecutable(q.logical);
    if (rewrite) q.logical = plan::applyRewrites(q.logical);
    q.topology = physical::compile(q.logical, store_.catalog());
    return q;
}

std::string Engine::explain(std::string_view text, bool physical, bool rewrite) const {
    PreparedQuery q = prepare(text, rewrite);
    return physical ? physical::explainPhysical(q.topology) : plan::explainLogical(q.logical);
}

runtime::RunReport Engine::query(std::string_view text, const runtime::RunConfig& config, bool rewrite) {
    PreparedQuery q = prepare(text, rewrite);
    return runtime::runTopology(q.topology, store_, config);
}

std::vector<Row> readTableRows(const Schema& schema, std::istream& in) {
    std::vector<Row> rows;
    std::string line;
    int64_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (blank(line)) continue;
        Json obj = Json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) lineError(lineNo, "not a JSON object");
        Row row;
        for (const auto& col : schema.columns) {
            auto it = obj.find(col.name);
            if (it == obj.end()) {
                row.emplace_back();
                continue;
            }
            auto v = valueFromJson(*it, col.type);
            if (!v) lineError(lineNo, "column '" + col.name + "' is not " + std::string(dataTypeName(col.type)));
            row.push_back(std::move(*v));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}// namespace streamql
