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

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>

#include <streamql/log/log_store.hpp>
#include <streamql/physical/topology.hpp>
#include <streamql/plan/planner.hpp>
#include <streamql/runtime/runtime.hpp>
#include <streamql/sql/ast.hpp>

namespace streamql {

struct PreparedQuery {
    sql::QueryAst ast;
    plan::LogicalPlan logical;// after rewrites unless they were disabled
    physical::Topology topology;
};

/// Front door over one data directory: catalog, ingest, explain and query.
class Engine {
  public:
    explicit Engine(std::filesystem::path dataDir);

    log::LogStore& store() { return store_; }
    const Catalog& catalog() const { return store_.catalog(); }

    void createStream(StreamDef def);
    void createTable(TableDef def);

    /// Appends each NDJSON object to partitionForKey(key, partitionCount). The whole input is
    /// validated before anything is written; errors name the 1-based line.
    int64_t ingest(std::string_view stream, std::istream& in);

    /// parse -> build -> validate -> rewrite -> compile. Throws positioned diagnostics.
    PreparedQuery prepare(std::string_view sql, bool rewrite = true) const;
    std::string explain(std::string_view sql, bool physical = false, bool rewrite = true) const;
    runtime::RunReport query(std::string_view sql, const runtime::RunConfig& config, bool rewrite = true);

  private:
    log::LogStore store_;
};

/// Rows for a table from NDJSON objects keyed by column name (missing columns are NULL).
std::vector<Row> readTableRows(const Schema& schema, std::istream& in);

}// namespace streamql
