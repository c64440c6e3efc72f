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

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include <streamql/engine.hpp>
#include <streamql/error.hpp>

using namespace streamql;

namespace {

int report(const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return isQueryDiagnostic(e.code()) ? 2 : 1;
}

std::string readSql(const std::string& inline_, const std::string& file) {
    if (file.empty()) return inline_;
    std::ifstream in(file);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + file);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}// namespace

int main(int argc, char** argv) {
    CLI::App app{"streamql: streaming SQL over partitioned logs"};
    app.require_subcommand(1);

    std::string dataDir = "streamql-data";
    auto addDataDir = [&](CLI::App* cmd) {
        cmd->add_option("--data-dir", dataDir, "data directory")->envname("STREAMQL_DATA_DIR");
    };

    // create
    auto* create = app.add_subcommand("create", "register a stream or table");
    create->require_subcommand(1);
    std::string name, schemaSpec, tsColumn, keyColumn, rowsFile;
    int partitions = 1;
    auto* createStream = create->add_subcommand("stream", "register a stream");
    createStream->add_option("name", name)->required();
    createStream->add_option("--schema", schemaSpec, "name:type,...");
    createStream->add_option("--ts", tsColumn, "INT64 event-time column");
    createStream->add_option("--key", keyColumn, "partition key column");
    createStream->add_option("--partitions", partitions)->check(CLI::PositiveNumber);
    addDataDir(createStream);
    auto* createTable = create->add_subcommand("table", "register a static table");
    createTable->add_option("name", name)->required();
    createTable->add_option("--schema", schemaSpec, "name:type,...");
    createTable->add_option("--rows", rowsFile, "NDJSON rows");
    addDataDir(createTable);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "append NDJSON events to a stream");
    std::string stream, inputFile;
    ingest->add_option("stream", stream)->required();
    ingest->add_option("file", inputFile)->required();
    addDataDir(ingest);

    // query / explain
    std::string sqlText, sqlFile, outputPath;
    runtime::RunConfig config;
    bool noRewrite = false, physical = false;
    auto* query = app.add_subcommand("query", "run a query to completion");
    query->add_option("sql", sqlText);
    query->add_option("--file", sqlFile, "read the query from a file");
    query->add_option("--lateness", config.latenessMs, "allowed lateness in ms")
        ->envname("STREAMQL_LATENESS_MS")
        ->check(CLI::NonNegativeNumber);
    query->add_option("--checkpoint-every", config.checkpointEveryNEvents, "checkpoint every N source events (0 = off)")
        ->envname("STREAMQL_CHECKPOINT_EVERY")
        ->check(CLI::NonNegativeNumber);
    query->add_option("--emit-partial-every", config.emitPartialEveryNEvents, "PARTIAL rows every N events (0 = off)")
        ->envname("STREAMQL_EMIT_PARTIAL_EVERY")
        ->check(CLI::NonNegativeNumber);
    query->add_option("--output", outputPath, "NDJSON result file (default stdout)");
    query->add_flag("--resume", config.resume, "restore from the newest complete checkpoint");
    query->add_option("--crash-after-events", config.crashAfterEvents)->group("")->check(CLI::NonNegativeNumber);
    query->add_flag("--no-rewrite", noRewrite, "skip logical rewrites");
    addDataDir(query);

    auto* explain = app.add_subcommand("explain", "print the logical or physical plan");
    explain->add_option("sql", sqlText);
    explain->add_option("--file", sqlFile, "read the query from a file");
    explain->add_flag("--physical", physical, "print the task topology");
    explain->add_flag("--no-rewrite", noRewrite, "skip logical rewrites");
    addDataDir(explain);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        Engine engine(dataDir);
        if (*createStream) {
            if (schemaSpec.empty()) throw Error(ErrorCode::InvalidSchema, "--schema is required");
            if (tsColumn.empty()) throw Error(ErrorCode::InvalidSchema, "--ts is required for a stream");
            StreamDef def{name, Schema::parse(schemaSpec), tsColumn, std::nullopt, partitions};
            if (!keyColumn.empty()) def.partitionKeyColumn = keyColumn;
            engine.createStream(std::move(def));
            std::cout << "created stream " << name << "\n";
        } else if (*createTable) {
            if (schemaSpec.empty()) throw Error(ErrorCode::InvalidSchema, "--schema is required");
            TableDef def{name, Schema::parse(schemaSpec), {}};
            if (!rowsFile.empty()) {
                std::ifstream in(rowsFile);
                if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + rowsFile);
                def.rows = readTableRows(def.schema, in);
            }
            const size_t n = def.rows.size();
            engine.createTable(std::move(def));
            std::cout << "created table " << name << " (" << n << " rows)\n";
        } else if (*ingest) {
            std::ifstream in(inputFile);
            if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + inputFile);
            std::cout << "ingested " << engine.ingest(stream, in) << "\n";
        } else if (*explain) {
            std::cout << engine.explain(readSql(sqlText, sqlFile), physical, !noRewrite);
        } else if (*query) {
            config.outputPath = outputPath;
            const auto result = engine.query(readSql(sqlText, sqlFile), config, !noRewrite);
            std::cerr << result.str() << "\n";
            if (result.crashed) {
                std::cerr << "error: crash injected after " << config.crashAfterEvents << " events\n";
                return 1;
            }
        }
    } catch (const Error& e) {
        return report(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
