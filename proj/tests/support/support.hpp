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
#include <random>
#include <string>
#include <vector>

#include <streamql/engine.hpp>

namespace streamql::testing {

class TempDir {
  public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::string str() const { return path_.string(); }

  private:
    std::filesystem::path path_;
};

/// Streams and tables shared by the query corpus.
///   Orders(orderId INT64, productId STRING, units INT64, amount INT64, rowtime INT64) key productId
///   OrdersStream: same schema, key productId
///   Shipments(orderId INT64, carrier STRING, weight INT64, shiptime INT64) key orderId
///   Products(productId STRING, category STRING, price FLOAT64) table
void registerCorpusCatalog(Engine& engine, int partitions);

struct FixtureOptions {
    int events = 1000;
    int64_t spanMs = 600000;
    int products = 6;
    int64_t disorderMs = 0;// arrival order = sort by ts + U[0, disorderMs]
    uint32_t seed = 1;
};

std::vector<Json> makeOrders(const FixtureOptions& opt);
/// Shipments for a subset of orders, shipped 0..120 s after the order.
std::vector<Json> makeShipments(const std::vector<Json>& orders, const FixtureOptions& opt);
/// Rows of the Products table used by the corpus.
std::vector<Row> productRows();

/// Reorders events so that each arrives no later than events with ts more than maxDisplacementMs above it.
std::vector<Json> shuffleBounded(std::vector<Json> events, const std::string& tsColumn, int64_t maxDisplacementMs,
                                 uint32_t seed);

int64_t ingest(Engine& engine, const std::string& stream, const std::vector<Json>& events);

/// Runs a query into a temp file and returns its NDJSON rows.
std::vector<Json> runQuery(Engine& engine, const std::string& sql, runtime::RunConfig config, bool rewrite = true,
                           runtime::RunReport* report = nullptr);
std::vector<Json> readNdjson(const std::filesystem::path& file);

/// Rows whose finality is not PARTIAL.
std::vector<Json> finalRows(const std::vector<Json>& rows);

/// Multiset equality; floating values compare within relTol (relative), everything else exactly.
/// On mismatch, describe receives a short explanation.
bool sameMultiset(const std::vector<Json>& a, const std::vector<Json>& b, double relTol = 1e-9,
                  std::string* describe = nullptr);

std::string readFile(const std::filesystem::path& file);
std::vector<std::filesystem::path> listFiles(const std::filesystem::path& dir, const std::string& extension);

/// tests/ source directory (compiled in).
std::filesystem::path testsDir();

}// namespace streamql::testing
