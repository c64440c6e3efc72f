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

#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <stdlib.h>

namespace streamql::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "streamql-test-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

void registerCorpusCatalog(Engine& engine, int partitions) {
    const auto orders = Schema::parse("orderId:int64,productId:string,units:int64,amount:int64,rowtime:int64");
    engine.createStream({"Orders", orders, "rowtime", "productId", partitions});
    engine.createStream({"OrdersStream", orders, "rowtime", "productId", partitions});
    engine.createStream({"Shipments", Schema::parse("orderId:int64,carrier:string,weight:int64,shiptime:int64"),
                         "shiptime", "orderId", partitions});
    engine.createTable({"Products", Schema::parse("productId:string,category:string,price:float64"), productRows()});
}

std::vector<Row> productRows() {
    return {
        {std::string("p0"), std::string("fruit"), 1.5},   {std::string("p1"), std::string("fruit"), 2.25},
        {std::string("p2"), std::string("dairy"), 3.0},   {std::string("p3"), std::string("bakery"), 4.75},
        {std::string("p4"), std::string("dairy"), 0.5},   {std::string("p9"), std::string("unsold"), 9.0},
    };
}

std::vector<Json> makeOrders(const FixtureOptions& opt) {
    std::mt19937 rng(opt.seed);
    std::uniform_int_distribution<int64_t> tsDist(0, opt.spanMs);
    std::uniform_int_distribution<int> product(0, opt.products - 1);
    std::uniform_int_distribution<int64_t> units(1, 9);
    std::uniform_int_distribution<int64_t> amount(1, 500);
    std::vector<int64_t> stamps(static_cast<size_t>(opt.events));
    for (auto& t : stamps) t = tsDist(rng);
    std::sort(stamps.begin(), stamps.end());
    std::vector<Json> out;
    for (int i = 0; i < opt.events; ++i) {
        Json j;
        j["orderId"] = i;
        j["productId"] = "p" + std::to_string(product(rng));
        j["units"] = units(rng);
        j["amount"] = amount(rng);
        j["rowtime"] = stamps[static_cast<size_t>(i)];
        out.push_back(std::move(j));
    }
    if (opt.disorderMs > 0) out = shuffleBounded(std::move(out), "rowtime", opt.disorderMs, opt.seed * 7919u + 1);
    return out;
}

std::vector<Json> makeShipments(const std::vector<Json>& orders, const FixtureOptions& opt) {
    std::mt19937 rng(opt.seed + 17);
    std::uniform_int_distribution<int64_t> delay(0, 120000);
    std::uniform_int_distribution<int> pick(0, 2);
    const char* carriers[] = {"ups", "dhl", "fedex"};
    std::vector<Json> out;
    for (const auto& o : orders) {
        if (pick(rng) == 0) continue;
        Json j;
        j["orderId"] = o["orderId"];
        j["carrier"] = carriers[pick(rng)];
        j["weight"] = static_cast<int64_t>(pick(rng) + 1) * 10;
        j["shiptime"] = o["rowtime"].get<int64_t>() + delay(rng);
        out.push_back(std::move(j));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const Json& a, const Json& b) { return a["shiptime"].get<int64_t>() < b["shiptime"].get<int64_t>(); });
    if (opt.disorderMs > 0) out = shuffleBounded(std::move(out), "shiptime", opt.disorderMs, opt.seed * 104729u + 3);
    return out;
}

std::vector<Json> shuffleBounded(std::vector<Json> events, const std::string& tsColumn, int64_t maxDisplacementMs,
                                 uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int64_t> jitter(0, maxDisplacementMs);
    std::vector<std::pair<int64_t, size_t>> keys;
    for (size_t i = 0; i < events.size(); ++i) keys.emplace_back(events[i][tsColumn].get<int64_t>() + jitter(rng), i);
    std::sort(keys.begin(), keys.end());
    std::vector<Json> out;
    out.reserve(events.size());
    for (const auto& [_, i] : keys) out.push_back(std::move(events[i]));
    return out;
}

int64_t ingest(Engine& engine, const std::string& stream, const std::vector<Json>& events) {
    std::stringstream in;
    for (const auto& e : events) in << e.dump() << "\n";
    return engine.ingest(stream, in);
}

std::vector<Json> readNdjson(const fs::path& file) {
    std::vector<Json> rows;
    std::ifstream in(file);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) rows.push_back(Json::parse(line));
    }
    return rows;
}

std::vector<Json> runQuery(Engine& engine, const std::string& sql, runtime::RunConfig config, bool rewrite,
                           runtime::RunReport* report) {
    TempDir out;
    config.outputPath = (out.path() / "out.ndjson").string();
    auto r = engine.query(sql, config, rewrite);
    if (report) *report = r;
    return readNdjson(config.outputPath);
}

std::vector<Json> finalRows(const std::vector<Json>& rows) {
    std::vector<Json> out;
    for (const auto& r : rows) {
        if (r.value("finality", "") != "PARTIAL") out.push_back(r);
    }
    return out;
}

namespace {

/// Sort key with floats rounded so that near-equal rows line up.
Json rounded(const Json& row) {
    Json out = Json::object();
    for (const auto& [k, v] : row.items()) {
        if (v.is_number_float()) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.6e", v.get<double>());
            out[k] = std::string("~") + buf;
        } else {
            out[k] = v;
        }
    }
    return out;
}

bool close(const Json& a, const Json& b, double relTol) {
    if (a.is_number() && b.is_number() && (a.is_number_float() || b.is_number_float())) {
        const double x = a.get<double>(), y = b.get<double>();
        return std::fabs(x - y) <= relTol * std::max({1.0, std::fabs(x), std::fabs(y)});
    }
    return a == b;
}

}// namespace

bool sameMultiset(const std::vector<Json>& a, const std::vector<Json>& b, double relTol, std::string* describe) {
    if (a.size() != b.size()) {
        if (describe) *describe = "row counts differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size());
        return false;
    }
    auto sorted = [](const std::vector<Json>& rows) {
        std::vector<std::pair<std::string, const Json*>> out;
        for (const auto& r : rows) out.emplace_back(rounded(r).dump(), &r);
        std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        return out;
    };
    auto sa = sorted(a), sb = sorted(b);
    for (size_t i = 0; i < sa.size(); ++i) {
        const Json& x = *sa[i].second;
        const Json& y = *sb[i].second;
        bool ok = x.size() == y.size();
        for (auto it = x.begin(); ok && it != x.end(); ++it) {
            auto other = y.find(it.key());
            ok = other != y.end() && close(*it, *other, relTol);
        }
        if (!ok) {
            if (describe) *describe = "first difference: " + x.dump() + " vs " + y.dump();
            return false;
        }
    }
    return true;
}

std::string readFile(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<fs::path> listFiles(const fs::path& dir, const std::string& extension) {
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == extension) out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

fs::path testsDir() { return STREAMQL_TESTS_DIR; }

}// namespace streamql::testing
