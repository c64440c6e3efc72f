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

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <fstream>
#include <sstream>

#include "support.hpp"

namespace streamql {
namespace {

namespace fs = std::filesystem;

struct Result {
    int status = -1;
    std::string out;
    std::string err;
};

std::string quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

class CliTest : public ::testing::Test {
  protected:
    Result run(const std::vector<std::string>& args, const std::string& env = "") {
        std::string cmd = env + " " + quote(STREAMQL_CLI);
        for (const auto& a : args) cmd += " " + quote(a);
        const fs::path out = scratch.path() / "stdout", err = scratch.path() / "stderr";
        cmd += " >" + quote(out.string()) + " 2>" + quote(err.string());
        const int raw = std::system(cmd.c_str());
        return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, testing::readFile(out), testing::readFile(err)};
    }

    std::vector<std::string> withDir(std::vector<std::string> args) {
        args.push_back("--data-dir");
        args.push_back(data.str());
        return args;
    }

    void createOrders() {
        const auto r = run(withDir({"create", "stream", "Orders", "--schema", "productId:string,amount:int64,rowtime:int64",
                                    "--ts", "rowtime", "--key", "productId", "--partitions", "4"}));
        ASSERT_EQ(r.status, 0) << r.err;
    }

    std::string fixture() const { return (testing::testsDir() / "fixtures" / "orders.ndjson").string(); }

    testing::TempDir data;
    testing::TempDir scratch;
};

const char* kCount = "SELECT STREAM productId, COUNT(*) AS c FROM Orders GROUP BY TUMBLE(rowtime, INTERVAL '1' MINUTE), productId";

TEST_F(CliTest, CreateStream) {
    createOrders();
    EXPECT_TRUE(fs::exists(data.path() / "catalog.json"));
}

TEST_F(CliTest, DuplicateCreate) {
    createOrders();
    const auto r = run(withDir({"create", "stream", "Orders", "--schema", "a:int64", "--ts", "a"}));
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.err.find("DuplicateName"), std::string::npos) << r.err;
}

TEST_F(CliTest, MissingTs) {
    const auto r = run(withDir({"create", "stream", "Orders", "--schema", "a:int64"}));
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.err.find("InvalidSchema"), std::string::npos) << r.err;
}

TEST_F(CliTest, IngestCounts) {
    createOrders();
    auto r = run(withDir({"ingest", "Orders", fixture()}));
    EXPECT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(r.out, "ingested 20\n");
    const fs::path empty = scratch.path() / "empty.ndjson";
    std::ofstream(empty).close();
    r = run(withDir({"ingest", "Orders", empty.string()}));
    EXPECT_EQ(r.out, "ingested 0\n");
}

TEST_F(CliTest, IngestReportsBadLine) {
    createOrders();
    const fs::path bad = scratch.path() / "bad.ndjson";
    {
        std::ofstream out(bad);
        for (int i = 1; i <= 8; ++i) {
            out << (i == 7 ? "{\"productId\":\"a\",\"amount\":1}" : "{\"productId\":\"a\",\"amount\":1,\"rowtime\":1}") << "\n";
        }
    }
    const auto r = run(withDir({"ingest", "Orders", bad.string()}));
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.err.find("line 7"), std::string::npos) << r.err;
}

TEST_F(CliTest, QueryToStdoutAndReport) {
    createOrders();
    run(withDir({"ingest", "Orders", fixture()}));
    const auto r = run(withDir({"query", kCount, "--lateness", "5000"}));
    ASSERT_EQ(r.status, 0) << r.err;
    int64_t total = 0, lines = 0;
    std::istringstream in(r.out);
    std::string line;
    while (std::getline(in, line)) {
        const Json j = Json::parse(line);
        EXPECT_EQ(j["finality"], "FINAL");
        EXPECT_TRUE(j.contains("window_start") && j.contains("window_end"));
        total += j["c"].get<int64_t>();
        ++lines;
    }
    EXPECT_EQ(total, 20);
    EXPECT_GT(lines, 0);
    EXPECT_NE(r.err.find("rowsEmitted"), std::string::npos) << r.err;
}

TEST_F(CliTest, BlockingQueryExitsTwo) {
    createOrders();
    const auto r = run(withDir({"query", "SELECT STREAM productId, COUNT(*) FROM Orders GROUP BY productId"}));
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.err.find("BlockingQuery at 1:47"), std::string::npos) << r.err;
}

TEST_F(CliTest, ExplainLogicalAndPhysical) {
    createOrders();
    auto r = run(withDir({"explain", kCount}));
    EXPECT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(r.out.rfind("Sink [", 0), 0u) << r.out;
    r = run(withDir({"explain", "--physical", kCount}));
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("x4"), std::string::npos) << r.out;
    r = run(withDir({"explain", "SELECT FROM"}));
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.err.find("ParseError at 1:8"), std::string::npos) << r.err;
}

TEST_F(CliTest, CrashThenResumeMatches) {
    createOrders();
    run(withDir({"ingest", "Orders", fixture()}));
    const std::string full = (scratch.path() / "full.ndjson").string();
    const std::string recovered = (scratch.path() / "recovered.ndjson").string();
    ASSERT_EQ(run(withDir({"query", kCount, "--lateness", "5000", "--output", full})).status, 0);
    auto r = run(withDir({"query", kCount, "--lateness", "5000", "--checkpoint-every", "3", "--crash-after-events", "11",
                          "--output", recovered}));
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.err.find("crash injected"), std::string::npos) << r.err;
    r = run(withDir({"query", kCount, "--lateness", "5000", "--checkpoint-every", "3", "--resume", "--output", recovered}));
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(testing::readFile(recovered), testing::readFile(full));
}

TEST_F(CliTest, EnvironmentSuppliesDataDirAndFlagWins) {
    const std::string env = "STREAMQL_DATA_DIR=" + quote(data.str());
    auto r = run({"create", "stream", "S", "--schema", "k:string,ts:int64", "--ts", "ts"}, env);
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_TRUE(fs::exists(data.path() / "catalog.json"));
    testing::TempDir other;
    r = run({"create", "stream", "S", "--schema", "k:string,ts:int64", "--ts", "ts", "--data-dir", other.str()}, env);
    EXPECT_EQ(r.status, 0) << r.err;
    EXPECT_TRUE(fs::exists(other.path() / "catalog.json"));
}

TEST_F(CliTest, CreateTableFromRows) {
    const fs::path rows = scratch.path() / "rows.ndjson";
    std::ofstream(rows) << "{\"productId\":\"a\",\"category\":\"fruit\"}\n{\"productId\":\"b\"}\n";
    const auto r = run(withDir({"create", "table", "Products", "--schema", "productId:string,category:string", "--rows",
                                rows.string()}));
    EXPECT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(r.out, "created table Products (2 rows)\n");
}

}// namespace
}// namespace streamql
