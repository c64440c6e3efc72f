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

#include <random>

#include <streamql/physical/topology.hpp>
#include <streamql/plan/planner.hpp>
#include <streamql/sql/parser.hpp>

namespace streamql {
namespace {

using physical::Routing;
using physical::StageKind;

// Reference FNV-1a 64 from the published offset basis and prime.
uint64_t referenceFnv(const std::string& s) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

TEST(Partition, FnvOfA) {
    EXPECT_EQ(physical::fnv1a64("a"), 0xaf63dc4c8601ec8cull);
    EXPECT_EQ(physical::fnv1a64(""), 0xcbf29ce484222325ull);
    EXPECT_EQ(physical::partitionForKey("a", 4), 0);
}

TEST(Partition, SinglePartitionAndNullKey) {
    EXPECT_EQ(physical::partitionForKey("anything", 1), 0);
    EXPECT_EQ(physical::partitionForKey(std::nullopt, 8), 0);
}

TEST(Partition, MatchesReferenceHash) {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> len(0, 20), ch(0, 255), n(1, 64);
    for (int i = 0; i < 2000; ++i) {
        std::string key;
        for (int k = len(rng); k > 0; --k) key += static_cast<char>(ch(rng));
        const int parts = n(rng);
        ASSERT_EQ(physical::fnv1a64(key), referenceFnv(key));
        ASSERT_EQ(physical::partitionForKey(key, parts), static_cast<int>(referenceFnv(key) % static_cast<uint64_t>(parts)));
        ASSERT_EQ(physical::partitionForKey(key, parts), physical::partitionForKey(key, parts));
    }
}

// Property: 10,000 random keys over 8 partitions, no partition above twice the mean.
TEST(Partition, Balance) {
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> len(1, 16), ch('a', 'z');
    std::vector<int> counts(8, 0);
    for (int i = 0; i < 10000; ++i) {
        std::string key;
        for (int k = len(rng); k > 0; --k) key += static_cast<char>(ch(rng));
        ++counts[static_cast<size_t>(physical::partitionForKey(key, 8))];
    }
    for (int c : counts) EXPECT_LE(c, 2 * 10000 / 8);
}

class CompileTest : public ::testing::Test {
  protected:
    void SetUp() override {
        catalog.registerStream({"Orders", Schema::parse("productId:string,amount:int64,rowtime:int64"), "rowtime", "productId", 4});
        catalog.registerStream({"Single", Schema::parse("k:string,v:int64,ts:int64"), "ts", "k", 1});
        catalog.registerStream({"Shipments", Schema::parse("productId:string,carrier:string,shiptime:int64"), "shiptime",
                                "productId", 2});
        catalog.registerTable({"Products", Schema::parse("productId:string,category:string"), {}});
    }

    physical::Topology compile(const std::string& sql) const {
        auto p = plan::buildLogicalPlan(sql::parse(sql), catalog);
        plan::requireExecutable(p);
        return physical::compile(plan::applyRewrites(p), catalog);
    }

    Catalog catalog;
};

TEST_F(CompileTest, ScanProjectFusesIntoSources) {
    const auto t = compile("SELECT STREAM amount FROM Orders WHERE amount > 3");
    ASSERT_EQ(t.stages.size(), 2u);
    EXPECT_EQ(t.stages[0].kind, StageKind::Source);
    EXPECT_EQ(t.stages[0].parallelism, 4);
    EXPECT_EQ(t.stages[0].chain.size(), 2u);
    EXPECT_EQ(t.stages[1].kind, StageKind::Sink);
    EXPECT_EQ(t.stages[1].parallelism, 1);
    ASSERT_EQ(t.edges.size(), 1u);
    EXPECT_EQ(t.edges[0].routing, Routing::Forward);
    EXPECT_EQ(t.tasks().size(), 5u);
    const std::string text = physical::explainPhysical(t);
    EXPECT_NE(text.find("Source[Orders] x4"), std::string::npos) << text;
}

TEST_F(CompileTest, WindowedCountShufflesByKey) {
    const auto t = compile("SELECT STREAM productId, COUNT(*) FROM Orders GROUP BY TUMBLE(rowtime, INTERVAL '1' MINUTE), productId");
    ASSERT_EQ(t.stages.size(), 3u);
    EXPECT_EQ(t.stages[1].kind, StageKind::WindowAggregate);
    EXPECT_EQ(t.stages[1].parallelism, 4);
    const auto in = t.inputsOf(1);
    ASSERT_EQ(in.size(), 1u);
    EXPECT_EQ(in[0]->routing, Routing::KeyedHash);
    EXPECT_EQ(in[0]->keyColumns, (std::vector<std::string>{"Orders.productId"}));
    EXPECT_NE(physical::explainPhysical(t).find("shuffle hash(productId)"), std::string::npos);
    EXPECT_EQ(t.tasks().size(), 9u);
}

TEST_F(CompileTest, SinglePartitionIsParallelismOne) {
    const auto t = compile("SELECT STREAM k, SUM(v) FROM Single GROUP BY TUMBLE(ts, INTERVAL '1' SECOND), k");
    for (const auto& s : t.stages) EXPECT_EQ(s.parallelism, 1) << s.name;
}

TEST_F(CompileTest, GlobalAggregateRunsOnOneTask) {
    const auto t = compile("SELECT STREAM COUNT(*) FROM Orders GROUP BY TUMBLE(rowtime, INTERVAL '1' MINUTE)");
    EXPECT_EQ(t.stages[1].parallelism, 1);
}

TEST_F(CompileTest, StreamJoinShufflesBothSides) {
    const auto t = compile(
        "SELECT STREAM o.amount, s.carrier FROM Orders o OVER (RANGE INTERVAL '1' MINUTE PRECEDING) "
        "JOIN Shipments s OVER (RANGE INTERVAL '1' MINUTE PRECEDING) ON o.productId = s.productId");
    const auto& join = t.stages[2];
    ASSERT_EQ(join.kind, StageKind::WindowJoin);
    EXPECT_EQ(join.parallelism, 4);
    EXPECT_EQ(join.staticSide, -1);
    for (const auto* e : t.inputsOf(join.id)) EXPECT_EQ(e->routing, Routing::KeyedHash);
}

TEST_F(CompileTest, TableSideIsBroadcast) {
    const auto t = compile("SELECT STREAM o.amount, p.category FROM Orders o JOIN Products p ON o.productId = p.productId");
    const auto& join = t.stages[2];
    EXPECT_EQ(join.staticSide, 1);
    for (const auto* e : t.inputsOf(join.id)) {
        EXPECT_EQ(e->routing, e->toInput == 1 ? Routing::Broadcast : Routing::KeyedHash);
    }
}

TEST_F(CompileTest, Deterministic) {
    const std::string q = "SELECT STREAM productId, AVG(amount) FROM Orders GROUP BY HOP(rowtime, INTERVAL '1' SECOND, INTERVAL '3' SECOND), productId";
    const auto a = compile(q), b = compile(q);
    EXPECT_EQ(physical::explainPhysical(a), physical::explainPhysical(b));
    EXPECT_EQ(a.fingerprint, b.fingerprint);
    EXPECT_NE(a.fingerprint, compile("SELECT STREAM * FROM Orders").fingerprint);
}

}// namespace
}// namespace streamql
