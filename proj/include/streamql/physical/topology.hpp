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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <streamql/catalog.hpp>
#include <streamql/plan/logical_plan.hpp>

namespace streamql::physical {

/// FNV-1a, 64-bit (offset basis 0xcbf29ce484222325, prime 0x100000001b3).
uint64_t fnv1a64(std::string_view bytes);

/// fnv1a64(key) mod n; a missing key always maps to partition 0.
int partitionForKey(std::optional<std::string_view> key, int n);

enum class StageKind { Source, TableSource, WindowAggregate, WindowJoin, Sink };
enum class Routing { Forward, KeyedHash, Broadcast };

std::string_view stageKindName(StageKind kind);

/// Filter or Project fused onto the output of a stage.
struct ChainOp {
    enum class Kind { Filter, Project } kind = Kind::Filter;
    plan::ExprPtr predicate;
    std::vector<plan::ProjectItem> items;
    plan::PlanSchema inputSchema;
    plan::PlanSchema outputSchema;
};

struct StageSpec {
    int id = 0;
    std::string name;// unique within the topology, used in task ids
    StageKind kind = StageKind::Source;
    int parallelism = 1;

    // Source / TableSource
    std::string sourceName;
    std::string alias;
    std::vector<std::string> columns;
    std::string timestampColumn;

    // WindowAggregate
    std::optional<plan::WindowFn> window;
    std::vector<plan::ExprPtr> groupKeys;
    std::vector<plan::AggregateCall> aggregates;

    // WindowJoin
    std::optional<int64_t> leftWindowMs;
    std::optional<int64_t> rightWindowMs;
    plan::ExprPtr condition;
    int staticSide = -1;// input index fed only by tables (probe-only join), or -1

    // Sink
    bool windowed = false;
    bool aggregated = false;

    std::vector<plan::PlanSchema> inputSchemas;// per input index
    plan::PlanSchema coreSchema;               // operator output, before the chain
    std::vector<ChainOp> chain;
    plan::PlanSchema outputSchema;             // after the chain
    int upstreamSourceParallelism = 1;
};

struct Edge {
    int from = 0;
    int to = 0;
    int toInput = 0;// join: 0 = left, 1 = right
    Routing routing = Routing::Forward;
    std::vector<std::string> keyColumns;// qualified names in the producer's output schema
};

struct TaskSpec {
    std::string taskId;// "<stage name>-<instance>"
    int stage = 0;
    int instance = 0;
};

/// Physical plan: a DAG of parallel stages connected by routed edges, ending in a single sink.
struct Topology {
    std::vector<StageSpec> stages;
    std::vector<Edge> edges;
    int sinkStage = -1;
    std::string fingerprint;

    std::vector<TaskSpec> tasks() const;
    std::vector<const Edge*> inputsOf(int stage) const;
    std::vector<const Edge*> outputsOf(int stage) const;
};

/// Maps a validated, rewritten logical plan onto stages: one source stage per scan (parallelism =
/// partition count), Filter/Project fused into the producing stage, keyed shuffles in front of
/// aggregates and joins, and a single-instance sink.
Topology compile(const plan::LogicalPlan& plan, const Catalog& catalog);

/// Indented stage tree rooted at the sink, with parallelism ("x4") and routing annotations.
std::string explainPhysical(const Topology& topology);

}// namespace streamql::physical
