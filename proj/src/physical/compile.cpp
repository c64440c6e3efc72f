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

#include <streamql/physical/topology.hpp>

#include <algorithm>
#include <cstdio>
#include <functional>

#include <streamql/error.hpp>

namespace streamql::physical {

using plan::NodeKind;
using plan::PlanNode;
using sql::BinaryOp;
using sql::ExprKind;

namespace {

bool onlyTables(const PlanNode& n) {
    if (n.kind == NodeKind::TableScan) return true;
    if (n.kind == NodeKind::StreamScan) return false;
    return std::all_of(n.inputs.begin(), n.inputs.end(), [](const plan::PlanPtr& c) { return onlyTables(*c); });
}

bool inSchema(const plan::PlanSchema& schema, const std::string& qualified) {
    return std::any_of(schema.begin(), schema.end(),
                       [&](const plan::PlanColumn& c) { return c.qualifiedName() == qualified; });
}

/// Column pairs (left, right) from top-level equality conjuncts that compare one side with the other.
void equiKeys(const plan::ExprPtr& e, const plan::PlanSchema& left, const plan::PlanSchema& right,
              std::vector<std::string>& leftKeys, std::vector<std::string>& rightKeys) {
    if (e->kind == ExprKind::Binary && e->binaryOp == BinaryOp::And) {
        equiKeys(e->operands[0], left, right, leftKeys, rightKeys);
        equiKeys(e->operands[1], left, right, leftKeys, rightKeys);
        return;
    }
    if (e->kind != ExprKind::Binary || e->binaryOp != BinaryOp::Eq) return;
    const auto& a = e->operands[0];
    const auto& b = e->operands[1];
    if (a->kind != ExprKind::Column || b->kind != ExprKind::Column) return;
    const std::string qa = a->qualifiedName();
    const std::string qb = b->qualifiedName();
    if (inSchema(left, qa) && inSchema(right, qb)) {
        leftKeys.push_back(qa);
        rightKeys.push_back(qb);
    } else if (inSchema(left, qb) && inSchema(right, qa)) {
        leftKeys.push_back(qb);
        rightKeys.push_back(qa);
    }
}

class Compiler {
  public:
    explicit Compiler(const Catalog& catalog) : catalog_(catalog) {}

    Topology run(const PlanNode& root) {
        if (root.kind != NodeKind::Sink) {
            throw Error(ErrorCode::UnsupportedPlan, "plan root must be a Sink");
        }
        const int input = compileNode(*root.inputs[0]);
        StageSpec& sink = newStage(StageKind::Sink, "sink", 1);
        sink.inputSchemas = {topo_.stages[input].outputSchema};
        sink.coreSchema = sink.inputSchemas[0];
        sink.outputSchema = sink.coreSchema;
        sink.windowed = plan::isWindowed(root.inputs[0]);
        sink.aggregated = plan::isAggregated(root.inputs[0]);
        sink.upstreamSourceParallelism = topo_.stages[input].upstreamSourceParallelism;
        topo_.sinkStage = sink.id;
        topo_.edges.push_back({input, sink.id, 0, Routing::Forward, {}});
        return std::move(topo_);
    }

  private:
    StageSpec& newStage(StageKind kind, std::string name, int parallelism) {
        StageSpec s;
        s.id = static_cast<int>(topo_.stages.size());
        s.kind = kind;
        s.name = std::move(name);
        s.parallelism = std::max(1, parallelism);
        topo_.stages.push_back(std::move(s));
        return topo_.stages.back();
    }

    int compileNode(const PlanNode& n) {
        switch (n.kind) {
            case NodeKind::StreamScan: {
                if (!catalog_.findStream(n.sourceName)) {
                    throw Error(ErrorCode::UnknownName, "stream '" + n.sourceName + "' vanished from the catalog");
                }
                StageSpec& s = newStage(StageKind::Source, "source_" + n.alias, n.partitionCount);
                s.sourceName = n.sourceName;
                s.alias = n.alias;
                s.columns = n.columns;
                s.timestampColumn = n.timestampColumn;
                s.coreSchema = n.schema;
                s.outputSchema = n.schema;
                s.upstreamSourceParallelism = s.parallelism;
                return s.id;
            }
            case NodeKind::TableScan: {
                StageSpec& s = newStage(StageKind::TableSource, "table_" + n.alias, 1);
                s.sourceName = n.sourceName;
                s.alias = n.alias;
                s.columns = n.columns;
                s.coreSchema = n.schema;
                s.outputSchema = n.schema;
                s.upstreamSourceParallelism = 1;
                return s.id;
            }
            case NodeKind::Filter:
            case NodeKind::Project: {
                const int id = compileNode(*n.inputs[0]);
                StageSpec& s = topo_.stages[id];
                ChainOp op;
                op.kind = n.kind == NodeKind::Filter ? ChainOp::Kind::Filter : ChainOp::Kind::Project;
                op.predicate = n.predicate;
                op.items = n.items;
                op.inputSchema = s.outputSchema;
                op.outputSchema = n.schema;
                s.chain.push_back(std::move(op));
                s.outputSchema = n.schema;
                return id;
            }
            case NodeKind::WindowAggregate: {
                const int input = compileNode(*n.inputs[0]);
                const int upstream = topo_.stages[input].upstreamSourceParallelism;
                const plan::PlanSchema inputSchema = topo_.stages[input].outputSchema;
                StageSpec& s = newStage(StageKind::WindowAggregate, "aggregate", n.groupKeys.empty() ? 1 : upstream);
                s.window = n.window;
                s.groupKeys = n.groupKeys;
                s.aggregates = n.aggregates;
                s.inputSchemas = {inputSchema};
                s.coreSchema = n.schema;
                s.outputSchema = n.schema;
                s.upstreamSourceParallelism = upstream;
                std::vector<std::string> keys;
                for (const auto& k : n.groupKeys) keys.push_back(k->qualifiedName());
                topo_.edges.push_back({input, s.id, 0, Routing::KeyedHash, std::move(keys)});
                return s.id;
            }
            case NodeKind::WindowJoin: {
                const int left = compileNode(*n.inputs[0]);
                const int right = compileNode(*n.inputs[1]);
                std::vector<std::string> leftKeys, rightKeys;
                equiKeys(n.predicate, n.inputs[0]->schema, n.inputs[1]->schema, leftKeys, rightKeys);
                const int upstream = std::max(topo_.stages[left].upstreamSourceParallelism,
                                              topo_.stages[right].upstreamSourceParallelism);
                int staticSide = -1;
                if (onlyTables(*n.inputs[1])) {
                    staticSide = 1;
                } else if (onlyTables(*n.inputs[0])) {
                    staticSide = 0;
                }
                const plan::PlanSchema leftSchema = topo_.stages[left].outputSchema;
                const plan::PlanSchema rightSchema = topo_.stages[right].outputSchema;
                StageSpec& s = newStage(StageKind::WindowJoin, "join", leftKeys.empty() ? 1 : upstream);
                s.leftWindowMs = n.leftWindowMs;
                s.rightWindowMs = n.rightWindowMs;
                s.condition = n.predicate;
                s.staticSide = staticSide;
                s.inputSchemas = {leftSchema, rightSchema};
                s.coreSchema = n.schema;
                s.outputSchema = n.schema;
                s.upstreamSourceParallelism = upstream;
                const int id = s.id;
                auto edgeFor = [&](int from, int side, std::vector<std::string> keys) {
                    if (side == staticSide) {
                        topo_.edges.push_back({from, id, side, Routing::Broadcast, {}});
                    } else {
                        topo_.edges.push_back({from, id, side, Routing::KeyedHash, std::move(keys)});
                    }
                };
                edgeFor(left, 0, std::move(leftKeys));
                edgeFor(right, 1, std::move(rightKeys));
                return id;
            }
            case NodeKind::Sink: break;
        }
        throw Error(ErrorCode::UnsupportedPlan, "no physical mapping for " + std::string(plan::nodeKindName(n.kind)));
    }

    const Catalog& catalog_;
    Topology topo_;
};

}// namespace

Topology compile(const plan::LogicalPlan& plan, const Catalog& catalog) {
    if (!plan) throw Error(ErrorCode::UnsupportedPlan, "empty plan");
    Topology topo = Compiler(catalog).run(*plan);
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(fnv1a64(explainPhysical(topo))));
    topo.fingerprint = hex;
    return topo;
}

}// namespace streamql::physical
