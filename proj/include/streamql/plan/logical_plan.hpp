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

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <streamql/catalog.hpp>
#include <streamql/error.hpp>
#include <streamql/sql/ast.hpp>

namespace streamql::plan {

using sql::AggFunc;
using sql::Expr;
using sql::ExprPtr;
using sql::WindowFn;

/// Output column of a plan node. Scan columns carry the source alias as qualifier;
/// computed columns (aggregates, projections, window bounds) have an empty qualifier.
struct PlanColumn {
    std::string qualifier;
    std::string name;
    DataType type = DataType::Int64;

    std::string qualifiedName() const { return qualifier.empty() ? name : qualifier + "." + name; }
};

using PlanSchema = std::vector<PlanColumn>;

inline constexpr const char* kWindowStart = "window_start";
inline constexpr const char* kWindowEnd = "window_end";

/// Resolves a (possibly unqualified) column reference. Case-insensitive.
/// Throws UnknownColumn when missing or ambiguous.
size_t resolveColumn(const PlanSchema& schema, const std::string& qualifier, const std::string& name,
                     SourcePos pos = {}, const std::string& context = {});
std::optional<size_t> findColumn(const PlanSchema& schema, const std::string& qualifier, const std::string& name);

/// Static type of an expression whose column references resolve against schema.
/// Throws TypeMismatch / UnknownColumn.
DataType typeOf(const Expr& e, const PlanSchema& schema);

/// Qualified names of every column referenced by e.
void collectColumns(const ExprPtr& e, std::set<std::string>& out);

enum class NodeKind { StreamScan, TableScan, Filter, Project, WindowAggregate, WindowJoin, Sink };

std::string_view nodeKindName(NodeKind kind);

struct ProjectItem {
    ExprPtr expr;
    std::string name;
};

struct AggregateCall {
    AggFunc fn = AggFunc::Count;
    ExprPtr arg;// null for COUNT(*)
    std::string name;
    DataType type = DataType::Int64;
};

struct PlanNode;
using PlanPtr = std::shared_ptr<const PlanNode>;
using LogicalPlan = PlanPtr;

/// One operator of the logical plan. Immutable; rewrites rebuild the affected spine.
struct PlanNode {
    NodeKind kind = NodeKind::Sink;
    std::vector<PlanPtr> inputs;
    PlanSchema schema;
    bool unbounded = false;
    SourcePos pos;

    // StreamScan / TableScan
    std::string sourceName;
    std::string alias;
    std::vector<std::string> columns;// scanned subset, in source schema order
    std::string timestampColumn;     // streams only
    std::optional<int64_t> rangeMs;  // OVER (RANGE ... PRECEDING)
    bool bounded = false;            // stream read as a relation (no STREAM keyword)
    int partitionCount = 1;

    // Filter predicate / WindowJoin condition
    ExprPtr predicate;

    // Project
    std::vector<ProjectItem> items;

    // WindowAggregate
    std::optional<WindowFn> window;
    std::vector<ExprPtr> groupKeys;
    std::vector<AggregateCall> aggregates;

    // WindowJoin; nullopt means unbounded retention on that side
    std::optional<int64_t> leftWindowMs;
    std::optional<int64_t> rightWindowMs;
};

PlanPtr makeStreamScan(const StreamDef& def, std::string alias, std::vector<std::string> columns,
                       std::optional<int64_t> rangeMs, bool bounded, SourcePos pos);
PlanPtr makeTableScan(const TableDef& def, std::string alias, std::vector<std::string> columns, SourcePos pos);
PlanPtr makeFilter(PlanPtr input, ExprPtr predicate, SourcePos pos = {});
PlanPtr makeProject(PlanPtr input, std::vector<ProjectItem> items, SourcePos pos = {});
PlanPtr makeWindowAggregate(PlanPtr input, std::optional<WindowFn> window, std::vector<ExprPtr> groupKeys,
                            std::vector<AggregateCall> aggregates, SourcePos pos = {});
PlanPtr makeWindowJoin(PlanPtr left, PlanPtr right, std::optional<int64_t> leftWindowMs,
                       std::optional<int64_t> rightWindowMs, ExprPtr condition, SourcePos pos = {});
PlanPtr makeSink(PlanPtr input);

/// Rebuilds a node with new inputs, recomputing its schema.
PlanPtr withInputs(const PlanNode& node, std::vector<PlanPtr> inputs);

/// True when the plan contains a windowed aggregate (rows carry window bounds).
bool isWindowed(const PlanPtr& plan);
/// True when the plan contains any aggregate (rows carry a finality flag).
bool isAggregated(const PlanPtr& plan);

}// namespace streamql::plan
