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

#include <string>
#include <vector>

#include <streamql/catalog.hpp>
#include <streamql/plan/logical_plan.hpp>
#include <streamql/sql/ast.hpp>

namespace streamql::plan {

/// Stream-semantics finding; the code determines the message template.
struct Diagnostic {
    ErrorCode code = ErrorCode::BlockingQuery;
    std::string message;
    SourcePos pos;

    std::string str() const;
};

/// AST -> logical plan in canonical operator order
///   Sink <- Project <- Filter(HAVING) <- WindowAggregate <- Filter(WHERE) <- WindowJoin? <- Scans.
/// Throws UnknownName, UnknownColumn, TypeMismatch or WindowMisuse (positioned).
LogicalPlan buildLogicalPlan(const sql::QueryAst& ast, const Catalog& catalog);

/// Empty iff the plan can run on unbounded input. Flags aggregates over unbounded input without a
/// window function and stream-stream joins where either side lacks an OVER window.
std::vector<Diagnostic> validateStreamSemantics(const LogicalPlan& plan);

/// Throws Error(BlockingQuery) carrying the first diagnostic, if any.
void requireExecutable(const LogicalPlan& plan);

/// Heuristic rewrites to fixpoint: filter pushdown (below Project, into one join side, merging
/// stacked filters) and projection pruning of scans (stream timestamp columns are always kept).
LogicalPlan applyRewrites(const LogicalPlan& plan);

/// Indented tree, one node per line, two spaces per level: `NodeName [attr=value, ...]`.
std::string explainLogical(const LogicalPlan& plan);

}// namespace streamql::plan
