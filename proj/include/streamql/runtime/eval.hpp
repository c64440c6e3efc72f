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

#include <vector>

#include <streamql/physical/topology.hpp>
#include <streamql/plan/logical_plan.hpp>
#include <streamql/value.hpp>

namespace streamql::runtime {

/// Expression with column references resolved to row positions.
/// NULL propagates through arithmetic and comparisons; AND/OR use three-valued logic;
/// integer division truncates and division by zero yields NULL.
class BoundExpr {
  public:
    BoundExpr() = default;
    static BoundExpr bind(const plan::ExprPtr& expr, const plan::PlanSchema& schema);

    Value eval(const Row& row) const;

  private:
    sql::ExprKind kind_ = sql::ExprKind::Literal;
    Value literal_;
    size_t column_ = 0;
    sql::UnaryOp unaryOp_ = sql::UnaryOp::Not;
    sql::BinaryOp binaryOp_ = sql::BinaryOp::And;
    std::vector<BoundExpr> operands_;
};

/// Only TRUE passes a filter.
inline bool isTrue(const Value& v) { return std::holds_alternative<bool>(v) && std::get<bool>(v); }

/// Three-way comparison of two non-null values of comparable types.
int compareValues(const Value& a, const Value& b);

/// Shuffle and join key for a tuple of values: numbers are normalized so 5 and 5.0 agree,
/// fields are separated by 0x1f. nullopt if any value is NULL.
std::optional<std::string> routingKey(const Row& values);

/// Fused Filter/Project ops of a stage, applied to the operator's output rows.
class Chain {
  public:
    Chain() = default;
    explicit Chain(const std::vector<physical::ChainOp>& ops);

    /// nullopt when a filter rejects the row.
    std::optional<Row> apply(Row row) const;
    bool empty() const { return steps_.empty(); }

  private:
    struct Step {
        bool filter = true;
        BoundExpr predicate;
        std::vector<BoundExpr> items;
    };
    std::vector<Step> steps_;
};

}// namespace streamql::runtime
