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

#include <streamql/plan/logical_plan.hpp>

#include <algorithm>

#include <streamql/sql/render.hpp>

namespace streamql::plan {

using sql::BinaryOp;
using sql::ExprKind;
using sql::UnaryOp;

std::string_view nodeKindName(NodeKind kind) {
    switch (kind) {
        case NodeKind::StreamScan: return "StreamScan";
        case NodeKind::TableScan: return "TableScan";
        case NodeKind::Filter: return "Filter";
        case NodeKind::Project: return "Project";
        case NodeKind::WindowAggregate: return "WindowAggregate";
        case NodeKind::WindowJoin: return "WindowJoin";
        case NodeKind::Sink: return "Sink";
    }
    return "?";
}

std::optional<size_t> findColumn(const PlanSchema& schema, const std::string& qualifier, const std::string& name) {
    std::optional<size_t> found;
    for (size_t i = 0; i < schema.size(); ++i) {
        if (!equalsIgnoreCase(schema[i].name, name)) continue;
        if (!qualifier.empty() && !equalsIgnoreCase(schema[i].qualifier, qualifier)) continue;
        if (found) return std::nullopt;
        found = i;
    }
    return found;
}

size_t resolveColumn(const PlanSchema& schema, const std::string& qualifier, const std::string& name, SourcePos pos,
                     const std::string& context) {
    size_t matches = 0;
    size_t index = 0;
    for (size_t i = 0; i < schema.size(); ++i) {
        if (!equalsIgnoreCase(schema[i].name, name)) continue;
        if (!qualifier.empty() && !equalsIgnoreCase(schema[i].qualifier, qualifier)) continue;
        ++matches;
        index = i;
    }
    const std::string shown = qualifier.empty() ? name : qualifier + "." + name;
    if (matches == 0) {
        throw Error(ErrorCode::UnknownColumn,
                    "unknown column '" + shown + "'" + (context.empty() ? "" : " (" + context + ")"), pos);
    }
    if (matches > 1) {
        throw Error(ErrorCode::UnknownColumn, "column reference '" + shown + "' is ambiguous", pos);
    }
    return index;
}

namespace {

DataType literalType(const Value& v, SourcePos pos) {
    if (std::holds_alternative<int64_t>(v)) return DataType::Int64;
    if (std::holds_alternative<double>(v)) return DataType::Float64;
    if (std::holds_alternative<std::string>(v)) return DataType::String;
    if (std::holds_alternative<bool>(v)) return DataType::Bool;
    throw Error(ErrorCode::TypeMismatch, "NULL literal has no type", pos);
}

[[noreturn]] void mismatch(const Expr& e, const std::string& what) {
    throw Error(ErrorCode::TypeMismatch, what + " in '" + sql::renderExpr(e) + "'", e.pos);
}

}// namespace

DataType typeOf(const Expr& e, const PlanSchema& schema) {
    switch (e.kind) {
        case ExprKind::Literal: return literalType(e.literal, e.pos);
        case ExprKind::Column: return schema[resolveColumn(schema, e.qualifier, e.name, e.pos)].type;
        case ExprKind::Unary: {
            DataType t = typeOf(*e.operands[0], schema);
            if (e.unaryOp == UnaryOp::Not) {
                if (t != DataType::Bool) mismatch(e, "NOT requires a BOOL operand");
                return DataType::Bool;
            }
            if (!isNumeric(t)) mismatch(e, "unary minus requires a numeric operand");
            return t;
        }
        case ExprKind::Binary: {
            DataType l = typeOf(*e.operands[0], schema);
            DataType r = typeOf(*e.operands[1], schema);
            switch (e.binaryOp) {
                case BinaryOp::And:
                case BinaryOp::Or:
                    if (l != DataType::Bool || r != DataType::Bool) mismatch(e, "AND/OR require BOOL operands");
                    return DataType::Bool;
                case BinaryOp::Add:
                case BinaryOp::Sub:
                case BinaryOp::Mul:
                case BinaryOp::Div:
                    if (!isNumeric(l) || !isNumeric(r)) mismatch(e, "arithmetic requires numeric operands");
                    return (l == DataType::Int64 && r == DataType::Int64) ? DataType::Int64 : DataType::Float64;
                default:
                    if (!(isNumeric(l) && isNumeric(r)) && l != r) {
                        mismatch(e, "cannot compare " + std::string(dataTypeName(l)) + " with " +
                                     std::string(dataTypeName(r)));
                    }
                    return DataType::Bool;
            }
        }
        case ExprKind::Aggregate: {
            if (e.countStar) return DataType::Int64;
            DataType t = typeOf(*e.operands[0], schema);
            switch (e.aggFunc) {
                case AggFunc::Count: return DataType::Int64;
                case AggFunc::Sum:
                    if (!isNumeric(t)) mismatch(e, "SUM requires a numeric argument");
                    return t;
                case AggFunc::Avg:
                    if (!isNumeric(t)) mismatch(e, "AVG requires a numeric argument");
                    return DataType::Float64;
                case AggFunc::Min:
                case AggFunc::Max: return t;
            }
        }
    }
    throw Error(ErrorCode::TypeMismatch, "untyped expression", e.pos);
}

void collectColumns(const ExprPtr& e, std::set<std::string>& out) {
    if (!e) return;
    if (e->kind == ExprKind::Column) out.insert(e->qualifiedName());
    for (const auto& op : e->operands) collectColumns(op, out);
}

namespace {

PlanSchema scanSchema(const Schema& source, const std::string& alias, const std::vector<std::string>& columns) {
    PlanSchema out;
    for (const auto& c : columns) {
        const Column* col = source.find(c);
        out.push_back({alias, col->name, col->type});
    }
    return out;
}

void requireBool(const Expr& e, const PlanSchema& schema, const char* what) {
    if (typeOf(e, schema) != DataType::Bool) {
        throw Error(ErrorCode::TypeMismatch, std::string(what) + " must be a BOOL expression", e.pos);
    }
}

}// namespace

PlanPtr makeStreamScan(const StreamDef& def, std::string alias, std::vector<std::string> columns,
                       std::optional<int64_t> rangeMs, bool bounded, SourcePos pos) {
    auto n = std::make_shared<PlanNode>();
    n->kind = NodeKind::StreamScan;
    n->sourceName = def.name;
    n->alias = std::move(alias);
    n->columns = std::move(columns);
    n->timestampColumn = def.timestampColumn;
    n->rangeMs = rangeMs;
    n->bounded = bounded;
    n->partitionCount = def.partitionCount;
    n->schema = scanSchema(def.schema, n->alias, n->columns);
    n->unbounded = !bounded;
    n->pos = pos;
    return n;
}

PlanPtr makeTableScan(const TableDef& def, std::string alias, std::vector<std::string> columns, SourcePos pos) {
    auto n = std::make_shared<PlanNode>();
    n->kind = NodeKind::TableScan;
    n->sourceName = def.name;
    n->alias = std::move(alias);
    n->columns = std::move(columns);
    n->bounded = true;
    n->schema = scanSchema(def.schema, n->alias, n->columns);
    n->pos = pos;
    return n;
}

PlanPtr makeFilter(PlanPtr input, ExprPtr predicate, SourcePos pos) {
    requireBool(*predicate, input->schema, "filter condition");
    auto n = std::make_shared<PlanNode>();
    n->kind = NodeKind::Filter;
    n->schema = input->schema;
    n->unbounded = input->unbounded;
    n->predicate = std::move(predicate);
    n->pos = pos;
    n->inputs = {std::move(input)};
    return n;
}

PlanPtr makeProject(PlanPtr input, std::vector<ProjectItem> items, SourcePos pos) {
    auto n = std::make_shared<PlanNode>();
    n->kind = NodeKind::Project;
    for (const auto& item : items) {
        n->schema.push_back({"", item.name, typeOf(*item.expr, input->schema)});
    }
    n->unbounded = input->unbounded;
    n->items = std::move(items);
    n->pos = pos;
    n->inputs = {std::move(input)};
    return n;
}

PlanPtr makeWindowAggregate(PlanPtr input, std::optional<WindowFn> window, std::vector<ExprPtr> groupKeys,
                            std::vector<AggregateCall> aggregates, SourcePos pos) {
    auto n = std::make_shared<PlanNode>();
    n->kind = NodeKind::WindowAggregate;
    for (const auto& k : groupKeys) {
        const auto& col = input->schema[resolveColumn(input->schema, k->qualifier, k->name, k->pos)];
        n->schema.push_back(col);
    }
    for (auto& a : aggregates) {
        if (a.arg) {
            a.type = typeOf(*Expr::makeAggregate(a.fn, a.arg), input->schema);
        } else {
            a.type = DataType::Int64;
        }
        n->schema.push_back({"", a.name, a.type});
    }
    if (window) {
        n->schema.push_back({"", kWindowStart, DataType::Int64});
        n->schema.push_back({"", kWindowEnd, DataType::Int64});
    }
    n->unbounded = input->unbounded;
    n->window = std::move(window);
    n->groupKeys = std::move(groupKeys);
    n->aggregates = std::move(aggregates);
    n->pos = pos;
    n->inputs = {std::move(input)};
    return n;
}

PlanPtr makeWindowJoin(PlanPtr left, PlanPtr right, std::optional<int64_t> leftWindowMs,
                       std::optional<int64_t> rightWindowMs, ExprPtr condition, SourcePos pos) {
    auto n = std::make_shared<PlanNode>();
    n->kind = NodeKind::WindowJoin;
    n->schema = left->schema;
    n->schema.insert(n->schema.end(), right->schema.begin(), right->schema.end());
    requireBool(*condition, n->schema, "join condition");
    n->unbounded = left->unbounded || right->unbounded;
    n->leftWindowMs = leftWindowMs;
    n->rightWindowMs = rightWindowMs;
    n->predicate = std::move(condition);
    n->pos = pos;
    n->inputs = {std::move(left), std::move(right)};
    return n;
}

PlanPtr makeSink(PlanPtr input) {
    auto n = std::make_shared<PlanNode>();
    n->kind = NodeKind::Sink;
    n->schema = input->schema;
    n->unbounded = input->unbounded;
    n->inputs = {std::move(input)};
    return n;
}

PlanPtr withInputs(const PlanNode& node, std::vector<PlanPtr> inputs) {
    switch (node.kind) {
        case NodeKind::StreamScan:
        case NodeKind::TableScan: return std::make_shared<PlanNode>(node);
        case NodeKind::Filter: return makeFilter(inputs.at(0), node.predicate, node.pos);
        case NodeKind::Project: return makeProject(inputs.at(0), node.items, node.pos);
        case NodeKind::WindowAggregate:
            return makeWindowAggregate(inputs.at(0), node.window, node.groupKeys, node.aggregates, node.pos);
        case NodeKind::WindowJoin:
            return makeWindowJoin(inputs.at(0), inputs.at(1), node.leftWindowMs, node.rightWindowMs, node.predicate,
                                  node.pos);
        case NodeKind::Sink: return makeSink(inputs.at(0));
    }
    throw Error(ErrorCode::UnsupportedPlan, "unknown node kind");
}

namespace {
bool anyNode(const PlanPtr& p, bool (*pred)(const PlanNode&)) {
    if (!p) return false;
    if (pred(*p)) return true;
    return std::any_of(p->inputs.begin(), p->inputs.end(), [&](const PlanPtr& c) { return anyNode(c, pred); });
}
}// namespace

bool isWindowed(const PlanPtr& plan) {
    return anyNode(plan, [](const PlanNode& n) { return n.kind == NodeKind::WindowAggregate && n.window.has_value(); });
}

bool isAggregated(const PlanPtr& plan) {
    return anyNode(plan, [](const PlanNode& n) { return n.kind == NodeKind::WindowAggregate; });
}

}// namespace streamql::plan
