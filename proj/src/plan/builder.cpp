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

#include <streamql/plan/planner.hpp>

#include <algorithm>

#include <streamql/sql/render.hpp>

namespace streamql::plan {

using sql::ExprKind;
using sql::QueryAst;
using sql::SourceRef;

namespace {

struct BoundSource {
    PlanPtr scan;
    const StreamDef* stream = nullptr;
    std::string alias;
};

BoundSource bindSource(const SourceRef& ref, const Catalog& catalog, bool isStream) {
    const CatalogEntry* entry = nullptr;
    try {
        entry = &catalog.resolve(ref.name);
    } catch (const Error& e) {
        throw Error(e.code(), e.message(), ref.pos);
    }
    BoundSource out;
    out.alias = ref.effectiveAlias();
    if (const auto* s = std::get_if<StreamDef>(entry)) {
        std::vector<std::string> cols;
        for (const auto& c : s->schema.columns) cols.push_back(c.name);
        std::optional<int64_t> range;
        if (ref.overWindow) range = ref.overWindow->precedingMs;
        out.scan = makeStreamScan(*s, out.alias, std::move(cols), range, !isStream, ref.pos);
        out.stream = s;
        return out;
    }
    const auto& t = std::get<TableDef>(*entry);
    if (ref.overWindow) {
        throw Error(ErrorCode::WindowMisuse, "OVER window on table '" + t.name + "'; only streams can be windowed",
                    ref.pos);
    }
    std::vector<std::string> cols;
    for (const auto& c : t.schema.columns) cols.push_back(c.name);
    out.scan = makeTableScan(t, out.alias, std::move(cols), ref.pos);
    return out;
}

/// Rewrites column references to the exact qualifier/name of the schema column they resolve to.
ExprPtr canonicalize(const ExprPtr& e, const PlanSchema& schema, const std::string& context) {
    switch (e->kind) {
        case ExprKind::Literal: return e;
        case ExprKind::Column: {
            const auto& col = schema[resolveColumn(schema, e->qualifier, e->name, e->pos, context)];
            return Expr::makeColumn(col.qualifier, col.name, e->pos);
        }
        case ExprKind::Unary: return Expr::makeUnary(e->unaryOp, canonicalize(e->operands[0], schema, context), e->pos);
        case ExprKind::Binary:
            return Expr::makeBinary(e->binaryOp, canonicalize(e->operands[0], schema, context),
                                    canonicalize(e->operands[1], schema, context), e->pos);
        case ExprKind::Aggregate:
            throw Error(ErrorCode::TypeMismatch, "aggregate function not allowed in " + context, e->pos);
    }
    return e;
}

/// Replaces aggregate calls by references to the aggregate's output column, registering new calls.
ExprPtr extractAggregates(const ExprPtr& e, const PlanSchema& input, std::vector<AggregateCall>& aggs) {
    if (e->kind == ExprKind::Aggregate) {
        ExprPtr arg;
        if (!e->countStar) {
            if (sql::containsAggregate(e->operands[0])) {
                throw Error(ErrorCode::TypeMismatch, "nested aggregate functions", e->pos);
            }
            arg = canonicalize(e->operands[0], input, "aggregate argument");
        }
        ExprPtr canonical = Expr::makeAggregate(e->aggFunc, arg, e->pos);
        std::string name = sql::renderExpr(*canonical);
        auto it = std::find_if(aggs.begin(), aggs.end(), [&](const AggregateCall& a) { return a.name == name; });
        if (it == aggs.end()) {
            typeOf(*canonical, input);
            aggs.push_back({e->aggFunc, arg, name, DataType::Int64});
        }
        return Expr::makeColumn("", name, e->pos);
    }
    if (e->operands.empty()) return e;
    auto copy = std::make_shared<Expr>(*e);
    for (auto& op : copy->operands) op = extractAggregates(op, input, aggs);
    return copy;
}

SourcePos firstAggregatePos(const ExprPtr& e) {
    if (!e) return {};
    if (e->kind == ExprKind::Aggregate) return e->pos;
    for (const auto& op : e->operands) {
        if (auto p = firstAggregatePos(op); p.valid()) return p;
    }
    return {};
}

std::string uniqueName(const std::string& base, std::vector<std::string>& taken) {
    auto clash = [&](const std::string& n) {
        return std::any_of(taken.begin(), taken.end(), [&](const std::string& t) { return equalsIgnoreCase(t, n); });
    };
    std::string name = base;
    for (int i = 0; clash(name); ++i) name = base + std::to_string(i);
    taken.push_back(name);
    return name;
}

}// namespace

LogicalPlan buildLogicalPlan(const QueryAst& ast, const Catalog& catalog) {
    std::vector<BoundSource> sources;
    sources.push_back(bindSource(ast.from, catalog, ast.isStream));
    if (ast.join) {
        sources.push_back(bindSource(ast.join->source, catalog, ast.isStream));
        if (equalsIgnoreCase(sources[0].alias, sources[1].alias)) {
            throw Error(ErrorCode::UnknownColumn,
                        "both join inputs are named '" + sources[1].alias + "'; give one of them an alias",
                        ast.join->source.pos);
        }
    }
    const bool hasStream = std::any_of(sources.begin(), sources.end(), [](const auto& s) { return s.stream; });
    if (ast.isStream && !hasStream) {
        throw Error(ErrorCode::WindowMisuse, "SELECT STREAM requires a stream source", ast.from.pos);
    }

    PlanPtr current = sources[0].scan;
    if (ast.join) {
        const auto& joinAst = *ast.join;
        PlanSchema joined = sources[0].scan->schema;
        joined.insert(joined.end(), sources[1].scan->schema.begin(), sources[1].scan->schema.end());
        ExprPtr on = canonicalize(joinAst.on, joined, "join condition");
        current = makeWindowJoin(sources[0].scan, sources[1].scan, sources[0].scan->rangeMs,
                                 sources[1].scan->rangeMs, on, joinAst.pos);
    }

    if (ast.where) {
        current = makeFilter(current, canonicalize(ast.where, current->schema, "WHERE clause"), ast.where->pos);
    }

    bool aggregated = !ast.groupBy.empty() || (ast.having != nullptr);
    for (const auto& item : ast.selectList) aggregated = aggregated || sql::containsAggregate(item.expr);

    std::vector<ExprPtr> selectExprs;
    for (const auto& item : ast.selectList) selectExprs.push_back(item.expr);
    ExprPtr having = ast.having;
    bool windowed = false;

    if (aggregated) {
        if (ast.selectStar) {
            throw Error(ErrorCode::TypeMismatch, "SELECT * cannot be combined with GROUP BY or aggregates",
                        ast.selectPos);
        }
        const PlanSchema& input = current->schema;
        std::optional<WindowFn> window;
        std::vector<ExprPtr> keys;
        for (const auto& g : ast.groupBy) {
            if (g.window) {
                WindowFn w = *g.window;
                const auto& col = input[resolveColumn(input, w.timeQualifier, w.timeColumn, w.pos, "window time column")];
                auto owner = std::find_if(sources.begin(), sources.end(),
                                          [&](const BoundSource& s) { return equalsIgnoreCase(s.alias, col.qualifier); });
                if (owner == sources.end() || !owner->stream ||
                    !equalsIgnoreCase(owner->stream->timestampColumn, col.name)) {
                    throw Error(ErrorCode::WindowMisuse,
                                "window function must use the stream's timestamp column, not '" + col.qualifiedName() +
                                    "'",
                                w.pos);
                }
                if (ast.join && sources[0].stream && sources[1].stream) {
                    throw Error(ErrorCode::WindowMisuse,
                                "windowed aggregation over a stream-stream join is not supported", w.pos);
                }
                w.timeQualifier = col.qualifier;
                w.timeColumn = col.name;
                window = w;
                windowed = true;
                continue;
            }
            ExprPtr key = canonicalize(g.column, input, "GROUP BY");
            if (std::none_of(keys.begin(), keys.end(), [&](const ExprPtr& k) { return sql::sameExpr(k, key); })) {
                keys.push_back(key);
            }
        }

        std::vector<AggregateCall> aggs;
        for (auto& e : selectExprs) e = extractAggregates(e, input, aggs);
        if (having) having = extractAggregates(having, input, aggs);

        SourcePos aggPos = ast.groupByPos;
        if (!aggPos.valid()) {
            for (const auto& item : ast.selectList) {
                if (auto p = firstAggregatePos(item.expr); p.valid()) {
                    aggPos = p;
                    break;
                }
            }
        }
        current = makeWindowAggregate(current, window, std::move(keys), std::move(aggs), aggPos);

        for (auto& e : selectExprs) e = canonicalize(e, current->schema, "not grouped or aggregated");
        if (having) {
            current = makeFilter(current, canonicalize(having, current->schema, "not grouped or aggregated"),
                                 having->pos);
        }
    } else {
        for (auto& e : selectExprs) e = canonicalize(e, current->schema, "select list");
    }

    std::vector<ProjectItem> items;
    std::vector<std::string> taken;
    if (ast.selectStar) {
        for (const auto& col : current->schema) {
            items.push_back({Expr::makeColumn(col.qualifier, col.name), uniqueName(col.name, taken)});
        }
    } else {
        for (size_t i = 0; i < ast.selectList.size(); ++i) {
            const auto& item = ast.selectList[i];
            std::string base = item.alias ? *item.alias
                : item.expr->kind == ExprKind::Column ? item.expr->name
                                                      : sql::renderExpr(*item.expr);
            items.push_back({selectExprs[i], uniqueName(base, taken)});
        }
    }
    if (windowed) {
        for (const char* bound : {kWindowStart, kWindowEnd}) {
            bool present = std::any_of(taken.begin(), taken.end(), [&](const auto& t) { return equalsIgnoreCase(t, bound); });
            if (!present) {
                items.push_back({Expr::makeColumn("", bound), bound});
                taken.emplace_back(bound);
            }
        }
    }
    current = makeProject(current, std::move(items), ast.selectPos);
    return makeSink(current);
}

std::string Diagnostic::str() const {
    std::string out(errorCodeName(code));
    if (pos.valid()) out += " at " + pos.str();
    return out + ": " + message;
}

}// namespace streamql::plan
