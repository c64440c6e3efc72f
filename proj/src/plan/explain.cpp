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

#include <streamql/sql/render.hpp>

namespace streamql::plan {

namespace {

std::string list(const std::vector<std::string>& items) {
    std::string out = "[";
    for (size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i];
    }
    return out + "]";
}

std::string windowMs(const std::optional<int64_t>& w) { return w ? std::to_string(*w) : "unbounded"; }

std::string attributes(const PlanNode& n) {
    std::vector<std::string> attrs;
    switch (n.kind) {
        case NodeKind::StreamScan:
            attrs.push_back("stream=" + n.sourceName);
            if (n.alias != n.sourceName) attrs.push_back("alias=" + n.alias);
            attrs.push_back("columns=" + list(n.columns));
            attrs.push_back(std::string("mode=") + (n.bounded ? "bounded" : "unbounded"));
            if (n.rangeMs) attrs.push_back("rangeMs=" + std::to_string(*n.rangeMs));
            break;
        case NodeKind::TableScan:
            attrs.push_back("table=" + n.sourceName);
            if (n.alias != n.sourceName) attrs.push_back("alias=" + n.alias);
            attrs.push_back("columns=" + list(n.columns));
            break;
        case NodeKind::Filter: attrs.push_back("condition=" + sql::renderExpr(n.predicate)); break;
        case NodeKind::Project: {
            std::vector<std::string> exprs;
            for (const auto& item : n.items) {
                std::string e = sql::renderExpr(item.expr);
                if (!(item.expr->kind == sql::ExprKind::Column && item.expr->name == item.name)) e += " AS " + item.name;
                exprs.push_back(std::move(e));
            }
            attrs.push_back("exprs=" + list(exprs));
            break;
        }
        case NodeKind::WindowAggregate: {
            attrs.push_back("window=" + (n.window ? sql::renderWindowFn(*n.window) : std::string("none")));
            std::vector<std::string> keys, aggs;
            for (const auto& k : n.groupKeys) keys.push_back(sql::renderExpr(k));
            for (const auto& a : n.aggregates) aggs.push_back(a.name);
            attrs.push_back("keys=" + list(keys));
            attrs.push_back("aggs=" + list(aggs));
            break;
        }
        case NodeKind::WindowJoin:
            attrs.push_back("leftWindowMs=" + windowMs(n.leftWindowMs));
            attrs.push_back("rightWindowMs=" + windowMs(n.rightWindowMs));
            attrs.push_back("condition=" + sql::renderExpr(n.predicate));
            break;
        case NodeKind::Sink: {
            std::vector<std::string> cols;
            for (const auto& c : n.schema) cols.push_back(c.name);
            attrs.push_back("columns=" + list(cols));
            break;
        }
    }
    std::string out;
    for (size_t i = 0; i < attrs.size(); ++i) {
        if (i) out += ", ";
        out += attrs[i];
    }
    return out;
}

void explain(const PlanNode& n, int depth, std::string& out) {
    out.append(static_cast<size_t>(depth) * 2, ' ');
    out += nodeKindName(n.kind);
    out += " [" + attributes(n) + "]\n";
    for (const auto& in : n.inputs) explain(*in, depth + 1, out);
}

}// namespace

std::string explainLogical(const LogicalPlan& plan) {
    std::string out;
    if (plan) explain(*plan, 0, out);
    return out;
}

}// namespace streamql::plan
