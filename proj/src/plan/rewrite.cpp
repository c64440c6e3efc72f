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

namespace streamql::plan {

using sql::BinaryOp;
using sql::ExprKind;

namespace {

void splitConjuncts(const ExprPtr& e, std::vector<ExprPtr>& out) {
    if (e->kind == ExprKind::Binary && e->binaryOp == BinaryOp::And) {
        splitConjuncts(e->operands[0], out);
        splitConjuncts(e->operands[1], out);
    } else {
        out.push_back(e);
    }
}

ExprPtr conjoin(const std::vector<ExprPtr>& parts) {
    ExprPtr out = parts.front();
    for (size_t i = 1; i < parts.size(); ++i) out = Expr::makeBinary(BinaryOp::And, out, parts[i], parts[i]->pos);
    return out;
}

bool resolvesIn(const ExprPtr& e, const PlanSchema& schema) {
    std::set<std::string> cols;
    collectColumns(e, cols);
    if (cols.empty()) return false;
    return std::all_of(cols.begin(), cols.end(), [&](const std::string& q) {
        return std::any_of(schema.begin(), schema.end(), [&](const PlanColumn& c) { return c.qualifiedName() == q; });
    });
}

/// Inlines project outputs referenced by e.
ExprPtr substitute(const ExprPtr& e, const std::vector<ProjectItem>& items) {
    if (e->kind == ExprKind::Column && e->qualifier.empty()) {
        for (const auto& item : items) {
            if (item.name == e->name) return item.expr;
        }
    }
    if (e->operands.empty()) return e;
    auto copy = std::make_shared<Expr>(*e);
    for (auto& op : copy->operands) op = substitute(op, items);
    return copy;
}

PlanPtr pushFilters(const PlanPtr& node, bool& changed) {
    std::vector<PlanPtr> inputs;
    bool childChanged = false;
    for (const auto& in : node->inputs) {
        bool c = false;
        inputs.push_back(pushFilters(in, c));
        childChanged = childChanged || c;
    }
    changed = changed || childChanged;
    PlanPtr n = childChanged ? withInputs(*node, inputs) : node;
    if (n->kind != NodeKind::Filter) return n;

    const PlanPtr& child = n->inputs[0];
    switch (child->kind) {
        case NodeKind::Filter:
            changed = true;
            return makeFilter(child->inputs[0], Expr::makeBinary(BinaryOp::And, child->predicate, n->predicate), child->pos);
        case NodeKind::Project:
            changed = true;
            return makeProject(makeFilter(child->inputs[0], substitute(n->predicate, child->items), n->pos), child->items,
                               child->pos);
        case NodeKind::WindowJoin: {
            std::vector<ExprPtr> parts, left, right, rest;
            splitConjuncts(n->predicate, parts);
            for (const auto& p : parts) {
                if (resolvesIn(p, child->inputs[0]->schema)) {
                    left.push_back(p);
                } else if (resolvesIn(p, child->inputs[1]->schema)) {
                    right.push_back(p);
                } else {
                    rest.push_back(p);
                }
            }
            if (left.empty() && right.empty()) return n;
            changed = true;
            PlanPtr l = left.empty() ? child->inputs[0] : makeFilter(child->inputs[0], conjoin(left), n->pos);
            PlanPtr r = right.empty() ? child->inputs[1] : makeFilter(child->inputs[1], conjoin(right), n->pos);
            PlanPtr join = withInputs(*child, {l, r});
            return rest.empty() ? join : makeFilter(join, conjoin(rest), n->pos);
        }
        default: return n;
    }
}

PlanPtr pruneScan(const PlanPtr& scan, const std::set<std::string>& required, bool& changed) {
    auto copy = std::make_shared<PlanNode>(*scan);
    copy->columns.clear();
    copy->schema.clear();
    for (size_t i = 0; i < scan->columns.size(); ++i) {
        const bool keep = required.count(scan->schema[i].qualifiedName()) > 0 ||
            (scan->kind == NodeKind::StreamScan && scan->columns[i] == scan->timestampColumn);
        if (keep) {
            copy->columns.push_back(scan->columns[i]);
            copy->schema.push_back(scan->schema[i]);
        }
    }
    if (copy->columns.size() == scan->columns.size()) return scan;
    changed = true;
    return copy;
}

PlanPtr prune(const PlanPtr& node, const std::set<std::string>& required, bool& changed) {
    std::vector<std::set<std::string>> childRequired(node->inputs.size());
    switch (node->kind) {
        case NodeKind::StreamScan:
        case NodeKind::TableScan: return pruneScan(node, required, changed);
        case NodeKind::Sink:
            for (const auto& c : node->inputs[0]->schema) childRequired[0].insert(c.qualifiedName());
            break;
        case NodeKind::Project:
            for (const auto& item : node->items) collectColumns(item.expr, childRequired[0]);
            break;
        case NodeKind::Filter:
            childRequired[0] = required;
            collectColumns(node->predicate, childRequired[0]);
            break;
        case NodeKind::WindowAggregate:
            for (const auto& k : node->groupKeys) collectColumns(k, childRequired[0]);
            for (const auto& a : node->aggregates) collectColumns(a.arg, childRequired[0]);
            if (node->window) {
                childRequired[0].insert(Expr::makeColumn(node->window->timeQualifier, node->window->timeColumn)->qualifiedName());
            }
            break;
        case NodeKind::WindowJoin: {
            std::set<std::string> all = required;
            collectColumns(node->predicate, all);
            for (size_t side = 0; side < 2; ++side) {
                for (const auto& c : node->inputs[side]->schema) {
                    if (all.count(c.qualifiedName())) childRequired[side].insert(c.qualifiedName());
                }
            }
            break;
        }
    }
    std::vector<PlanPtr> inputs;
    bool childChanged = false;
    for (size_t i = 0; i < node->inputs.size(); ++i) {
        bool c = false;
        inputs.push_back(prune(node->inputs[i], childRequired[i], c));
        childChanged = childChanged || c;
    }
    if (!childChanged) return node;
    changed = true;
    return withInputs(*node, std::move(inputs));
}

}// namespace

LogicalPlan applyRewrites(const LogicalPlan& plan) {
    PlanPtr current = plan;
    // Each pass strictly lowers filter depth or scanned column count, so this terminates well before the cap.
    for (int pass = 0; pass < 64; ++pass) {
        bool changed = false;
        current = pushFilters(current, changed);
        current = prune(current, {}, changed);
        if (!changed) break;
    }
    return current;
}

}// namespace streamql::plan
