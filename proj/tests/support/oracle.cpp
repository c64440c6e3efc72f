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

#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <strings.h>

namespace streamql::testing {

using plan::NodeKind;
using plan::PlanNode;
using sql::BinaryOp;
using sql::ExprKind;

namespace {

struct Tuple {
    int64_t ts = 0;
    Row values;
};

using Relation = std::vector<Tuple>;

bool same(const std::string& a, const std::string& b) { return strcasecmp(a.c_str(), b.c_str()) == 0; }

size_t lookup(const plan::PlanSchema& schema, const sql::Expr& col) {
    for (size_t i = 0; i < schema.size(); ++i) {
        if (!same(schema[i].name, col.name)) continue;
        if (!col.qualifier.empty() && !same(schema[i].qualifier, col.qualifier)) continue;
        return i;
    }
    throw std::runtime_error("oracle: no column " + col.qualifiedName());
}

bool isNum(const Value& v) { return std::holds_alternative<int64_t>(v) || std::holds_alternative<double>(v); }

double num(const Value& v) {
    return std::holds_alternative<int64_t>(v) ? static_cast<double>(std::get<int64_t>(v)) : std::get<double>(v);
}

int cmp(const Value& a, const Value& b) {
    if (std::holds_alternative<int64_t>(a) && std::holds_alternative<int64_t>(b)) {
        return (std::get<int64_t>(a) > std::get<int64_t>(b)) - (std::get<int64_t>(a) < std::get<int64_t>(b));
    }
    if (isNum(a) && isNum(b)) return (num(a) > num(b)) - (num(a) < num(b));
    if (std::holds_alternative<std::string>(a)) return std::get<std::string>(a).compare(std::get<std::string>(b)) < 0
            ? -1
            : (std::get<std::string>(a) == std::get<std::string>(b) ? 0 : 1);
    return static_cast<int>(std::get<bool>(a)) - static_cast<int>(std::get<bool>(b));
}

Value eval(const sql::Expr& e, const plan::PlanSchema& schema, const Row& row) {
    switch (e.kind) {
        case ExprKind::Literal: return e.literal;
        case ExprKind::Column: return row[lookup(schema, e)];
        case ExprKind::Unary: {
            Value v = eval(*e.operands[0], schema, row);
            if (isNull(v)) return v;
            if (e.unaryOp == sql::UnaryOp::Not) return !std::get<bool>(v);
            if (std::holds_alternative<int64_t>(v)) return static_cast<int64_t>(-static_cast<__int128>(std::get<int64_t>(v)));
            return -std::get<double>(v);
        }
        case ExprKind::Binary: break;
        case ExprKind::Aggregate: throw std::runtime_error("oracle: stray aggregate");
    }
    const Value l = eval(*e.operands[0], schema, row);
    const Value r = eval(*e.operands[1], schema, row);
    switch (e.binaryOp) {
        case BinaryOp::And:
            if ((!isNull(l) && !std::get<bool>(l)) || (!isNull(r) && !std::get<bool>(r))) return false;
            if (isNull(l) || isNull(r)) return std::monostate{};
            return true;
        case BinaryOp::Or:
            if ((!isNull(l) && std::get<bool>(l)) || (!isNull(r) && std::get<bool>(r))) return true;
            if (isNull(l) || isNull(r)) return std::monostate{};
            return false;
        default: break;
    }
    if (isNull(l) || isNull(r)) return std::monostate{};
    switch (e.binaryOp) {
        case BinaryOp::Eq: return cmp(l, r) == 0;
        case BinaryOp::Ne: return cmp(l, r) != 0;
        case BinaryOp::Lt: return cmp(l, r) < 0;
        case BinaryOp::Le: return cmp(l, r) <= 0;
        case BinaryOp::Gt: return cmp(l, r) > 0;
        case BinaryOp::Ge: return cmp(l, r) >= 0;
        default: break;
    }
    if (std::holds_alternative<int64_t>(l) && std::holds_alternative<int64_t>(r)) {
        // 128-bit then truncate, which is two's complement wraparound
        const __int128 x = std::get<int64_t>(l), y = std::get<int64_t>(r);
        __int128 z = 0;
        switch (e.binaryOp) {
            case BinaryOp::Add: z = x + y; break;
            case BinaryOp::Sub: z = x - y; break;
            case BinaryOp::Mul: z = x * y; break;
            default:
                if (y == 0) return std::monostate{};
                z = x / y;
        }
        return static_cast<int64_t>(static_cast<uint64_t>(static_cast<unsigned __int128>(z)));
    }
    const double x = num(l), y = num(r);
    switch (e.binaryOp) {
        case BinaryOp::Add: return x + y;
        case BinaryOp::Sub: return x - y;
        case BinaryOp::Mul: return x * y;
        default: return y == 0.0 ? Value(std::monostate{}) : Value(x / y);
    }
}

bool truthy(const Value& v) { return std::holds_alternative<bool>(v) && std::get<bool>(v); }

/// Every [start, start + size) with start a non-negative multiple of slide that holds ts.
std::vector<std::pair<int64_t, int64_t>> windowsOf(const sql::WindowFn& w, int64_t ts) {
    std::vector<std::pair<int64_t, int64_t>> out;
    for (int64_t start = 0; start <= ts; start += w.slideMs) {
        if (ts < start + w.sizeMs) out.emplace_back(start, start + w.sizeMs);
    }
    return out;
}

Value aggregate(const plan::AggregateCall& call, const std::vector<Value>& values) {
    std::vector<Value> present;
    for (const auto& v : values) {
        if (!isNull(v)) present.push_back(v);
    }
    if (call.fn == sql::AggFunc::Count) return static_cast<int64_t>(call.arg ? present.size() : values.size());
    if (present.empty()) return std::monostate{};
    switch (call.fn) {
        case sql::AggFunc::Sum:
            if (call.type == DataType::Int64) {
                uint64_t s = 0;
                for (const auto& v : present) s += static_cast<uint64_t>(std::get<int64_t>(v));
                return static_cast<int64_t>(s);
            } else {
                double s = 0;
                for (const auto& v : present) s += num(v);
                return s;
            }
        case sql::AggFunc::Avg: {
            long double s = 0;
            for (const auto& v : present) s += num(v);
            return static_cast<double>(s / static_cast<long double>(present.size()));
        }
        case sql::AggFunc::Min:
            return *std::min_element(present.begin(), present.end(), [](const Value& a, const Value& b) { return cmp(a, b) < 0; });
        case sql::AggFunc::Max:
            return *std::max_element(present.begin(), present.end(), [](const Value& a, const Value& b) { return cmp(a, b) < 0; });
        default: break;
    }
    return std::monostate{};
}

class Interpreter {
  public:
    Interpreter(const Catalog& catalog, const Dataset& data) : catalog_(catalog), data_(data) {}

    Relation run(const PlanNode& n) {
        switch (n.kind) {
            case NodeKind::StreamScan: return scanStream(n);
            case NodeKind::TableScan: return scanTable(n);
            case NodeKind::Filter: {
                const auto& child = *n.inputs[0];
                Relation out;
                for (auto& t : run(child)) {
                    if (truthy(eval(*n.predicate, child.schema, t.values))) out.push_back(std::move(t));
                }
                return out;
            }
            case NodeKind::Project: {
                const auto& child = *n.inputs[0];
                Relation out;
                for (const auto& t : run(child)) {
                    Tuple p{t.ts, {}};
                    for (const auto& item : n.items) p.values.push_back(eval(*item.expr, child.schema, t.values));
                    out.push_back(std::move(p));
                }
                return out;
            }
            case NodeKind::WindowAggregate: return aggregateNode(n);
            case NodeKind::WindowJoin: return joinNode(n);
            case NodeKind::Sink: return run(*n.inputs[0]);
        }
        throw std::runtime_error("oracle: unknown node");
    }

  private:
    Relation scanStream(const PlanNode& n) {
        const StreamDef* def = catalog_.findStream(n.sourceName);
        Relation out;
        auto it = data_.find(def->name);
        if (it == data_.end()) return out;
        for (const auto& event : it->second) {
            Tuple t;
            t.ts = event.at(def->timestampColumn).get<int64_t>();
            for (const auto& c : n.schema) {
                const Json& field = event.contains(c.name) ? event.at(c.name) : Json();
                t.values.push_back(field.is_null() ? Value{} : *valueFromJson(field, c.type));
            }
            out.push_back(std::move(t));
        }
        return out;
    }

    Relation scanTable(const PlanNode& n) {
        const TableDef* def = catalog_.findTable(n.sourceName);
        Relation out;
        for (const auto& row : def->rows) {
            Tuple t{kMinTimestamp, {}};
            for (const auto& c : n.schema) {
                for (size_t i = 0; i < def->schema.columns.size(); ++i) {
                    if (same(def->schema.columns[i].name, c.name)) t.values.push_back(row[i]);
                }
            }
            out.push_back(std::move(t));
        }
        return out;
    }

    Relation aggregateNode(const PlanNode& n) {
        const auto& child = *n.inputs[0];
        struct Group {
            int64_t start, end;
            Row key;
            std::vector<std::vector<Value>> args;
        };
        std::vector<Group> groups;
        auto groupFor = [&](int64_t start, int64_t end, const Row& key) -> Group& {
            for (auto& g : groups) {
                if (g.start == start && g.end == end && g.key.size() == key.size() &&
                    std::equal(key.begin(), key.end(), g.key.begin(), [](const Value& a, const Value& b) {
                        return isNull(a) ? isNull(b) : (!isNull(b) && cmp(a, b) == 0);
                    })) {
                    return g;
                }
            }
            groups.push_back({start, end, key, std::vector<std::vector<Value>>(n.aggregates.size())});
            return groups.back();
        };
        for (const auto& t : run(child)) {
            Row key;
            for (const auto& k : n.groupKeys) key.push_back(eval(*k, child.schema, t.values));
            std::vector<std::pair<int64_t, int64_t>> windows;
            if (n.window) {
                windows = windowsOf(*n.window, t.ts);
            } else {
                windows.emplace_back(kMinTimestamp, kMaxTimestamp);
            }
            for (const auto& [start, end] : windows) {
                Group& g = groupFor(start, end, key);
                for (size_t i = 0; i < n.aggregates.size(); ++i) {
                    const auto& call = n.aggregates[i];
                    g.args[i].push_back(call.arg ? eval(*call.arg, child.schema, t.values) : Value(true));
                }
            }
        }
        Relation out;
        for (const auto& g : groups) {
            Tuple t{g.end, g.key};
            for (size_t i = 0; i < n.aggregates.size(); ++i) t.values.push_back(aggregate(n.aggregates[i], g.args[i]));
            if (n.window) {
                t.values.emplace_back(g.start);
                t.values.emplace_back(g.end);
            }
            out.push_back(std::move(t));
        }
        return out;
    }

    Relation joinNode(const PlanNode& n) {
        const Relation left = run(*n.inputs[0]);
        const Relation right = run(*n.inputs[1]);
        Relation out;
        for (const auto& a : left) {
            for (const auto& b : right) {
                const __int128 diff = static_cast<__int128>(a.ts) - b.ts;
                if (n.leftWindowMs && diff < -static_cast<__int128>(*n.leftWindowMs)) continue;
                if (n.rightWindowMs && diff > static_cast<__int128>(*n.rightWindowMs)) continue;
                Row joined = a.values;
                joined.insert(joined.end(), b.values.begin(), b.values.end());
                if (!truthy(eval(*n.predicate, n.schema, joined))) continue;
                out.push_back({std::max(a.ts, b.ts), std::move(joined)});
            }
        }
        return out;
    }

    const Catalog& catalog_;
    const Dataset& data_;
};

}// namespace

std::vector<Json> oracleEvaluate(const plan::LogicalPlan& plan, const Catalog& catalog, const Dataset& data) {
    Interpreter interp(catalog, data);
    const Relation rows = interp.run(*plan);
    const bool aggregated = plan::isAggregated(plan);
    std::vector<Json> out;
    for (const auto& t : rows) {
        Json obj = Json::object();
        for (size_t i = 0; i < plan->schema.size(); ++i) obj[plan->schema[i].name] = valueToJson(t.values[i]);
        if (aggregated) obj["finality"] = "FINAL";
        out.push_back(std::move(obj));
    }
    return out;
}

}// namespace streamql::testing
