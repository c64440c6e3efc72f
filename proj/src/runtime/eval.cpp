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

#include <streamql/runtime/eval.hpp>

#include <streamql/error.hpp>

namespace streamql::runtime {

using sql::BinaryOp;
using sql::ExprKind;
using sql::UnaryOp;

BoundExpr BoundExpr::bind(const plan::ExprPtr& expr, const plan::PlanSchema& schema) {
    BoundExpr b;
    b.kind_ = expr->kind;
    switch (expr->kind) {
        case ExprKind::Literal: b.literal_ = expr->literal; break;
        case ExprKind::Column: b.column_ = plan::resolveColumn(schema, expr->qualifier, expr->name, expr->pos); break;
        case ExprKind::Unary: b.unaryOp_ = expr->unaryOp; break;
        case ExprKind::Binary: b.binaryOp_ = expr->binaryOp; break;
        case ExprKind::Aggregate:
            throw Error(ErrorCode::UnsupportedPlan, "aggregate call outside an aggregate operator", expr->pos);
    }
    for (const auto& op : expr->operands) b.operands_.push_back(bind(op, schema));
    return b;
}

int compareValues(const Value& a, const Value& b) {
    if (std::holds_alternative<int64_t>(a) && std::holds_alternative<int64_t>(b)) {
        const int64_t x = std::get<int64_t>(a), y = std::get<int64_t>(b);
        return x < y ? -1 : (x > y ? 1 : 0);
    }
    if ((std::holds_alternative<int64_t>(a) || std::holds_alternative<double>(a)) &&
        (std::holds_alternative<int64_t>(b) || std::holds_alternative<double>(b))) {
        const double x = asDouble(a), y = asDouble(b);
        return x < y ? -1 : (x > y ? 1 : 0);
    }
    if (std::holds_alternative<std::string>(a) && std::holds_alternative<std::string>(b)) {
        const int c = std::get<std::string>(a).compare(std::get<std::string>(b));
        return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    if (std::holds_alternative<bool>(a) && std::holds_alternative<bool>(b)) {
        return static_cast<int>(std::get<bool>(a)) - static_cast<int>(std::get<bool>(b));
    }
    throw Error(ErrorCode::TypeMismatch, "incomparable values at runtime");
}

namespace {

Value arithmetic(BinaryOp op, const Value& l, const Value& r) {
    if (std::holds_alternative<int64_t>(l) && std::holds_alternative<int64_t>(r)) {
        const auto x = static_cast<uint64_t>(std::get<int64_t>(l));
        const auto y = static_cast<uint64_t>(std::get<int64_t>(r));
        switch (op) {
            case BinaryOp::Add: return static_cast<int64_t>(x + y);
            case BinaryOp::Sub: return static_cast<int64_t>(x - y);
            case BinaryOp::Mul: return static_cast<int64_t>(x * y);
            default: {
                const int64_t a = std::get<int64_t>(l), b = std::get<int64_t>(r);
                if (b == 0) return std::monostate{};
                if (b == -1) return static_cast<int64_t>(0 - x);
                return a / b;
            }
        }
    }
    const double x = asDouble(l), y = asDouble(r);
    switch (op) {
        case BinaryOp::Add: return x + y;
        case BinaryOp::Sub: return x - y;
        case BinaryOp::Mul: return x * y;
        default:
            if (y == 0.0) return std::monostate{};
            return x / y;
    }
}

}// namespace

Value BoundExpr::eval(const Row& row) const {
    switch (kind_) {
        case ExprKind::Literal: return literal_;
        case ExprKind::Column: return row[column_];
        case ExprKind::Unary: {
            Value v = operands_[0].eval(row);
            if (isNull(v)) return v;
            if (unaryOp_ == UnaryOp::Not) return !std::get<bool>(v);
            if (std::holds_alternative<int64_t>(v)) return static_cast<int64_t>(0 - static_cast<uint64_t>(std::get<int64_t>(v)));
            return -std::get<double>(v);
        }
        case ExprKind::Binary: {
            if (binaryOp_ == BinaryOp::And || binaryOp_ == BinaryOp::Or) {
                const bool isAnd = binaryOp_ == BinaryOp::And;
                Value l = operands_[0].eval(row);
                // short circuit on the dominating value
                if (!isNull(l) && std::get<bool>(l) != isAnd) return l;
                Value r = operands_[1].eval(row);
                if (!isNull(r) && std::get<bool>(r) != isAnd) return r;
                if (isNull(l) || isNull(r)) return std::monostate{};
                return isAnd;
            }
            Value l = operands_[0].eval(row);
            if (isNull(l)) return l;
            Value r = operands_[1].eval(row);
            if (isNull(r)) return r;
            switch (binaryOp_) {
                case BinaryOp::Add:
                case BinaryOp::Sub:
                case BinaryOp::Mul:
                case BinaryOp::Div: return arithmetic(binaryOp_, l, r);
                case BinaryOp::Eq: return compareValues(l, r) == 0;
                case BinaryOp::Ne: return compareValues(l, r) != 0;
                case BinaryOp::Lt: return compareValues(l, r) < 0;
                case BinaryOp::Le: return compareValues(l, r) <= 0;
                case BinaryOp::Gt: return compareValues(l, r) > 0;
                case BinaryOp::Ge: return compareValues(l, r) >= 0;
                default: break;
            }
            break;
        }
        case ExprKind::Aggregate: break;
    }
    throw Error(ErrorCode::UnsupportedPlan, "unevaluable expression");
}

std::optional<std::string> routingKey(const Row& values) {
    std::string key;
    for (size_t i = 0; i < values.size(); ++i) {
        const Value& v = values[i];
        if (isNull(v)) return std::nullopt;
        if (i) key += '\x1f';
        if (std::holds_alternative<int64_t>(v)) {
            key += formatDouble(static_cast<double>(std::get<int64_t>(v)));
        } else if (std::holds_alternative<double>(v)) {
            key += formatDouble(std::get<double>(v));
        } else {
            key += keyText(v);
        }
    }
    return key;
}

Chain::Chain(const std::vector<physical::ChainOp>& ops) {
    for (const auto& op : ops) {
        Step step;
        step.filter = op.kind == physical::ChainOp::Kind::Filter;
        if (step.filter) {
            step.predicate = BoundExpr::bind(op.predicate, op.inputSchema);
        } else {
            for (const auto& item : op.items) step.items.push_back(BoundExpr::bind(item.expr, op.inputSchema));
        }
        steps_.push_back(std::move(step));
    }
}

std::optional<Row> Chain::apply(Row row) const {
    for (const auto& step : steps_) {
        if (step.filter) {
            if (!isTrue(step.predicate.eval(row))) return std::nullopt;
        } else {
            Row out;
            out.reserve(step.items.size());
            for (const auto& item : step.items) out.push_back(item.eval(row));
            row = std::move(out);
        }
    }
    return row;
}

}// namespace streamql::runtime
