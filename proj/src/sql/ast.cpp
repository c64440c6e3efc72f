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

#include <streamql/sql/ast.hpp>

#include <algorithm>

namespace streamql::sql {

std::string_view binaryOpText(BinaryOp op) {
    switch (op) {
        case BinaryOp::Or: return "OR";
        case BinaryOp::And: return "AND";
        case BinaryOp::Eq: return "=";
        case BinaryOp::Ne: return "<>";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Ge: return ">=";
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
    }
    return "?";
}

std::string_view aggFuncName(AggFunc fn) {
    switch (fn) {
        case AggFunc::Count: return "COUNT";
        case AggFunc::Sum: return "SUM";
        case AggFunc::Min: return "MIN";
        case AggFunc::Max: return "MAX";
        case AggFunc::Avg: return "AVG";
    }
    return "?";
}

std::optional<AggFunc> parseAggFunc(std::string_view upperName) {
    if (upperName == "COUNT") return AggFunc::Count;
    if (upperName == "SUM") return AggFunc::Sum;
    if (upperName == "MIN") return AggFunc::Min;
    if (upperName == "MAX") return AggFunc::Max;
    if (upperName == "AVG") return AggFunc::Avg;
    return std::nullopt;
}

ExprPtr Expr::makeLiteral(Value v, SourcePos pos) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Literal;
    e->literal = std::move(v);
    e->pos = pos;
    return e;
}

ExprPtr Expr::makeColumn(std::string qualifier, std::string name, SourcePos pos) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Column;
    e->qualifier = std::move(qualifier);
    e->name = std::move(name);
    e->pos = pos;
    return e;
}

ExprPtr Expr::makeUnary(UnaryOp op, ExprPtr operand, SourcePos pos) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Unary;
    e->unaryOp = op;
    e->operands = {std::move(operand)};
    e->pos = pos;
    return e;
}

ExprPtr Expr::makeBinary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, SourcePos pos) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Binary;
    e->binaryOp = op;
    e->operands = {std::move(lhs), std::move(rhs)};
    e->pos = pos;
    return e;
}

ExprPtr Expr::makeAggregate(AggFunc fn, ExprPtr arg, SourcePos pos) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Aggregate;
    e->aggFunc = fn;
    e->countStar = arg == nullptr;
    if (arg) e->operands = {std::move(arg)};
    e->pos = pos;
    return e;
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case ExprKind::Literal: return a.literal == b.literal;
        case ExprKind::Column: return a.qualifier == b.qualifier && a.name == b.name;
        case ExprKind::Unary: return a.unaryOp == b.unaryOp && sameExpr(a.operands[0], b.operands[0]);
        case ExprKind::Binary:
            return a.binaryOp == b.binaryOp && sameExpr(a.operands[0], b.operands[0]) &&
                sameExpr(a.operands[1], b.operands[1]);
        case ExprKind::Aggregate:
            return a.aggFunc == b.aggFunc && a.countStar == b.countStar &&
                (a.countStar || sameExpr(a.operands[0], b.operands[0]));
    }
    return false;
}

bool sameExpr(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return !a && !b;
    return *a == *b;
}

bool containsAggregate(const ExprPtr& e) {
    if (!e) return false;
    if (e->kind == ExprKind::Aggregate) return true;
    return std::any_of(e->operands.begin(), e->operands.end(), containsAggregate);
}

const WindowFn* QueryAst::windowFn() const {
    for (const auto& g : groupBy) {
        if (g.window) return &*g.window;
    }
    return nullptr;
}

bool operator==(const QueryAst& a, const QueryAst& b) {
    return a.isStream == b.isStream && a.selectStar == b.selectStar && a.selectList == b.selectList &&
        a.from == b.from && a.join == b.join && sameExpr(a.where, b.where) && a.groupBy == b.groupBy &&
        sameExpr(a.having, b.having);
}

}// namespace streamql::sql
