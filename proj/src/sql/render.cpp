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

#include <streamql/sql/render.hpp>

namespace streamql::sql {

namespace {

// Binding strength; higher binds tighter.
constexpr int kPrecOr = 1;
constexpr int kPrecAnd = 2;
constexpr int kPrecNot = 3;
constexpr int kPrecCmp = 4;
constexpr int kPrecAdd = 5;
constexpr int kPrecMul = 6;
constexpr int kPrecNeg = 7;
constexpr int kPrecAtom = 8;

int precedence(BinaryOp op) {
    switch (op) {
        case BinaryOp::Or: return kPrecOr;
        case BinaryOp::And: return kPrecAnd;
        case BinaryOp::Add:
        case BinaryOp::Sub: return kPrecAdd;
        case BinaryOp::Mul:
        case BinaryOp::Div: return kPrecMul;
        default: return kPrecCmp;
    }
}

int precedence(const Expr& e) {
    switch (e.kind) {
        case ExprKind::Binary: return precedence(e.binaryOp);
        case ExprKind::Unary: return e.unaryOp == UnaryOp::Not ? kPrecNot : kPrecNeg;
        default: return kPrecAtom;
    }
}

std::string quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += '\'';
        out += c;
    }
    out += '\'';
    return out;
}

std::string literal(const Value& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return "NULL";
            } else if constexpr (std::is_same_v<T, std::string>) {
                return quote(x);
            } else if constexpr (std::is_same_v<T, bool>) {
                return x ? "TRUE" : "FALSE";
            } else if constexpr (std::is_same_v<T, double>) {
                return formatDouble(x);
            } else {
                return std::to_string(x);
            }
        },
        v);
}

std::string renderAt(const Expr& e, int minPrec) {
    std::string out;
    switch (e.kind) {
        case ExprKind::Literal: out = literal(e.literal); break;
        case ExprKind::Column: out = e.qualifiedName(); break;
        case ExprKind::Aggregate:
            out = std::string(aggFuncName(e.aggFunc)) + "(" + (e.countStar ? "*" : renderAt(*e.operands[0], 0)) + ")";
            break;
        case ExprKind::Unary:
            if (e.unaryOp == UnaryOp::Not) {
                out = "NOT " + renderAt(*e.operands[0], kPrecNot);
            } else {
                // "-" followed by another unary would lex as a comment ("--").
                const Expr& operand = *e.operands[0];
                out = "-" + (operand.kind == ExprKind::Unary ? "(" + renderAt(operand, 0) + ")"
                                                             : renderAt(operand, kPrecNeg));
            }
            break;
        case ExprKind::Binary: {
            const int p = precedence(e.binaryOp);
            // comparisons do not chain, so both sides need strictly tighter operands
            const int leftMin = p == kPrecCmp ? p + 1 : p;
            out = renderAt(*e.operands[0], leftMin) + " " + std::string(binaryOpText(e.binaryOp)) + " " +
                renderAt(*e.operands[1], p + 1);
            break;
        }
    }
    if (precedence(e) < minPrec) {
        return "(" + out + ")";
    }
    return out;
}

std::string renderSource(const SourceRef& s) {
    std::string out = s.name;
    if (s.overWindow) {
        out += " OVER (RANGE " + renderInterval(s.overWindow->precedingMs) + " PRECEDING)";
    }
    if (s.alias) {
        out += " AS " + *s.alias;
    }
    return out;
}

}// namespace

std::string renderExpr(const Expr& e) { return renderAt(e, 0); }

std::string renderInterval(int64_t ms) {
    if (ms > 0 && ms % 3'600'000 == 0) return "INTERVAL '" + std::to_string(ms / 3'600'000) + "' HOUR";
    if (ms > 0 && ms % 60'000 == 0) return "INTERVAL '" + std::to_string(ms / 60'000) + "' MINUTE";
    if (ms > 0 && ms % 1000 == 0) return "INTERVAL '" + std::to_string(ms / 1000) + "' SECOND";
    throw Error(ErrorCode::InvalidArgument, "interval of " + std::to_string(ms) + " ms has no SQL unit");
}

std::string renderWindowFn(const WindowFn& w) {
    std::string col = w.timeQualifier.empty() ? w.timeColumn : w.timeQualifier + "." + w.timeColumn;
    if (w.kind == WindowKind::Tumble) {
        return "TUMBLE(" + col + ", " + renderInterval(w.sizeMs) + ")";
    }
    return "HOP(" + col + ", " + renderInterval(w.slideMs) + ", " + renderInterval(w.sizeMs) + ")";
}

std::string render(const QueryAst& ast) {
    std::string out = "SELECT ";
    if (ast.isStream) out += "STREAM ";
    if (ast.selectStar) {
        out += "*";
    } else {
        for (size_t i = 0; i < ast.selectList.size(); ++i) {
            if (i) out += ", ";
            out += renderExpr(*ast.selectList[i].expr);
            if (ast.selectList[i].alias) out += " AS " + *ast.selectList[i].alias;
        }
    }
    out += " FROM " + renderSource(ast.from);
    if (ast.join) {
        out += " JOIN " + renderSource(ast.join->source) + " ON " + renderExpr(*ast.join->on);
    }
    if (ast.where) out += " WHERE " + renderExpr(*ast.where);
    if (!ast.groupBy.empty()) {
        out += " GROUP BY ";
        for (size_t i = 0; i < ast.groupBy.size(); ++i) {
            if (i) out += ", ";
            const auto& g = ast.groupBy[i];
            out += g.window ? renderWindowFn(*g.window) : renderExpr(*g.column);
        }
    }
    if (ast.having) out += " HAVING " + renderExpr(*ast.having);
    return out;
}

}// namespace streamql::sql
