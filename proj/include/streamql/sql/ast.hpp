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

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <streamql/error.hpp>
#include <streamql/value.hpp>

namespace streamql::sql {

enum class ExprKind { Literal, Column, Unary, Binary, Aggregate };
enum class UnaryOp { Not, Negate };
enum class BinaryOp { Or, And, Eq, Ne, Lt, Le, Gt, Ge, Add, Sub, Mul, Div };
enum class AggFunc { Count, Sum, Min, Max, Avg };

std::string_view binaryOpText(BinaryOp op);
std::string_view aggFuncName(AggFunc fn);
std::optional<AggFunc> parseAggFunc(std::string_view upperName);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Expression node shared by the AST and the logical plan. Immutable once built;
/// rewrites construct new nodes. Equality ignores source positions.
struct Expr {
    ExprKind kind = ExprKind::Literal;
    Value literal;
    std::string qualifier;// Column: optional table alias
    std::string name;     // Column: column name
    UnaryOp unaryOp = UnaryOp::Not;
    BinaryOp binaryOp = BinaryOp::And;
    AggFunc aggFunc = AggFunc::Count;
    bool countStar = false;
    std::vector<ExprPtr> operands;
    SourcePos pos;

    static ExprPtr makeLiteral(Value v, SourcePos pos = {});
    static ExprPtr makeColumn(std::string qualifier, std::string name, SourcePos pos = {});
    static ExprPtr makeUnary(UnaryOp op, ExprPtr operand, SourcePos pos = {});
    static ExprPtr makeBinary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, SourcePos pos = {});
    /// arg is null for COUNT(*).
    static ExprPtr makeAggregate(AggFunc fn, ExprPtr arg, SourcePos pos = {});

    std::string qualifiedName() const { return qualifier.empty() ? name : qualifier + "." + name; }
};

bool operator==(const Expr& a, const Expr& b);
bool sameExpr(const ExprPtr& a, const ExprPtr& b);
bool containsAggregate(const ExprPtr& e);

enum class WindowKind { Tumble, Hop };

struct WindowFn {
    WindowKind kind = WindowKind::Tumble;
    std::string timeQualifier;
    std::string timeColumn;
    int64_t sizeMs = 0;
    int64_t slideMs = 0;// equals sizeMs for TUMBLE
    SourcePos pos;

    friend bool operator==(const WindowFn& a, const WindowFn& b) {
        return a.kind == b.kind && a.timeQualifier == b.timeQualifier && a.timeColumn == b.timeColumn &&
            a.sizeMs == b.sizeMs && a.slideMs == b.slideMs;
    }
};

struct RangeWindow {
    int64_t precedingMs = 0;
    friend bool operator==(const RangeWindow&, const RangeWindow&) = default;
};

struct SourceRef {
    std::string name;
    std::optional<std::string> alias;
    std::optional<RangeWindow> overWindow;
    SourcePos pos;

    std::string effectiveAlias() const { return alias.value_or(name); }
    friend bool operator==(const SourceRef& a, const SourceRef& b) {
        return a.name == b.name && a.alias == b.alias && a.overWindow == b.overWindow;
    }
};

struct GroupItem {
    // Exactly one of column / window is set.
    ExprPtr column;
    std::optional<WindowFn> window;
    SourcePos pos;

    friend bool operator==(const GroupItem& a, const GroupItem& b) {
        return sameExpr(a.column, b.column) && a.window == b.window;
    }
};

struct SelectItem {
    ExprPtr expr;
    std::optional<std::string> alias;

    friend bool operator==(const SelectItem& a, const SelectItem& b) {
        return sameExpr(a.expr, b.expr) && a.alias == b.alias;
    }
};

struct JoinClause {
    SourceRef source;
    ExprPtr on;
    SourcePos pos;

    friend bool operator==(const JoinClause& a, const JoinClause& b) {
        return a.source == b.source && sameExpr(a.on, b.on);
    }
};

struct QueryAst {
    bool isStream = false;
    bool selectStar = false;
    std::vector<SelectItem> selectList;
    SourceRef from;
    std::optional<JoinClause> join;
    ExprPtr where;
    std::vector<GroupItem> groupBy;
    ExprPtr having;
    SourcePos selectPos;
    SourcePos groupByPos;

    const WindowFn* windowFn() const;
};

bool operator==(const QueryAst& a, const QueryAst& b);

}// namespace streamql::sql
