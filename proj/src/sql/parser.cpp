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

#include <streamql/sql/parser.hpp>

#include <charconv>
#include <limits>

#include <streamql/sql/lexer.hpp>

namespace streamql::sql {

namespace {

std::string describe(const Token& t) {
    switch (t.kind) {
        case TokenKind::End: return "end of input";
        case TokenKind::Keyword: return t.value;
        case TokenKind::String: return t.text;
        default: return "'" + t.text + "'";
    }
}

class Parser {
  public:
    explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

    QueryAst query() {
        QueryAst ast;
        ast.selectPos = peek().pos;
        expectKeyword("SELECT");
        ast.isStream = acceptKeyword("STREAM");
        selectList(ast);
        expectKeyword("FROM");
        ast.from = source();

        if (peek().isKeyword("INNER") || peek().isKeyword("JOIN")) {
            JoinClause join;
            join.pos = peek().pos;
            acceptKeyword("INNER");
            expectKeyword("JOIN");
            join.source = source();
            expectKeyword("ON");
            join.on = expression();
            ast.join = std::move(join);
        }
        if (acceptKeyword("WHERE")) {
            ast.where = expression();
        }
        if (peek().isKeyword("GROUP")) {
            ast.groupByPos = peek().pos;
            next();
            expectKeyword("BY");
            do {
                ast.groupBy.push_back(groupItem());
            } while (acceptSymbol(","));
            checkSingleWindow(ast);
        }
        if (peek().isKeyword("HAVING")) {
            const SourcePos havingPos = peek().pos;
            next();
            if (ast.groupBy.empty()) {
                throw ParseError(havingPos, "GROUP BY before HAVING", "HAVING");
            }
            ast.having = expression();
        }
        acceptSymbol(";");
        expectEnd();
        return ast;
    }

    ExprPtr standaloneExpression() {
        ExprPtr e = expression();
        expectEnd();
        return e;
    }

  private:
    const Token& peek(size_t ahead = 0) const {
        size_t i = std::min(at_ + ahead, tokens_.size() - 1);
        return tokens_[i];
    }
    const Token& next() {
        const Token& t = tokens_[at_];
        if (at_ + 1 < tokens_.size()) ++at_;
        return t;
    }

    [[noreturn]] void fail(const std::string& expected) const {
        throw ParseError(peek().pos, expected, describe(peek()));
    }

    bool acceptKeyword(std::string_view kw) {
        if (peek().isKeyword(kw)) {
            next();
            return true;
        }
        return false;
    }
    void expectKeyword(std::string_view kw) {
        if (!acceptKeyword(kw)) fail(std::string(kw));
    }
    bool acceptSymbol(std::string_view sym) {
        if (peek().isSymbol(sym)) {
            next();
            return true;
        }
        return false;
    }
    void expectSymbol(std::string_view sym) {
        if (!acceptSymbol(sym)) fail("'" + std::string(sym) + "'");
    }
    const Token& expectIdentifier(const std::string& what) {
        if (peek().kind != TokenKind::Identifier) fail(what);
        return next();
    }
    void expectEnd() {
        if (peek().kind == TokenKind::End) return;
        if (peek().isKeyword("ORDER")) {
            fail("end of query (ORDER BY is not supported)");
        }
        fail("end of query");
    }

    void selectList(QueryAst& ast) {
        if (acceptSymbol("*")) {
            ast.selectStar = true;
            return;
        }
        do {
            if (!startsExpression(peek())) fail("select item");
            SelectItem item;
            item.expr = expression();
            if (acceptKeyword("AS")) {
                item.alias = expectIdentifier("alias").text;
            }
            ast.selectList.push_back(std::move(item));
        } while (acceptSymbol(","));
    }

    static bool startsExpression(const Token& t) {
        switch (t.kind) {
            case TokenKind::Identifier:
            case TokenKind::Number:
            case TokenKind::String: return true;
            case TokenKind::Keyword: return t.value == "NOT" || t.value == "TRUE" || t.value == "FALSE";
            case TokenKind::Symbol: return t.value == "(" || t.value == "-";
            case TokenKind::End: return false;
        }
        return false;
    }

    SourceRef source() {
        SourceRef src;
        src.pos = peek().pos;
        src.name = expectIdentifier("stream or table name").text;
        auto tryAlias = [&] {
            if (src.alias) return;
            if (acceptKeyword("AS")) {
                src.alias = expectIdentifier("alias").text;
            } else if (peek().kind == TokenKind::Identifier) {
                src.alias = next().text;
            }
        };
        tryAlias();
        if (acceptKeyword("OVER")) {
            expectSymbol("(");
            expectKeyword("RANGE");
            src.overWindow = RangeWindow{interval()};
            expectKeyword("PRECEDING");
            expectSymbol(")");
        }
        tryAlias();
        return src;
    }

    ExprPtr columnRef() {
        const Token& first = expectIdentifier("column name");
        if (acceptSymbol(".")) {
            const Token& second = expectIdentifier("column name");
            return Expr::makeColumn(first.text, second.text, first.pos);
        }
        return Expr::makeColumn("", first.text, first.pos);
    }

    GroupItem groupItem() {
        GroupItem item;
        item.pos = peek().pos;
        if (peek().isKeyword("TUMBLE") || peek().isKeyword("HOP")) {
            WindowFn w;
            w.pos = peek().pos;
            w.kind = next().value == "TUMBLE" ? WindowKind::Tumble : WindowKind::Hop;
            expectSymbol("(");
            ExprPtr col = columnRef();
            w.timeQualifier = col->qualifier;
            w.timeColumn = col->name;
            expectSymbol(",");
            if (w.kind == WindowKind::Tumble) {
                w.sizeMs = interval();
                w.slideMs = w.sizeMs;
            } else {
                w.slideMs = interval();
                expectSymbol(",");
                const SourcePos sizePos = peek().pos;
                w.sizeMs = interval();
                if (w.sizeMs % w.slideMs != 0) {
                    throw ParseError(sizePos, "HOP size that is a multiple of the slide", renderMs(w.sizeMs));
                }
            }
            expectSymbol(")");
            item.window = w;
            return item;
        }
        if (peek().kind != TokenKind::Identifier) fail("group item");
        item.column = columnRef();
        return item;
    }

    static std::string renderMs(int64_t ms) { return std::to_string(ms) + " ms"; }

    void checkSingleWindow(const QueryAst& ast) const {
        bool seen = false;
        for (const auto& g : ast.groupBy) {
            if (!g.window) continue;
            if (seen) throw ParseError(g.pos, "at most one window function in GROUP BY", "a second window function");
            seen = true;
        }
    }

    int64_t interval() {
        expectKeyword("INTERVAL");
        const Token& lit = peek();
        if (lit.kind != TokenKind::String) fail("quoted interval length");
        next();
        int64_t amount = 0;
        const std::string& digits = lit.value;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), amount);
        if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size() || digits[0] == '-') {
            throw ParseError(lit.pos, "interval length in digits", lit.text);
        }
        if (amount <= 0) throw ParseError(lit.pos, "positive interval length", lit.text);

        int64_t unitMs = 0;
        if (acceptKeyword("SECOND")) {
            unitMs = 1000;
        } else if (acceptKeyword("MINUTE")) {
            unitMs = 60'000;
        } else if (acceptKeyword("HOUR")) {
            unitMs = 3'600'000;
        } else {
            fail("SECOND, MINUTE or HOUR");
        }
        if (amount > std::numeric_limits<int64_t>::max() / unitMs) {
            throw ParseError(lit.pos, "interval that fits in 64-bit milliseconds", lit.text);
        }
        return amount * unitMs;
    }

    ExprPtr expression() { return orExpr(); }

    ExprPtr orExpr() {
        ExprPtr lhs = andExpr();
        while (peek().isKeyword("OR")) {
            SourcePos pos = next().pos;
            lhs = Expr::makeBinary(BinaryOp::Or, lhs, andExpr(), pos);
        }
        return lhs;
    }

    ExprPtr andExpr() {
        ExprPtr lhs = notExpr();
        while (peek().isKeyword("AND")) {
            SourcePos pos = next().pos;
            lhs = Expr::makeBinary(BinaryOp::And, lhs, notExpr(), pos);
        }
        return lhs;
    }

    ExprPtr notExpr() {
        if (peek().isKeyword("NOT")) {
            SourcePos pos = next().pos;
            return Expr::makeUnary(UnaryOp::Not, notExpr(), pos);
        }
        return comparison();
    }

    std::optional<BinaryOp> comparisonOp(const Token& t) const {
        if (t.kind != TokenKind::Symbol) return std::nullopt;
        if (t.value == "=") return BinaryOp::Eq;
        if (t.value == "<>" || t.value == "!=") return BinaryOp::Ne;
        if (t.value == "<") return BinaryOp::Lt;
        if (t.value == "<=") return BinaryOp::Le;
        if (t.value == ">") return BinaryOp::Gt;
        if (t.value == ">=") return BinaryOp::Ge;
        return std::nullopt;
    }

    ExprPtr comparison() {
        ExprPtr lhs = additive();
        if (auto op = comparisonOp(peek())) {
            SourcePos pos = next().pos;
            lhs = Expr::makeBinary(*op, lhs, additive(), pos);
        }
        return lhs;
    }

    ExprPtr additive() {
        ExprPtr lhs = multiplicative();
        while (peek().isSymbol("+") || peek().isSymbol("-")) {
            const Token& op = next();
            lhs = Expr::makeBinary(op.value == "+" ? BinaryOp::Add : BinaryOp::Sub, lhs, multiplicative(), op.pos);
        }
        return lhs;
    }

    ExprPtr multiplicative() {
        ExprPtr lhs = unary();
        while (peek().isSymbol("*") || peek().isSymbol("/")) {
            const Token& op = next();
            lhs = Expr::makeBinary(op.value == "*" ? BinaryOp::Mul : BinaryOp::Div, lhs, unary(), op.pos);
        }
        return lhs;
    }

    ExprPtr unary() {
        if (peek().isSymbol("-")) {
            SourcePos pos = next().pos;
            return Expr::makeUnary(UnaryOp::Negate, unary(), pos);
        }
        return primary();
    }

    ExprPtr primary() {
        const Token& t = peek();
        switch (t.kind) {
            case TokenKind::Number: return number(next());
            case TokenKind::String: {
                const Token& s = next();
                return Expr::makeLiteral(Value{s.value}, s.pos);
            }
            case TokenKind::Keyword:
                if (t.value == "TRUE" || t.value == "FALSE") {
                    const Token& b = next();
                    return Expr::makeLiteral(Value{b.value == "TRUE"}, b.pos);
                }
                break;
            case TokenKind::Symbol:
                if (t.value == "(") {
                    next();
                    ExprPtr inner = expression();
                    expectSymbol(")");
                    return inner;
                }
                break;
            case TokenKind::Identifier:
                if (peek(1).isSymbol("(")) return aggregate();
                return columnRef();
            case TokenKind::End: break;
        }
        fail("expression");
    }

    ExprPtr aggregate() {
        const Token& fnTok = next();
        std::string upperName = fnTok.text;
        for (auto& c : upperName) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        auto fn = parseAggFunc(upperName);
        if (!fn) {
            throw ParseError(fnTok.pos, "aggregate function (COUNT, SUM, MIN, MAX, AVG)", "'" + fnTok.text + "'");
        }
        expectSymbol("(");
        ExprPtr arg;
        if (*fn == AggFunc::Count && acceptSymbol("*")) {
            arg = nullptr;
        } else {
            arg = expression();
        }
        expectSymbol(")");
        return Expr::makeAggregate(*fn, arg, fnTok.pos);
    }

    ExprPtr number(const Token& t) {
        const std::string& s = t.text;
        if (s.find_first_of(".eE") == std::string::npos) {
            int64_t v = 0;
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || ptr != s.data() + s.size()) {
                throw ParseError(t.pos, "integer literal within 64-bit range", s);
            }
            return Expr::makeLiteral(Value{v}, t.pos);
        }
        double d = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
        if (ec != std::errc{} || ptr != s.data() + s.size()) {
            throw ParseError(t.pos, "decimal literal", s);
        }
        return Expr::makeLiteral(Value{d}, t.pos);
    }

    std::vector<Token> tokens_;
    size_t at_ = 0;
};

}// namespace

QueryAst parse(std::string_view text) { return Parser(text).query(); }

ExprPtr parseExpression(std::string_view text) { return Parser(text).standaloneExpression(); }

}// namespace streamql::sql
