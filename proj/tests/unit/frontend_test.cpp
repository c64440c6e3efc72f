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

#include <gtest/gtest.h>

#include <cctype>
#include <random>

#include <streamql/sql/lexer.hpp>
#include <streamql/sql/parser.hpp>
#include <streamql/sql/render.hpp>

#include "support.hpp"

namespace streamql {
namespace {

using sql::TokenKind;

TEST(Tokenize, StreamStarQuery) {
    const auto tokens = sql::tokenize("SELECT STREAM * FROM OrdersStream");
    ASSERT_EQ(tokens.size(), 6u);
    EXPECT_TRUE(tokens[0].isKeyword("SELECT"));
    EXPECT_TRUE(tokens[1].isKeyword("STREAM"));
    EXPECT_TRUE(tokens[2].isSymbol("*"));
    EXPECT_TRUE(tokens[3].isKeyword("FROM"));
    EXPECT_EQ(tokens[4].kind, TokenKind::Identifier);
    EXPECT_EQ(tokens[4].text, "OrdersStream");
    EXPECT_EQ(tokens[5].kind, TokenKind::End);
    EXPECT_EQ(tokens[4].pos, (SourcePos{1, 22}));
}

TEST(Tokenize, EmptyInputIsJustEnd) {
    const auto tokens = sql::tokenize("");
    ASSERT_EQ(tokens.size(), 1u);
    EXPECT_EQ(tokens[0].kind, TokenKind::End);
}

TEST(Tokenize, UnterminatedLiteral) {
    try {
        sql::tokenize("SELECT 'abc");
        FAIL() << "expected LexError";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::LexError);
        EXPECT_EQ(e.pos(), (SourcePos{1, 8}));
    }
}

TEST(Tokenize, IllegalCharacter) {
    try {
        sql::tokenize("SELECT #");
        FAIL() << "expected LexError";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::LexError);
        EXPECT_EQ(e.pos(), (SourcePos{1, 8}));
    }
}

TEST(Tokenize, KeywordsCaseInsensitiveIdentifiersKeepCase) {
    const auto tokens = sql::tokenize("sElEcT Foo");
    EXPECT_TRUE(tokens[0].isKeyword("SELECT"));
    EXPECT_EQ(tokens[0].text, "sElEcT");
    EXPECT_EQ(tokens[1].value, "Foo");
}

TEST(Tokenize, PositionsNonDecreasingAcrossLines) {
    const auto tokens = sql::tokenize("SELECT a,\n  b\nFROM t -- note\nWHERE x = 'y'");
    for (size_t i = 1; i < tokens.size(); ++i) {
        const auto& p = tokens[i - 1].pos;
        const auto& q = tokens[i].pos;
        EXPECT_TRUE(p.line < q.line || (p.line == q.line && p.column <= q.column)) << i;
    }
    EXPECT_EQ(tokens[3].pos, (SourcePos{2, 3}));
}

// Property: random byte soup either tokenizes or fails with a positioned LexError, nothing else.
TEST(Tokenize, TotalOnRandomInput) {
    std::mt19937 rng(7);
    const std::string alphabet = "SELECTFROMabc019 _'\"*(),.;<>=!-+/#@\n\t\xc3\xa9";
    std::uniform_int_distribution<size_t> len(0, 40), pick(0, alphabet.size() - 1);
    for (int i = 0; i < 5000; ++i) {
        std::string text;
        for (size_t n = len(rng); n > 0; --n) text += alphabet[pick(rng)];
        try {
            const auto tokens = sql::tokenize(text);
            ASSERT_FALSE(tokens.empty());
            ASSERT_EQ(tokens.back().kind, TokenKind::End);
        } catch (const Error& e) {
            ASSERT_EQ(e.code(), ErrorCode::LexError) << text;
            ASSERT_TRUE(e.pos().valid()) << text;
        }
    }
}

TEST(Parse, StreamStarQuery) {
    const auto ast = sql::parse("SELECT STREAM * FROM OrdersStream");
    EXPECT_TRUE(ast.isStream);
    EXPECT_TRUE(ast.selectStar);
    EXPECT_EQ(ast.from.name, "OrdersStream");
    EXPECT_FALSE(ast.join.has_value());
}

TEST(Parse, TumbleNormalizedToMilliseconds) {
    const auto ast = sql::parse(
        "SELECT STREAM productId, COUNT(*) FROM Orders GROUP BY TUMBLE(rowtime, INTERVAL '1' MINUTE), productId");
    ASSERT_EQ(ast.groupBy.size(), 2u);
    ASSERT_TRUE(ast.groupBy[0].window.has_value());
    const auto& w = *ast.groupBy[0].window;
    EXPECT_EQ(w.kind, sql::WindowKind::Tumble);
    EXPECT_EQ(w.timeColumn, "rowtime");
    EXPECT_EQ(w.sizeMs, 60000);
    EXPECT_EQ(w.slideMs, 60000);
    ASSERT_TRUE(ast.groupBy[1].column);
    EXPECT_EQ(ast.groupBy[1].column->name, "productId");
}

TEST(Parse, HopArgumentsAreSlideThenSize) {
    const auto ast = sql::parse("SELECT STREAM COUNT(*) FROM Orders GROUP BY HOP(rowtime, INTERVAL '2' SECOND, INTERVAL '6' SECOND)");
    const auto& w = *ast.groupBy[0].window;
    EXPECT_EQ(w.slideMs, 2000);
    EXPECT_EQ(w.sizeMs, 6000);
}

TEST(Parse, MissingSelectList) {
    try {
        sql::parse("SELECT FROM Orders");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.code(), ErrorCode::ParseError);
        EXPECT_EQ(e.pos(), (SourcePos{1, 8}));
        EXPECT_NE(e.expected().find("select item"), std::string::npos) << e.expected();
    }
}

TEST(Parse, OverWindowOnBothSides) {
    const auto ast = sql::parse(
        "SELECT STREAM o.amount FROM Orders o OVER (RANGE INTERVAL '1' MINUTE PRECEDING) "
        "JOIN Shipments s OVER (RANGE INTERVAL '1' MINUTE PRECEDING) ON o.productId = s.productId");
    ASSERT_TRUE(ast.from.overWindow);
    EXPECT_EQ(ast.from.overWindow->precedingMs, 60000);
    ASSERT_TRUE(ast.join);
    EXPECT_EQ(ast.join->source.effectiveAlias(), "s");
    EXPECT_EQ(ast.join->source.overWindow->precedingMs, 60000);
    EXPECT_TRUE(ast.join->on);
}

TEST(Parse, RejectsHopWithSizeNotMultipleOfSlide) {
    EXPECT_THROW(sql::parse("SELECT STREAM COUNT(*) FROM Orders GROUP BY HOP(rowtime, INTERVAL '4' SECOND, INTERVAL '6' SECOND)"),
                 Error);
}

TEST(Parse, RejectsTwoWindowFunctions) {
    EXPECT_THROW(sql::parse("SELECT STREAM COUNT(*) FROM Orders GROUP BY TUMBLE(rowtime, INTERVAL '1' SECOND), "
                            "TUMBLE(rowtime, INTERVAL '2' SECOND)"),
                 Error);
}

TEST(Parse, HavingWithoutGroupByRejected) {
    EXPECT_THROW(sql::parse("SELECT COUNT(*) FROM Orders HAVING COUNT(*) > 1"), Error);
}

TEST(Parse, OrderByIsAParseError) {
    try {
        sql::parse("SELECT * FROM Orders ORDER BY rowtime");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ParseError);
        EXPECT_EQ(e.pos(), (SourcePos{1, 22}));
    }
}

TEST(Render, CanonicalStar) {
    EXPECT_EQ(sql::render(sql::parse("select stream * from Orders")), "SELECT STREAM * FROM Orders");
}

TEST(Render, HopCanonicalForm) {
    const auto text = sql::render(
        sql::parse("SELECT STREAM COUNT(*) FROM Orders GROUP BY HOP(rowtime, INTERVAL '2' SECOND, INTERVAL '6' SECOND)"));
    EXPECT_NE(text.find("HOP(rowtime, INTERVAL '2' SECOND, INTERVAL '6' SECOND)"), std::string::npos) << text;
}

TEST(Render, IntervalPicksLargestExactUnit) {
    EXPECT_EQ(sql::renderInterval(3600000), "INTERVAL '1' HOUR");
    EXPECT_EQ(sql::renderInterval(120000), "INTERVAL '2' MINUTE");
    EXPECT_EQ(sql::renderInterval(90000), "INTERVAL '90' SECOND");
}

TEST(Render, MinimalParentheses) {
    EXPECT_EQ(sql::renderExpr(sql::parseExpression("(a + b) * c - (d - e)")), "(a + b) * c - (d - e)");
    EXPECT_EQ(sql::renderExpr(sql::parseExpression("a OR (b AND c)")), "a OR b AND c");
    EXPECT_EQ(sql::renderExpr(sql::parseExpression("(a OR b) AND NOT c")), "(a OR b) AND NOT c");
}

// Random expression text over the dialect's operators.
std::string randomExpr(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, 9);
    const int choice = depth <= 0 ? pick(rng) % 4 : pick(rng);
    switch (choice) {
        case 0: return "c" + std::to_string(pick(rng));
        case 1: return std::to_string(pick(rng) * 37);
        case 2: return "'s" + std::to_string(pick(rng)) + "'";
        case 3: return std::to_string(pick(rng)) + ".25";
        case 4: return "(NOT " + randomExpr(rng, depth - 1) + ")";
        case 5: return "- " + randomExpr(rng, depth - 1);
        case 6: return "(" + randomExpr(rng, depth - 1) + ")";
        default: {
            static const char* ops[] = {"+", "-", "*", "/", "=", "<>", "<", "<=", ">", ">=", "AND", "OR"};
            std::uniform_int_distribution<int> op(0, 11);
            const int o = op(rng);
            const std::string text = randomExpr(rng, depth - 1) + " " + ops[o] + " " + randomExpr(rng, depth - 1);
            // comparisons do not chain
            return (o >= 4 && o <= 9) ? "(" + text + ")" : text;
        }
    }
}

// Property: parse(render(e)) == e for random expressions, and rendering is a fixpoint.
TEST(Render, RandomExpressionRoundTrip) {
    std::mt19937 rng(11);
    for (int i = 0; i < 3000; ++i) {
        const std::string text = randomExpr(rng, 4);
        const auto e = sql::parseExpression(text);
        const std::string rendered = sql::renderExpr(e);
        const auto again = sql::parseExpression(rendered);
        ASSERT_TRUE(sql::sameExpr(e, again)) << text << " -> " << rendered;
        ASSERT_EQ(sql::renderExpr(again), rendered);
    }
}

std::string lowerOutsideQuotes(const std::string& text) {
    std::string out;
    bool quoted = false;
    for (char c : text) {
        if (c == '\'') quoted = !quoted;
        out += quoted ? c : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

std::string upper(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

// Property: lower-casing a query changes the AST only in identifier case.
TEST(Parse, CaseInsensitiveOverCorpus) {
    for (const auto& file : testing::listFiles(testing::testsDir() / "queries", ".sql")) {
        const std::string text = testing::readFile(file);
        const auto a = sql::parse(text);
        const auto b = sql::parse(lowerOutsideQuotes(text));
        EXPECT_EQ(upper(sql::render(a)), upper(sql::render(b))) << file;
        EXPECT_EQ(a.isStream, b.isStream);
    }
}

}// namespace
}// namespace streamql
