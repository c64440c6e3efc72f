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

#include <streamql/sql/lexer.hpp>

#include <algorithm>
#include <array>
#include <cctype>

namespace streamql::sql {

namespace {

constexpr std::array kKeywords = {
    "SELECT", "STREAM", "FROM",     "JOIN",     "INNER",  "ON",     "WHERE", "GROUP", "BY",   "HAVING",
    "AS",     "OVER",   "RANGE",    "INTERVAL", "PRECEDING", "SECOND", "MINUTE", "HOUR", "TUMBLE", "HOP",
    "AND",    "OR",     "NOT",      "TRUE",     "FALSE",  "ORDER",
};

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
    return out;
}

bool identStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool identPart(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Lexer {
  public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skipTrivia();
            if (at_ >= text_.size()) break;
            out.push_back(next());
        }
        Token end;
        end.kind = TokenKind::End;
        end.pos = here();
        out.push_back(std::move(end));
        return out;
    }

  private:
    SourcePos here() const { return {line_, column_}; }

    char peek(size_t ahead = 0) const { return at_ + ahead < text_.size() ? text_[at_ + ahead] : '\0'; }

    void advance() {
        if (text_[at_] == '\n') {
            ++line_;
            column_ = 1;
        } else if ((static_cast<unsigned char>(text_[at_]) & 0xC0) != 0x80) {
            // continuation bytes of a UTF-8 sequence do not start a new column
            ++column_;
        }
        ++at_;
    }

    void skipTrivia() {
        while (at_ < text_.size()) {
            char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '-' && peek(1) == '-') {
                while (at_ < text_.size() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }

    Token make(TokenKind kind, size_t begin, SourcePos pos) {
        Token t;
        t.kind = kind;
        t.text = std::string(text_.substr(begin, at_ - begin));
        t.value = t.text;
        t.pos = pos;
        return t;
    }

    Token next() {
        const SourcePos pos = here();
        const size_t begin = at_;
        const char c = peek();

        if (identStart(c)) {
            while (at_ < text_.size() && identPart(peek())) advance();
            Token t = make(TokenKind::Identifier, begin, pos);
            std::string up = upper(t.text);
            if (isKeyword(up)) {
                t.kind = TokenKind::Keyword;
                t.value = std::move(up);
            }
            return t;
        }

        if (digit(c) || (c == '.' && digit(peek(1)))) {
            while (digit(peek())) advance();
            if (peek() == '.' && digit(peek(1))) {
                advance();
                while (digit(peek())) advance();
            }
            if ((peek() == 'e' || peek() == 'E') &&
                (digit(peek(1)) || ((peek(1) == '+' || peek(1) == '-') && digit(peek(2))))) {
                advance();
                if (peek() == '+' || peek() == '-') advance();
                while (digit(peek())) advance();
            }
            return make(TokenKind::Number, begin, pos);
        }

        if (c == '\'') {
            advance();
            std::string contents;
            while (true) {
                if (at_ >= text_.size()) {
                    throw Error(ErrorCode::LexError, "unterminated string literal", pos);
                }
                if (peek() == '\'') {
                    if (peek(1) == '\'') {
                        contents += '\'';
                        advance();
                        advance();
                        continue;
                    }
                    advance();
                    break;
                }
                contents += peek();
                advance();
            }
            Token t = make(TokenKind::String, begin, pos);
            t.value = std::move(contents);
            return t;
        }

        static constexpr std::array kTwoChar = {"<=", ">=", "<>", "!="};
        for (const char* sym : kTwoChar) {
            if (c == sym[0] && peek(1) == sym[1]) {
                advance();
                advance();
                return make(TokenKind::Symbol, begin, pos);
            }
        }
        static constexpr std::string_view kOneChar = "*,().=<>+-/;";
        if (kOneChar.find(c) != std::string_view::npos) {
            advance();
            return make(TokenKind::Symbol, begin, pos);
        }

        std::string shown = std::isprint(static_cast<unsigned char>(c)) ? std::string(1, c) : "\\x" + [&] {
            static constexpr char hex[] = "0123456789abcdef";
            auto u = static_cast<unsigned char>(c);
            return std::string{hex[u >> 4], hex[u & 0xF]};
        }();
        throw Error(ErrorCode::LexError, "illegal character '" + shown + "'", pos);
    }

    std::string_view text_;
    size_t at_ = 0;
    int line_ = 1;
    int column_ = 1;
};

}// namespace

std::string_view tokenKindName(TokenKind kind) {
    switch (kind) {
        case TokenKind::Keyword: return "keyword";
        case TokenKind::Identifier: return "identifier";
        case TokenKind::Number: return "number";
        case TokenKind::String: return "string";
        case TokenKind::Symbol: return "symbol";
        case TokenKind::End: return "end of input";
    }
    return "?";
}

bool isKeyword(std::string_view upperWord) {
    return std::find(kKeywords.begin(), kKeywords.end(), upperWord) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view text) { return Lexer(text).run(); }

}// namespace streamql::sql
