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

#include <string>
#include <string_view>
#include <vector>

#include <streamql/error.hpp>

namespace streamql::sql {

enum class TokenKind { Keyword, Identifier, Number, String, Symbol, End };

std::string_view tokenKindName(TokenKind kind);

struct Token {
    TokenKind kind = TokenKind::End;
    /// Verbatim source slice (string literals keep their quotes).
    std::string text;
    /// Keywords: upper-cased. String literals: unescaped contents. Otherwise equal to text.
    std::string value;
    SourcePos pos;

    bool isKeyword(std::string_view upper) const { return kind == TokenKind::Keyword && value == upper; }
    bool isSymbol(std::string_view sym) const { return kind == TokenKind::Symbol && value == sym; }
};

bool isKeyword(std::string_view upperWord);

/// Splits query text into tokens, always terminated by an End token.
/// Throws Error(LexError) on an unterminated string literal or an illegal character.
std::vector<Token> tokenize(std::string_view text);

}// namespace streamql::sql
