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

#include <string_view>

#include <streamql/sql/ast.hpp>

namespace streamql::sql {

/// Parses one query of the streaming dialect:
///
///   query      := SELECT [STREAM] selectList FROM source [[INNER] JOIN source ON expr]
///                 [WHERE expr] [GROUP BY groupItem {"," groupItem}] [HAVING expr] [";"]
///   selectList := "*" | expr [AS ident] {"," expr [AS ident]}
///   source     := ident [[AS] ident] [OVER "(" RANGE interval PRECEDING ")"] [[AS] ident]
///   groupItem  := column | TUMBLE "(" column "," interval ")"
///                        | HOP "(" column "," interval "," interval ")"      -- (slide, size)
///   interval   := INTERVAL "'" digits "'" (SECOND | MINUTE | HOUR)
///
/// Intervals are normalized to milliseconds. Throws LexError or ParseError with the offending
/// position; the returned AST always satisfies the QueryAst invariants.
QueryAst parse(std::string_view text);

/// Parses a standalone scalar expression (used by tests and tooling).
ExprPtr parseExpression(std::string_view text);

}// namespace streamql::sql
