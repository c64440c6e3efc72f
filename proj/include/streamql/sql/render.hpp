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
#include <string>

#include <streamql/sql/ast.hpp>

namespace streamql::sql {

/// Canonical query text; parse(render(ast)) == ast for any parsed AST.
std::string render(const QueryAst& ast);

/// Minimal-parenthesis rendering of an expression.
std::string renderExpr(const Expr& e);
inline std::string renderExpr(const ExprPtr& e) { return e ? renderExpr(*e) : std::string(); }

/// "INTERVAL 'n' UNIT" using the largest unit that divides ms exactly.
std::string renderInterval(int64_t ms);

std::string renderWindowFn(const WindowFn& w);

}// namespace streamql::sql
