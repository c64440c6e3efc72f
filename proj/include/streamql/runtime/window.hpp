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
#include <optional>
#include <vector>

#include <streamql/sql/ast.hpp>

namespace streamql::runtime {

struct WindowBounds {
    int64_t start = 0;
    int64_t end = 0;
    friend bool operator==(const WindowBounds&, const WindowBounds&) = default;
};

/// Epoch-aligned window [floor(ts/size)*size, +size).
WindowBounds assignTumble(int64_t ts, int64_t sizeMs);

/// Every slide-aligned window of length sizeMs containing ts, ascending by start. Starts below 0 are omitted.
std::vector<WindowBounds> assignHop(int64_t ts, int64_t slideMs, int64_t sizeMs);

std::vector<WindowBounds> assignWindows(const sql::WindowFn& fn, int64_t ts);

/// max(current, eventTs - latenessMs), saturating at the int64 bounds.
int64_t advanceWatermark(int64_t current, int64_t eventTs, int64_t latenessMs);

/// aTs - bTs within [-leftWindowMs, +rightWindowMs]; a missing bound is unlimited.
bool joinMatch(int64_t aTs, int64_t bTs, std::optional<int64_t> leftWindowMs, std::optional<int64_t> rightWindowMs);

}// namespace streamql::runtime
