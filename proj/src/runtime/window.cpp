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

#include <streamql/runtime/window.hpp>

#include <streamql/value.hpp>

namespace streamql::runtime {

namespace {

int64_t floorDiv(int64_t a, int64_t b) {
    int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}// namespace

WindowBounds assignTumble(int64_t ts, int64_t sizeMs) {
    const int64_t start = floorDiv(ts, sizeMs) * sizeMs;
    return {start, start + sizeMs};
}

std::vector<WindowBounds> assignHop(int64_t ts, int64_t slideMs, int64_t sizeMs) {
    std::vector<WindowBounds> out;
    const int64_t last = floorDiv(ts, slideMs) * slideMs;
    // first start s with s + size > ts
    int64_t first = (floorDiv(ts - sizeMs, slideMs) + 1) * slideMs;
    if (first < 0) first = 0;
    out.reserve(static_cast<size_t>(sizeMs / slideMs));
    for (int64_t s = first; s <= last; s += slideMs) out.push_back({s, s + sizeMs});
    return out;
}

std::vector<WindowBounds> assignWindows(const sql::WindowFn& fn, int64_t ts) {
    if (fn.kind == sql::WindowKind::Tumble) return {assignTumble(ts, fn.sizeMs)};
    return assignHop(ts, fn.slideMs, fn.sizeMs);
}

int64_t advanceWatermark(int64_t current, int64_t eventTs, int64_t latenessMs) {
    int64_t candidate;
    if (__builtin_sub_overflow(eventTs, latenessMs, &candidate)) candidate = kMinTimestamp;
    return candidate > current ? candidate : current;
}

bool joinMatch(int64_t aTs, int64_t bTs, std::optional<int64_t> leftWindowMs, std::optional<int64_t> rightWindowMs) {
    const __int128 diff = static_cast<__int128>(aTs) - bTs;
    if (leftWindowMs && diff < -static_cast<__int128>(*leftWindowMs)) return false;
    if (rightWindowMs && diff > static_cast<__int128>(*rightWindowMs)) return false;
    return true;
}

}// namespace streamql::runtime
