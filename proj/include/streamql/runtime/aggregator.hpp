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
#include <map>
#include <vector>

#include <streamql/physical/topology.hpp>
#include <streamql/runtime/eval.hpp>
#include <streamql/runtime/window.hpp>

namespace streamql::runtime {

enum class Finality { None, Partial, Final };

std::string_view finalityName(Finality f);

/// Row produced by an operator, stamped with its event time.
struct OutputRow {
    int64_t ts = 0;
    Row row;
    Finality finality = Finality::None;
};

/// Running value of one aggregate call. COUNT uses count; SUM/MIN/MAX keep value (NULL until the
/// first non-null input); AVG keeps the sum in value and the non-null count in count.
struct Accumulator {
    int64_t count = 0;
    Value value;
    friend bool operator==(const Accumulator&, const Accumulator&) = default;
};

struct WindowKey {
    int64_t end = 0;
    int64_t start = 0;
    Row key;
};

struct WindowKeyLess {
    bool operator()(const WindowKey& a, const WindowKey& b) const;
};

using WindowState = std::map<WindowKey, std::vector<Accumulator>, WindowKeyLess>;

/// Keyed window aggregation over one input. Unwindowed aggregates use the single window
/// [INT64_MIN, INT64_MAX), which only fires once the watermark reaches +inf.
class WindowAggregator {
  public:
    explicit WindowAggregator(const physical::StageSpec& stage);

    /// Adds one input row. Returns false (and counts a drop) when ts is below the watermark.
    bool step(int64_t ts, const Row& row, int64_t watermark);

    /// FINAL rows for every window with end <= watermark, ordered by (window_end, key); fired windows are evicted.
    std::vector<OutputRow> fire(int64_t watermark);

    /// PARTIAL snapshot of every unfired window. Does not change state.
    std::vector<OutputRow> partial() const;

    const WindowState& state() const { return state_; }
    size_t stateSize() const { return state_.size(); }
    int64_t lateDropped() const { return lateDropped_; }
    /// Smallest retained window start, or INT64_MAX when empty.
    int64_t oldestWindowStart() const;
    int64_t maxWindowSizeMs() const;

    Json toJson() const;
    void fromJson(const Json& j);

  private:
    Row outputRow(const WindowKey& key, const std::vector<Accumulator>& accs) const;

    const physical::StageSpec* stage_;
    std::vector<BoundExpr> keys_;
    std::vector<BoundExpr> args_;// unset for COUNT(*)
    std::vector<bool> hasArg_;
    WindowState state_;
    int64_t lateDropped_ = 0;
};

}// namespace streamql::runtime
