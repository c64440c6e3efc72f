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
#include <set>
#include <string>
#include <vector>

#include <streamql/physical/topology.hpp>
#include <streamql/runtime/aggregator.hpp>
#include <streamql/runtime/eval.hpp>

namespace streamql::runtime {

/// Retention buffer for one join input: rows grouped by join key, ordered by ts within a key.
struct JoinBuffer {
    std::map<std::string, std::multimap<int64_t, Row>> byKey;
    std::multiset<std::pair<int64_t, std::string>> byTs;

    void insert(const std::string& key, int64_t ts, Row row);
    /// Drops every row with ts + windowMs < bound. Returns the number dropped.
    size_t evictBefore(int64_t windowMs, int64_t bound);
    size_t size() const { return byTs.size(); }
    int64_t oldestTs() const { return byTs.empty() ? kMaxTimestamp : byTs.begin()->first; }
};

/// Interval join of two inputs. In symmetric mode both sides are retained and evicted by the
/// opposite side's watermark. When one side is fed only by tables (lookup mode) that side is kept
/// whole and the other side probes without being retained; probes wait until the table side has ended.
class WindowJoiner {
  public:
    explicit WindowJoiner(const physical::StageSpec& stage);

    /// Processes one row of input side (0 left, 1 right). Joined rows are appended to out.
    /// Returns false (and counts a drop) when ts is below that side's watermark.
    bool step(int side, int64_t ts, const Row& row, int64_t sideWatermark, std::vector<OutputRow>& out);

    /// Called once the static side has delivered all its rows; releases held probes.
    void staticSideFinished(std::vector<OutputRow>& out);
    bool waitingForStatic() const { return stage_->staticSide >= 0 && !staticDone_; }

    /// Evicts rows that can no longer match given per-side watermarks.
    void evict(int64_t leftWatermark, int64_t rightWatermark);

    size_t stateSize() const;
    int64_t lateDropped() const { return lateDropped_; }
    /// Oldest retained ts on a non-static side, or INT64_MAX.
    int64_t oldestTs() const;
    int64_t maxWindowSizeMs() const;

    Json toJson() const;
    void fromJson(const Json& j);

  private:
    std::string keyOf(int side, const Row& row) const;
    void probe(int side, int64_t ts, const Row& row, std::vector<OutputRow>& out) const;

    const physical::StageSpec* stage_;
    std::vector<BoundExpr> keys_[2];
    BoundExpr condition_;
    JoinBuffer buffers_[2];
    std::vector<std::pair<int64_t, Row>> held_;// probes waiting for the static side
    bool staticDone_ = false;
    int64_t lateDropped_ = 0;
};

}// namespace streamql::runtime
