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
#include <string>

#include <streamql/log/log_store.hpp>
#include <streamql/physical/topology.hpp>

namespace streamql::runtime {

struct RunConfig {
    int64_t latenessMs = 0;
    int64_t checkpointEveryNEvents = 0;// 0 disables checkpoints
    int64_t emitPartialEveryNEvents = 0;// 0 disables PARTIAL rows
    std::string outputPath;             // empty writes to stdout
    bool resume = false;
    int64_t crashAfterEvents = 0;// test hook: abandon the run after this many source events
    size_t queueCapacity = 64;   // envelopes per task inbox
};

struct RunReport {
    int64_t rowsEmitted = 0;
    int64_t lateDropped = 0;
    int64_t checkpointsWritten = 0;
    std::optional<int64_t> restoredFromSeq;
    int64_t sourceEvents = 0;// events read in this run
    int64_t peakStateEntries = 0;
    int64_t stateBoundViolations = 0;
    bool crashed = false;

    std::string str() const;
};

/// Runs every task of the topology on its own thread until all inputs are drained (the
/// watermark then advances to +inf and every window fires). With resume set, restores the newest
/// checkpoint sequence that all tasks share and replays the logs from the stored offsets.
RunReport runTopology(const physical::Topology& topology, log::LogStore& store, const RunConfig& config);

}// namespace streamql::runtime
