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
#include <optional>
#include <string>

#include <streamql/value.hpp>

namespace streamql::runtime {

/// Durable snapshot of one task taken at a barrier.
struct Checkpoint {
    std::string taskId;
    int64_t seq = 0;
    std::map<int, int64_t> offsets;// partition -> next offset to read
    int64_t watermarkMs = kMinTimestamp;
    std::string stateKind;// source | table | aggregate | join | sink
    Json state;           // operator state, stored base64-encoded in stateBlob

    friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

/// File body: {"taskId","seq","offsets","watermarkMs","stateKind","stateBlob"}.
std::string encodeCheckpoint(const Checkpoint& ckpt);
/// Throws CheckpointCorrupt on any malformed field.
Checkpoint decodeCheckpoint(std::string_view text);

std::string base64Encode(std::string_view bytes);
std::optional<std::string> base64Decode(std::string_view text);

}// namespace streamql::runtime
