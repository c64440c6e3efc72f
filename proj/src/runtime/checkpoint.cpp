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

#include <streamql/runtime/checkpoint.hpp>

#include <sodium.h>

#include <streamql/error.hpp>

namespace streamql::runtime {

std::string base64Encode(std::string_view bytes) {
    const size_t cap = sodium_base64_encoded_len(bytes.size(), sodium_base64_VARIANT_ORIGINAL);
    std::string out(cap, '\0');
    sodium_bin2base64(out.data(), cap, reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(),
                      sodium_base64_VARIANT_ORIGINAL);
    out.resize(cap - 1);
    return out;
}

std::optional<std::string> base64Decode(std::string_view text) {
    std::string out(text.size() / 4 * 3 + 3, '\0');
    size_t len = 0;
    const char* end = nullptr;
    if (sodium_base642bin(reinterpret_cast<unsigned char*>(out.data()), out.size(), text.data(), text.size(), nullptr,
                          &len, &end, sodium_base64_VARIANT_ORIGINAL) != 0 ||
        end != text.data() + text.size()) {
        return std::nullopt;
    }
    out.resize(len);
    return out;
}

std::string encodeCheckpoint(const Checkpoint& ckpt) {
    Json offsets = Json::object();
    for (const auto& [partition, offset] : ckpt.offsets) offsets[std::to_string(partition)] = offset;
    Json j;
    j["taskId"] = ckpt.taskId;
    j["seq"] = ckpt.seq;
    j["offsets"] = std::move(offsets);
    j["watermarkMs"] = ckpt.watermarkMs;
    j["stateKind"] = ckpt.stateKind;
    j["stateBlob"] = base64Encode(ckpt.state.dump());
    return j.dump() + "\n";
}

Checkpoint decodeCheckpoint(std::string_view text) {
    try {
        const Json j = Json::parse(text);
        Checkpoint ckpt;
        ckpt.taskId = j.at("taskId").get<std::string>();
        ckpt.seq = j.at("seq").get<int64_t>();
        for (const auto& [partition, offset] : j.at("offsets").items()) {
            ckpt.offsets[std::stoi(partition)] = offset.get<int64_t>();
        }
        ckpt.watermarkMs = j.at("watermarkMs").get<int64_t>();
        ckpt.stateKind = j.at("stateKind").get<std::string>();
        auto blob = base64Decode(j.at("stateBlob").get<std::string>());
        if (!blob) throw Error(ErrorCode::CheckpointCorrupt, "stateBlob is not valid base64");
        ckpt.state = Json::parse(*blob);
        return ckpt;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(ErrorCode::CheckpointCorrupt, e.what());
    }
}

}// namespace streamql::runtime
