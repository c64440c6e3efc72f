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

#include <gtest/gtest.h>

#include <streamql/error.hpp>
#include <streamql/runtime/checkpoint.hpp>

namespace streamql::runtime {
namespace {

Checkpoint sample() {
    Checkpoint c;
    c.taskId = "aggregate-2";
    c.seq = 7;
    c.offsets = {{0, 12}, {3, 40}};
    c.watermarkMs = 123456;
    c.stateKind = "aggregate";
    c.state = Json::parse(R"({"fingerprint":"00ff","windows":[{"start":0,"end":5000,"key":["a"],"accs":[[3,null]]}]})");
    return c;
}

TEST(Checkpoint, EncodeDecodeRoundTrip) {
    const Checkpoint c = sample();
    EXPECT_EQ(decodeCheckpoint(encodeCheckpoint(c)), c);
}

TEST(Checkpoint, FieldsExactly) {
    const Json j = Json::parse(encodeCheckpoint(sample()));
    std::vector<std::string> keys;
    for (const auto& [k, _] : j.items()) keys.push_back(k);
    EXPECT_EQ(keys, (std::vector<std::string>{"taskId", "seq", "offsets", "watermarkMs", "stateKind", "stateBlob"}));
    EXPECT_EQ(j["offsets"]["3"], 40);
    EXPECT_EQ(*base64Decode(j["stateBlob"].get<std::string>()), sample().state.dump());
}

TEST(Checkpoint, MinusInfinityWatermarkSurvives) {
    Checkpoint c = sample();
    c.watermarkMs = kMinTimestamp;
    EXPECT_EQ(decodeCheckpoint(encodeCheckpoint(c)).watermarkMs, kMinTimestamp);
}

TEST(Checkpoint, CorruptionDetected) {
    const std::string text = encodeCheckpoint(sample());
    for (size_t cut : {size_t{0}, size_t{1}, text.size() / 2, text.rfind('}')}) {
        try {
            decodeCheckpoint(text.substr(0, cut));
            FAIL() << "cut at " << cut;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::CheckpointCorrupt);
        }
    }
    Json j = Json::parse(text);
    j["stateBlob"] = "!!not base64!!";
    EXPECT_THROW(decodeCheckpoint(j.dump()), Error);
    j = Json::parse(text);
    j.erase("offsets");
    EXPECT_THROW(decodeCheckpoint(j.dump()), Error);
}

TEST(Base64, KnownVectors) {
    EXPECT_EQ(base64Encode(""), "");
    EXPECT_EQ(base64Encode("f"), "Zg==");
    EXPECT_EQ(base64Encode("foobar"), "Zm9vYmFy");
    EXPECT_EQ(base64Decode("Zm9vYg=="), "foob");
    EXPECT_FALSE(base64Decode("Zm9v*").has_value());
}

}// namespace
}// namespace streamql::runtime
