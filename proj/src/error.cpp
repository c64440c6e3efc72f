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

#include <streamql/error.hpp>

namespace streamql {

std::string SourcePos::str() const { return std::to_string(line) + ":" + std::to_string(column); }

std::string_view errorCodeName(ErrorCode code) {
    switch (code) {
        case ErrorCode::LexError: return "LexError";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::DuplicateName: return "DuplicateName";
        case ErrorCode::InvalidSchema: return "InvalidSchema";
        case ErrorCode::UnknownName: return "UnknownName";
        case ErrorCode::UnknownColumn: return "UnknownColumn";
        case ErrorCode::TypeMismatch: return "TypeMismatch";
        case ErrorCode::WindowMisuse: return "WindowMisuse";
        case ErrorCode::BlockingQuery: return "BlockingQuery";
        case ErrorCode::UnsupportedPlan: return "UnsupportedPlan";
        case ErrorCode::UnknownStream: return "UnknownStream";
        case ErrorCode::PartitionOutOfRange: return "PartitionOutOfRange";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::CorruptLog: return "CorruptLog";
        case ErrorCode::CheckpointWriteFailure: return "CheckpointWriteFailure";
        case ErrorCode::CheckpointCorrupt: return "CheckpointCorrupt";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

namespace {
std::string format(ErrorCode code, const std::string& message, SourcePos pos) {
    std::string out(errorCodeName(code));
    if (pos.valid()) {
        out += " at " + pos.str();
    }
    out += ": ";
    out += message;
    return out;
}
}// namespace

Error::Error(ErrorCode code, std::string message, SourcePos pos)
    : std::runtime_error(format(code, message, pos)), code_(code), pos_(pos), message_(std::move(message)) {}

ParseError::ParseError(SourcePos pos, std::string expected, std::string found)
    : Error(ErrorCode::ParseError, "expected " + expected + ", found " + found, pos), expected_(std::move(expected)),
      found_(std::move(found)) {}

bool isQueryDiagnostic(ErrorCode code) {
    switch (code) {
        case ErrorCode::LexError:
        case ErrorCode::ParseError:
        case ErrorCode::UnknownName:
        case ErrorCode::UnknownColumn:
        case ErrorCode::TypeMismatch:
        case ErrorCode::WindowMisuse:
        case ErrorCode::BlockingQuery:
        case ErrorCode::UnsupportedPlan: return true;
        default: return false;
    }
}

}// namespace streamql
