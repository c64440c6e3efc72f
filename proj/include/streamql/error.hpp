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

#include <stdexcept>
#include <string>
#include <string_view>

namespace streamql {

/// 1-based source position inside query text. {0, 0} means "no position".
struct SourcePos {
    int line = 0;
    int column = 0;

    bool valid() const { return line > 0; }
    std::string str() const;
    friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

enum class ErrorCode {
    LexError,
    ParseError,
    DuplicateName,
    InvalidSchema,
    UnknownName,
    UnknownColumn,
    TypeMismatch,
    WindowMisuse,
    BlockingQuery,
    UnsupportedPlan,
    UnknownStream,
    PartitionOutOfRange,
    IoFailure,
    CorruptLog,
    CheckpointWriteFailure,
    CheckpointCorrupt,
    InvalidArgument,
};

std::string_view errorCodeName(ErrorCode code);

/// Every failure raised by the engine. what() is "<Code>[ at L:C]: <message>".
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, std::string message, SourcePos pos = {});

    ErrorCode code() const { return code_; }
    const SourcePos& pos() const { return pos_; }
    const std::string& message() const { return message_; }

  private:
    ErrorCode code_;
    SourcePos pos_;
    std::string message_;
};

/// Raised by the parser; keeps the expected/found pair for callers that want it.
class ParseError : public Error {
  public:
    ParseError(SourcePos pos, std::string expected, std::string found);

    const std::string& expected() const { return expected_; }
    const std::string& found() const { return found_; }

  private:
    std::string expected_;
    std::string found_;
};

/// True for errors that are query diagnostics (CLI exit status 2) rather than runtime failures.
bool isQueryDiagnostic(ErrorCode code);

}// namespace streamql
