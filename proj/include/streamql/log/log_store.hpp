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
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <streamql/catalog.hpp>
#include <streamql/runtime/checkpoint.hpp>

namespace streamql::log {

struct LogRecord {
    int64_t offset = 0;
    int64_t ts = 0;
    std::optional<std::string> key;
    Json value;

    friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

/// One partition line: {"offset":N,"ts":N,"key":"..."|null,"value":{...}}
std::string encodeRecord(const LogRecord& record);
/// Throws CorruptLog naming the expected offset.
LogRecord decodeRecord(std::string_view line, int64_t expectedOffset);

/// Sequential reader over one partition file. Yields records in offset order starting at the
/// requested offset; a trailing line without a newline (torn append) is ignored.
class LogReader {
  public:
    LogReader() = default;
    LogReader(const std::filesystem::path& file, int64_t startOffset);

    std::optional<LogRecord> next();
    /// Offset of the next record that next() would return.
    int64_t position() const { return position_; }

  private:
    std::ifstream in_;
    int64_t position_ = 0;
    std::string line_;
};

/// Directory-backed store: catalog.json, <stream>/<partition>.ndjson, checkpoints/<taskId>.<seq>.ckpt.
class LogStore {
  public:
    explicit LogStore(std::filesystem::path root);
    ~LogStore();
    LogStore(const LogStore&) = delete;
    LogStore& operator=(const LogStore&) = delete;

    const std::filesystem::path& root() const { return root_; }

    const Catalog& catalog() const { return catalog_; }
    void registerStream(StreamDef def);
    void registerTable(TableDef def);

    int64_t append(std::string_view stream, int partition, int64_t ts, std::optional<std::string> key, Json value);
    /// Flushes buffered appends to the partition files.
    void flush();
    LogReader readFrom(std::string_view stream, int partition, int64_t startOffset) const;
    std::vector<LogRecord> readAll(std::string_view stream, int partition, int64_t startOffset = 0) const;
    int64_t partitionSize(std::string_view stream, int partition) const;

    void writeCheckpoint(const runtime::Checkpoint& ckpt);
    /// Highest-seq checkpoint that parses, skipping corrupt files.
    std::optional<runtime::Checkpoint> latestCheckpoint(const std::string& taskId) const;
    std::optional<runtime::Checkpoint> readCheckpoint(const std::string& taskId, int64_t seq) const;
    std::vector<int64_t> checkpointSeqs(const std::string& taskId) const;
    void removeCheckpoint(const std::string& taskId, int64_t seq);
    std::filesystem::path checkpointPath(const std::string& taskId, int64_t seq) const;

  private:
    struct Writer {
        std::ofstream out;
        int64_t next = 0;
    };

    const StreamDef& stream(std::string_view name) const;
    std::filesystem::path partitionPath(const StreamDef& def, int partition) const;
    void saveCatalog();

    std::filesystem::path root_;
    Catalog catalog_;
    std::map<std::string, std::unique_ptr<Writer>> writers_;
    mutable std::mutex mutex_;
};

/// Writes text to path via a temp file and rename.
void writeFileAtomic(const std::filesystem::path& path, const std::string& text);

}// namespace streamql::log
