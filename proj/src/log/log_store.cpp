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

#include <streamql/log/log_store.hpp>

#include <algorithm>
#include <sstream>

#include <streamql/error.hpp>
#include <streamql/physical/topology.hpp>

namespace streamql::log {

namespace fs = std::filesystem;

std::string encodeRecord(const LogRecord& record) {
    Json j;
    j["offset"] = record.offset;
    j["ts"] = record.ts;
    j["key"] = record.key ? Json(*record.key) : Json(nullptr);
    j["value"] = record.value;
    return j.dump();
}

LogRecord decodeRecord(std::string_view line, int64_t expectedOffset) {
    auto corrupt = [&](const std::string& why) {
        return Error(ErrorCode::CorruptLog, "record at offset " + std::to_string(expectedOffset) + ": " + why);
    };
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw corrupt("malformed JSON");
    LogRecord r;
    auto offset = j.find("offset");
    auto ts = j.find("ts");
    auto key = j.find("key");
    auto value = j.find("value");
    if (offset == j.end() || !offset->is_number_integer()) throw corrupt("missing offset");
    if (ts == j.end() || !ts->is_number_integer()) throw corrupt("missing ts");
    if (key == j.end() || !(key->is_null() || key->is_string())) throw corrupt("bad key");
    if (value == j.end() || !value->is_object()) throw corrupt("missing value");
    r.offset = offset->get<int64_t>();
    if (r.offset != expectedOffset) throw corrupt("offset field is " + std::to_string(r.offset));
    r.ts = ts->get<int64_t>();
    if (key->is_string()) r.key = key->get<std::string>();
    r.value = std::move(*value);
    return r;
}

LogReader::LogReader(const fs::path& file, int64_t startOffset) : in_(file) {
    if (!in_ && fs::exists(file)) throw Error(ErrorCode::IoFailure, "cannot open " + file.string());
    while (position_ < startOffset && in_) {
        if (!std::getline(in_, line_) || in_.eof()) break;
        ++position_;
    }
}

std::optional<LogRecord> LogReader::next() {
    if (!in_.is_open() || !in_) return std::nullopt;
    if (!std::getline(in_, line_)) return std::nullopt;
    // getline hit EOF without a newline: torn trailing write
    if (in_.eof()) return std::nullopt;
    LogRecord r = decodeRecord(line_, position_);
    ++position_;
    return r;
}

LogStore::LogStore(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_ / "checkpoints", ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create data directory " + root_.string() + ": " + ec.message());
    const fs::path catalogFile = root_ / "catalog.json";
    if (fs::exists(catalogFile)) {
        std::ifstream in(catalogFile);
        Json j = Json::parse(in, nullptr, false);
        if (j.is_discarded()) throw Error(ErrorCode::IoFailure, "catalog.json is not valid JSON");
        catalog_ = Catalog::fromJson(j);
    }
}

LogStore::~LogStore() {
    try {
        flush();
    } catch (...) {
    }
}

void LogStore::saveCatalog() { writeFileAtomic(root_ / "catalog.json", catalog_.toJson().dump(2) + "\n"); }

void LogStore::registerStream(StreamDef def) {
    std::lock_guard lock(mutex_);
    Catalog next = catalog_;
    next.registerStream(def);
    const StreamDef& stored = *next.findStream(def.name);
    std::error_code ec;
    fs::create_directories(root_ / stored.name, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create stream directory: " + ec.message());
    catalog_ = std::move(next);
    saveCatalog();
}

void LogStore::registerTable(TableDef def) {
    std::lock_guard lock(mutex_);
    Catalog next = catalog_;
    next.registerTable(std::move(def));
    catalog_ = std::move(next);
    saveCatalog();
}

const StreamDef& LogStore::stream(std::string_view name) const {
    const StreamDef* def = catalog_.findStream(name);
    if (!def) throw Error(ErrorCode::UnknownStream, "unknown stream '" + std::string(name) + "'");
    return *def;
}

fs::path LogStore::partitionPath(const StreamDef& def, int partition) const {
    return root_ / def.name / (std::to_string(partition) + ".ndjson");
}

namespace {

/// Counts complete lines; a torn tail is cut off so the next append starts on a fresh line.
int64_t recoverPartition(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) return 0;
    int64_t lines = 0;
    uint64_t goodBytes = 0, bytes = 0;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const auto n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            ++bytes;
            if (buf[i] == '\n') {
                ++lines;
                goodBytes = bytes;
            }
        }
    }
    in.close();
    if (goodBytes != bytes) fs::resize_file(file, goodBytes);
    return lines;
}

}// namespace

int64_t LogStore::append(std::string_view streamName, int partition, int64_t ts, std::optional<std::string> key,
                         Json value) {
    std::lock_guard lock(mutex_);
    const StreamDef& def = stream(streamName);
    if (partition < 0 || partition >= def.partitionCount) {
        throw Error(ErrorCode::PartitionOutOfRange, "partition " + std::to_string(partition) + " of stream '" + def.name +
                                                        "' with " + std::to_string(def.partitionCount) + " partitions");
    }
    const std::string id = def.name + "/" + std::to_string(partition);
    auto& writer = writers_[id];
    if (!writer) {
        const fs::path file = partitionPath(def, partition);
        fs::create_directories(file.parent_path());
        writer = std::make_unique<Writer>();
        writer->next = recoverPartition(file);
        writer->out.open(file, std::ios::binary | std::ios::app);
        if (!writer->out) {
            writers_.erase(id);
            throw Error(ErrorCode::IoFailure, "cannot open " + file.string() + " for append");
        }
    }
    LogRecord r{writer->next, ts, std::move(key), std::move(value)};
    writer->out << encodeRecord(r) << '\n';
    if (!writer->out) throw Error(ErrorCode::IoFailure, "append to " + id + " failed");
    return writer->next++;
}

void LogStore::flush() {
    std::lock_guard lock(mutex_);
    for (auto& [id, writer] : writers_) {
        writer->out.flush();
        if (!writer->out) throw Error(ErrorCode::IoFailure, "flush of " + id + " failed");
    }
}

LogReader LogStore::readFrom(std::string_view streamName, int partition, int64_t startOffset) const {
    std::lock_guard lock(mutex_);
    const StreamDef& def = stream(streamName);
    if (partition < 0 || partition >= def.partitionCount) {
        throw Error(ErrorCode::PartitionOutOfRange, "partition " + std::to_string(partition) + " of stream '" + def.name + "'");
    }
    if (startOffset < 0) throw Error(ErrorCode::InvalidArgument, "negative start offset");
    auto it = writers_.find(def.name + "/" + std::to_string(partition));
    if (it != writers_.end()) it->second->out.flush();
    return LogReader(partitionPath(def, partition), startOffset);
}

std::vector<LogRecord> LogStore::readAll(std::string_view streamName, int partition, int64_t startOffset) const {
    LogReader reader = readFrom(streamName, partition, startOffset);
    std::vector<LogRecord> out;
    while (auto r = reader.next()) out.push_back(std::move(*r));
    return out;
}

int64_t LogStore::partitionSize(std::string_view streamName, int partition) const {
    LogReader reader = readFrom(streamName, partition, 0);
    int64_t n = 0;
    while (reader.next()) ++n;
    return n;
}

fs::path LogStore::checkpointPath(const std::string& taskId, int64_t seq) const {
    return root_ / "checkpoints" / (taskId + "." + std::to_string(seq) + ".ckpt");
}

void LogStore::writeCheckpoint(const runtime::Checkpoint& ckpt) {
    try {
        writeFileAtomic(checkpointPath(ckpt.taskId, ckpt.seq), runtime::encodeCheckpoint(ckpt));
    } catch (const Error& e) {
        throw Error(ErrorCode::CheckpointWriteFailure, e.message());
    }
}

std::vector<int64_t> LogStore::checkpointSeqs(const std::string& taskId) const {
    std::vector<int64_t> seqs;
    const std::string prefix = taskId + ".";
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(root_ / "checkpoints", ec)) {
        const std::string name = entry.path().filename().string();
        if (name.size() <= prefix.size() + 5 || name.compare(0, prefix.size(), prefix) != 0) continue;
        if (name.compare(name.size() - 5, 5, ".ckpt") != 0) continue;
        const std::string digits = name.substr(prefix.size(), name.size() - prefix.size() - 5);
        if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) continue;
        seqs.push_back(std::stoll(digits));
    }
    std::sort(seqs.begin(), seqs.end());
    return seqs;
}

std::optional<runtime::Checkpoint> LogStore::readCheckpoint(const std::string& taskId, int64_t seq) const {
    std::ifstream in(checkpointPath(taskId, seq), std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        runtime::Checkpoint ckpt = runtime::decodeCheckpoint(buf.str());
        if (ckpt.taskId != taskId || ckpt.seq != seq) return std::nullopt;
        return ckpt;
    } catch (const Error&) {
        return std::nullopt;
    }
}

std::optional<runtime::Checkpoint> LogStore::latestCheckpoint(const std::string& taskId) const {
    auto seqs = checkpointSeqs(taskId);
    for (auto it = seqs.rbegin(); it != seqs.rend(); ++it) {
        if (auto ckpt = readCheckpoint(taskId, *it)) return ckpt;
    }
    return std::nullopt;
}

void LogStore::removeCheckpoint(const std::string& taskId, int64_t seq) {
    std::error_code ec;
    fs::remove(checkpointPath(taskId, seq), ec);
}

void writeFileAtomic(const fs::path& path, const std::string& text) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << text;
        out.flush();
        if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot rename " + tmp.string() + ": " + ec.message());
}

}// namespace streamql::log
