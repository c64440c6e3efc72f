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

#include "tasks.hpp"

#include <algorithm>
#include <iostream>

#include <streamql/error.hpp>

namespace streamql::runtime::detail {

using physical::Routing;
using physical::StageKind;

namespace {

constexpr size_t kBatchSize = 256;
constexpr int kWatermarkEvery = 32;

void updateMax(std::atomic<int64_t>& target, int64_t value) {
    int64_t current = target.load();
    while (value > current && !target.compare_exchange_weak(current, value)) {
    }
}

/// wm - lateness - size without wrapping.
int64_t stateFloor(int64_t watermark, int64_t latenessMs, int64_t sizeMs) {
    const __int128 v = static_cast<__int128>(watermark) - latenessMs - sizeMs;
    return v < kMinTimestamp ? kMinTimestamp : static_cast<int64_t>(v);
}

bool finite(int64_t watermark) { return watermark != kMinTimestamp && watermark != kMaxTimestamp; }

}// namespace

// ---- Coordinator ----

bool Coordinator::onEvent() {
    if (ctx_.stopped() || ctx_.halting()) return false;
    const int64_t n = ++events_;
    const auto& config = ctx_.config;
    if (config.checkpointEveryNEvents > 0 && n % config.checkpointEveryNEvents == 0) {
        std::lock_guard lock(mutex_);
        const int64_t seq = baseSeq_ + n / config.checkpointEveryNEvents;
        if (seq > requested_.load()) requested_.store(seq);
        cv_.notify_all();
    }
    // the crash comes after the N-th event, so a barrier requested by that event is still taken
    if (config.crashAfterEvents > 0 && n >= config.crashAfterEvents) {
        ctx_.crash();
        return false;
    }
    return true;
}

void Coordinator::sourceFinished() {
    std::lock_guard lock(mutex_);
    --remaining_;
    cv_.notify_all();
}

bool Coordinator::waitForWork(int64_t injected) {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] {
        return ctx_.stopped() || ctx_.halting() || requested_.load() > injected || remaining_ == 0;
    });
    if (ctx_.stopped() || ctx_.halting()) return false;
    return requested_.load() > injected;
}

void Coordinator::wakeAll() {
    std::lock_guard lock(mutex_);
    cv_.notify_all();
}

// ---- RunContext ----

RunContext::RunContext(const physical::Topology& topo, log::LogStore& logStore, const RunConfig& cfg)
    : topology(topo), store(logStore), config(cfg), tasks(topo.tasks()) {
    firstTask.assign(topo.stages.size(), 0);
    for (size_t i = tasks.size(); i-- > 0;) firstTask[tasks[i].stage] = static_cast<int>(i);
    channels.resize(tasks.size());
    for (size_t t = 0; t < tasks.size(); ++t) {
        auto inputs = topo.inputsOf(tasks[t].stage);
        std::sort(inputs.begin(), inputs.end(),
                  [](const physical::Edge* a, const physical::Edge* b) { return a->toInput < b->toInput; });
        for (const physical::Edge* e : inputs) {
            for (int i = 0; i < topo.stages[e->from].parallelism; ++i) {
                channels[t].push_back({taskIndex(e->from, i), e->toInput});
            }
        }
        inboxes.push_back(std::make_unique<BoundedQueue<Envelope>>(std::max<size_t>(cfg.queueCapacity, 2)));
    }
    restored.resize(tasks.size());
}

int RunContext::channelOf(int fromTask, int toTask) const {
    const auto& list = channels[toTask];
    for (size_t i = 0; i < list.size(); ++i) {
        if (list[i].fromTask == fromTask) return static_cast<int>(i);
    }
    throw Error(ErrorCode::UnsupportedPlan, "no channel from " + tasks[fromTask].taskId + " to " + tasks[toTask].taskId);
}

void RunContext::stopAll() {
    stopped_ = true;
    for (auto& inbox : inboxes) inbox->close();
    if (coordinator) coordinator->wakeAll();
}

void RunContext::crash() {
    crashed_ = true;
    if (coordinator) coordinator->wakeAll();
}

void RunContext::fail(std::exception_ptr e) {
    {
        std::lock_guard lock(errorMutex_);
        if (!error_) error_ = e;
    }
    stopAll();
}

std::exception_ptr RunContext::error() const {
    std::lock_guard lock(errorMutex_);
    return error_;
}

void RunContext::checkpointCompleted(int64_t seq) {
    ++checkpointsWritten;
    // keep seq and seq-1 so a damaged newest file still leaves a complete generation
    if (seq - 2 < 0) return;
    for (const auto& task : tasks) store.removeCheckpoint(task.taskId, seq - 2);
}

// ---- OutputPort ----

OutputPort::OutputPort(RunContext& ctx, int task) : ctx_(ctx), task_(task) {
    const auto& topo = ctx.topology;
    const int stage = ctx.tasks[task].stage;
    const auto& schema = topo.stages[stage].outputSchema;
    for (const physical::Edge* e : topo.outputsOf(stage)) {
        Route route;
        route.routing = e->routing;
        for (const auto& key : e->keyColumns) {
            auto it = std::find_if(schema.begin(), schema.end(),
                                   [&](const plan::PlanColumn& c) { return c.qualifiedName() == key; });
            if (it == schema.end()) throw Error(ErrorCode::UnsupportedPlan, "shuffle key " + key + " not in stage output");
            route.keyColumns.push_back(static_cast<size_t>(it - schema.begin()));
        }
        for (int i = 0; i < topo.stages[e->to].parallelism; ++i) {
            const int to = ctx.taskIndex(e->to, i);
            targets_.push_back({to, ctx.channelOf(task, to), {}});
            route.targets.push_back(targets_.size() - 1);
        }
        routes_.push_back(std::move(route));
    }
}

void OutputPort::push(Target& target, Message msg) {
    target.buffer.push_back(std::move(msg));
    if (target.buffer.size() >= kBatchSize) send(target);
}

void OutputPort::send(Target& target) {
    if (target.buffer.empty()) return;
    Envelope env{target.channel, std::move(target.buffer)};
    target.buffer = {};
    target.buffer.reserve(kBatchSize);
    ctx_.inboxes[target.task]->push(std::move(env));
}

void OutputPort::emitRow(int64_t ts, Row row, Finality finality) {
    for (size_t r = 0; r < routes_.size(); ++r) {
        const Route& route = routes_[r];
        const bool last = r + 1 == routes_.size();
        auto deliver = [&](size_t target, bool move) {
            push(targets_[route.targets[target]], RowMsg{ts, move ? std::move(row) : row, finality});
        };
        switch (route.routing) {
            case Routing::Forward:
                deliver(static_cast<size_t>(ctx_.tasks[task_].instance) % route.targets.size(), last);
                break;
            case Routing::Broadcast:
                for (size_t i = 0; i < route.targets.size(); ++i) deliver(i, last && i + 1 == route.targets.size());
                break;
            case Routing::KeyedHash: {
                Row values;
                for (size_t c : route.keyColumns) values.push_back(row[c]);
                const auto key = routingKey(values);
                const int p = physical::partitionForKey(key ? std::optional<std::string_view>(*key) : std::nullopt,
                                                        static_cast<int>(route.targets.size()));
                deliver(static_cast<size_t>(p), last);
                break;
            }
        }
    }
}

void OutputPort::emitControl(const Message& msg, bool flushNow) {
    for (auto& target : targets_) {
        target.buffer.push_back(msg);
        if (flushNow || target.buffer.size() >= kBatchSize) send(target);
    }
}

void OutputPort::flush() {
    for (auto& target : targets_) send(target);
}

// ---- Task ----

Task::Task(RunContext& ctx, int task)
    : ctx_(ctx), task_(task), stage_(ctx.topology.stages[ctx.tasks[task].stage]), taskId_(ctx.tasks[task].taskId),
      out_(ctx, task), chain_(stage_.chain) {
    if (const auto& ckpt = ctx.restored[task]) watermark_ = ckpt->watermarkMs;
}

Checkpoint Task::baseCheckpoint(int64_t seq, const std::string& kind) const {
    Checkpoint c;
    c.taskId = taskId_;
    c.seq = seq;
    c.watermarkMs = watermark_;
    c.stateKind = kind;
    c.state = stateEnvelope();
    return c;
}

Json Task::stateEnvelope() const { return Json{{"fingerprint", ctx_.topology.fingerprint}}; }

const Json* Task::restoredState() const {
    const auto& ckpt = ctx_.restored[task_];
    return ckpt ? &ckpt->state : nullptr;
}

void Task::noteState(size_t entries) {
    const auto n = static_cast<int64_t>(entries);
    if (n > localPeak_) {
        localPeak_ = n;
        updateMax(ctx_.peakState, n);
    }
}

// ---- sources ----

void SourceTaskBase::run() {
    injected_ = ctx_.coordinator->baseSeq();
    auto halted = [&] {
        if (!ctx_.halting()) return false;
        // barriers requested before the crash are still taken, so the cut stays complete
        injectBarriers();
        out_.emitControl(HaltMsg{});
        return true;
    };
    while (!ctx_.stopped() && !ctx_.halting()) {
        if (!injectBarriers()) break;
        if (!step()) break;
    }
    if (ctx_.stopped() || halted()) return;
    out_.flush();
    ctx_.coordinator->sourceFinished();
    while (ctx_.coordinator->waitForWork(injected_)) {
        if (!injectBarriers()) break;
    }
    if (ctx_.stopped() || halted()) return;
    finish();
    out_.emitControl(WatermarkMsg{kMaxTimestamp});
    out_.emitControl(EndMsg{});
}

bool SourceTaskBase::injectBarriers() {
    const int64_t requested = ctx_.coordinator->requestedSeq();
    while (injected_ < requested) {
        if (ctx_.stopped()) return false;
        const int64_t seq = injected_ + 1;
        ctx_.store.writeCheckpoint(snapshot(seq));
        out_.emitControl(BarrierMsg{seq});
        injected_ = seq;
    }
    return !ctx_.stopped() && !ctx_.halting();
}

StreamSourceTask::StreamSourceTask(RunContext& ctx, int task)
    : SourceTaskBase(ctx, task), partition_(ctx.tasks[task].instance) {
    for (size_t i = 0; i < stage_.columns.size(); ++i) fields_.push_back({stage_.columns[i], stage_.coreSchema[i].type});
    int64_t offset = 0;
    if (const auto& ckpt = ctx.restored[task]) {
        auto it = ckpt->offsets.find(partition_);
        if (it == ckpt->offsets.end()) throw Error(ErrorCode::CheckpointCorrupt, taskId_ + " checkpoint lacks its offset");
        offset = it->second;
        dropped_ = ckpt->state.at("dropped").get<int64_t>();
        lastSentWatermark_ = ckpt->state.at("lastSentWatermark").get<int64_t>();
    }
    reader_ = ctx.store.readFrom(stage_.sourceName, partition_, offset);
}

bool StreamSourceTask::step() {
    auto record = reader_.next();
    if (!record) return false;
    if (record->ts < watermark_) {
        ++dropped_;
    } else {
        watermark_ = advanceWatermark(watermark_, record->ts, ctx_.config.latenessMs);
        Row row;
        row.reserve(fields_.size());
        for (const auto& f : fields_) {
            auto it = record->value.find(f.name);
            std::optional<Value> v;
            if (it != record->value.end()) v = valueFromJson(*it, f.type);
            if (!v) {
                throw Error(ErrorCode::TypeMismatch, "record " + std::to_string(record->offset) + " of " + stage_.sourceName +
                                                         "/" + std::to_string(partition_) + ": bad or missing '" + f.name + "'");
            }
            row.push_back(std::move(*v));
        }
        if (auto r = chain_.apply(std::move(row))) out_.emitRow(record->ts, std::move(*r), Finality::None);
    }
    if (watermark_ > lastSentWatermark_ && ++sinceWatermark_ >= kWatermarkEvery) {
        out_.emitControl(WatermarkMsg{watermark_}, false);
        lastSentWatermark_ = watermark_;
        sinceWatermark_ = 0;
    }
    return ctx_.coordinator->onEvent();
}

Checkpoint StreamSourceTask::snapshot(int64_t seq) {
    Checkpoint c = baseCheckpoint(seq, "source");
    c.offsets[partition_] = reader_.position();
    c.state["dropped"] = dropped_;
    c.state["lastSentWatermark"] = lastSentWatermark_;
    return c;
}

void StreamSourceTask::finish() { ctx_.lateDropped += dropped_; }

TableSourceTask::TableSourceTask(RunContext& ctx, int task) : SourceTaskBase(ctx, task) {
    table_ = ctx.store.catalog().findTable(stage_.sourceName);
    if (!table_) throw Error(ErrorCode::UnknownName, "table '" + stage_.sourceName + "' is not in the catalog");
    for (const auto& c : stage_.columns) {
        auto idx = table_->schema.indexOf(c);
        if (!idx) throw Error(ErrorCode::UnknownColumn, "table column '" + c + "' vanished");
        columns_.push_back(*idx);
    }
    if (const auto& ckpt = ctx.restored[task]) position_ = ckpt->offsets.count(0) ? ckpt->offsets.at(0) : 0;
}

bool TableSourceTask::step() {
    if (position_ >= static_cast<int64_t>(table_->rows.size())) return false;
    const Row& source = table_->rows[static_cast<size_t>(position_++)];
    Row row;
    for (size_t c : columns_) row.push_back(source[c]);
    if (auto r = chain_.apply(std::move(row))) out_.emitRow(kMinTimestamp, std::move(*r), Finality::None);
    return true;
}

Checkpoint TableSourceTask::snapshot(int64_t seq) {
    Checkpoint c = baseCheckpoint(seq, "table");
    c.offsets[0] = position_;
    return c;
}

// ---- InputTask ----

InputTask::InputTask(RunContext& ctx, int task) : Task(ctx, task) {
    for (const auto& info : ctx.channels[task]) {
        Channel ch;
        ch.side = info.side;
        channels_.push_back(std::move(ch));
    }
}

int64_t InputTask::sideWatermark(int side) const {
    int64_t wm = kMaxTimestamp;
    for (const auto& ch : channels_) {
        if (ch.side == side) wm = std::min(wm, ch.watermark);
    }
    return wm;
}

Json InputTask::channelWatermarks() const {
    Json out = Json::array();
    for (const auto& ch : channels_) out.push_back(ch.watermark);
    return out;
}

void InputTask::restoreChannelWatermarks(const Json& j) {
    if (j.size() != channels_.size()) throw Error(ErrorCode::CheckpointCorrupt, taskId_ + ": channel count mismatch");
    for (size_t i = 0; i < channels_.size(); ++i) channels_[i].watermark = j[i].get<int64_t>();
}

void InputTask::run() {
    while (!finished_) {
        auto env = ctx_.inboxes[task_]->pop();
        if (!env) return;
        auto& pending = channels_[static_cast<size_t>(env->channel)].pending;
        for (auto& m : env->messages) pending.push_back(std::move(m));
        drain();
        if (ctx_.stopped()) return;
    }
    // nothing more is read; unblock any upstream still pushing after a halt
    ctx_.inboxes[task_]->close();
}

void InputTask::drain() {
    bool progress = true;
    while (progress && !finished_ && !ctx_.stopped()) {
        progress = false;
        for (auto& ch : channels_) {
            while (!ch.blocked && !ch.pending.empty() && !finished_) {
                Message msg = std::move(ch.pending.front());
                ch.pending.pop_front();
                handle(ch, msg);
                progress = true;
            }
        }
        bool anyLive = false, allBlocked = true;
        for (const auto& ch : channels_) {
            if (ch.ended) continue;
            anyLive = true;
            allBlocked = allBlocked && ch.blocked;
        }
        if (anyLive && allBlocked && !finished_) {
            completeBarrier();
            progress = true;
        }
    }
}

void InputTask::handle(Channel& ch, Message& msg) {
    if (auto* row = std::get_if<RowMsg>(&msg)) {
        onRow(ch.side, *row);
    } else if (auto* wm = std::get_if<WatermarkMsg>(&msg)) {
        if (wm->watermark > ch.watermark) {
            ch.watermark = wm->watermark;
            recomputeWatermark();
        }
    } else if (auto* barrier = std::get_if<BarrierMsg>(&msg)) {
        ch.blocked = true;
        ch.blockedSeq = barrier->seq;
    } else if (std::holds_alternative<HaltMsg>(msg)) {
        out_.emitControl(HaltMsg{});
        onHalt();
        finished_ = true;
    } else {
        ch.ended = true;
        ch.watermark = kMaxTimestamp;
        const bool sideDone = std::all_of(channels_.begin(), channels_.end(),
                                          [&](const Channel& c) { return c.side != ch.side || c.ended; });
        if (sideDone) onSideEnded(ch.side);
        recomputeWatermark();
        if (std::all_of(channels_.begin(), channels_.end(), [](const Channel& c) { return c.ended; })) {
            onEnd();
            finished_ = true;
        }
    }
}

void InputTask::recomputeWatermark() {
    int64_t wm = kMaxTimestamp;
    for (const auto& ch : channels_) wm = std::min(wm, ch.watermark);
    const bool advanced = wm > watermark_;
    if (advanced) watermark_ = wm;
    onWatermark(watermark_, advanced);
}

void InputTask::completeBarrier() {
    int64_t seq = -1;
    for (const auto& ch : channels_) {
        if (ch.ended) continue;
        if (seq >= 0 && ch.blockedSeq != seq) {
            throw Error(ErrorCode::CheckpointWriteFailure, taskId_ + ": misaligned barriers " + std::to_string(seq) +
                                                               " and " + std::to_string(ch.blockedSeq));
        }
        seq = ch.blockedSeq;
    }
    if (ctx_.stopped()) return;
    ctx_.store.writeCheckpoint(snapshot(seq));
    out_.emitControl(BarrierMsg{seq});
    afterCheckpoint(seq);
    for (auto& ch : channels_) ch.blocked = false;
}

// ---- AggregateTask ----

AggregateTask::AggregateTask(RunContext& ctx, int task) : InputTask(ctx, task), agg_(stage_) {
    if (const Json* state = restoredState()) {
        agg_.fromJson(state->at("op"));
        accepted_ = state->at("accepted").get<int64_t>();
        restoreChannelWatermarks(state->at("channels"));
    }
}

void AggregateTask::emit(std::vector<OutputRow> rows) {
    for (auto& r : rows) {
        if (auto row = chain_.apply(std::move(r.row))) out_.emitRow(r.ts, std::move(*row), r.finality);
    }
}

void AggregateTask::onRow(int, RowMsg& msg) {
    if (!agg_.step(msg.ts, msg.row, watermark_)) return;
    ++accepted_;
    noteState(agg_.stateSize());
    const int64_t every = ctx_.config.emitPartialEveryNEvents;
    if (every > 0 && accepted_ % every == 0) emit(agg_.partial());
}

void AggregateTask::onWatermark(int64_t watermark, bool advanced) {
    if (!advanced) return;
    emit(agg_.fire(watermark));
    if (stage_.window && finite(watermark) &&
        agg_.oldestWindowStart() < stateFloor(watermark, ctx_.config.latenessMs, agg_.maxWindowSizeMs())) {
        ++ctx_.boundViolations;
    }
    out_.emitControl(WatermarkMsg{watermark}, false);
}

void AggregateTask::onEnd() {
    emit(agg_.fire(kMaxTimestamp));
    ctx_.lateDropped += agg_.lateDropped();
    out_.emitControl(WatermarkMsg{kMaxTimestamp});
    out_.emitControl(EndMsg{});
}

Checkpoint AggregateTask::snapshot(int64_t seq) {
    Checkpoint c = baseCheckpoint(seq, "aggregate");
    c.state["op"] = agg_.toJson();
    c.state["accepted"] = accepted_;
    c.state["channels"] = channelWatermarks();
    return c;
}

// ---- JoinTask ----

JoinTask::JoinTask(RunContext& ctx, int task) : InputTask(ctx, task), joiner_(stage_) {
    if (const Json* state = restoredState()) {
        joiner_.fromJson(state->at("op"));
        restoreChannelWatermarks(state->at("channels"));
    }
}

void JoinTask::emit(std::vector<OutputRow>& rows) {
    for (auto& r : rows) {
        if (auto row = chain_.apply(std::move(r.row))) out_.emitRow(r.ts, std::move(*row), r.finality);
    }
    rows.clear();
}

void JoinTask::onRow(int side, RowMsg& msg) {
    std::vector<OutputRow> rows;
    joiner_.step(side, msg.ts, msg.row, sideWatermark(side), rows);
    noteState(joiner_.stateSize());
    emit(rows);
}

void JoinTask::onWatermark(int64_t watermark, bool advanced) {
    joiner_.evict(sideWatermark(0), sideWatermark(1));
    // held probes are released later with their own timestamps, so the watermark waits for them
    if (!advanced || joiner_.waitingForStatic()) return;
    if (stage_.staticSide < 0 && stage_.leftWindowMs && stage_.rightWindowMs && finite(watermark) &&
        joiner_.oldestTs() < stateFloor(watermark, ctx_.config.latenessMs, joiner_.maxWindowSizeMs())) {
        ++ctx_.boundViolations;
    }
    out_.emitControl(WatermarkMsg{watermark}, false);
}

void JoinTask::onSideEnded(int side) {
    if (side != stage_.staticSide) return;
    std::vector<OutputRow> rows;
    joiner_.staticSideFinished(rows);
    emit(rows);
    if (watermark_ > kMinTimestamp) out_.emitControl(WatermarkMsg{watermark_}, false);
}

void JoinTask::onEnd() {
    ctx_.lateDropped += joiner_.lateDropped();
    out_.emitControl(WatermarkMsg{kMaxTimestamp});
    out_.emitControl(EndMsg{});
}

Checkpoint JoinTask::snapshot(int64_t seq) {
    Checkpoint c = baseCheckpoint(seq, "join");
    c.state["op"] = joiner_.toJson();
    c.state["channels"] = channelWatermarks();
    return c;
}

// ---- SinkTask ----

SinkTask::SinkTask(RunContext& ctx, int task) : InputTask(ctx, task) {
    for (const auto& c : stage_.outputSchema) names_.push_back(c.name);
    int64_t& bytes = bytes_;
    if (const Json* state = restoredState()) {
        bytes = state->at("bytes").get<int64_t>();
        rows_ = state->at("rows").get<int64_t>();
        for (const auto& entry : state->at("pending")) {
            auto& rows = pendingFinal_[entry.at(0).get<int64_t>()];
            for (const auto& r : entry.at(1)) rows.push_back(rowFromJson(r));
        }
        restoreChannelWatermarks(state->at("channels"));
    }
    const auto& path = ctx.config.outputPath;
    if (path.empty()) {
        stream_ = &std::cout;
        return;
    }
    namespace fs = std::filesystem;
    std::error_code ec;
    if (fs::exists(path, ec)) {
        // drop whatever the interrupted run wrote after the restored checkpoint
        const auto size = static_cast<int64_t>(fs::file_size(path, ec));
        if (!ec && size >= bytes) fs::resize_file(path, static_cast<uintmax_t>(bytes), ec);
        if (ec) throw Error(ErrorCode::IoFailure, "cannot truncate " + path + ": " + ec.message());
        if (size < bytes) throw Error(ErrorCode::CheckpointCorrupt, "output " + path + " is shorter than its checkpoint");
    } else if (bytes > 0) {
        throw Error(ErrorCode::CheckpointCorrupt, "output " + path + " vanished since the checkpoint");
    }
    file_.open(path, std::ios::binary | std::ios::app);
    if (!file_) throw Error(ErrorCode::IoFailure, "cannot open output " + path);
    stream_ = &file_;
}

SinkTask::~SinkTask() {
    if (stream_) stream_->flush();
}

void SinkTask::write(const Row& row, Finality finality) {
    Json obj = Json::object();
    for (size_t i = 0; i < names_.size(); ++i) obj[names_[i]] = valueToJson(row[i]);
    if (stage_.aggregated) obj["finality"] = std::string(finalityName(finality));
    const std::string line = obj.dump() + "\n";
    stream_->write(line.data(), static_cast<std::streamsize>(line.size()));
    bytes_ += static_cast<int64_t>(line.size());
    ++rows_;
}

void SinkTask::release(int64_t upTo) {
    auto it = pendingFinal_.begin();
    while (it != pendingFinal_.end() && it->first <= upTo) {
        std::sort(it->second.begin(), it->second.end(), rowLess);
        for (const auto& row : it->second) write(row, Finality::Final);
        it = pendingFinal_.erase(it);
    }
}

void SinkTask::onRow(int, RowMsg& msg) {
    if (msg.finality == Finality::Final) {
        pendingFinal_[msg.ts].push_back(std::move(msg.row));
    } else {
        write(msg.row, msg.finality);
    }
}

void SinkTask::onWatermark(int64_t watermark, bool advanced) {
    if (advanced) release(watermark);
}

void SinkTask::onEnd() {
    release(kMaxTimestamp);
    stream_->flush();
    if (!*stream_) throw Error(ErrorCode::IoFailure, "writing query output failed");
    ctx_.rowsEmitted = rows_;
}

Checkpoint SinkTask::snapshot(int64_t seq) {
    stream_->flush();
    if (!*stream_) throw Error(ErrorCode::IoFailure, "writing query output failed");
    Checkpoint c = baseCheckpoint(seq, "sink");
    c.state["bytes"] = file_.is_open() ? bytes_ : int64_t{0};
    c.state["rows"] = rows_;
    Json pending = Json::array();
    for (const auto& [ts, rows] : pendingFinal_) {
        Json list = Json::array();
        for (const auto& r : rows) list.push_back(rowToJson(r));
        pending.push_back(Json::array({ts, std::move(list)}));
    }
    c.state["pending"] = std::move(pending);
    c.state["channels"] = channelWatermarks();
    return c;
}

void SinkTask::onHalt() { stream_->flush(); }

void SinkTask::afterCheckpoint(int64_t seq) { ctx_.checkpointCompleted(seq); }

std::unique_ptr<Task> makeTask(RunContext& ctx, int task) {
    switch (ctx.topology.stages[ctx.tasks[task].stage].kind) {
        case StageKind::Source: return std::make_unique<StreamSourceTask>(ctx, task);
        case StageKind::TableSource: return std::make_unique<TableSourceTask>(ctx, task);
        case StageKind::WindowAggregate: return std::make_unique<AggregateTask>(ctx, task);
        case StageKind::WindowJoin: return std::make_unique<JoinTask>(ctx, task);
        case StageKind::Sink: return std::make_unique<SinkTask>(ctx, task);
    }
    throw Error(ErrorCode::UnsupportedPlan, "unknown stage kind");
}

}// namespace streamql::runtime::detail
