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

#include <atomic>
#include <condition_variable>
#include <deque>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <variant>
#include <vector>

#include <streamql/runtime/aggregator.hpp>
#include <streamql/runtime/join.hpp>
#include <streamql/runtime/runtime.hpp>

namespace streamql::runtime::detail {

struct RowMsg {
    int64_t ts = 0;
    Row row;
    Finality finality = Finality::None;
};
struct WatermarkMsg {
    int64_t watermark = kMinTimestamp;
};
struct BarrierMsg {
    int64_t seq = 0;
};
struct EndMsg {};
/// Injected crash: receivers stop at once without firing windows or checkpointing again.
struct HaltMsg {};

using Message = std::variant<RowMsg, WatermarkMsg, BarrierMsg, EndMsg, HaltMsg>;

struct Envelope {
    int channel = 0;
    std::vector<Message> messages;
};

template<typename T>
class BoundedQueue {
  public:
    explicit BoundedQueue(size_t capacity) : capacity_(capacity) {}

    bool push(T item) {
        std::unique_lock lock(mutex_);
        notFull_.wait(lock, [&] { return closed_ || items_.size() < capacity_; });
        if (closed_) return false;
        items_.push_back(std::move(item));
        notEmpty_.notify_one();
        return true;
    }

    std::optional<T> pop() {
        std::unique_lock lock(mutex_);
        notEmpty_.wait(lock, [&] { return closed_ || !items_.empty(); });
        if (closed_) return std::nullopt;
        T item = std::move(items_.front());
        items_.pop_front();
        notFull_.notify_one();
        return item;
    }

    void close() {
        std::lock_guard lock(mutex_);
        closed_ = true;
        notFull_.notify_all();
        notEmpty_.notify_all();
    }

  private:
    size_t capacity_;
    std::deque<T> items_;
    bool closed_ = false;
    std::mutex mutex_;
    std::condition_variable notFull_;
    std::condition_variable notEmpty_;
};

/// One inbound channel of a task: an (upstream task, input side) pair.
struct ChannelInfo {
    int fromTask = 0;
    int side = 0;
};

class RunContext;

/// Barrier and crash bookkeeping shared by the source tasks.
class Coordinator {
  public:
    Coordinator(RunContext& ctx, int64_t baseSeq, int sources) : ctx_(ctx), baseSeq_(baseSeq), remaining_(sources) {}

    /// Counts one source event. Returns false once the run has been stopped.
    bool onEvent();
    int64_t requestedSeq() const { return requested_.load(); }
    int64_t baseSeq() const { return baseSeq_; }
    int64_t events() const { return events_.load(); }

    void sourceFinished();
    /// Blocks until either a barrier beyond injected is requested (returns true) or every
    /// source has finished with no barrier outstanding (returns false).
    bool waitForWork(int64_t injected);
    void wakeAll();

  private:
    RunContext& ctx_;
    int64_t baseSeq_;
    std::atomic<int64_t> events_{0};
    std::atomic<int64_t> requested_{0};
    int remaining_;
    std::mutex mutex_;
    std::condition_variable cv_;
};

class RunContext {
  public:
    RunContext(const physical::Topology& topology, log::LogStore& store, const RunConfig& config);

    const physical::Topology& topology;
    log::LogStore& store;
    RunConfig config;
    std::vector<physical::TaskSpec> tasks;
    std::vector<int> firstTask;// per stage
    std::vector<std::vector<ChannelInfo>> channels;// per task
    std::vector<std::unique_ptr<BoundedQueue<Envelope>>> inboxes;
    std::unique_ptr<Coordinator> coordinator;
    std::vector<std::optional<Checkpoint>> restored;// per task

    int taskIndex(int stage, int instance) const { return firstTask[stage] + instance; }
    int channelOf(int fromTask, int toTask) const;

    bool stopped() const { return stopped_.load(); }
    /// Set by an injected crash: sources emit HaltMsg and exit, barriers already in flight still complete.
    bool halting() const { return crashed_.load(); }
    void crash();
    void fail(std::exception_ptr error);
    std::exception_ptr error() const;
    bool crashed() const { return crashed_.load(); }

    /// Sink reports a globally complete checkpoint; older generations are deleted.
    void checkpointCompleted(int64_t seq);

    std::atomic<int64_t> checkpointsWritten{0};
    std::atomic<int64_t> peakState{0};
    std::atomic<int64_t> boundViolations{0};
    std::atomic<int64_t> lateDropped{0};
    std::atomic<int64_t> rowsEmitted{0};

  private:
    void stopAll();

    std::atomic<bool> stopped_{false};
    std::atomic<bool> crashed_{false};
    mutable std::mutex errorMutex_;
    std::exception_ptr error_;
};

/// Routes a task's output along its outgoing edges, batching messages per target.
class OutputPort {
  public:
    OutputPort(RunContext& ctx, int task);

    void emitRow(int64_t ts, Row row, Finality finality);
    /// Sends a control message on every outgoing channel; barriers and end markers flush.
    void emitControl(const Message& msg, bool flushNow = true);
    void flush();
    bool empty() const { return targets_.empty(); }

  private:
    struct Target {
        int task = 0;
        int channel = 0;
        std::vector<Message> buffer;
    };
    struct Route {
        physical::Routing routing = physical::Routing::Forward;
        std::vector<size_t> keyColumns;
        std::vector<size_t> targets;// indices into targets_
    };
    void push(Target& target, Message msg);
    void send(Target& target);

    RunContext& ctx_;
    int task_;
    std::vector<Target> targets_;
    std::vector<Route> routes_;
};

class Task {
  public:
    Task(RunContext& ctx, int task);
    virtual ~Task() = default;

    virtual void run() = 0;

  protected:
    Checkpoint baseCheckpoint(int64_t seq, const std::string& kind) const;
    Json stateEnvelope() const;
    /// Returns the operator part of a restored state after checking the topology fingerprint.
    const Json* restoredState() const;
    void noteState(size_t entries);

    RunContext& ctx_;
    int task_;
    const physical::StageSpec& stage_;
    std::string taskId_;
    OutputPort out_;
    Chain chain_;
    int64_t watermark_ = kMinTimestamp;
    int64_t localPeak_ = 0;
};

/// Shared driver for sources: emits records, injects barriers between events, and waits for
/// all other sources at end of input so every barrier reaches every task.
class SourceTaskBase : public Task {
  public:
    using Task::Task;
    void run() override;

  protected:
    /// Emits the next record; false at end of input.
    virtual bool step() = 0;
    virtual Checkpoint snapshot(int64_t seq) = 0;
    virtual void finish() {}

    bool injectBarriers();
    int64_t injected_ = 0;
};

class StreamSourceTask : public SourceTaskBase {
  public:
    StreamSourceTask(RunContext& ctx, int task);

  protected:
    bool step() override;
    Checkpoint snapshot(int64_t seq) override;
    void finish() override;

  private:
    struct Field {
        std::string name;
        DataType type;
    };
    int partition_;
    std::vector<Field> fields_;
    log::LogReader reader_;
    int64_t dropped_ = 0;
    int64_t lastSentWatermark_ = kMinTimestamp;
    int sinceWatermark_ = 0;
};

class TableSourceTask : public SourceTaskBase {
  public:
    TableSourceTask(RunContext& ctx, int task);

  protected:
    bool step() override;
    Checkpoint snapshot(int64_t seq) override;

  private:
    const TableDef* table_;
    std::vector<size_t> columns_;
    int64_t position_ = 0;
};

/// Driver for tasks with inbound channels: per-channel watermarks, barrier alignment, end detection.
class InputTask : public Task {
  public:
    InputTask(RunContext& ctx, int task);
    void run() override;

  protected:
    virtual void onRow(int side, RowMsg& msg) = 0;
    /// Called after any channel watermark moves; advanced is set when the task watermark rose.
    virtual void onWatermark(int64_t watermark, bool advanced) = 0;
    virtual void onSideEnded(int) {}
    virtual void onEnd() = 0;
    virtual void onHalt() {}
    virtual Checkpoint snapshot(int64_t seq) = 0;
    virtual void afterCheckpoint(int64_t) {}

    int64_t sideWatermark(int side) const;
    Json channelWatermarks() const;
    void restoreChannelWatermarks(const Json& j);

  private:
    struct Channel {
        int side = 0;
        int64_t watermark = kMinTimestamp;
        bool ended = false;
        bool blocked = false;
        int64_t blockedSeq = 0;
        std::deque<Message> pending;
    };
    void drain();
    void handle(Channel& channel, Message& msg);
    void recomputeWatermark();
    void completeBarrier();

    std::vector<Channel> channels_;
    bool finished_ = false;
};

class AggregateTask : public InputTask {
  public:
    AggregateTask(RunContext& ctx, int task);

  protected:
    void onRow(int side, RowMsg& msg) override;
    void onWatermark(int64_t watermark, bool advanced) override;
    void onEnd() override;
    Checkpoint snapshot(int64_t seq) override;

  private:
    void emit(std::vector<OutputRow> rows);

    WindowAggregator agg_;
    int64_t accepted_ = 0;
};

class JoinTask : public InputTask {
  public:
    JoinTask(RunContext& ctx, int task);

  protected:
    void onRow(int side, RowMsg& msg) override;
    void onWatermark(int64_t watermark, bool advanced) override;
    void onSideEnded(int side) override;
    void onEnd() override;
    Checkpoint snapshot(int64_t seq) override;

  private:
    void emit(std::vector<OutputRow>& rows);

    WindowJoiner joiner_;
};

class SinkTask : public InputTask {
  public:
    SinkTask(RunContext& ctx, int task);
    ~SinkTask() override;

  protected:
    void onRow(int side, RowMsg& msg) override;
    void onWatermark(int64_t watermark, bool advanced) override;
    void onEnd() override;
    Checkpoint snapshot(int64_t seq) override;
    void afterCheckpoint(int64_t seq) override;
    void onHalt() override;

  private:
    void write(const Row& row, Finality finality);
    void release(int64_t upTo);

    std::ofstream file_;
    std::ostream* stream_ = nullptr;
    std::vector<std::string> names_;
    std::map<int64_t, std::vector<Row>> pendingFinal_;
    int64_t rows_ = 0;
    int64_t bytes_ = 0;
};

std::unique_ptr<Task> makeTask(RunContext& ctx, int task);

}// namespace streamql::runtime::detail
