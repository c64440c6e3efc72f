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

#include <streamql/runtime/runtime.hpp>

#include <set>
#include <thread>

#include "tasks.hpp"

namespace streamql::runtime {

std::string RunReport::str() const {
    std::string out = "rowsEmitted=" + std::to_string(rowsEmitted) + " lateDropped=" + std::to_string(lateDropped) +
        " checkpointsWritten=" + std::to_string(checkpointsWritten);
    if (restoredFromSeq) out += " restoredFromSeq=" + std::to_string(*restoredFromSeq);
    out += " peakStateEntries=" + std::to_string(peakStateEntries);
    if (stateBoundViolations) out += " stateBoundViolations=" + std::to_string(stateBoundViolations);
    if (crashed) out += " crashed";
    return out;
}

namespace {

/// Newest sequence for which every task has a readable checkpoint of this topology.
std::optional<int64_t> pickRestorePoint(detail::RunContext& ctx) {
    std::optional<std::set<int64_t>> common;
    for (const auto& task : ctx.tasks) {
        auto seqs = ctx.store.checkpointSeqs(task.taskId);
        std::set<int64_t> mine(seqs.begin(), seqs.end());
        if (!common) {
            common = std::move(mine);
        } else {
            std::set<int64_t> both;
            for (int64_t s : *common) {
                if (mine.count(s)) both.insert(s);
            }
            common = std::move(both);
        }
    }
    if (!common) return std::nullopt;
    for (auto it = common->rbegin(); it != common->rend(); ++it) {
        std::vector<std::optional<Checkpoint>> loaded;
        bool ok = true;
        for (const auto& task : ctx.tasks) {
            auto ckpt = ctx.store.readCheckpoint(task.taskId, *it);
            if (!ckpt || !ckpt->state.is_object() || ckpt->state.value("fingerprint", "") != ctx.topology.fingerprint) {
                ok = false;
                break;
            }
            loaded.push_back(std::move(ckpt));
        }
        if (ok) {
            ctx.restored = std::move(loaded);
            return *it;
        }
    }
    return std::nullopt;
}

}// namespace

RunReport runTopology(const physical::Topology& topology, log::LogStore& store, const RunConfig& config) {
    store.flush();
    detail::RunContext ctx(topology, store, config);
    RunReport report;
    if (config.resume) report.restoredFromSeq = pickRestorePoint(ctx);
    const int64_t base = report.restoredFromSeq.value_or(0);
    // anything newer than the restore point belongs to an abandoned run
    for (const auto& task : ctx.tasks) {
        for (int64_t seq : store.checkpointSeqs(task.taskId)) {
            if (!report.restoredFromSeq || seq > base) store.removeCheckpoint(task.taskId, seq);
        }
    }
    if (!config.outputPath.empty() && !report.restoredFromSeq) {
        std::ofstream truncate(config.outputPath, std::ios::binary | std::ios::trunc);
        if (!truncate) throw Error(ErrorCode::IoFailure, "cannot open output " + config.outputPath);
    }

    int sources = 0;
    for (const auto& task : ctx.tasks) {
        const auto kind = topology.stages[task.stage].kind;
        if (kind == physical::StageKind::Source || kind == physical::StageKind::TableSource) ++sources;
    }
    ctx.coordinator = std::make_unique<detail::Coordinator>(ctx, base, sources);

    std::vector<std::unique_ptr<detail::Task>> tasks;
    for (size_t t = 0; t < ctx.tasks.size(); ++t) tasks.push_back(detail::makeTask(ctx, static_cast<int>(t)));

    std::vector<std::thread> threads;
    threads.reserve(tasks.size());
    for (auto& task : tasks) {
        threads.emplace_back([&ctx, t = task.get()] {
            try {
                t->run();
            } catch (...) {
                ctx.fail(std::current_exception());
            }
        });
    }
    for (auto& th : threads) th.join();
    tasks.clear();

    if (auto error = ctx.error()) std::rethrow_exception(error);
    report.crashed = ctx.crashed();
    report.rowsEmitted = ctx.rowsEmitted.load();
    report.lateDropped = ctx.lateDropped.load();
    report.checkpointsWritten = ctx.checkpointsWritten.load();
    report.sourceEvents = ctx.coordinator->events();
    report.peakStateEntries = ctx.peakState.load();
    report.stateBoundViolations = ctx.boundViolations.load();
    return report;
}

}// namespace streamql::runtime
