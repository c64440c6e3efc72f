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

#include <streamql/runtime/join.hpp>

#include <algorithm>
#include <functional>

#include <streamql/runtime/window.hpp>

namespace streamql::runtime {

void JoinBuffer::insert(const std::string& key, int64_t ts, Row row) {
    byKey[key].emplace(ts, std::move(row));
    byTs.emplace(ts, key);
}

size_t JoinBuffer::evictBefore(int64_t windowMs, int64_t bound) {
    size_t dropped = 0;
    while (!byTs.empty()) {
        const auto& [ts, key] = *byTs.begin();
        int64_t reach;
        if (__builtin_add_overflow(ts, windowMs, &reach)) reach = kMaxTimestamp;
        if (reach >= bound) break;
        auto bucket = byKey.find(key);
        bucket->second.erase(bucket->second.find(ts));
        if (bucket->second.empty()) byKey.erase(bucket);
        byTs.erase(byTs.begin());
        ++dropped;
    }
    return dropped;
}

WindowJoiner::WindowJoiner(const physical::StageSpec& stage) : stage_(&stage) {
    // Key columns come from the incoming keyed edges; tie them back to input schemas by qualified name.
    std::vector<std::string> leftKeys, rightKeys;
    std::function<void(const plan::ExprPtr&)> walk = [&](const plan::ExprPtr& e) {
        if (e->kind == sql::ExprKind::Binary && e->binaryOp == sql::BinaryOp::And) {
            walk(e->operands[0]);
            walk(e->operands[1]);
            return;
        }
        if (e->kind != sql::ExprKind::Binary || e->binaryOp != sql::BinaryOp::Eq) return;
        const auto& a = e->operands[0];
        const auto& b = e->operands[1];
        if (a->kind != sql::ExprKind::Column || b->kind != sql::ExprKind::Column) return;
        auto in = [&](int side, const plan::ExprPtr& c) {
            return plan::findColumn(stage.inputSchemas[side], c->qualifier, c->name).has_value();
        };
        if (in(0, a) && in(1, b)) {
            keys_[0].push_back(BoundExpr::bind(a, stage.inputSchemas[0]));
            keys_[1].push_back(BoundExpr::bind(b, stage.inputSchemas[1]));
        } else if (in(0, b) && in(1, a)) {
            keys_[0].push_back(BoundExpr::bind(b, stage.inputSchemas[0]));
            keys_[1].push_back(BoundExpr::bind(a, stage.inputSchemas[1]));
        }
    };
    walk(stage.condition);
    plan::PlanSchema combined = stage.inputSchemas[0];
    combined.insert(combined.end(), stage.inputSchemas[1].begin(), stage.inputSchemas[1].end());
    condition_ = BoundExpr::bind(stage.condition, combined);
}

std::string WindowJoiner::keyOf(int side, const Row& row) const {
    Row values;
    values.reserve(keys_[side].size());
    for (const auto& k : keys_[side]) values.push_back(k.eval(row));
    // NULL never equals anything; give it a key no real value can produce
    return routingKey(values).value_or("\x1e");
}

void WindowJoiner::probe(int side, int64_t ts, const Row& row, std::vector<OutputRow>& out) const {
    const std::string key = keyOf(side, row);
    if (key.rfind('\x1e', 0) == 0) return;
    const JoinBuffer& other = buffers_[1 - side];
    auto bucket = other.byKey.find(key);
    if (bucket == other.byKey.end()) return;
    const bool lookup = stage_->staticSide >= 0;
    for (const auto& [otherTs, otherRow] : bucket->second) {
        const int64_t aTs = side == 0 ? ts : otherTs;
        const int64_t bTs = side == 0 ? otherTs : ts;
        if (!lookup && !joinMatch(aTs, bTs, stage_->leftWindowMs, stage_->rightWindowMs)) continue;
        Row combined = side == 0 ? row : otherRow;
        const Row& tail = side == 0 ? otherRow : row;
        combined.insert(combined.end(), tail.begin(), tail.end());
        if (!isTrue(condition_.eval(combined))) continue;
        out.push_back({std::max(aTs, bTs), std::move(combined), Finality::None});
    }
}

bool WindowJoiner::step(int side, int64_t ts, const Row& row, int64_t sideWatermark, std::vector<OutputRow>& out) {
    if (side == stage_->staticSide) {
        buffers_[side].insert(keyOf(side, row), ts, row);
        return true;
    }
    if (ts < sideWatermark) {
        ++lateDropped_;
        return false;
    }
    if (stage_->staticSide >= 0) {
        if (!staticDone_) {
            held_.emplace_back(ts, row);
        } else {
            probe(side, ts, row, out);
        }
        return true;
    }
    probe(side, ts, row, out);
    const std::string key = keyOf(side, row);
    if (key.rfind('\x1e', 0) != 0) buffers_[side].insert(key, ts, row);
    return true;
}

void WindowJoiner::staticSideFinished(std::vector<OutputRow>& out) {
    if (staticDone_) return;
    staticDone_ = true;
    const int side = 1 - stage_->staticSide;
    for (const auto& [ts, row] : held_) probe(side, ts, row, out);
    held_.clear();
}

void WindowJoiner::evict(int64_t leftWatermark, int64_t rightWatermark) {
    if (stage_->staticSide >= 0) return;
    // a left row can only meet right rows with ts <= aTs + leftWindow; those are all below rightWatermark
    if (stage_->leftWindowMs) buffers_[0].evictBefore(*stage_->leftWindowMs, rightWatermark);
    if (stage_->rightWindowMs) buffers_[1].evictBefore(*stage_->rightWindowMs, leftWatermark);
}

size_t WindowJoiner::stateSize() const { return buffers_[0].size() + buffers_[1].size() + held_.size(); }

int64_t WindowJoiner::oldestTs() const {
    int64_t oldest = kMaxTimestamp;
    for (int side = 0; side < 2; ++side) {
        if (side != stage_->staticSide) oldest = std::min(oldest, buffers_[side].oldestTs());
    }
    return oldest;
}

int64_t WindowJoiner::maxWindowSizeMs() const {
    return std::max(stage_->leftWindowMs.value_or(0), stage_->rightWindowMs.value_or(0));
}

Json WindowJoiner::toJson() const {
    Json sides = Json::array();
    for (const auto& buffer : buffers_) {
        Json rows = Json::array();
        for (const auto& [key, bucket] : buffer.byKey) {
            for (const auto& [ts, row] : bucket) rows.push_back(Json::array({key, ts, rowToJson(row)}));
        }
        sides.push_back(std::move(rows));
    }
    Json held = Json::array();
    for (const auto& [ts, row] : held_) held.push_back(Json::array({ts, rowToJson(row)}));
    return {{"lateDropped", lateDropped_}, {"staticDone", staticDone_}, {"buffers", std::move(sides)},
            {"held", std::move(held)}};
}

void WindowJoiner::fromJson(const Json& j) {
    lateDropped_ = j.at("lateDropped").get<int64_t>();
    staticDone_ = j.at("staticDone").get<bool>();
    for (int side = 0; side < 2; ++side) {
        buffers_[side] = {};
        for (const auto& e : j.at("buffers").at(side)) {
            buffers_[side].insert(e.at(0).get<std::string>(), e.at(1).get<int64_t>(), rowFromJson(e.at(2)));
        }
    }
    held_.clear();
    for (const auto& e : j.at("held")) held_.emplace_back(e.at(0).get<int64_t>(), rowFromJson(e.at(1)));
}

}// namespace streamql::runtime
