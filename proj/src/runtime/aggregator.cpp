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

#include <streamql/runtime/aggregator.hpp>

#include <algorithm>

#include <streamql/error.hpp>

namespace streamql::runtime {

using sql::AggFunc;

std::string_view finalityName(Finality f) {
    switch (f) {
        case Finality::Partial: return "PARTIAL";
        case Finality::Final: return "FINAL";
        case Finality::None: break;
    }
    return "NONE";
}

bool WindowKeyLess::operator()(const WindowKey& a, const WindowKey& b) const {
    if (a.end != b.end) return a.end < b.end;
    if (a.start != b.start) return a.start < b.start;
    return rowLess(a.key, b.key);
}

WindowAggregator::WindowAggregator(const physical::StageSpec& stage) : stage_(&stage) {
    const auto& input = stage.inputSchemas.at(0);
    for (const auto& k : stage.groupKeys) keys_.push_back(BoundExpr::bind(k, input));
    for (const auto& a : stage.aggregates) {
        hasArg_.push_back(a.arg != nullptr);
        args_.push_back(a.arg ? BoundExpr::bind(a.arg, input) : BoundExpr{});
    }
}

namespace {

void accumulate(AggFunc fn, DataType type, Accumulator& acc, const Value& v, bool countStar) {
    if (countStar) {
        ++acc.count;
        return;
    }
    if (isNull(v)) return;
    switch (fn) {
        case AggFunc::Count: ++acc.count; break;
        case AggFunc::Sum:
            if (isNull(acc.value)) {
                acc.value = type == DataType::Int64 ? v : Value(asDouble(v));
            } else if (type == DataType::Int64) {
                acc.value = static_cast<int64_t>(static_cast<uint64_t>(std::get<int64_t>(acc.value)) +
                                                 static_cast<uint64_t>(std::get<int64_t>(v)));
            } else {
                acc.value = std::get<double>(acc.value) + asDouble(v);
            }
            break;
        case AggFunc::Avg:
            acc.value = (isNull(acc.value) ? 0.0 : std::get<double>(acc.value)) + asDouble(v);
            ++acc.count;
            break;
        case AggFunc::Min:
            if (isNull(acc.value) || compareValues(v, acc.value) < 0) acc.value = v;
            break;
        case AggFunc::Max:
            if (isNull(acc.value) || compareValues(v, acc.value) > 0) acc.value = v;
            break;
    }
}

Value result(AggFunc fn, const Accumulator& acc) {
    switch (fn) {
        case AggFunc::Count: return acc.count;
        case AggFunc::Avg:
            if (acc.count == 0) return std::monostate{};
            return std::get<double>(acc.value) / static_cast<double>(acc.count);
        default: return acc.value;
    }
}

}// namespace

bool WindowAggregator::step(int64_t ts, const Row& row, int64_t watermark) {
    if (ts < watermark) {
        ++lateDropped_;
        return false;
    }
    Row key;
    key.reserve(keys_.size());
    for (const auto& k : keys_) key.push_back(k.eval(row));
    std::vector<Value> argValues(args_.size());
    for (size_t i = 0; i < args_.size(); ++i) {
        if (hasArg_[i]) argValues[i] = args_[i].eval(row);
    }
    auto apply = [&](int64_t start, int64_t end) {
        auto [it, inserted] = state_.try_emplace(WindowKey{end, start, key});
        if (inserted) it->second.resize(args_.size());
        for (size_t i = 0; i < args_.size(); ++i) {
            const auto& call = stage_->aggregates[i];
            accumulate(call.fn, call.type, it->second[i], argValues[i], !hasArg_[i]);
        }
    };
    if (stage_->window) {
        for (const auto& w : assignWindows(*stage_->window, ts)) apply(w.start, w.end);
    } else {
        apply(kMinTimestamp, kMaxTimestamp);
    }
    return true;
}

Row WindowAggregator::outputRow(const WindowKey& key, const std::vector<Accumulator>& accs) const {
    Row out = key.key;
    for (size_t i = 0; i < accs.size(); ++i) out.push_back(result(stage_->aggregates[i].fn, accs[i]));
    if (stage_->window) {
        out.emplace_back(key.start);
        out.emplace_back(key.end);
    }
    return out;
}

std::vector<OutputRow> WindowAggregator::fire(int64_t watermark) {
    std::vector<OutputRow> out;
    auto it = state_.begin();
    while (it != state_.end() && it->first.end <= watermark) {
        out.push_back({it->first.end, outputRow(it->first, it->second), Finality::Final});
        it = state_.erase(it);
    }
    return out;
}

std::vector<OutputRow> WindowAggregator::partial() const {
    std::vector<OutputRow> out;
    out.reserve(state_.size());
    for (const auto& [key, accs] : state_) out.push_back({key.end, outputRow(key, accs), Finality::Partial});
    return out;
}

int64_t WindowAggregator::oldestWindowStart() const {
    // every window has the same size, so the smallest end also has the smallest start
    return state_.empty() ? kMaxTimestamp : state_.begin()->first.start;
}

int64_t WindowAggregator::maxWindowSizeMs() const { return stage_->window ? stage_->window->sizeMs : 0; }

Json WindowAggregator::toJson() const {
    Json windows = Json::array();
    for (const auto& [key, accs] : state_) {
        Json a = Json::array();
        for (const auto& acc : accs) a.push_back(Json::array({acc.count, valueToJson(acc.value)}));
        windows.push_back({{"start", key.start}, {"end", key.end}, {"key", rowToJson(key.key)}, {"accs", std::move(a)}});
    }
    return {{"lateDropped", lateDropped_}, {"windows", std::move(windows)}};
}

void WindowAggregator::fromJson(const Json& j) {
    state_.clear();
    lateDropped_ = j.at("lateDropped").get<int64_t>();
    for (const auto& w : j.at("windows")) {
        std::vector<Accumulator> accs;
        for (const auto& a : w.at("accs")) accs.push_back({a.at(0).get<int64_t>(), valueFromJsonUntyped(a.at(1))});
        if (accs.size() != args_.size()) throw Error(ErrorCode::CheckpointCorrupt, "accumulator count mismatch");
        state_.emplace(WindowKey{w.at("end").get<int64_t>(), w.at("start").get<int64_t>(), rowFromJson(w.at("key"))},
                       std::move(accs));
    }
}

}// namespace streamql::runtime
