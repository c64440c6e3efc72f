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

#include <streamql/physical/topology.hpp>

#include <streamql/sql/render.hpp>

namespace streamql::physical {

namespace {

std::string joinList(const std::vector<std::string>& items) {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i];
    }
    return out;
}

std::string bareName(const std::string& qualified) {
    auto dot = qualified.rfind('.');
    return dot == std::string::npos ? qualified : qualified.substr(dot + 1);
}

std::string windowMs(const std::optional<int64_t>& w) { return w ? std::to_string(*w) : "unbounded"; }

std::string stageLine(const StageSpec& s) {
    std::string label;
    switch (s.kind) {
        case StageKind::Source:
        case StageKind::TableSource:
            label = "[" + s.sourceName + (s.alias != s.sourceName ? " AS " + s.alias : "") + "]";
            break;
        case StageKind::WindowAggregate:
            label = "[" + (s.window ? sql::renderWindowFn(*s.window) : std::string("none")) + "]";
            break;
        case StageKind::WindowJoin: label = "[" + windowMs(s.leftWindowMs) + ", " + windowMs(s.rightWindowMs) + "]"; break;
        case StageKind::Sink: break;
    }
    return std::string(stageKindName(s.kind)) + label + " x" + std::to_string(s.parallelism);
}

std::vector<std::string> detailLines(const StageSpec& s) {
    std::vector<std::string> out;
    switch (s.kind) {
        case StageKind::Source:
        case StageKind::TableSource: out.push_back("columns=[" + joinList(s.columns) + "]"); break;
        case StageKind::WindowAggregate: {
            std::vector<std::string> keys, aggs;
            for (const auto& k : s.groupKeys) keys.push_back(sql::renderExpr(k));
            for (const auto& a : s.aggregates) aggs.push_back(a.name);
            out.push_back("keys=[" + joinList(keys) + "] aggs=[" + joinList(aggs) + "]");
            break;
        }
        case StageKind::WindowJoin:
            out.push_back("condition=" + sql::renderExpr(s.condition) +
                          (s.staticSide >= 0 ? " lookup=" + std::string(s.staticSide == 0 ? "left" : "right") : ""));
            break;
        case StageKind::Sink:
            out.push_back(std::string("order=") + (s.windowed ? "window_end,key" : "arrival"));
            break;
    }
    for (const auto& op : s.chain) {
        if (op.kind == ChainOp::Kind::Filter) {
            out.push_back("Filter [condition=" + sql::renderExpr(op.predicate) + "]");
        } else {
            std::vector<std::string> exprs;
            for (const auto& item : op.items) {
                std::string e = sql::renderExpr(item.expr);
                if (!(item.expr->kind == sql::ExprKind::Column && item.expr->name == item.name)) e += " AS " + item.name;
                exprs.push_back(std::move(e));
            }
            out.push_back("Project [exprs=[" + joinList(exprs) + "]]");
        }
    }
    return out;
}

std::string edgeLine(const Edge& e) {
    switch (e.routing) {
        case Routing::Forward: return "forward";
        case Routing::Broadcast: return "broadcast";
        case Routing::KeyedHash: {
            std::vector<std::string> keys;
            for (const auto& k : e.keyColumns) keys.push_back(bareName(k));
            return "shuffle hash(" + joinList(keys) + ")";
        }
    }
    return "?";
}

void explainStage(const Topology& t, int stage, int depth, std::string& out) {
    const StageSpec& s = t.stages[stage];
    const std::string indent(static_cast<size_t>(depth) * 2, ' ');
    out += indent + stageLine(s) + "\n";
    for (const auto& line : detailLines(s)) out += indent + "  " + line + "\n";
    auto inputs = t.inputsOf(stage);
    std::sort(inputs.begin(), inputs.end(), [](const Edge* a, const Edge* b) { return a->toInput < b->toInput; });
    for (const Edge* e : inputs) {
        out += indent + "  " + edgeLine(*e) + "\n";
        explainStage(t, e->from, depth + 2, out);
    }
}

}// namespace

std::string explainPhysical(const Topology& topology) {
    std::string out;
    if (topology.sinkStage >= 0) explainStage(topology, topology.sinkStage, 0, out);
    return out;
}

}// namespace streamql::physical
