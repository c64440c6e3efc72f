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

#include <streamql/plan/planner.hpp>

namespace streamql::plan {

namespace {

const PlanNode& leftmostLeaf(const PlanNode& n) {
    const PlanNode* p = &n;
    while (!p->inputs.empty()) p = p->inputs.front().get();
    return *p;
}

void visit(const PlanNode& n, std::vector<Diagnostic>& out) {
    for (const auto& in : n.inputs) visit(*in, out);

    if (n.kind == NodeKind::WindowAggregate && !n.window && n.inputs[0]->unbounded) {
        out.push_back({ErrorCode::BlockingQuery,
                       "aggregate over an unbounded stream needs a TUMBLE or HOP window in GROUP BY", n.pos});
    }
    if (n.kind == NodeKind::WindowJoin && n.inputs[0]->unbounded && n.inputs[1]->unbounded) {
        const std::optional<int64_t>* windows[] = {&n.leftWindowMs, &n.rightWindowMs};
        for (size_t side = 0; side < 2; ++side) {
            if (windows[side]->has_value()) continue;
            const PlanNode& scan = leftmostLeaf(*n.inputs[side]);
            out.push_back({ErrorCode::BlockingQuery,
                           "stream-stream join needs an OVER (RANGE ... PRECEDING) window on '" + scan.alias + "'",
                           scan.pos.valid() ? scan.pos : n.pos});
        }
    }
}

}// namespace

std::vector<Diagnostic> validateStreamSemantics(const LogicalPlan& plan) {
    std::vector<Diagnostic> out;
    if (plan) visit(*plan, out);
    return out;
}

void requireExecutable(const LogicalPlan& plan) {
    auto diags = validateStreamSemantics(plan);
    if (!diags.empty()) throw Error(diags.front().code, diags.front().message, diags.front().pos);
}

}// namespace streamql::plan
