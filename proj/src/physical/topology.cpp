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

namespace streamql::physical {

std::string_view stageKindName(StageKind kind) {
    switch (kind) {
        case StageKind::Source: return "Source";
        case StageKind::TableSource: return "TableSource";
        case StageKind::WindowAggregate: return "WindowAggregate";
        case StageKind::WindowJoin: return "WindowJoin";
        case StageKind::Sink: return "Sink";
    }
    return "?";
}

std::vector<TaskSpec> Topology::tasks() const {
    std::vector<TaskSpec> out;
    for (const auto& s : stages) {
        for (int i = 0; i < s.parallelism; ++i) out.push_back({s.name + "-" + std::to_string(i), s.id, i});
    }
    return out;
}

std::vector<const Edge*> Topology::inputsOf(int stage) const {
    std::vector<const Edge*> out;
    for (const auto& e : edges) {
        if (e.to == stage) out.push_back(&e);
    }
    return out;
}

std::vector<const Edge*> Topology::outputsOf(int stage) const {
    std::vector<const Edge*> out;
    for (const auto& e : edges) {
        if (e.from == stage) out.push_back(&e);
    }
    return out;
}

}// namespace streamql::physical
