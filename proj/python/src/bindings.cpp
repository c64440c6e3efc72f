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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <streamql/engine.hpp>
#include <streamql/error.hpp>
#include <streamql/physical/topology.hpp>
#include <streamql/runtime/window.hpp>
#include <streamql/sql/lexer.hpp>
#include <streamql/sql/parser.hpp>
#include <streamql/sql/render.hpp>

namespace py = pybind11;
using namespace streamql;

namespace {

std::string toNdjson(const py::iterable& items) {
    auto dumps = py::module_::import("json").attr("dumps");
    std::string out;
    for (const auto& item : items) {
        out += dumps(item).cast<std::string>();
        out += '\n';
    }
    return out;
}

py::dict reportDict(const runtime::RunReport& r) {
    py::dict d;
    d["rows_emitted"] = r.rowsEmitted;
    d["late_dropped"] = r.lateDropped;
    d["checkpoints_written"] = r.checkpointsWritten;
    d["restored_from_seq"] = r.restoredFromSeq ? py::cast(*r.restoredFromSeq) : py::none();
    d["source_events"] = r.sourceEvents;
    d["peak_state_entries"] = r.peakStateEntries;
    d["state_bound_violations"] = r.stateBoundViolations;
    d["crashed"] = r.crashed;
    return d;
}

}// namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "streamql engine bindings";

    static py::exception<Error> error(m, "StreamqlError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            // args: (message, code name, line, column); line 0 means no position
            py::tuple args = py::make_tuple(e.what(), std::string(errorCodeName(e.code())), e.pos().line, e.pos().column);
            PyErr_SetObject(error.ptr(), args.ptr());
        }
    });

    m.def("tokenize", [](const std::string& text) {
        py::list out;
        for (const auto& t : sql::tokenize(text)) {
            out.append(py::make_tuple(std::string(sql::tokenKindName(t.kind)), t.text, t.pos.line, t.pos.column));
        }
        return out;
    }, py::arg("text"), "(kind, text, line, column) for every token, End included");
    m.def("parse", [](const std::string& text) { return sql::render(sql::parse(text)); }, py::arg("text"),
          "parse and return the canonical text");

    m.def("assign_tumble", [](int64_t ts, int64_t size) {
        const auto w = runtime::assignTumble(ts, size);
        return py::make_tuple(w.start, w.end);
    }, py::arg("ts"), py::arg("size_ms"));
    m.def("assign_hop", [](int64_t ts, int64_t slide, int64_t size) {
        std::vector<std::pair<int64_t, int64_t>> out;
        for (const auto& w : runtime::assignHop(ts, slide, size)) out.emplace_back(w.start, w.end);
        return out;
    }, py::arg("ts"), py::arg("slide_ms"), py::arg("size_ms"));
    m.def("advance_watermark", &runtime::advanceWatermark, py::arg("current"), py::arg("event_ts"), py::arg("lateness_ms"));
    m.def("join_match", &runtime::joinMatch, py::arg("a_ts"), py::arg("b_ts"), py::arg("left_window_ms") = py::none(),
          py::arg("right_window_ms") = py::none());
    m.def("partition_for_key", [](std::optional<std::string> key, int n) {
        return physical::partitionForKey(key ? std::optional<std::string_view>(*key) : std::nullopt, n);
    }, py::arg("key"), py::arg("n"));

    py::class_<Engine>(m, "Engine")
        .def(py::init([](const std::string& dir) { return std::make_unique<Engine>(dir); }), py::arg("data_dir"))
        .def("create_stream", [](Engine& e, const std::string& name, const std::string& schema, const std::string& ts,
                                 std::optional<std::string> key, int partitions) {
            e.createStream({name, Schema::parse(schema), ts, key, partitions});
        }, py::arg("name"), py::arg("schema"), py::arg("ts"), py::arg("key") = py::none(), py::arg("partitions") = 1)
        .def("create_table", [](Engine& e, const std::string& name, const std::string& schema, const py::iterable& rows) {
            TableDef def{name, Schema::parse(schema), {}};
            std::istringstream in(toNdjson(rows));
            def.rows = readTableRows(def.schema, in);
            e.createTable(std::move(def));
        }, py::arg("name"), py::arg("schema"), py::arg("rows") = py::list())
        .def("ingest", [](Engine& e, const std::string& stream, const py::iterable& events) {
            std::istringstream in(toNdjson(events));
            return e.ingest(stream, in);
        }, py::arg("stream"), py::arg("events"), "append dicts as events; all are validated before any is written")
        .def("explain", &Engine::explain, py::arg("sql"), py::arg("physical") = false, py::arg("rewrite") = true)
        .def("query", [](Engine& e, const std::string& sql, const std::string& output, int64_t lateness, int64_t checkpointEvery,
                         int64_t partialEvery, bool resume, bool rewrite) {
            runtime::RunConfig cfg;
            cfg.latenessMs = lateness;
            cfg.checkpointEveryNEvents = checkpointEvery;
            cfg.emitPartialEveryNEvents = partialEvery;
            cfg.resume = resume;
            cfg.outputPath = output;
            runtime::RunReport report;
            {
                py::gil_scoped_release release;
                report = e.query(sql, cfg, rewrite);
            }
            return reportDict(report);
        }, py::arg("sql"), py::arg("output"), py::arg("lateness_ms") = 0, py::arg("checkpoint_every") = 0,
           py::arg("emit_partial_every") = 0, py::arg("resume") = false, py::arg("rewrite") = true,
           "run to completion writing NDJSON rows to output; returns the run report");
}
