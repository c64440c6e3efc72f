# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
from collections import Counter

import pytest

import streamql


def test_parse_canonical_text():
    assert streamql.parse("select stream * from Orders") == "SELECT STREAM * FROM Orders"


def test_tokenize_positions():
    tokens = streamql.tokenize("SELECT STREAM *\nFROM Orders")
    assert tokens[3][1] == "FROM"
    assert tokens[3][2:] == (2, 1)
    assert tokens[-1][0] == "end of input"


def test_parse_error_carries_position():
    with pytest.raises(streamql.StreamqlError) as info:
        streamql.parse("SELECT FROM Orders")
    _, code, line, column = info.value.args
    assert (code, line, column) == ("ParseError", 1, 8)


def test_windows():
    assert streamql.assign_tumble(61000, 60000) == (60000, 120000)
    # brute force over starts 0, slide, 2*slide, ...
    ts, slide, size = 70000, 20000, 60000
    brute = [(s, s + size) for s in range(0, ts + 1, slide) if s <= ts < s + size]
    assert streamql.assign_hop(ts, slide, size) == brute


def test_watermark_and_join_match():
    assert streamql.advance_watermark(5000, 10000, 2000) == 8000
    assert streamql.advance_watermark(9000, 10000, 2000) == 9000
    assert streamql.join_match(100, 50, 60, 60)
    assert not streamql.join_match(0, 100, 60, 60)
    assert streamql.join_match(0, 10**9)


def test_partition_for_key_in_range():
    parts = {streamql.partition_for_key(f"k{i}", 4) for i in range(100)}
    assert parts == {0, 1, 2, 3}
    assert streamql.partition_for_key(None, 4) == streamql.partition_for_key(None, 4)


def test_engine_end_to_end(tmp_path):
    engine = streamql.Engine(str(tmp_path / "data"))
    engine.create_stream("Orders", "productId:string,amount:int64,rowtime:int64", "rowtime", "productId", 2)
    events = [{"productId": f"p{i % 3}", "amount": i, "rowtime": i * 1000} for i in range(30)]
    assert engine.ingest("Orders", events) == 30
    sql = "SELECT STREAM productId, COUNT(*) AS c FROM Orders GROUP BY TUMBLE(rowtime, INTERVAL '10' SECOND), productId"
    assert "WindowAggregate" in engine.explain(sql, physical=True)
    out = tmp_path / "out.ndjson"
    report = engine.query(sql, str(out))
    assert not report["crashed"] and report["source_events"] == 30
    rows = [json.loads(line) for line in out.read_text().splitlines()]
    expected = Counter((f"p{i % 3}", (i * 1000) // 10000 * 10000) for i in range(30))
    assert {(r["productId"], r["window_start"]): r["c"] for r in rows} == dict(expected)
    assert all(r["finality"] == "FINAL" for r in rows)


def test_blocking_query_rejected(tmp_path):
    engine = streamql.Engine(str(tmp_path / "data"))
    engine.create_stream("Orders", "productId:string,rowtime:int64", "rowtime")
    with pytest.raises(streamql.StreamqlError) as info:
        engine.explain("SELECT STREAM productId, COUNT(*) FROM Orders GROUP BY productId")
    assert info.value.args[1] == "BlockingQuery"
