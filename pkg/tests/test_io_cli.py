import json
import re
import subprocess
import sys

import pytest

from conftest import FIXTURES, fixture_path, load
from umwelt.cli import main
from umwelt.io import (InputError, digest, dumps, model_from_json, model_to_json, partition_from_json, read_json,
                       two_agent_from_json, two_agent_to_json)
from umwelt.partition import Partition
from umwelt.random_models import model_rng, random_model

EX = str(fixture_path("example_3_1.json"))


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


# io

@pytest.mark.parametrize("name", ["example_3_1.json", "example_3_1_float.json", "chain3.json", "blind_actor.json"])
def test_model_round_trip(name):
    m = load(name)
    again = model_from_json(json.loads(dumps(model_to_json(m))))
    assert again == m


@pytest.mark.parametrize("k", range(10))
def test_random_model_round_trip(k):
    m = random_model(model_rng(61, k))
    assert model_from_json(json.loads(dumps(model_to_json(m)))) == m


@pytest.mark.parametrize("name", ["two_agent_bits.json", "two_agent_symmetric.json", "two_agent_degenerate.json"])
def test_two_agent_round_trip(name):
    m = two_agent_from_json(read_json(fixture_path(name))[0])
    assert two_agent_from_json(json.loads(dumps(two_agent_to_json(m)))) == m


def test_malformed_json_reports_position():
    with pytest.raises(InputError, match=r"line 2, column \d+"):
        read_json(fixture_path("malformed.json"))


def test_missing_kernel_is_input_error():
    obj = json.loads(fixture_path("example_3_1.json").read_text())
    del obj["kernels"]["beta"]
    with pytest.raises(InputError):
        model_from_json(obj)


def test_digest_tracks_bytes():
    data = fixture_path("example_3_1.json").read_bytes()
    assert digest(data) == digest(bytes(data))
    assert digest(data) != digest(data + b" ")


def test_partition_json(ex31):
    p = Partition.from_blocks(ex31.W, [["1", "4", "5"], ["2"], ["3"]])
    assert partition_from_json(p.to_json()) == p
    assert p.to_json() == {"space": "W", "states": ["1", "2", "3", "4", "5"],
                           "blocks": [["1", "4", "5"], ["2"], ["3"]]}


# validate

def test_validate_exit_codes(capsys):
    assert run(capsys, "validate", EX)[:2] == (0, "ok\n")
    code, out, _ = run(capsys, "validate", fixture_path("row_sum_0_9.json"))
    assert code == 1 and len(out.strip().splitlines()) == 1
    code, _, err = run(capsys, "validate", fixture_path("malformed.json"))
    assert code == 2 and "line 2" in err
    assert run(capsys, "validate", fixture_path("does_not_exist.json"))[0] == 2
    assert run(capsys, "validate", fixture_path("two_agent_bits.json"))[0] == 0


# analyze

def test_analyze_all_on_example(capsys):
    code, out, _ = run(capsys, "analyze", EX, "--all")
    assert code == 0
    r = json.loads(out)
    assert r["sigma_beta"] == [["1", "4", "5"], ["2"], ["3"]]
    assert r["w_sep"]["blocks"] == [["1"], ["2"], ["3"], ["4", "5"]]
    assert r["w_sep"]["trace"]["fixpoint_index"] == 1
    assert r["intrinsic"]["blocks"] == [["1", "4", "5"], ["2"], ["3"]]
    assert r["w_am"]["blocks"] == r["w_sep"]["blocks"]
    assert r["containment"]["equal"] is False
    assert r["synthesis"]["minimality"]["equal"] is True
    assert r["digest"] == digest(fixture_path("example_3_1.json").read_bytes())


def test_analyze_sep_on_one_state_model(capsys):
    code, out, _ = run(capsys, "analyze", fixture_path("one_state.json"), "--sep")
    r = json.loads(out)
    assert code == 0 and len(r["w_sep"]["blocks"]) == 1
    assert "intrinsic" not in r


def test_analyze_am_requires_memoryless(capsys, tmp_path):
    obj = json.loads(fixture_path("example_3_1.json").read_text())
    obj["memoryless"] = False
    obj["spaces"]["C"] = ["c0", "c1"]
    obj["kernels"]["phi"]["rows"] = [["0", "1"], ["1", "0"], ["0", "1"], ["1", "0"]]
    obj["kernels"]["pi"]["rows"] = [["1"], ["1"]]
    path = tmp_path / "memory.json"
    path.write_text(json.dumps(obj))
    code, _, err = run(capsys, "analyze", path, "--am")
    assert code == 1 and "memoryless" in err
    code, out, _ = run(capsys, "analyze", path)
    assert code == 0 and "w_am" not in json.loads(out)


def test_analyze_invalid_model_fails(capsys):
    assert run(capsys, "analyze", fixture_path("row_sum_0_9.json"))[0] == 1


def test_analyze_text_and_timing(capsys):
    code, out, _ = run(capsys, "analyze", EX, "--format", "text", "--timing")
    assert code == 0
    assert "w_sep       {{1}, {2}, {3}, {4,5}}  (fixpoint index 1)" in out
    assert re.search(r"time\s+\d+\.\d+s", out)


def test_analyze_out_file(capsys, tmp_path):
    out = tmp_path / "r.json"
    assert run(capsys, "analyze", EX, "--intrinsic", "--out", out)[:2] == (0, "")
    assert json.loads(out.read_text())["intrinsic"]["basis"]["dimension"] == 2


# minimize

def test_minimize_example(capsys, tmp_path):
    out = tmp_path / "min.json"
    code, stdout, _ = run(capsys, "minimize", EX, "--out", out, "--mc-samples", 20000)
    assert code == 0
    doc = json.loads(out.read_text())
    rows = doc["kernels"]["alpha"]["rows"]
    assert rows[3] == rows[4] == rows[0] == ["0", "1/2", "1/2", "0", "0"]
    assert doc["selector"] == {"1": "1", "2": "2", "3": "3", "4": "1", "5": "1"}
    assert doc["certificates"]["ok"] is True
    assert json.loads(stdout)["ok"] is True
    # the written file is itself a loadable model
    assert model_from_json(doc).n_world == 5


def test_minimize_already_minimal(capsys):
    code, out, _ = run(capsys, "minimize", fixture_path("chain3.json"), "--mc-samples", 1000)
    doc = json.loads(out)
    assert code == 0
    assert doc["kernels"]["alpha"] == json.loads(fixture_path("chain3.json").read_text())["kernels"]["alpha"]


def test_minimize_corrupt_selector(capsys):
    code, _, err = run(capsys, "minimize", fixture_path("chain3.json"), "--selector",
                       fixture_path("corrupt_selector_chain3.json"), "--mc-samples", 0)
    assert code == 1
    assert "counterexample: state 1 word" in err


def test_minimize_bad_selector_file(capsys, tmp_path):
    bad = tmp_path / "sel.json"
    bad.write_text('{"1": "9"}')
    assert run(capsys, "minimize", fixture_path("chain3.json"), "--selector", bad)[0] == 2


# compare / umwelt-table / export-dot

def test_compare_partitions(capsys, tmp_path):
    p, q = tmp_path / "p.json", tmp_path / "q.json"
    p.write_text(json.dumps({"space": "X", "states": ["1", "2", "3"], "blocks": [["1", "2"], ["3"]]}))
    q.write_text(json.dumps({"space": "X", "blocks": [["1"], ["2", "3"]]}))
    code, out, _ = run(capsys, "compare", p, q)
    r = json.loads(out)
    assert code == 0
    assert r["join"]["blocks"] == [["1"], ["2"], ["3"]]
    assert r["meet"]["blocks"] == [["1", "2", "3"]]


def test_compare_needs_inputs(capsys):
    assert run(capsys, "compare")[0] == 2
    assert run(capsys, "compare", EX, EX)[0] == 2


def test_compare_two_agent(capsys):
    code, out, _ = run(capsys, "compare", "--two-agent", fixture_path("two_agent_bits.json"))
    r = json.loads(out)
    assert code == 0
    assert r["shared"]["intrinsic"]["w_partition"] == [["00", "01", "10", "11"]]
    code, out, _ = run(capsys, "compare", "--two-agent", fixture_path("two_agent_symmetric.json"))
    assert json.loads(out)["umwelten_equal"] is True


def test_compare_two_agent_cap(capsys, monkeypatch):
    monkeypatch.setenv("UMWELT_MAX_JOINT_STATES", "8")
    assert run(capsys, "compare", "--two-agent", fixture_path("two_agent_symmetric.json"))[0] == 1


def test_umwelt_table_command(capsys):
    code, out, _ = run(capsys, "umwelt-table", fixture_path("blind_actor.json"))
    assert code == 0 and json.loads(out)["intrinsic_trivial"] is True


def test_export_dot_intrinsic(capsys):
    code, out, _ = run(capsys, "export-dot", EX, "--partition", "intrinsic")
    assert code == 0
    nodes = set(re.findall(r'^\s+"(\w+)" \[fillcolor="(#\w+)"\];$', out, re.M))
    assert len(nodes) == 5
    assert len({c for _, c in nodes}) == 3
    assert out.count("subgraph cluster_") == 3


def test_export_dot_one_state(capsys):
    code, out, _ = run(capsys, "export-dot", fixture_path("one_state.json"))
    edges = re.findall(r'"(\w+)" -> "(\w+)"', out)
    assert code == 0 and len(set(edges)) == 1 and edges[0][0] == edges[0][1]


# proptest

def test_proptest_zero(capsys, tmp_path):
    code, out, _ = run(capsys, "proptest", "--count", 0, "--witness-dir", tmp_path)
    r = json.loads(out)
    assert code == 0 and r["ok"] and r["count"] == 0
    assert all(v["checked"] == 0 for v in r["suites"].values())
    assert not list(tmp_path.iterdir())


def test_proptest_small_campaign(capsys, tmp_path):
    code, out, _ = run(capsys, "proptest", "--count", 20, "--max-w", 5, "--seed", 3, "--witness-dir", tmp_path)
    r = json.loads(out)
    assert code == 0 and r["suites"]["containment"]["checked"] == 20


def test_proptest_injected_bug_writes_witness(capsys, tmp_path):
    code, out, _ = run(capsys, "proptest", "--count", 60, "--max-w", 6, "--seed", 1,
                       "--witness-dir", tmp_path, "--inject-bug", "sep-skips-refinement")
    r = json.loads(out)
    assert code == 1 and r["violations"]
    files = sorted(tmp_path.glob("witness-*.json"))
    assert files
    shrunk = model_from_json(json.loads(files[0].read_text()))
    assert shrunk.n_world <= 6


# entry point and exit-code contract

def test_console_script_runs():
    res = subprocess.run([sys.executable, "-m", "umwelt.cli", "validate", EX], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == "ok\n"


def test_unknown_command_is_usage_error(capsys):
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2


def test_fixture_dir_exists():
    assert (FIXTURES / "example_3_1.json").is_file()
