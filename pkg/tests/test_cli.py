"""The command line front end, driven in process through ``main(argv)``."""
import csv
import json
import math

import jsonschema
import pytest

from ddqsim.circuit import gen_ghz, to_qasm
from ddqsim.cli import CSV_FIELDS, STATS_SCHEMA, main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_exact_generator_run(capsys):
    code, out, err = run(capsys, "--gen", "ghz", "4")
    assert code == 0
    assert "benchmark=ghz_4" in out
    assert "mode=exact" in out
    assert "rounds=0" in out
    assert "fidelity_lower_bound=1" in out


def test_qasm_file_run(tmp_path, capsys):
    path = tmp_path / "bell.qasm"
    path.write_text("OPENQASM 2.0;\nqreg q[2];\nh q[1];\ncx q[1],q[0];\n")
    code, out, err = run(capsys, str(path), "--verify")
    assert code == 0
    assert "benchmark=bell" in out
    assert "oracle_fidelity=1" in out


def test_stats_json_matches_schema(tmp_path, capsys):
    stats_path = tmp_path / "stats.json"
    code, out, _ = run(capsys, "--gen", "supremacy", "2", "3", "4", "7",
                       "--mode", "memory", "--threshold", "10",
                       "--f-round", "0.98",
                       "--stats", str(stats_path), "--verify")
    assert code == 0
    payload = json.loads(stats_path.read_text())
    jsonschema.validate(payload, STATS_SCHEMA)
    assert payload["mode"] == "memory"
    assert payload["f_round"] == 0.98
    assert payload["final_threshold"] == 10
    assert len(payload["node_trace"]) == payload["num_gates"]
    assert payload["verify"]["oracle_fidelity"] >= \
        payload["fidelity_lower_bound"] - 1e-9
    bound = math.prod(r["round_fidelity"] for r in payload["rounds"])
    assert payload["fidelity_lower_bound"] == pytest.approx(bound, abs=1e-12)


def test_stats_json_exact_mode_nulls(tmp_path, capsys):
    stats_path = tmp_path / "stats.json"
    code, _, _ = run(capsys, "--gen", "qft", "3", "--stats", str(stats_path))
    assert code == 0
    payload = json.loads(stats_path.read_text())
    jsonschema.validate(payload, STATS_SCHEMA)
    assert payload["f_round"] is None
    assert payload["planned_rounds"] is None
    assert payload["verify"] is None


def test_fidelity_mode_with_markers(tmp_path, capsys):
    stats_path = tmp_path / "stats.json"
    code, out, err = run(capsys, "--gen", "shor", "15", "2",
                         "--mode", "fidelity", "--f-final", "0.5",
                         "--f-round", "0.9", "--placement", "markers",
                         "--stats", str(stats_path))
    assert code == 0
    payload = json.loads(stats_path.read_text())
    jsonschema.validate(payload, STATS_SCHEMA)
    assert payload["planned_rounds"] == 6
    assert all(r["trigger"] == "marker" for r in payload["rounds"])
    assert "simulate: note:" in err


def test_qft_inverse_generator(capsys):
    code, out, _ = run(capsys, "--gen", "qft", "4", "inv")
    assert code == 0
    assert "benchmark=qftinv_4" in out


def test_dump_amplitudes_format(capsys):
    code, out, _ = run(capsys, "--gen", "ghz", "3", "--dump-amplitudes")
    assert code == 0
    lines = out.strip().splitlines()
    dump = [ln for ln in lines if ln[0].isdigit()]
    assert len(dump) == 2
    index, re, im = dump[0].split()
    assert index == "0"
    assert float(re) == pytest.approx(1 / math.sqrt(2), abs=1e-12)
    assert float(im) == 0.0
    assert dump[1].split()[0] == "7"


def test_csv_appends_with_single_header(tmp_path, capsys):
    path = tmp_path / "runs.csv"
    assert run(capsys, "--gen", "ghz", "3", "--csv", str(path))[0] == 0
    assert run(capsys, "--gen", "ghz", "4", "--csv", str(path),
               "--mode", "memory", "--threshold", "2",
               "--f-round", "0.9")[0] == 0
    rows = list(csv.reader(path.open()))
    assert rows[0] == CSV_FIELDS
    assert len(rows) == 3
    assert rows[1][0] == "ghz_3"
    assert rows[1][4] == ""          # exact runs leave f_round blank
    assert rows[2][4] == "0.9"


def test_usage_errors_exit_1(tmp_path, capsys):
    assert run(capsys, "--gen", "ghz", "4", str(tmp_path / "x.qasm"))[0] == 1
    assert run(capsys)[0] == 1
    assert run(capsys, "--gen", "frob", "3")[0] == 1
    assert run(capsys, "--gen", "ghz", "many")[0] == 1
    assert run(capsys, "--gen", "shor", "16", "3")[0] == 1
    assert run(capsys, str(tmp_path / "missing.qasm"))[0] == 1
    code, _, err = run(capsys, "--gen", "ghz", "3", "--mode", "memory",
                       "--threshold", "0")
    assert code == 1
    assert "threshold" in err


def test_qasm_errors_exit_2(tmp_path, capsys):
    path = tmp_path / "bad.qasm"
    path.write_text("OPENQASM 2.0;\nqreg q[2];\nfrobnicate q[0];\n")
    code, _, err = run(capsys, str(path))
    assert code == 2
    assert "line 3" in err


def test_capacity_guard_exit_3(capsys):
    # GHZ itself stays tiny at any width; the dense dump is what trips the
    # capacity guard past 20 qubits.
    code, _, err = run(capsys, "--gen", "ghz", "21", "--dump-amplitudes")
    assert code == 3
    assert "capacity" in err


def test_no_stats_written_on_failure(tmp_path, capsys):
    stats_path = tmp_path / "stats.json"
    path = tmp_path / "bad.qasm"
    path.write_text("OPENQASM 2.0;\nqreg q[1];\nnope q[0];\n")
    code, _, _ = run(capsys, str(path), "--stats", str(stats_path))
    assert code == 2
    assert not stats_path.exists()


def test_verify_skipped_above_limit(capsys):
    code, out, err = run(capsys, "--gen", "ghz", "13", "--verify")
    assert code == 0
    assert "skipped" in err
    assert "oracle_fidelity" not in out


def test_measure_warning_becomes_note(tmp_path, capsys):
    path = tmp_path / "meas.qasm"
    path.write_text("OPENQASM 2.0;\nqreg q[1];\ncreg c[1];\n"
                    "h q[0];\nmeasure q[0] -> c[0];\n")
    code, _, err = run(capsys, str(path))
    assert code == 0
    assert "measure" in err


def test_roundtrip_qasm_written_by_package(tmp_path, capsys):
    circ = gen_ghz(5)
    path = tmp_path / "ghz5.qasm"
    path.write_text(to_qasm(circ))
    code, out, _ = run(capsys, str(path), "--verify")
    assert code == 0
    assert "oracle_fidelity=1" in out
