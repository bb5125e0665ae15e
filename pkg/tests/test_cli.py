import json
import shutil
import subprocess
import sys

import pytest

from brauerloop import orbits, qkzsolve
from brauerloop.acceptance import reference_entries, reference_poly
from brauerloop.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_writes_reference_file(tmp_path, capsys):
    path = tmp_path / "i3.json"
    code, _, _ = run(capsys, "solve", "--type", "i", "--size", "3", "--method", "linear", "--out", str(path))
    assert code == 0
    sol = qkzsolve.QkzSolution.from_json(path.read_text())
    for e in reference_entries():
        if e["type"] == "i" and len(e["pattern"]) == 3:
            assert sol[e["pattern"]] == reference_poly(e, sol.vt)


def test_verify_reads_solution_file(tmp_path, capsys):
    path = tmp_path / "o2.json"
    assert run(capsys, "solve", "--type", "o", "--size", "2", "--out", str(path))[0] == 0
    code, out, _ = run(capsys, "verify", "--input", str(path))
    assert code == 0 and "all checks pass" in out


def test_verify_fails_on_corrupted_file(tmp_path, capsys):
    path = tmp_path / "i2.json"
    run(capsys, "solve", "--type", "i", "--size", "2", "--out", str(path))
    obj = json.loads(path.read_text())
    key = sorted(obj["components"])[0]
    obj["components"][key] = qkzsolve.solve("i", 2)[key].scale(3).to_json_obj()
    path.write_text(json.dumps(obj))
    assert run(capsys, "verify", "--input", str(path))[0] == 1


def test_sumrule_both_equalities(capsys):
    code, out, _ = run(capsys, "sumrule", "--type", "i", "--size", "2", "--pfaffian", "--localization", "--json")
    obj = json.loads(out)
    assert code == 0 and obj["flags"]["closed_form_equal"] and obj["flags"]["localization_equal"]


def test_degree(capsys):
    code, out, _ = run(capsys, "degree", "--type", "i", "--n", "4")
    assert code == 0 and out.strip() == "11"


def test_lp_listing(capsys):
    code, out, _ = run(capsys, "lp", "--type", "c", "--size", "3", "--json")
    obj = json.loads(out)
    assert code == 0 and obj["count"] == 3


def test_eval_point(capsys):
    code, out, _ = run(capsys, "eval", "--type", "i", "--size", "2", "--point", "z1=1,z2=2,A=7", "--json")
    assert code == 0 and json.loads(out)["(2,1)"] == "110"


def test_transfer_and_orbit(capsys):
    assert run(capsys, "transfer", "--type", "c", "--size", "2")[0] == 0
    code, out, _ = run(capsys, "orbit", "--type", "c", "--size", "6", "--json")
    assert code == 0 and json.loads(out)["maxF"]["max"] == 8


def test_orbit_of_matrix_file(tmp_path, capsys):
    import random
    pi = orbits.Involution.parse("(351624)", "i")
    U = orbits.random_typed_borel(6, random.Random(2), unipotent=True)
    X = orbits.SquareZeroMatrix(orbits.conj(U, orbits.build_pi_less(pi).entries), "i")
    path = tmp_path / "x.json"
    path.write_text(json.dumps(X.to_json_obj()))
    code, out, _ = run(capsys, "orbit", "--type", "i", "--matrix", str(path), "--json")
    assert code == 0 and json.loads(out)["label"] == "(351624)"


@pytest.mark.parametrize("argv", [
    ["solve", "--type", "x", "--size", "2"],
    ["solve", "--type", "i"],
    ["eval", "--type", "i", "--size", "2", "--point", "z1=1,A=7"],
    ["eval", "--type", "i", "--size", "2", "--point", "z1=1,z2=q,A=7"],
    ["orbit", "--type", "o", "--size", "4"],
    ["reproduce"],
    ["nosuchverb"],
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_malformed_matrix_exits_two(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"N": 2, "type": "i", "entries": [[1, 2, "1"], [2, 1, "1"]]}))
    assert run(capsys, "orbit", "--type", "i", "--matrix", str(path))[0] == 2


def test_json_output_is_byte_stable(capsys):
    first = run(capsys, "solve", "--type", "c", "--size", "3", "--json")[1]
    qkzsolve.clear_memo()
    second = run(capsys, "solve", "--type", "c", "--size", "3", "--json")[1]
    assert first == second


def test_console_script():
    exe = shutil.which("brauerloop")
    cmd = [exe] if exe else [sys.executable, "-m", "brauerloop.cli"]
    res = subprocess.run(cmd + ["degree", "--n", "2"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "1"
