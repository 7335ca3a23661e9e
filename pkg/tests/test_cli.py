import json

import pytest

from k3lg import cli
from k3lg.errors import SearchExhausted
from k3lg.jsonio import quadspace_from_dict


def run(capsys, argv):
    code = cli.dispatch(argv)
    out = capsys.readouterr().out
    return code, json.loads(out) if out.lstrip().startswith("{") else out


@pytest.fixture
def hs(tmp_path):
    path = tmp_path / "hs.json"
    path.write_text(json.dumps({"n": 5, "gram": [[2, 0, 0, 0, 0], [0, 2, 0, 0, 0], [0, 0, -2, 0, 0],
                                                  [0, 0, 0, -2, 0], [0, 0, 0, 0, -2]]}))
    return str(path)


def test_prop32_example(capsys, hs):
    code, rep = run(capsys, ["prop32", "run", "-i", hs, "--height", "64"])
    assert code == 0 and rep["exit_code"] == 0
    T = rep["payload"]["T"]
    assert T["rank"] == 5 and T["elementary_divisors"] == [1, 1, 1, 1, 2]
    assert rep["payload"]["rho"] == 17
    assert rep["paper_steps"][-1] == "assemble"
    # every rational is a string or an int
    assert all(isinstance(x, (int, str)) for row in rep["payload"]["B"] for x in row)


def test_reports_are_deterministic(capsys, hs):
    a = run(capsys, ["prop32", "run", "-i", hs])[1]
    b = run(capsys, ["prop32", "run", "-i", hs])[1]
    assert a == b and len(a["inputs_digest"]) == 64


def test_compat_check_flags_a_mismatch(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    rec = lambda ell, c: {"place": {"p": 7, "f": 1, "label": "v7"}, "ell": ell, "coeffs": c}
    bad.write_text(json.dumps({"dimension": 2, "sigma": [], "ramified": {},
                               "records": [rec(3, ["1", "-4", "49"]), rec(5, ["1", "-3", "49"])]}))
    code, rep = run(capsys, ["compat", "check", "-i", str(bad)])
    assert code == 1
    assert rep["payload"]["violations"][0] == {"kind": "mismatch", "place": "v7", "ell": 3, "ell2": 5, "index": 1}


def test_count_quartic(capsys):
    code, rep = run(capsys, ["count", "quartic", "--coeffs", "1,1,1,1", "-p", "3", "-k", "1"])
    assert code == 0
    assert rep["payload"] == {"p": 3, "k": 1, "coeffs": [1, 1, 1, 1], "count": 16, "warnings": []}


def test_weil_failure_exits_one(capsys):
    code, rep = run(capsys, ["compat", "weil", "--coeffs", "1,-1", "-q", "3"])
    assert code == 1 and rep["verdicts"]["weight_two"] is False


def test_input_errors_exit_two(capsys, tmp_path):
    assert run(capsys, ["prop32", "run", "-i", str(tmp_path / "missing.json")])[0] == 2
    (tmp_path / "junk.json").write_text("{ not json")
    assert run(capsys, ["qf", "invariants", "-i", str(tmp_path / "junk.json")])[0] == 2
    assert run(capsys, ["count", "quartic", "--coeffs", "1,1,3,1", "-p", "3"])[0] == 2


def test_usage_errors_exit_two(capsys):
    for argv in (["frobnicate"], ["qf"], ["count", "quartic", "-p", "3"]):
        with pytest.raises(SystemExit) as e:
            cli.dispatch(argv)
        assert e.value.code == 2
    capsys.readouterr()


def test_search_exhausted_exits_three(capsys, hs, monkeypatch):
    import k3lg.pipeline

    def give_up(*a, **k):
        raise SearchExhausted("nothing found", height_bound=1, entry=2)

    monkeypatch.setattr(k3lg.pipeline, "embed_space", give_up)
    code, rep = run(capsys, ["prop32", "run", "-i", hs, "--height", "1"])
    assert code == 3
    assert rep["error"]["type"] == "SearchExhausted" and rep["error"]["height_bound"] == 1


def test_out_of_range_and_diagnose(capsys, tmp_path):
    n = 20
    path = tmp_path / "v20.json"
    path.write_text(json.dumps({"n": n, "gram": [[(1 if i < 2 else -1) * (i == j) for j in range(n)] for i in range(n)]}))
    assert run(capsys, ["prop32", "run", "-i", str(path)])[0] == 2
    code, rep = run(capsys, ["prop32", "run", "-i", str(path), "--diagnose"])
    assert code == 0 and rep["verdicts"] == {"representable": True}


def test_hodge_validate_and_split(capsys, tmp_path):
    path = tmp_path / "v.json"
    path.write_text(json.dumps({"n": 3, "gram": [[2, 0, 0], [0, 2, 0], [0, 0, -2]],
                                "period": {"mode": "exact", "x": [5, 0, 4], "y": [0, 3, 0]}}))
    code, rep = run(capsys, ["hodge", "validate", "-i", str(path)])
    assert code == 0 and rep["verdicts"]["irreducible"] is False
    assert rep["payload"]["algebraic_kernel"] == [[4, 0, 5]]
    code, rep = run(capsys, ["hodge", "split", "-i", str(path)])
    assert code == 0 and rep["payload"]["transcendental_gram"] == [["18", "0"], ["0", "2"]]
    assert rep["payload"]["period"] == {"mode": "exact", "x": ["1", "0"], "y": ["0", "3"], "d": "1"}


def test_qf_and_lattice_commands(capsys, hs, tmp_path):
    code, rep = run(capsys, ["qf", "invariants", "-i", hs])
    assert code == 0
    code, rep = run(capsys, ["qf", "embed", "-i", hs])
    assert code == 0 and len(rep["payload"]["B"]) == 5
    lat = tmp_path / "l.json"
    lat.write_text(json.dumps({"rank": 2, "gram": [[2, 0], [0, -8]]}))
    code, rep = run(capsys, ["lattice", "discgroup", "-i", str(lat)])
    assert rep["payload"]["elementary_divisors"] == [2, 8]


def test_thm13_and_polygon_commands(capsys, tmp_path):
    m = tmp_path / "m.json"
    m.write_text(json.dumps({"dimension": 3, "rho": 19, "sigma": [], "ramified": {}, "records": [
        {"place": {"p": 7, "f": 1, "label": "v7"}, "ell": 3, "coeffs": ["1", "-57", "399", "-343"]}]}))
    code, rep = run(capsys, ["thm13", "precheck", "-i", str(m), "--rho", "19", "--place", "7,1", "--ell", "3"])
    assert code == 0 and rep["payload"]["condition3"]["pass"]
    code, rep = run(capsys, ["compat", "polygon", "--coeffs", "1,-5,50", "-p", "5", "--rho", "20"])
    assert code == 0


def test_text_output(capsys):
    code = cli.dispatch(["--output", "text", "compat", "irred", "--coeffs", "1,0,1"])
    out = capsys.readouterr().out
    assert code == 0 and "verdicts.verdict: CERTIFIED" in out


def test_quadspace_payload_round_trip(capsys, hs):
    rep = run(capsys, ["prop32", "run", "-i", hs])[1]
    T = quadspace_from_dict({"gram": rep["payload"]["T"]["gram"]})
    assert T.n == 5
