import json
import subprocess
import sys

import pytest

from obstructor import DEFAULT_MEMO
from obstructor.cli import main
from obstructor.obstruction import CACHE_HEADER


@pytest.fixture
def run(capsys, monkeypatch):
    monkeypatch.delenv("OBSTRUCTOR_CACHE", raising=False)

    def _run(*argv):
        code = main(list(argv))
        out, err = capsys.readouterr()
        return code, out, err

    return _run


def test_r_parity_one(run):
    code, out, _ = run("r", "--dims", "2,1", "--alphas", "11^3")
    assert code == 0
    assert out.splitlines() == ["r(2,1; 11^3) = 1", "every equivariant map has a zero"]


def test_r_inconclusive(run):
    code, out, _ = run("r", "--dims", "1", "--alphas", "0")
    assert code == 0 and "= 0" in out and "inconclusive" in out
    assert "exists" not in out


def test_r_reduction_lemma(run):
    code, out, _ = run("r", "--dims", "2,1,0", "--alphas", "110,101,011")
    assert code == 0 and out.startswith("r(2,1,0; 110,101,011) = 1")


def test_r_json_roundtrip(run):
    code, out, _ = run("r", "--dims", "2,1", "--alphas", "11^3", "--json", "--certificate")
    data = json.loads(out)
    assert data["command"] == "r" and data["dims"] == [2, 1]
    assert data["alphas"] == ["11", "11", "11"] and data["parity"] == 1
    assert data["conclusion"] == "every equivariant map has a zero"
    assert data["certificate"]["parity"] == 1 and "version" in data
    # feeding the emitted query back reproduces the parity
    code, out2, _ = run("r", "--dims", ",".join(map(str, data["dims"])), "--alphas", ",".join(data["alphas"]), "--json")
    assert json.loads(out2)["parity"] == data["parity"]


def test_r_certificate_text(run):
    code, out, _ = run("r", "--dims", "1,1", "--alphas", "10,01", "--certificate")
    assert "FASTPATH_EQ2 #1 r(1,1; [10,01]) = 1" in out and "BASE" in out


@pytest.mark.parametrize("argv,code", [
    (("r", "--dims", "1", "--alphas", "10"), 2),
    (("r", "--dims", "1,x", "--alphas", "1"), 2),
    (("r", "--dims", "1,1", "--alphas", "11"), 3),
    (("stiefel", "--n", "3", "--k", "2", "--alphas", "11^2"), 3),
    (("stiefel", "--n", "2", "--k", "3"), 2),
    (("variety", "--dims", "0,0,3", "--alphas", ""), 3),
    (("search", "--dims", "5,5,5"), 4),
    (("search", "--dims", "3,3", "--max-candidates", "5"), 4),
    (("table", "--family", "bogus", "--max", "3"), 2),
    (("table", "--family", "mani", "--max", "9"), 4),
    (("witness", "--k", "1"), 2),
])
def test_exit_codes(run, argv, code):
    got, _, err = run(*argv)
    assert got == code
    assert err.startswith("error:")


def test_argparse_errors_exit_2(run):
    with pytest.raises(SystemExit) as info:
        main(["r", "--dims", "1"])
    assert info.value.code == 2


def test_stiefel_main(run):
    code, out, _ = run("stiefel", "--n", "5", "--k", "2", "--target", "main")
    assert code == 0 and "ZERO_GUARANTEED" in out


def test_stiefel_diagonal_inconclusive(run):
    code, out, _ = run("stiefel", "--n", "3", "--k", "2", "--alphas", "11^3")
    assert code == 0 and "INCONCLUSIVE" in out


def test_stiefel_square_json(run):
    code, out, _ = run("stiefel", "--n", "4", "--k", "4", "--target", "main", "--json")
    data = json.loads(out)
    assert data["conclusion"] == "ZERO_GUARANTEED" and data["m"] == 6 and data["parity"] == 1
    assert data["theorem_backing"] == "THM_MAIN2" and data["dims"] == [3, 3, 3, 3]


def test_variety_fh_target(run):
    code, out, _ = run("variety", "--dims", "2,3,4", "--target", "fh", "--json")
    data = json.loads(out)
    assert data["parity"] == 1 and data["theorem_backing"] == "COR_MAIN" and data["n"] == 5


def test_variety_generalized(run):
    code, out, _ = run("variety", "--dims", "4,3", "--alphas", "11^6")
    assert code == 0 and "GENERALIZED_UNPROVEN" in out and "condition parity = 1" in out


def test_search_default(run):
    code, out, _ = run("search", "--dims", "1,1", "--json")
    data = json.loads(out)
    assert data["candidates"] == 6
    assert data["results"] == [["01", "10"], ["01", "11"], ["10", "11"]]


def test_search_k1(run):
    code, out, _ = run("search", "--dims", "1", "--json")
    assert json.loads(out)["results"] == [["1"]]


def test_search_alphabet(run):
    code, out, _ = run("search", "--dims", "1,1", "--alphabet", "11", "--json")
    assert json.loads(out)["results"] == []


def test_search_up_to_symmetry(run):
    _, out, _ = run("search", "--dims", "1,1", "--up-to-symmetry", "--json")
    assert json.loads(out)["results"] == [["01", "10"], ["01", "11"]]
    # unequal dims admit no symmetry, so nothing is merged
    _, raw, _ = run("search", "--dims", "2,1", "--json")
    _, sym, _ = run("search", "--dims", "2,1", "--up-to-symmetry", "--json")
    assert json.loads(raw)["results"] == json.loads(sym)["results"]


def test_table_diagonal(run):
    code, out, _ = run("table", "--family", "diagonal_k2", "--max", "10", "--json")
    data = json.loads(out)
    assert code == 0 and data["all_match"]
    assert len(data["rows"]) == 66


def test_table_grid(run):
    code, out, _ = run("table", "--family", "diagonal_k2", "--max", "3", "--grid")
    assert out.rstrip().splitlines()[-4:] == ["   #", "  # #", " # . #", "# # # #"]


@pytest.mark.parametrize("family,bound", [("reduction", 6), ("mani", 2), ("classical_bu", 10)])
def test_table_all_ones(run, family, bound):
    code, out, _ = run("table", "--family", family, "--max", str(bound), "--json")
    rows = json.loads(out)["rows"]
    assert code == 0 and all(r["computed"] == 1 == r["oracle"] for r in rows)


def test_table_mismatch_exit_5(run, monkeypatch):
    import obstructor.cli as cli

    monkeypatch.setattr(cli, "family_value", lambda name, p: 0)
    code, _, _ = run("table", "--family", "reduction", "--max", "3")
    assert code == 5


def test_witness(run):
    code, out, _ = run("witness", "--k", "3", "--json")
    data = json.loads(out)
    assert code == 0 and data["total_zeros"] == 8 and data["zeros_per_fundamental_domain"] == 1
    assert data["parity"] == 1 and data["agree"]


def test_cache_file_written_and_reused(run, tmp_path, monkeypatch):
    path = tmp_path / "memo.txt"
    code, _, _ = run("r", "--dims", "3,2", "--alphas", "11^5", "--cache", str(path))
    assert code == 0
    lines = path.read_text().splitlines()
    assert lines[0] == CACHE_HEADER and "2;3,2;11,11,11,11,11;0" in lines
    DEFAULT_MEMO.clear()
    monkeypatch.setenv("OBSTRUCTOR_CACHE", str(path))
    code, out, _ = run("r", "--dims", "3,2", "--alphas", "11^5")
    assert code == 0 and "= 0" in out


def test_bad_cache_file(run, tmp_path):
    path = tmp_path / "memo.txt"
    path.write_text("not a cache\n")
    code, _, err = run("r", "--dims", "1", "--alphas", "1", "--cache", str(path))
    assert code == 2 and "cache" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "obstructor", "r", "--dims", "1", "--alphas", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("r(1; 1) = 1")
