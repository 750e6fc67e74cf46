import hashlib
import json
import subprocess
import sys

import pytest

from dyadicrep.cli import main
from dyadicrep.congruence import (
    TABLE_ROWS,
    ProgressionRow,
    UnsupportedModulusError,
)
from dyadicrep.greedy import SweepRow, greedy_for_n
from dyadicrep.search import PRUNE_RULES
from known_solutions import (
    COMBINED_MODULUS,
    COMBINED_RESIDUE,
    COMPATIBLE_4SUBSETS,
    COMPUTED_ROWS,
    GREEDY_1_32,
    GREEDY_41,
    SMALL_K,
)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# --- enumerate ------------------------------------------------------------

def test_enumerate_json(capsys):
    code, out, err = run_cli(capsys, "enumerate", "3", "--jobs", "1")
    assert code == 0
    payload = json.loads(out)
    assert payload["command"] == "enumerate"
    assert payload["parameters"] == {"k": 3, "jobs": 1}
    assert payload["count"] == 6
    assert [(r["n"], tuple(r["a"])) for r in payload["rows"]] == SMALL_K[3]
    assert set(payload["prune_counters"]) == set(PRUNE_RULES)
    assert payload["tasks"] > 0 and payload["nodes"] > 0
    assert "# elapsed:" in err


def test_enumerate_csv_exact_bytes(capsys):
    code, out, _ = run_cli(capsys, "enumerate", "2", "--format", "csv")
    assert code == 0
    assert out == "n,a\n4,5 6\n"


def test_enumerate_jobs_invariant_payload(capsys):
    _, out1, _ = run_cli(capsys, "enumerate", "4", "--format", "csv", "--jobs", "1")
    _, out3, _ = run_cli(capsys, "enumerate", "4", "--format", "csv", "--jobs", "3")
    assert out1 == out3
    assert out1.splitlines()[1:] == [
        f"{n},{' '.join(map(str, terms))}" for n, terms in SMALL_K[4]
    ]


def test_enumerate_checkpoint_completes_and_cleans_up(tmp_path, capsys):
    cp = tmp_path / "state.txt"
    code, out, _ = run_cli(
        capsys, "enumerate", "4", "--format", "csv", "--checkpoint", str(cp)
    )
    assert code == 0
    assert not cp.exists()
    _, plain, _ = run_cli(capsys, "enumerate", "4", "--format", "csv")
    assert out == plain


def test_enumerate_usage_error(capsys):
    code, out, err = run_cli(capsys, "enumerate", "1")
    assert code == 2
    assert out == ""
    assert "error:" in err


# --- greedy ---------------------------------------------------------------

def test_greedy_n_json(capsys):
    code, out, _ = run_cli(capsys, "greedy", "--n", "41")
    assert code == 0
    payload = json.loads(out)
    assert payload["status"] == "ok"
    assert payload["terminated"] is True
    assert payload["k"] == 14
    assert tuple(payload["terms"]) == GREEDY_41
    assert payload["parameters"] == {"max_k": 1 << 20, "n": 41}


def test_greedy_budget_exhaustion(capsys):
    code, out, err = run_cli(capsys, "greedy", "--n", "41", "--max-k", "12")
    assert code == 3
    payload = json.loads(out)
    assert payload["status"] == "budget exhausted"
    assert payload["terminated"] is False
    assert payload["k"] is None and payload["terms"] is None
    assert "exhausted" in err


def test_greedy_x_csv_exact_bytes(capsys):
    code, out, _ = run_cli(capsys, "greedy", "--x", "1/32", "--format", "csv")
    assert code == 0
    terms = " ".join(map(str, GREEDY_1_32))
    assert out == f"k,terminated,terms\n13,true,{terms}\n"


def test_greedy_x_exhausted_csv(capsys):
    code, out, _ = run_cli(
        capsys, "greedy", "--n", "41", "--max-k", "12", "--format", "csv"
    )
    assert code == 3
    assert out == "k,terminated,terms\n,false,\n"


def test_greedy_x_reduces_and_matches_n(capsys):
    _, out_x, _ = run_cli(capsys, "greedy", "--x", f"41/{2**41}")
    _, out_n, _ = run_cli(capsys, "greedy", "--n", "41")
    assert json.loads(out_x)["terms"] == json.loads(out_n)["terms"]
    _, out_half, _ = run_cli(capsys, "greedy", "--x", "2/4")
    payload = json.loads(out_half)
    assert payload["parameters"]["x"] == "1/2"
    assert payload["terms"] == [3, 6, 8]


@pytest.mark.parametrize(
    "argv",
    [
        ("greedy",),
        ("greedy", "--n", "5", "--x", "1/2"),
        ("greedy", "--x", "1/0"),
        ("greedy", "--x", "abc"),
        ("greedy", "--n", "1"),
        ("greedy", "--x", "3"),
        ("greedy", "--n", "5", "--max-k", "0"),
    ],
)
def test_greedy_usage_errors(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == 2
    assert "error:" in err


# --- sweep ----------------------------------------------------------------

def test_sweep_csv_matches_library(capsys):
    code, out, _ = run_cli(capsys, "sweep", "2", "10")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,k,a_k,terminated"
    for line, n in zip(lines[1:], range(2, 11)):
        k, sol = greedy_for_n(n)
        assert line == f"{n},{k},{sol.terms[-1]},true"


def test_sweep_figures_exact_bytes(capsys):
    code, out, _ = run_cli(capsys, "sweep", "4", "4", "--figures")
    assert code == 0
    assert out == "n,k,a_k,terminated,ak_ratio,k_ratio\n4,2,6,true,0.5,0.5\n"


def test_sweep_budget_exhaustion(capsys):
    code, out, err = run_cli(capsys, "sweep", "41", "41", "--max-k", "5")
    assert code == 3
    assert out == f"n,k,a_k,terminated\n41,6,{GREEDY_41[5]},false\n"
    assert "budget" in err


def test_sweep_jobs_invariant(capsys):
    _, out1, _ = run_cli(capsys, "sweep", "2", "40", "--jobs", "1")
    _, out3, _ = run_cli(capsys, "sweep", "2", "40", "--jobs", "3")
    assert out1 == out3


def test_sweep_json(capsys):
    code, out, _ = run_cli(capsys, "sweep", "4", "5", "--format", "json", "--jobs", "1")
    assert code == 0
    payload = json.loads(out)
    assert payload["rows"][0] == {"n": 4, "k": 2, "a_k": 6, "terminated": True}


def test_sweep_window_violation_exits_4(capsys, monkeypatch):
    monkeypatch.setattr(
        "dyadicrep.cli.sweep", lambda *a, **k: [SweepRow(5, 3, 100, True)]
    )
    code, out, err = run_cli(capsys, "sweep", "5", "5")
    assert code == 4
    assert "window violation: n=5 k=3 a_k=100" in err
    assert out == "n,k,a_k,terminated\n5,3,100,true\n"


@pytest.mark.parametrize(
    "argv",
    [
        ("sweep", "1", "5"),
        ("sweep", "5", "4"),
        ("sweep", "2", "5", "--jobs", "0"),
        ("sweep", "2", "5", "--max-k", "0"),
    ],
)
def test_sweep_usage_errors(capsys, argv):
    assert run_cli(capsys, *argv)[0] == 2


# --- table1 ---------------------------------------------------------------

def test_table1_small_window_csv(capsys):
    code, out, err = run_cli(capsys, "table1", "--u-max", "9", "--format", "csv")
    assert code == 0
    expect = ["u,k0,r,status"] + [
        f"{u},{k0},{r},computed"
        for u, (k0, r) in sorted(COMPUTED_ROWS.items())
        if u <= 9
    ]
    assert out.splitlines() == expect
    assert "skipped" not in err


def test_table1_json(capsys):
    code, out, _ = run_cli(capsys, "table1", "--u-max", "6", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["parameters"] == {"u_max": 6}
    assert [r["u"] for r in payload["rows"]] == [0, 1, 2, 3, 4, 6]
    assert all(r["status"] == "computed" for r in payload["rows"])


def test_table1_full_range_with_embedded_rows(capsys, monkeypatch):
    # orders for 2^30 <= M < 2^34 take minutes; stand in for the solver with
    # the already-verified table so the assembly and formatting paths run
    by_u = {row.u: row for row in TABLE_ROWS}
    monkeypatch.setattr("dyadicrep.cli.solve_congruence", lambda u: by_u.get(u))
    code, out, err = run_cli(capsys, "table1", "--u-max", "119", "--format", "csv")
    assert code == 0
    expect = ["u,k0,r,status"] + [
        f"{row.u},{row.k0},{row.r},"
        + ("computed" if row.u <= 31 else "verified-constant")
        for row in TABLE_ROWS
    ]
    assert out.splitlines() == expect
    assert "skipped, not claimed unsolvable" in err
    assert "(32..118)" in err  # 119 itself is embedded, 118 is the last skip


def test_table1_corrupt_embedded_row_exits_4(capsys, monkeypatch):
    by_u = {row.u: row for row in TABLE_ROWS}
    monkeypatch.setattr("dyadicrep.cli.solve_congruence", lambda u: by_u.get(u))
    monkeypatch.setattr(
        "dyadicrep.cli.table_row", lambda u: ProgressionRow(u, 1, 4)
    )
    code, out, err = run_cli(capsys, "table1", "--u-max", "55")
    assert code == 4
    assert "verification failure" in err


def test_table1_unsupported_modulus_maps_to_exit_3(capsys, monkeypatch):
    def boom(u):
        raise UnsupportedModulusError("out of policy")

    monkeypatch.setattr("dyadicrep.cli.solve_congruence", boom)
    code, _, err = run_cli(capsys, "table1", "--u-max", "4")
    assert code == 3
    assert "unsupported:" in err


def test_table1_usage_error(capsys):
    assert run_cli(capsys, "table1", "--u-max", "-1")[0] == 2


# --- multiplicity -----------------------------------------------------------

def test_multiplicity_default_json(capsys):
    code, out, _ = run_cli(capsys, "multiplicity")
    assert code == 0
    payload = json.loads(out)
    assert payload["count"] == 9
    assert [tuple(r["us"]) for r in payload["rows"]] == COMPATIBLE_4SUBSETS
    assert all(r["certificate"] == 5 for r in payload["rows"])
    target = next(r for r in payload["rows"] if tuple(r["us"]) == (2, 9, 55, 99))
    assert target["residue"] == COMBINED_RESIDUE
    assert target["modulus"] == COMBINED_MODULUS
    assert target["k"] == COMBINED_RESIDUE  # residue already >= 2


def test_multiplicity_empty_five_subsets(capsys):
    code, out, _ = run_cli(capsys, "multiplicity", "--subset-size", "5")
    assert code == 0
    assert json.loads(out)["count"] == 0
    code, out, _ = run_cli(
        capsys, "multiplicity", "--subset-size", "5", "--format", "csv"
    )
    assert code == 0
    assert out == "us,residue,modulus,k,certificate\n"


def test_multiplicity_usage_errors(capsys):
    assert run_cli(capsys, "multiplicity", "--subset-size", "0")[0] == 2
    assert run_cli(capsys, "multiplicity", "--subset-size", "17")[0] == 2


# --- chain -------------------------------------------------------------------

def test_chain_csv_exact_bytes(capsys):
    code, out, _ = run_cli(capsys, "chain", "8", "5")
    assert code == 0
    assert out == (
        "i,k_i,last_term\n"
        "1,13,32\n"
        "2,9,46\n"
        "3,169,392\n"
        "4,5919,12230\n"
        "5,71826,155942\n"
    )


def test_chain_json_with_digests(capsys):
    code, out, _ = run_cli(capsys, "chain", "8", "3", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["exhausted"] is False
    assert payload["certificate"] == 4
    assert len(payload["rows"]) == 3
    for row in payload["rows"]:
        joined = ",".join(map(str, row["terms"])).encode()
        assert row["digest"] == hashlib.sha256(joined).hexdigest()
        assert row["first_term"] == row["terms"][0]
        assert row["last_term"] == row["terms"][-1]


def test_chain_budget_exhaustion(capsys):
    code, out, err = run_cli(capsys, "chain", "8", "3", "--max-k", "50")
    assert code == 3
    assert out == "i,k_i,last_term\n1,13,32\n2,9,46\n"
    assert "exhausted at step 3 of 3" in err


@pytest.mark.parametrize(
    "argv",
    [
        ("chain", "2", "3"),
        ("chain", "8", "0"),
        ("chain", "8", "2", "--max-k", "0"),
    ],
)
def test_chain_usage_errors(capsys, argv):
    assert run_cli(capsys, *argv)[0] == 2


# --- installed entry point ----------------------------------------------------

def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "dyadicrep.cli", "greedy", "--n", "5", "--format", "csv"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout == "k,terminated,terms\n5,true,6 7 11 13 14\n"
    assert "# elapsed:" in proc.stderr


def test_console_script_installed():
    proc = subprocess.run(
        ["dyadicrep", "enumerate", "2", "--format", "csv"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout == "n,a\n4,5 6\n"
