import json

import pytest

from majsim.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def records(text):
    lines = [json.loads(ln) for ln in text.splitlines() if ln.strip()]
    assert "meta" in lines[0]
    return lines[0]["meta"], lines[1:]


@pytest.fixture
def graphs(tmp_path, capsys):
    paths = {}
    for name, fam, n in [("k5", "complete", 5), ("c4", "cycle", 4), ("k3", "complete", 3),
                         ("k4", "complete", 4), ("p2", "path", 2), ("p18", "path", 18)]:
        paths[name] = str(tmp_path / f"{name}.edges")
        assert main(["gen", fam, str(n), "--out", paths[name]]) == 0
    capsys.readouterr()
    return paths


@pytest.mark.parametrize("argv, expected", [
    (["gen", "cycle", "4"], "4 4\n0 1\n0 3\n1 2\n2 3\n"),
    (["gen", "path", "3"], "3 2\n0 1\n1 2\n"),
    (["gen", "complete", "3"], "3 3\n0 1\n0 2\n1 2\n"),
    (["gen", "--family", "star", "--n", "3"], "3 2\n0 1\n0 2\n"),
])
def test_gen(capsys, argv, expected):
    code, out, err = run(capsys, *argv)
    assert code == 0 and out == expected
    assert json.loads(err)["meta"]["command"] == "gen"


def test_gen_random_is_seeded(capsys):
    _, a, _ = run(capsys, "gen", "random", "8", "--extra", "3", "--seed", "5")
    _, b, _ = run(capsys, "gen", "random", "8", "--extra", "3", "--seed", "5")
    assert a == b and a.startswith("8 10\n")


def test_gen_bad_params(capsys):
    assert run(capsys, "gen", "cycle", "2")[0] == 2
    with pytest.raises(SystemExit):
        main(["gen", "hypercube", "4"])


def test_simulate_examples(capsys, graphs):
    code, out, _ = run(capsys, "simulate", "--graph", graphs["k5"], "--init", "+++++")
    meta, [rec] = records(out)
    assert code == 0 and rec["steps_to_absorption"] == 0 and rec["consensus"]
    assert meta["seed"] == 0 and len(meta["config_hash"]) == 16

    code, out, _ = run(capsys, "simulate", "--graph", graphs["c4"], "--init", "++--")
    _, [rec] = records(out)
    assert rec["steps_to_absorption"] == 0 and not rec["consensus"] and rec["final"] == "++--"

    code, out, _ = run(capsys, "simulate", "--graph", graphs["k3"], "--init", "++-",
                       "--seed", "7", "--trace")
    meta, [rec] = records(out)
    assert rec["consensus"] and rec["final"] == "+++" and meta["seed"] == 7
    assert rec["z_trace"][0] == 4 and rec["z_trace"][-1] == 0
    assert all(a >= b for a, b in zip(rec["z_trace"], rec["z_trace"][1:]))


def test_simulate_from_family_and_p(capsys):
    code, out, _ = run(capsys, "simulate", "--family", "cycle", "--n", "9", "--p", "0.5",
                       "--seed", "3")
    _, [rec] = records(out)
    assert code == 0 and rec["absorbed"] and len(rec["initial"]) == 9


def test_simulate_timeout_exit(capsys, graphs):
    code, out, err = run(capsys, "simulate", "--graph", graphs["p18"], "--init",
                         "+-" * 9, "--max-steps", "2")
    _, [rec] = records(out)
    assert code == 3 and rec["timeout"] and "timeout" in err


def test_simulate_bad_init(capsys, graphs):
    assert run(capsys, "simulate", "--graph", graphs["k3"], "--init", "++")[0] == 2


@pytest.mark.parametrize("name, p, expected", [("c4", "0.5", 0.75), ("k4", "0.3", 1.0),
                                               ("p2", "0", 1.0)])
def test_exact_examples(capsys, graphs, name, p, expected):
    code, out, _ = run(capsys, "exact", "--graph", graphs[name], "--p", p)
    _, [rec] = records(out)
    assert code == 0 and rec["p_consensus"] == pytest.approx(expected, abs=1e-9)
    assert {"n", "p", "p_consensus", "n_absorbing", "n_frozen_nonconsensus", "h"} <= set(rec)


def test_exact_capacity_error(capsys, graphs):
    code, _, err = run(capsys, "exact", "--graph", graphs["p18"])
    assert code == 2 and "cap" in err


def test_missing_graph_is_usage_error():
    with pytest.raises(SystemExit):
        main(["exact", "--p", "0.5"])


def test_mc_json_and_csv(capsys):
    code, out, _ = run(capsys, "mc", "--family", "complete", "--n", "5", "--trials", "300")
    _, [rec] = records(out)
    assert code == 0 and rec["consensus_frequency"] == 1.0 and rec["timeouts"] == 0
    code, out, _ = run(capsys, "mc", "--family", "cycle", "--n", "4", "--trials", "200",
                       "--format", "csv")
    lines = out.splitlines()
    assert lines[0].startswith("# ") and lines[1].startswith("graph_id,")
    assert len(lines) == 3


def test_mc_timeout_exit(capsys):
    code, _, _ = run(capsys, "mc", "--family", "path", "--n", "30", "--trials", "5",
                     "--max-steps", "1")
    assert code == 3


def test_sweep_csv(capsys, tmp_path):
    out_path = tmp_path / "sweep.csv"
    code, _, _ = run(capsys, "sweep", "--family", "path", "--n", "5", "--p-grid",
                     "0.1:0.9:0.4", "--trials", "200", "--out", str(out_path))
    lines = out_path.read_text().splitlines()
    assert code == 0 and lines[0].startswith("# {")
    assert lines[1].split(",")[:8] == ["graph_id", "n", "m", "p", "bound",
                                        "exact_or_estimate", "method", "satisfied"]
    assert len(lines) == 5


def test_verify_bound(capsys):
    code, out, _ = run(capsys, "verify", "bound", "--max-n", "6", "--p-grid", "0.05:0.95:0.05")
    _, recs = records(out)
    assert code == 0 and recs[-1]["summary"]["violations"] == 0
    assert recs[-1]["summary"]["checked"] == len(recs) - 1 > 100


def test_verify_blocked(capsys):
    code, out, _ = run(capsys, "verify", "blocked", "--family", "cycle", "--n", "4..10",
                       "--steps", "2000")
    _, recs = records(out)
    assert code == 0 and recs[-1]["summary"]["ok"]


def test_verify_potential(capsys):
    code, out, _ = run(capsys, "verify", "potential", "--trials", "100", "--family", "random")
    _, recs = records(out)
    assert code == 0 and recs[-1]["summary"]["checked"] == 100


def test_verify_absorption(capsys):
    code, out, _ = run(capsys, "verify", "absorption", "--trials", "20", "--max-n", "7")
    _, recs = records(out)
    assert code == 0 and recs[-1]["summary"]["violations"] == 0


def test_verify_reachability_reports_counterexamples(capsys):
    code, out, err = run(capsys, "verify", "reachability", "--family", "path", "--n", "4..6")
    _, recs = records(out)
    by_n = {r["instance"]: r for r in recs[:-1]}
    assert by_n["path n=4"]["ok"] and by_n["path n=5"]["ok"]
    assert not by_n["path n=6"]["ok"]
    assert sorted(by_n["path n=6"]["examples"]) == ["++-+--", "--+-++"]
    assert code == 1 and "VIOLATION" in err
