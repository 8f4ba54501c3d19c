import json

import pytest

from wordlab.cli import parse_and_dispatch, parse_range, UsageError


def run(capsys, *argv):
    code = parse_and_dispatch(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_parse_range():
    assert parse_range("1..40") == (1, 40)
    assert parse_range("7") == (7, 7)
    with pytest.raises(UsageError):
        parse_range("9..2")


def test_densities_csv(capsys):
    code, out, _ = run(capsys, "subst", "--gamma", "2", "densities",
                       "--format", "csv")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0].startswith("# schema=") and "seed=0" in lines[0]
    assert lines[1] == "k,phi_a_alpha,phi_b_alpha,phi_a_beta,phi_b_beta"
    assert lines[2] == "0,1,0,0,1"
    assert lines[3] == "1,2/3,1/3,1/3,2/3"


def test_byte_stability(capsys):
    argv = ("subst", "--gamma", "2", "complexity", "--n", "1..50",
            "--format", "csv")
    _, out1, _ = run(capsys, *argv)
    _, out2, _ = run(capsys, *argv)
    assert out1 == out2


def test_complexity_rows_obey_14n(capsys):
    code, out, _ = run(capsys, "subst", "--gamma", "2", "--levels", "4",
                       "complexity", "--n", "3..200", "--format", "csv")
    assert code == 0
    for line in out.strip().split("\n")[2:]:
        n, p = line.split(",")[:2]
        assert int(p) <= 14 * int(n)


def test_json_header(capsys):
    code, out, _ = run(capsys, "subst", "--gamma", "2", "build",
                       "--seed", "3")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "wordlab-report/1"
    assert doc["seed"] == 3 and doc["pass"] is True
    assert doc["command"] == "subst build"


def test_unknown_flag_exits_2(capsys):
    code, _, _ = run(capsys, "subst", "--nope", "build")
    assert code == 2
    code, _, _ = run(capsys, "frobnicate")
    assert code == 2


def test_bad_range_exits_2(capsys):
    code, _, err = run(capsys, "subst", "--gamma", "2", "complexity",
                       "--n", "9..2")
    assert code == 2 and "error" in err


def test_config_defaults_and_override(tmp_path, capsys):
    cfg = tmp_path / "wl.cfg"
    cfg.write_text("seed=11\nformat=csv\n")
    code, out, _ = run(capsys, "subst", "--gamma", "2", "densities",
                       "--config", str(cfg))
    assert code == 0 and out.startswith("#") and "seed=11" in out.split("\n")[0]
    # an explicit flag wins over the config value
    code, out, _ = run(capsys, "subst", "--gamma", "2", "densities",
                       "--config", str(cfg), "--seed", "4")
    assert "seed=4" in out.split("\n")[0]
    cfg.write_text("bogus_key=1\n")
    code, _, err = run(capsys, "subst", "--gamma", "2", "densities",
                       "--config", str(cfg))
    assert code == 2 and "bogus_key" in err


def test_output_file(tmp_path, capsys):
    dest = tmp_path / "out.csv"
    code, out, _ = run(capsys, "subst", "--gamma", "2", "densities",
                       "--format", "csv", "--output", str(dest))
    assert code == 0 and out == ""
    assert dest.read_text().splitlines()[2] == "0,1,0,0,1"
    code, _, err = run(capsys, "subst", "--gamma", "2", "densities",
                       "--output", str(tmp_path / "no" / "dir" / "x"))
    assert code == 2 and "unwritable" in err


def test_max_bytes_floor(capsys):
    code, _, err = run(capsys, "subst", "--gamma", "2", "densities",
                       "--max-bytes", "1000")
    assert code == 2 and "max_bytes" in err


def test_growth_build_and_check(capsys):
    code, out, _ = run(capsys, "growth", "--n-max", "2048", "build",
                       "--format", "csv")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[1] == "n,f,f_prime,omega"
    assert lines[2] == "1,2,0,0"
    code, out, _ = run(capsys, "growth", "--n-max", "2048", "check")
    assert code == 0 and json.loads(out)["pass"] is True
    # g = id is not superlinear enough to place the d-sequence
    code, _, _ = run(capsys, "growth", "--g", "id", "--n-max", "64", "build")
    assert code == 2


def test_xk_build_and_complexity(capsys):
    code, out, _ = run(capsys, "xk", "--max-level", "5", "build",
                       "--format", "csv")
    assert code == 0
    assert out.strip().split("\n")[2] == "1,1,2,base,explicit"
    code, out, _ = run(capsys, "xk", "--max-level", "5", "complexity",
                       "--n", "9", "--format", "csv")
    assert code == 0
    assert out.strip().split("\n")[2].startswith("9,85,")


def test_xk_verify_structure(capsys):
    code, out, _ = run(capsys, "xk", "--max-level", "4", "verify-structure")
    assert code == 0 and json.loads(out)["pass"] is True


def test_ergodic_commands(capsys):
    code, out, _ = run(capsys, "ergodic", "--max-level", "6", "build",
                       "--format", "csv")
    assert code == 0
    assert out.strip().split("\n")[2].startswith("0,1,2,")
    code, out, _ = run(capsys, "ergodic", "--max-level", "6", "intervals",
                       "--u", "ab", "--format", "csv")
    assert code == 0
    code, out, _ = run(capsys, "ergodic", "--max-level", "6", "decompose",
                       "--word", "ab")
    assert code == 0
    got = json.loads(out)["report"]["decomposition"]
    assert "".join(b for _, b in got["blocks"]) == "ab"
    code, _, _ = run(capsys, "ergodic", "--max-level", "6", "decompose",
                     "--word", "zz")
    assert code == 2


def test_subst_recurrence(capsys):
    code, out, _ = run(capsys, "subst", "--gamma", "2", "recurrence",
                       "--n", "1,18", "--format", "csv")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[2] == "1,4,42" and lines[3] == "18,197,252"


def test_algebra_commands(capsys):
    code, out, _ = run(capsys, "algebra", "identities", "--trials", "25")
    assert code == 0 and json.loads(out)["pass"] is True
    code, out, _ = run(capsys, "algebra", "dims", "--N", "1",
                       "--format", "csv")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[2] == "0,2," and lines[3] == "1,24,35/12"
    code, out, _ = run(capsys, "algebra", "witness-product", "--proj", "a",
                       "--l", "1")
    assert code == 0 and json.loads(out)["pass"] is True
    code, out, _ = run(capsys, "algebra", "decompose-identity", "--l", "0")
    assert code == 0 and json.loads(out)["pass"] is True


def test_failure_serializes_witness(capsys, monkeypatch):
    import wordlab.xk_words as xw

    def fake(oracle, l=1, epsilon=None, audit_seed=0):
        return {"pass": False, "reason": "synthetic failure for plumbing"}

    monkeypatch.setattr(xw, "verify_derivative_spike", fake)
    code, _, err = run(capsys, "xk", "--max-level", "5", "verify-spike",
                       "--l", "1")
    assert code == 1
    doc = json.loads(err)
    assert doc["witness"]["reason"].startswith("synthetic")
