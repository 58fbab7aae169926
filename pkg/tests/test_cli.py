import json

import numpy as np
import pytest

from lpfactor.cli import main
from lpfactor.factorization import Factorization, random_factorization


def test_explicit(capsys):
    assert main(["explicit", "--n", "4", "--p", "0.5"]) == 0
    out = capsys.readouterr().out
    assert "PT residual=0" in out
    assert "||T||=1" in out
    assert "||P|| (exact)=8" in out
    assert "bound n^(1/p-1/2)=8" in out


def test_explicit_writes_factorization(tmp_path):
    path = tmp_path / "f.json"
    assert main(["explicit", "--n", "3", "--p", "1/2", "--out", str(path)]) == 0
    F = Factorization.from_json(path.read_text())
    assert F.K == 4 and F.p == 0.5


def test_unknown_flag(capsys):
    assert main(["explicit", "--n", "4", "--p", "0.5", "--bogus"]) == 1
    err = capsys.readouterr().err
    assert "usage" in err


def test_missing_subcommand(capsys):
    assert main([]) == 1


def test_invalid_p(capsys):
    assert main(["explicit", "--n", "4", "--p", "3"]) == 1


def test_tail(tmp_path, capsys):
    out = tmp_path / "tail.json"
    assert main(["tail", "--n", "8", "--trials", "5000", "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert len(d["tails"]) == 3
    for rec in d["tails"]:
        assert rec["exact"] <= rec["hoeffding"]


def test_sign_search(capsys):
    assert main(["sign-search", "--n", "8", "--N", "64", "--seed", "3"]) == 0
    assert "good_fraction=1" in capsys.readouterr().out


def test_sign_search_not_found_is_engine_error(tmp_path, capsys):
    path = tmp_path / "m.json"
    path.write_text(json.dumps((100 * np.ones((3, 4))).tolist()))
    assert main(["sign-search", "--matrix", str(path), "--alpha", "0.01", "--samples", "5"]) == 2


def test_witness_from_file(tmp_path, capsys):
    fpath = tmp_path / "f.json"
    fpath.write_text(random_factorization(3, 8, 0.5, seed=2).to_json())
    out = tmp_path / "w.json"
    assert main(["witness", "--factorization", str(fpath), "--tries", "4",
                 "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert len(d["w"]) == 8 and d["sup_w"] > 0


def test_witness_generated(capsys):
    assert main(["witness", "--n", "4", "--K", "10", "--seed", "1", "--tries", "3"]) == 0
    assert "lower_bound=" in capsys.readouterr().out


def test_witness_bad_file(tmp_path):
    fpath = tmp_path / "bad.json"
    fpath.write_text('{"n": 2, "K": 2, "p": 1, "T": [[1,0],[0,1]], "P": [[2,0],[0,2]]}')
    assert main(["witness", "--factorization", str(fpath)]) == 1


def test_study_default_shape(tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert main(["study", "--tries", "4", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 1 + 5 * 2


def test_study_config_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_grid": [4, 8], "p_list": [1.0], "tries_per_cell": 2,
                               "output_path": str(tmp_path / "ignored.csv")}))
    out = tmp_path / "s.csv"
    assert main(["study", "--config", str(cfg), "--out", str(out), "--seed", "5"]) == 0
    assert len(out.read_text().splitlines()) == 3


def test_oracle(capsys, tmp_path):
    assert main(["oracle", "--n", "2", "--p", "0.5"]) == 0
    out = capsys.readouterr().out
    assert "||P||_(inf->p) = 2 " in out
    assert "best vertex = 1" in out
    path = tmp_path / "o.json"
    assert main(["oracle", "--n", "2", "--p", "0.5", "--out", str(path)]) == 0
    assert json.loads(path.read_text())["norm_P"] == pytest.approx(2.0)


def test_oracle_too_large():
    assert main(["oracle", "--n", "40", "--p", "1", "--max-K", "20"]) == 1
