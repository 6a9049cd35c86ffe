import json

import numpy as np
import pytest

from xxzff.cli import cli_dispatch

ZETA = str(np.pi / 3)


def run(capsys, *argv):
    code = cli_dispatch(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_thermo_subcommand(capsys):
    code, out = run(capsys, "thermo", "--zeta", ZETA, "--density", "0.25")
    assert code == 0
    assert abs(out["k_F"] - np.pi / 4) < 1e-12
    assert out["q"] > 0 and out["Z"] > 0


def test_ground_subcommand(capsys):
    code, out = run(capsys, "ground", "--M", "12", "--zeta", ZETA, "--N", "3")
    assert code == 0
    assert len(out["roots"]) == 3
    assert out["residual"] < 1e-12


def test_excite_subcommand(capsys):
    code, out = run(capsys, "excite", "--M", "12", "--zeta", ZETA, "--N", "3",
                    "--channel", "plus", "--holes", "1", "--particles", "5")
    assert code == 0
    assert len(out["roots"]) == 4


def test_ff_subcommand(capsys):
    code, out = run(capsys, "ff", "--M", "12", "--zeta", ZETA, "--N", "3",
                    "--channel", "pm", "--holes", "1", "--particles", "5")
    assert code == 0
    assert out["S_N"] > 0


def test_predict_subcommand(capsys):
    code, out = run(capsys, "predict", "--zeta", ZETA, "--density", "0.25",
                    "--channel", "zz", "--regime", "critical",
                    "--r", "1", "--p-plus", "1", "--h-minus", "1")
    assert code == 0
    assert out["theta"] > 0 and out["smooth"] > 0


def test_oracle_subcommand(capsys):
    code, out = run(capsys, "oracle", "--M", "8", "--zeta", ZETA, "--N", "2",
                    "--channel", "zz")
    assert code == 0
    assert out["status"] == "ok"
    assert not out["orphans"]


def test_scale_subcommand(capsys, tmp_path):
    cfg = {"zeta": np.pi / 3, "D": 0.25, "channel": "pm",
           "M_list": [16, 24, 32, 48]}
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out_path = tmp_path / "records.csv"
    code, out = run(capsys, "scale", "--config", str(cfg_path),
                    "--output", str(out_path))
    assert code == 0
    assert out_path.exists()
    header = out_path.read_text().splitlines()[0]
    assert header == "M,N,alpha,S_N,prediction,theta_pred,P_ex"


def test_unknown_flag_exits_1(capsys):
    assert cli_dispatch(["thermo", "--zeta", "1.0", "--nope"]) == 1


def test_unknown_subcommand_exits_1(capsys):
    assert cli_dispatch(["frobnicate"]) == 1


def test_validation_error_exits_1(capsys):
    # particle label inside the occupied range
    assert cli_dispatch(["ff", "--M", "12", "--zeta", ZETA, "--N", "3",
                         "--channel", "zz", "--holes", "1",
                         "--particles", "2"]) == 1


def test_numeric_failure_exits_2(capsys):
    # boundary label with no finite root stalls the solver
    assert cli_dispatch(["excite", "--M", "8", "--zeta", ZETA, "--N", "2",
                         "--holes", "1", "--particles", "5"]) == 2
