import json
import math

import pytest
import yaml

from tricomilab.cli import main
from tricomilab.errors import UsageError
from tricomilab.experiments import (
    DEFAULTS,
    KINDS,
    ExperimentConfig,
    SweepResult,
    dichotomy_plotdata,
    load_config,
    run_experiment,
    specfun_eval,
)

# small parameter sets that exercise every runner in a few seconds
SMALL = {
    "simulate": {"nl": {"p": 3.0}, "data": {"epsilon": 0.5}, "ctl": {"T_end": 4.0},
                 "grid": {"dx": 0.125}, "snapshot_times": [1.0]},
    "linear-decay": {"grid": {"L": 200.0, "n": 4096}, "t_max": 40.0, "count": 20},
    "blowup-scan": {"p": [3.0], "epsilon": [0.5], "T_end": 20.0},
    "picard": {"T_num": 4.0, "k_max": 2},
    "exponents": {},
    "specfun-table": {"count": 11},
    "strichartz-scan": {"L": 6.0, "n": 256, "t_horizon": 3.0, "count": 4, "sample": 2},
}


def _cfg(kind, out, **kw):
    return ExperimentConfig.from_mapping({"kind": kind, "params": SMALL[kind]}, out=str(out), **kw)


def _read_all(paths):
    return {p.name: p.read_bytes() for p in paths}


class TestConfig:
    def test_defaults_resolved(self):
        cfg = ExperimentConfig.from_mapping({"kind": "exponents"})
        assert cfg.params == DEFAULTS["exponents"] and cfg.seed == 0 and cfg.workers == 1

    @pytest.mark.parametrize("tree,field", [
        ({"kind": "nope"}, "kind"),
        ({"kind": "simulate", "extra": 1}, "extra"),
        ({"kind": "simulate", "params": {"nl": {"p": "three"}}}, "params.nl.p"),
        ({"kind": "simulate", "params": {"nl": {"q": 3}}}, "params.nl.q"),
        ({"kind": "simulate", "params": {"nl": {"p": 1.0}}}, "params.nl"),
        ({"kind": "simulate", "params": {"data": {"M": 0.5}}}, "params.data.M"),
        ({"kind": "simulate", "params": {"grid": {"L": 10.0}}}, "params.grid"),
        ({"kind": "simulate", "params": {"snapshot_times": [99.0]}}, "params.snapshot_times[0]"),
        ({"kind": "blowup-scan", "params": {"p": [3, 1]}}, "params.p[1]"),
        ({"kind": "blowup-scan", "params": {"epsilon": [-1]}}, "params.epsilon[0]"),
        ({"kind": "blowup-scan", "params": {"refine": "yes"}}, "params.refine"),
        ({"kind": "picard", "params": {"p": 3.0}}, "params.p"),
        ({"kind": "exponents", "params": {"m": 1.5}}, "params.m"),
        ({"kind": "specfun-table", "params": {"functions": ["zeta"]}}, "params.functions[0]"),
        ({"kind": "linear-decay", "params": {"grid": {"L": 50.0}}}, "params.grid.L"),
        ({"kind": "exponents", "seed": -1}, "seed"),
    ])
    def test_usage_errors_name_field(self, tree, field):
        with pytest.raises(UsageError) as info:
            ExperimentConfig.from_mapping(tree)
        assert info.value.field == field

    def test_overrides(self):
        cfg = ExperimentConfig.from_mapping({"kind": "simulate"},
                                            overrides={"nl.p": 4.5, "ctl.T_end": 2.0})
        assert cfg.params["nl"]["p"] == 4.5 and cfg.params["ctl"]["T_end"] == 2.0

    def test_hash_ignores_output_location(self, tmp_path):
        a = ExperimentConfig.from_mapping({"kind": "exponents"}, out=str(tmp_path / "a"))
        b = ExperimentConfig.from_mapping({"kind": "exponents"}, out=str(tmp_path / "b"),
                                          workers=3)
        c = ExperimentConfig.from_mapping({"kind": "exponents"}, seed=1)
        assert a.config_hash == b.config_hash != c.config_hash

    def test_load_config(self, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text(yaml.safe_dump({"kind": "exponents", "params": {"p_eval": 7}}))
        assert load_config(path).params["p_eval"] == 7.0
        path.write_text("kind: [")
        with pytest.raises(UsageError):
            load_config(path)
        with pytest.raises(UsageError):
            load_config(tmp_path / "missing.yaml")


@pytest.mark.parametrize("kind", KINDS)
def test_every_kind_runs_deterministically(kind, tmp_path):
    s1, p1 = run_experiment(_cfg(kind, tmp_path / "one"))
    s2, p2 = run_experiment(_cfg(kind, tmp_path / "two"))
    assert s1 == s2 == 0 and p1
    a, b = _read_all(p1), _read_all(p2)
    assert a == b
    h = _cfg(kind, tmp_path).config_hash
    for name, blob in a.items():
        assert f"config_hash={h}".encode() in blob or f'"config_hash": "{h}"'.encode() in blob, name


def test_sweep_independent_of_workers(tmp_path):
    tree = {"kind": "blowup-scan", "params": {"p": [3.0, 4.0], "epsilon": [0.5], "T_end": 20.0}}
    _, p1 = run_experiment(ExperimentConfig.from_mapping(tree, out=str(tmp_path / "a")))
    _, p2 = run_experiment(ExperimentConfig.from_mapping(tree, out=str(tmp_path / "b"), workers=2))
    assert _read_all(p1) == _read_all(p2)
    rows = json.loads((tmp_path / "a" / "sweep.json").read_text())["rows"]
    assert [r["outcome"] for r in rows] == ["blowup", "blowup"]
    for r in rows:
        t1, t2 = r["blowup_time_estimate"], r["blowup_time_refined"]
        assert abs(t1 - t2) <= 0.1 * t2


def test_empty_sweep(tmp_path):
    cfg = ExperimentConfig.from_mapping({"kind": "blowup-scan", "params": {"p": []}},
                                        out=str(tmp_path))
    status, paths = run_experiment(cfg)
    assert status == 0
    assert json.loads((tmp_path / "sweep.json").read_text())["rows"] == []
    assert not (tmp_path / "dichotomy.csv").exists()


class TestDichotomy:
    def _lines(self, rows):
        text = dichotomy_plotdata(SweepResult(rows, {"config_hash": "h", "code_version": "v"}))
        return [ln for ln in text.splitlines() if not ln.startswith("#")]

    def test_single_row(self):
        lines = self._lines([{"p": 3.0, "epsilon": 0.5, "status": "blowup_detected",
                              "outcome": "blowup"}])
        assert lines == ["p,epsilon,outcome", "3.0,0.5,blowup", "5.0,,critical_reference"]

    def test_sorted(self):
        rows = [{"p": p, "epsilon": e, "status": "completed", "outcome": o}
                for p, e, o in [(7.0, 0.5, "blowup"), (2.0, 0.5, "blowup"),
                                (7.0, 0.01, "global"), (5.0, 0.01, "global"),
                                (2.0, 0.01, "blowup")]]
        lines = self._lines(rows)[1:]
        assert lines == ["2.0,0.01,blowup", "2.0,0.5,blowup", "5.0,,critical_reference",
                         "5.0,0.01,global", "7.0,0.01,global", "7.0,0.5,blowup"]

    def test_provenance_comment(self):
        text = dichotomy_plotdata(SweepResult([], {"config_hash": "abc", "code_version": "1"}))
        assert text.splitlines()[0] == "# code_version=1 config_hash=abc"


class TestSpecfunEval:
    def test_bessel(self):
        assert specfun_eval("bessel_k", [1.0], 0.5)[0] == pytest.approx(
            math.sqrt(math.pi / 2) / math.e, rel=1e-12)

    def test_unknown(self):
        with pytest.raises(UsageError):
            specfun_eval("zeta", [1.0])

    def test_k_table_at_origin(self):
        assert specfun_eval("bessel_k_1_3", [0.0, 1.0])[0] == math.inf


class TestCli:
    def test_exponents(self, tmp_path, capsys):
        assert main(["exponents", "--out", str(tmp_path)]) == 0
        doc = json.loads((tmp_path / "exponents.json").read_text())
        assert doc["p_crit"] == 5.0 and doc["p_conf"] == 9.0
        assert abs(doc["w1_root"] - (3 + math.sqrt(33)) / 2) < 1e-12
        assert "exponents.csv" in capsys.readouterr().out

    def test_usage_error_exit_2(self, tmp_path, capsys):
        assert main(["simulate", "--p", "0.5", "--out", str(tmp_path)]) == 2
        assert "params.nl" in capsys.readouterr().err

    def test_config_kind_mismatch(self, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text("kind: exponents\n")
        assert main(["picard", "--config", str(path)]) == 2

    def test_infrastructure_error_exit_1(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        assert main(["exponents", "--out", str(blocker / "sub")]) == 1

    def test_empty_sweep_flags(self, tmp_path):
        assert main(["blowup-scan", "--p", "", "--out", str(tmp_path)]) == 0

    def test_specfun_eval(self, capsys):
        assert main(["specfun", "eval", "bessel_k", "1.0", "--param", "0.5"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["values"][0] == pytest.approx(0.46106850444789454, rel=1e-14)

    def test_specfun_eval_domain(self, capsys):
        assert main(["specfun", "eval", "bessel_k", "-1.0"]) == 2

    def test_blowup_is_not_an_error(self, tmp_path):
        args = ["simulate", "--p", "3", "--epsilon", "0.5", "--T-end", "4", "--out", str(tmp_path)]
        assert main(args) == 0
        rec = json.loads((tmp_path / "runs.jsonl").read_text().splitlines()[0])
        assert rec["status"] == "blowup_detected"
        assert (tmp_path / "riccati.json").exists()
