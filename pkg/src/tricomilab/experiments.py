"""Experiment configurations, runners and artifact writers.

A configuration is a YAML tree::

    kind: blowup-scan
    seed: 0
    params:
      p: [2, 3, 4, 4.5, 6, 7]
      epsilon: [0.5, 0.01]

Every parameter has a default (see ``DEFAULTS``); the fully resolved tree is
embedded in each JSON artifact and its hash in every artifact. Artifacts
depend only on the resolved parameters and the seed, never on the output
directory, worker count or wall-clock time.
"""

from concurrent.futures import ProcessPoolExecutor
import copy
import csv
from dataclasses import dataclass, field
import hashlib
import io
import json
import math
import os
from pathlib import Path
import tempfile

import numpy as np
import yaml

from . import __version__
from .errors import InputError, TricomiLabError, UsageError

__all__ = [
    "KINDS",
    "DEFAULTS",
    "ExperimentConfig",
    "SweepResult",
    "SPECFUN_REGISTRY",
    "load_config",
    "run_experiment",
    "dichotomy_plotdata",
    "specfun_eval",
]

KINDS = ("simulate", "linear-decay", "blowup-scan", "picard", "exponents",
         "specfun-table", "strichartz-scan")

_DATA = {"M": 2.0, "epsilon": 0.5, "radius": 2.0, "a0": 1.0, "a1": 1.0}
_NL = {"p": 3.0, "variant": "pure", "T0": 0.5}
_CTL = {"cfl": 0.4, "T_end": 10.0, "blowup_threshold": 1e6, "dt_max": 0.05,
        "record_stride": 1, "scheme": "corrected"}

DEFAULTS = {
    "simulate": {
        "grid": {"dx": 0.1, "L": None, "n": None},
        "data": dict(_DATA),
        "nl": dict(_NL),
        "ctl": dict(_CTL),
        "snapshot_times": [],
    },
    "linear-decay": {
        "grid": {"L": 2048.0, "n": 65536},
        "data": {"M": 2.0, "epsilon": 1.0, "radius": 2.0, "a0": 1.0, "a1": 1.0},
        "t_min": 10.0,
        "t_max": 200.0,
        "count": 40,
        "route": "airy",
    },
    "blowup-scan": {
        "p": [2.0, 3.0, 4.0, 4.5, 6.0, 7.0],
        "epsilon": [0.5, 0.01],
        "data": {"M": 2.0, "radius": 2.0, "a0": 1.0, "a1": 1.0},
        "variant": "pure",
        "T_end": 200.0,
        "dx": 0.125,
        "cfl": 0.4,
        "dt_max": 0.05,
        "blowup_threshold": 1e6,
        "record_stride": 20,
        "refine": True,
        "agreement": 0.1,
        "decay_window": [10.0, 200.0],
    },
    "picard": {
        "p": 7.0,
        "epsilon": 1e-3,
        "data": {"M": 2.0, "radius": 1.5, "a0": 1.0, "a1": 1.0},
        "variant": "cutoff",
        "T0": 0.5,
        "k_max": 6,
        "gamma": None,
        "T_num": 50.0,
        "dx": 0.125,
        "cfl": 0.4,
    },
    "exponents": {"m": 1, "n": 1, "p_eval": 9.0},
    "specfun-table": {
        "t_min": 0.0,
        "t_max": 10.0,
        "count": 101,
        "functions": ["char_radius", "lambda", "lambda_prime", "bessel_k_1_3",
                      "bessel_k_2_3", "ai", "bi", "hyp0f1_2_3", "hyp0f1_4_3"],
    },
    "strichartz-scan": {
        "p": 7.0,
        "glassey": True,
        "inhomogeneous": True,
        "dilations": [0.25, 1.0, 4.0],
        "t_horizon": 6.0,
        "L": 10.0,
        "n": 512,
        "count": 12,
        "rtol": 1e-6,
        "shift": "zero",
        "sample": None,
    },
}

_TOP_KEYS = {"kind", "seed", "params", "out", "workers"}


# ---------------------------------------------------------------- config --

def _merge(defaults, given, path):
    if not isinstance(given, dict):
        raise UsageError(path, "expected a mapping")
    out = copy.deepcopy(defaults)
    for key, val in given.items():
        sub = f"{path}.{key}"
        if key not in defaults:
            raise UsageError(sub, "unknown key")
        ref = defaults[key]
        if isinstance(ref, dict):
            out[key] = _merge(ref, val, sub)
        else:
            out[key] = _coerce(ref, val, sub)
    return out


def _coerce(ref, val, path):
    if val is None:
        return None
    if isinstance(ref, bool):
        if not isinstance(val, bool):
            raise UsageError(path, f"expected true/false, got {val!r}")
        return val
    if isinstance(ref, int) and not isinstance(ref, bool):
        if isinstance(val, bool) or not isinstance(val, (int, float)) or int(val) != val:
            raise UsageError(path, f"expected an integer, got {val!r}")
        return int(val)
    if isinstance(ref, float) or ref is None:
        if isinstance(val, bool):
            raise UsageError(path, f"expected a number, got {val!r}")
        if isinstance(val, (int, float)):
            v = float(val)
            if not math.isfinite(v):
                raise UsageError(path, "must be finite")
            return v
        if ref is None and isinstance(val, str):
            return val
        raise UsageError(path, f"expected a number, got {val!r}")
    if isinstance(ref, str):
        if not isinstance(val, str):
            raise UsageError(path, f"expected a string, got {val!r}")
        return val
    if isinstance(ref, list):
        if not isinstance(val, (list, tuple)):
            val = [val]
        elem = ref[0] if ref else 0.0
        return [_coerce(elem, v, f"{path}[{i}]") for i, v in enumerate(val)]
    raise UsageError(path, "unsupported value")


def _require(cond, path, message):
    if not cond:
        raise UsageError(path, message)


def _validate(kind, P):
    """Semantic checks against module preconditions, before any compute."""
    from .fields import Grid1D
    from .solver import NonlinearitySpec, StepControl

    def data_checks(d, base="params.data"):
        _require(d["M"] > 1.0, f"{base}.M", "must exceed 1")
        if "radius" in d:
            _require(0.0 < d["radius"] <= d["M"], f"{base}.radius", "must lie in (0, M]")
        if "epsilon" in d:
            _require(d["epsilon"] >= 0.0, f"{base}.epsilon", "must be non-negative")

    def wrap(path, fn):
        try:
            return fn()
        except (InputError, ValueError) as exc:
            raise UsageError(path, str(exc)) from None

    if kind == "simulate":
        data_checks(P["data"])
        wrap("params.nl", lambda: NonlinearitySpec(P["nl"]["p"], P["nl"]["variant"], P["nl"]["T0"]))
        wrap("params.ctl", lambda: StepControl(**P["ctl"]))
        g = P["grid"]
        if g["L"] is not None or g["n"] is not None:
            _require(g["L"] is not None and g["n"] is not None, "params.grid",
                     "give both L and n, or neither")
            grid = wrap("params.grid", lambda: Grid1D(g["L"], int(g["n"])))
            _require(grid.contains_cone(P["data"]["M"], P["ctl"]["T_end"]), "params.grid.L",
                     "box does not contain the cone at T_end")
        else:
            _require(g["dx"] is not None and g["dx"] > 0, "params.grid.dx", "must be positive")
        for i, s in enumerate(P["snapshot_times"]):
            _require(0.0 <= s <= P["ctl"]["T_end"], f"params.snapshot_times[{i}]",
                     "must lie in [0, T_end]")
    elif kind == "linear-decay":
        data_checks(P["data"])
        grid = wrap("params.grid", lambda: Grid1D(P["grid"]["L"], int(P["grid"]["n"])))
        _require(0.0 < P["t_min"] < P["t_max"], "params.t_min", "need 0 < t_min < t_max")
        _require(P["count"] >= 20, "params.count", "decay fit needs at least 20 samples")
        _require(P["route"] in ("airy", "kummer"), "params.route", "must be airy or kummer")
        _require(grid.contains_cone(P["data"]["M"], P["t_max"]), "params.grid.L",
                 "box does not contain the cone at t_max")
    elif kind == "blowup-scan":
        data_checks(P["data"])
        for i, p in enumerate(P["p"]):
            wrap(f"params.p[{i}]", lambda p=p: NonlinearitySpec(p, P["variant"]))
        for i, e in enumerate(P["epsilon"]):
            _require(e >= 0.0, f"params.epsilon[{i}]", "must be non-negative")
        wrap("params", lambda: StepControl(cfl=P["cfl"], T_end=P["T_end"], dt_max=P["dt_max"],
                                           blowup_threshold=P["blowup_threshold"],
                                           record_stride=P["record_stride"]))
        _require(P["dx"] > 0, "params.dx", "must be positive")
        _require(0.0 < P["agreement"] < 1.0, "params.agreement", "must lie in (0, 1)")
        lo, hi = (P["decay_window"] + [None, None])[:2]
        _require(lo is not None and hi is not None and 0.0 < lo < hi, "params.decay_window",
                 "need two times 0 < lo < hi")
    elif kind == "picard":
        data_checks(P["data"])
        wrap("params", lambda: NonlinearitySpec(P["p"], P["variant"], P["T0"]))
        _require(P["k_max"] >= 1, "params.k_max", "must be at least 1")
        if P["gamma"] is None:
            from .strichartz import picard_gamma_window
            _require(not picard_gamma_window(P["p"]).empty, "params.p",
                     "no admissible weight exponent; give params.gamma explicitly")
        _require(P["T_num"] > P["T0"], "params.T_num", "must exceed T0")
        _require(P["dx"] > 0, "params.dx", "must be positive")
        _require(0.0 < P["cfl"] < 1.0, "params.cfl", "must lie in (0, 1)")
    elif kind == "exponents":
        _require(P["m"] >= 1, "params.m", "must be a positive integer")
        _require(P["n"] >= 1, "params.n", "must be a positive integer")
        _require(P["p_eval"] > 1.0, "params.p_eval", "must exceed 1")
    elif kind == "specfun-table":
        _require(0.0 <= P["t_min"] < P["t_max"], "params.t_min", "need 0 <= t_min < t_max")
        _require(P["count"] >= 2, "params.count", "must be at least 2")
        for i, name in enumerate(P["functions"]):
            _require(name in SPECFUN_REGISTRY, f"params.functions[{i}]",
                     f"unknown function {name!r}; choose from {sorted(SPECFUN_REGISTRY)}")
    elif kind == "strichartz-scan":
        _require(P["p"] > 1.0, "params.p", "must exceed 1")
        _require(P["t_horizon"] > 0, "params.t_horizon", "must be positive")
        _require(P["count"] >= 2, "params.count", "must be at least 2")
        _require(P["shift"] in ("zero", "plus_M"), "params.shift", "must be zero or plus_M")
        _require(all(v > 0 for v in P["dilations"]), "params.dilations", "must be positive")
        wrap("params", lambda: Grid1D(P["L"], int(P["n"])))
        if P["sample"] is not None:
            _require(P["sample"] >= 1, "params.sample", "must be a positive integer")


@dataclass
class ExperimentConfig:
    """Validated experiment description."""

    kind: str
    params: dict
    seed: int = 0
    out: str = "results"
    workers: int = 1

    @classmethod
    def from_mapping(cls, tree, *, out=None, seed=None, workers=None, overrides=None):
        if tree is None:
            tree = {}
        if not isinstance(tree, dict):
            raise UsageError("<root>", "configuration must be a mapping")
        for key in tree:
            if key not in _TOP_KEYS:
                raise UsageError(key, "unknown key")
        kind = tree.get("kind")
        if kind not in KINDS:
            raise UsageError("kind", f"must be one of {', '.join(KINDS)}, got {kind!r}")
        given = copy.deepcopy(tree.get("params") or {})
        if not isinstance(given, dict):
            raise UsageError("params", "expected a mapping")
        # dotted override paths address nested blocks, e.g. "nl.p"
        for key, val in (overrides or {}).items():
            if val is None:
                continue
            node = given
            *head, leaf = key.split(".")
            for part in head:
                node = node.setdefault(part, {})
                if not isinstance(node, dict):
                    raise UsageError(f"params.{part}", "expected a mapping")
            node[leaf] = val
        params = _merge(DEFAULTS[kind], given, "params")
        seed = tree.get("seed", 0) if seed is None else seed
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            raise UsageError("seed", "must be a non-negative integer")
        workers = tree.get("workers", 1) if workers is None else workers
        if isinstance(workers, bool) or not isinstance(workers, int) or workers < 1:
            raise UsageError("workers", "must be a positive integer")
        out = tree.get("out", "results") if out is None else out
        _validate(kind, params)
        return cls(kind, params, seed, str(out), workers)

    def resolved(self):
        """Everything that determines the artifacts."""
        return {"kind": self.kind, "params": self.params, "seed": self.seed}

    @property
    def config_hash(self):
        text = json.dumps(self.resolved(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def provenance(self):
        return {"config_hash": self.config_hash, "code_version": __version__,
                "config": self.resolved()}

    def provenance_comment(self):
        return f"config_hash={self.config_hash} code_version={__version__}"


def load_config(path, **kw):
    """Read a YAML configuration file into an :class:`ExperimentConfig`."""
    try:
        with open(path) as fh:
            tree = yaml.safe_load(fh)
    except OSError as exc:
        raise UsageError("--config", f"cannot read {path}: {exc.strerror}") from None
    except yaml.YAMLError as exc:
        raise UsageError("--config", f"not valid YAML: {exc}") from None
    return ExperimentConfig.from_mapping(tree, **kw)


# ---------------------------------------------------------------- output --

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _dumps(doc, indent=2):
    return json.dumps(_jsonable(doc), sort_keys=True, indent=indent) + "\n"


def _atomic_write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header, rows, comment):
    buf = io.StringIO()
    buf.write(f"# {comment}\n")
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for row in rows:
        wr.writerow(["" if v is None else (repr(float(v)) if isinstance(v, (float, np.floating))
                                           else v) for v in row])
    return buf.getvalue()


def _runs_jsonl(records, cfg):
    prov = {"config_hash": cfg.config_hash, "code_version": __version__}
    lines = []
    for rec in records:
        doc = dict(rec)
        doc["provenance"] = prov
        lines.append(json.dumps(_jsonable(doc), sort_keys=True))
    return "\n".join(lines) + ("\n" if lines else "")


def _final_norms(state):
    dx = state.grid.dx
    return {"t": float(state.t), "supnorm": float(np.max(np.abs(state.u))),
            "l2": float(math.sqrt(np.sum(state.u ** 2) * dx)),
            "mean": float(np.sum(state.u) * dx)}


# --------------------------------------------------------------- runners --

def _make_data(grid, d, epsilon):
    from .fields import InitialData
    return InitialData.bumps(grid, M=d["M"], epsilon=epsilon, radius=d["radius"],
                             a0=d["a0"], a1=d["a1"])


def _riccati_summary(traj, p, t_star):
    """Lemma constants and the two growth floors for a blowup trajectory."""
    from .blowup import power_floor, riccati_check, second_derivative
    out = {}
    try:
        out["witness"] = riccati_check(traj, p).as_dict()
    except InputError as exc:
        out["witness"] = {"error": str(exc)}
    tm, g2 = second_derivative(traj.t, traj.mean)
    sel = (tm >= 0.1 * t_star) & (tm > 0) & np.isfinite(g2)
    out["G2_floor"] = power_floor(tm[sel], g2[sel], -p / 4.0) if np.any(sel) else None
    t = np.asarray(traj.t)
    g1 = np.asarray(traj.G1)
    sel = (t >= 0.5) & np.isfinite(g1)
    out["G1_floor"] = power_floor(t[sel], g1[sel], -0.5) if np.any(sel) else None
    return out


def simulate_case(p, epsilon, data_params, *, variant="pure", T0=0.5, T_end=10.0, dx=0.1,
                  cfl=0.4, dt_max=0.05, blowup_threshold=1e6, record_stride=1,
                  scheme="corrected", grid_L=None, grid_n=None, exact_dx=False,
                  snapshot_times=(), decay_window=None):
    """One semilinear run; returns ``(record, outcome)``.

    ``record`` is the runs.jsonl entry. Accuracy failures become status
    ``abort`` with the reason, never exceptions.
    """
    from .fields import Grid1D
    from .propagator import decay_fit
    from .solver import BLOWUP, COMPLETED, NonlinearitySpec, StepControl, run

    if grid_L is not None:
        grid = Grid1D(grid_L, int(grid_n))
    elif exact_dx:
        grid = Grid1D.for_spacing(data_params["M"], T_end, dx)
    else:
        grid = Grid1D.for_horizon(data_params["M"], T_end, dx)
    params = {"p": p, "epsilon": epsilon, "variant": variant, "T0": T0, "T_end": T_end,
              "dx": grid.dx, "L": grid.L, "n": grid.n, "cfl": cfl, "dt_max": dt_max,
              "blowup_threshold": blowup_threshold, "scheme": scheme, "data": data_params}
    data = _make_data(grid, data_params, epsilon)
    nl = NonlinearitySpec(p, variant, T0)
    ctl = StepControl(cfl=cfl, T_end=T_end, dt_max=dt_max, blowup_threshold=blowup_threshold,
                      record_stride=record_stride, scheme=scheme)
    try:
        out = run(data, nl, ctl, snapshot_times=snapshot_times)
    except TricomiLabError as exc:
        rec = {"params": params, "status": "abort", "blowup_time_estimate": None,
               "decay_slope": None, "final_norms": None, "message": str(exc)}
        return rec, None
    slope = None
    if out.status == COMPLETED and decay_window is not None:
        try:
            slope, _ = decay_fit(out.trajectory, tuple(decay_window))
        except InputError:
            slope = None
    rec = {"params": params, "status": out.status,
           "blowup_time_estimate": out.blowup_time_estimate, "decay_slope": slope,
           "final_norms": _final_norms(out.final_state), "steps": out.steps,
           "message": out.message,
           "max_cone_leak": float(np.nanmax(out.trajectory.cone_leak))}
    if out.status == BLOWUP:
        rec["riccati"] = _riccati_summary(out.trajectory, p, out.blowup_time_estimate)
    return rec, out


def _scan_case(args):
    """Worker: one sweep grid point, with the refinement rerun for blowups."""
    p, eps, P = args
    from .solver import BLOWUP, COMPLETED
    common = dict(variant=P["variant"], T_end=P["T_end"], cfl=P["cfl"], dt_max=P["dt_max"],
                  blowup_threshold=P["blowup_threshold"], record_stride=P["record_stride"],
                  decay_window=P["decay_window"])
    rec, _ = simulate_case(p, eps, P["data"], dx=P["dx"], **common)
    records = [rec]
    status = rec["status"]
    row = {"p": p, "epsilon": eps, "status": status,
           "blowup_time_estimate": rec["blowup_time_estimate"],
           "decay_slope": rec["decay_slope"], "message": rec.get("message", "")}
    if status == BLOWUP:
        if P["refine"]:
            # the refinement only needs to reach the coarse blowup time
            fine_T = min(P["T_end"], 1.5 * rec["blowup_time_estimate"] + 1.0)
            rec2, _ = simulate_case(p, eps, P["data"], dx=0.5 * rec["params"]["dx"],
                                    exact_dx=True, **dict(common, T_end=fine_T))
            records.append(rec2)
            t1, t2 = rec["blowup_time_estimate"], rec2["blowup_time_estimate"]
            row["blowup_time_refined"] = t2
            if rec2["status"] != BLOWUP or abs(t1 - t2) > P["agreement"] * abs(t2):
                row["status"] = "blowup_unconfirmed"
                row["message"] = f"refined run: status {rec2['status']}, estimate {t2}"
        row["outcome"] = "blowup" if row["status"] == BLOWUP else row["status"]
    elif status == COMPLETED:
        row["outcome"] = "global"
    else:
        row["outcome"] = status
    return row, records


@dataclass
class SweepResult:
    """Rows of a dichotomy sweep (one per ``(p, epsilon)`` grid point)."""

    rows: list
    provenance: dict = field(default_factory=dict)

    def as_dict(self):
        return {"rows": self.rows, "provenance": self.provenance}

    def to_json(self):
        return _dumps(self.as_dict())


def dichotomy_plotdata(sweep, comment=None):
    """CSV ``p,epsilon,outcome`` sorted by ``(p, epsilon)`` with the ``p = 5`` reference row."""
    rows = [(float(r["p"]), float(r["epsilon"]), r.get("outcome", r["status"]))
            for r in sweep.rows]
    # the reference row sorts first among p = 5 entries
    rows.append((5.0, -math.inf, "critical_reference"))
    rows.sort(key=lambda r: (r[0], r[1]))
    out = [(p, "" if math.isinf(e) else e, o) for p, e, o in rows]
    if comment is None:
        comment = " ".join(f"{k}={v}" for k, v in sorted(sweep.provenance.items())
                           if k in ("config_hash", "code_version"))
    return _csv_text(["p", "epsilon", "outcome"], out, comment)


def _pool_map(fn, jobs, workers):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


def _run_simulate(cfg):
    P = cfg.params
    g, d, nl, ctl = P["grid"], P["data"], P["nl"], P["ctl"]
    rec, out = simulate_case(
        nl["p"], d["epsilon"], {k: d[k] for k in ("M", "radius", "a0", "a1")},
        variant=nl["variant"], T0=nl["T0"], T_end=ctl["T_end"], dx=g["dx"], cfl=ctl["cfl"],
        dt_max=ctl["dt_max"], blowup_threshold=ctl["blowup_threshold"],
        record_stride=ctl["record_stride"], scheme=ctl["scheme"], grid_L=g["L"],
        grid_n=g["n"], snapshot_times=P["snapshot_times"],
        decay_window=[10.0, ctl["T_end"]] if ctl["T_end"] > 10.0 else None)
    files = {"runs.jsonl": _runs_jsonl([rec], cfg)}
    if out is not None:
        tr = out.trajectory
        files["diagnostics.csv"] = _csv_text(
            ["t", "supnorm", "mean", "energy", "cone_leak"],
            zip(tr.t, tr.supnorm, tr.mean, tr.energy, tr.cone_leak), cfg.provenance_comment())
        if tr.snapshots:
            files["snapshots.csv"] = _csv_text(
                ["t", "x", "u", "ut"],
                ((s.t, x, u, v) for s in tr.snapshots for x, u, v in zip(s.grid.x, s.u, s.ut)),
                cfg.provenance_comment())
        if "riccati" in rec:
            files["riccati.json"] = _dumps(dict(rec["riccati"], provenance=cfg.provenance()))
    return files


def _run_linear_decay(cfg):
    from .fields import Grid1D
    from .propagator import decay_fit, linear_trajectory
    P = cfg.params
    grid = Grid1D(P["grid"]["L"], int(P["grid"]["n"]))
    d = P["data"]
    data = _make_data(grid, d, d["epsilon"])
    times = np.geomspace(P["t_min"], P["t_max"], int(P["count"]))
    tr = linear_trajectory(data, times, route=P["route"])
    slope, r2 = decay_fit(tr, (P["t_min"], P["t_max"]))
    rec = {"params": dict(P, L=grid.L, n=grid.n), "status": "completed",
           "blowup_time_estimate": None, "decay_slope": slope, "decay_r2": r2,
           "final_norms": {"t": float(tr.t[-1]), "supnorm": float(tr.supnorm[-1]),
                           "mean": float(tr.mean[-1])},
           "max_cone_leak": float(np.max(tr.cone_leak))}
    return {
        "runs.jsonl": _runs_jsonl([rec], cfg),
        "diagnostics.csv": _csv_text(["t", "supnorm", "mean", "energy", "cone_leak"],
                                     zip(tr.t, tr.supnorm, tr.mean, tr.energy, tr.cone_leak),
                                     cfg.provenance_comment()),
    }


def _run_blowup_scan(cfg):
    P = cfg.params
    jobs = [(float(p), float(e), P) for p in P["p"] for e in P["epsilon"]]
    results = _pool_map(_scan_case, jobs, cfg.workers)
    rows = [r for r, _ in results]
    records = [rec for _, recs in results for rec in recs]
    sweep = SweepResult(rows, cfg.provenance())
    files = {"sweep.json": sweep.to_json(), "runs.jsonl": _runs_jsonl(records, cfg)}
    if rows:
        files["dichotomy.csv"] = dichotomy_plotdata(sweep, cfg.provenance_comment())
    return files


def _run_picard(cfg):
    from .fields import Grid1D
    from .solver import NonlinearitySpec, picard_iterate
    from .strichartz import picard_gamma_window
    from .weights import WeightSpec
    P = cfg.params
    p = P["p"]
    gamma = P["gamma"]
    if gamma is None:
        gamma = float(picard_gamma_window(p).midpoint)
    d = P["data"]
    grid = Grid1D.for_horizon(d["M"], P["T_num"], P["dx"])
    data = _make_data(grid, d, P["epsilon"])
    try:
        rep = picard_iterate(data, NonlinearitySpec(p, P["variant"], P["T0"]), int(P["k_max"]),
                             WeightSpec(gamma, p + 1.0, d["M"]), T_num=P["T_num"], cfl=P["cfl"])
        doc = rep.as_dict()
        status = "contraction_failed" if rep.contraction_failed else "completed"
    except TricomiLabError as exc:
        doc = {"error": str(exc)}
        status = "abort"
    doc.update({"gamma": gamma, "status": status, "dx": grid.dx, "L": grid.L, "n": grid.n})
    rec = {"params": dict(P, gamma=gamma), "status": status, "blowup_time_estimate": None,
           "decay_slope": None, "final_norms": {"M": doc.get("M"), "N": doc.get("N")}}
    return {"picard.json": _dumps(dict(doc, provenance=cfg.provenance())),
            "runs.jsonl": _runs_jsonl([rec], cfg)}


def _run_exponents(cfg):
    from .strichartz import critical_exponents
    P = cfg.params
    rep = critical_exponents(int(P["m"]), int(P["n"]), P["p_eval"])
    d = rep.as_dict()
    table = [("p_crit", d["p_crit"]), ("p_conf", d["p_conf"]), ("p0", d["p0"]),
             ("p1", d["p1"]), ("w1_root", d["w1_root"]),
             ("gamma_lower", d["gamma_interval"][0]), ("gamma_upper", d["gamma_interval"][1])]
    return {"exponents.json": rep.to_json(provenance=cfg.provenance()),
            "exponents.csv": _csv_text(["quantity", "value"], table, cfg.provenance_comment())}


def _run_specfun_table(cfg):
    P = cfg.params
    t = np.linspace(P["t_min"], P["t_max"], int(P["count"]))
    cols = [np.asarray(SPECFUN_REGISTRY[name][0](t, SPECFUN_REGISTRY[name][1]), dtype=float)
            for name in P["functions"]]
    rows = zip(t, *cols)
    return {"specfun.csv": _csv_text(["t"] + list(P["functions"]), rows,
                                     cfg.provenance_comment())}


def _run_strichartz_scan(cfg):
    from .corpus import CORPUS_VERSION, glassey_corpus, source_corpus
    from .fields import Grid1D
    from .strichartz import (alphabeta_solve, glassey_exponents, glassey_ratio_scan,
                             inhomogeneous_inequality_sample)
    from .weights import WeightSpec
    P = cfg.params
    rng = np.random.default_rng(cfg.seed)
    files = {}
    summary = {"corpus_version": CORPUS_VERSION, "p": P["p"]}
    if P["glassey"]:
        corpus = glassey_corpus()
        if P["sample"] is not None and P["sample"] < len(corpus):
            idx = sorted(rng.choice(len(corpus), int(P["sample"]), replace=False).tolist())
            corpus = [corpus[i] for i in idx]
        a, b, dlt, q, r = glassey_exponents(P["p"])
        scan = glassey_ratio_scan(corpus, a, b, dlt, q, r, dilations=tuple(P["dilations"]))
        summary["glassey"] = {"conditions": scan.conditions.checks, "violations": scan.violations,
                              "alpha": float(a), "beta": float(b), "delta": float(dlt),
                              "q": float(q), "r": float(r), "max_ratio": scan.max_ratio,
                              "dilation_spread": scan.dilation_spread}
        files["glassey_scan.csv"] = scan.to_csv(header_comment=cfg.provenance_comment())
    if P["inhomogeneous"]:
        from .errors import NoAdmissiblePairError
        try:
            ab = alphabeta_solve(P["p"] + 1.0)
        except NoAdmissiblePairError as exc:
            summary["inhomogeneous"] = {"error": str(exc)}
        else:
            q = P["p"] + 1.0
            w_pair = (WeightSpec(-float(ab.alpha), q, 2.0, P["shift"]),
                      WeightSpec(float(ab.beta), q / (q - 1.0), 2.0, P["shift"]))
            corpus = source_corpus()
            if P["sample"] is not None and P["sample"] < len(corpus):
                idx = sorted(rng.choice(len(corpus), int(P["sample"]), replace=False).tolist())
                corpus = [corpus[i] for i in idx]
            scan = inhomogeneous_inequality_sample(
                corpus, w_pair, P["t_horizon"], Grid1D(P["L"], int(P["n"])),
                count=int(P["count"]), rtol=P["rtol"], workers=cfg.workers)
            summary["inhomogeneous"] = {"alpha_beta": ab.as_dict(), "max_ratio": scan.max_ratio,
                                        "min_ratio": scan.min_ratio, "skipped": scan.skipped,
                                        "t_horizon": scan.t_horizon}
            files["inequality_scan.csv"] = scan.to_csv(header_comment=cfg.provenance_comment())
    files["strichartz.json"] = _dumps(dict(summary, provenance=cfg.provenance()))
    return files


_RUNNERS = {
    "simulate": _run_simulate,
    "linear-decay": _run_linear_decay,
    "blowup-scan": _run_blowup_scan,
    "picard": _run_picard,
    "exponents": _run_exponents,
    "specfun-table": _run_specfun_table,
    "strichartz-scan": _run_strichartz_scan,
}


def run_experiment(cfg):
    """Run one experiment and write its artifacts under ``cfg.out``.

    Returns
    -------
    status : int
        0 on success; scientific outcomes (blowup, contraction failure,
        accuracy aborts of single runs) are data, not errors.
    paths : list of Path
    """
    files = _RUNNERS[cfg.kind](cfg)
    out = Path(cfg.out)
    paths = []
    for name in sorted(files):
        path = out / name
        _atomic_write(path, files[name])
        paths.append(path)
    return 0, paths


# ------------------------------------------------------- special funcs --

def _sf_airy(idx):
    def f(x, _):
        from .specfun import airy_arrays
        return airy_arrays(x)[idx]
    return f


def _k_or_inf(nu, x):
    from .specfun import bessel_k
    x = np.asarray(x, dtype=float)
    pos = x > 0
    out = np.full(x.shape, np.inf)
    if np.any(pos):
        out[pos] = bessel_k(nu, x[pos])
    return out


def _registry():
    from . import specfun as sf
    return {
        "char_radius": (lambda x, _: sf.char_radius(x), None),
        "lambda": (lambda x, _: sf.airy_lambda(x), None),
        "lambda_prime": (lambda x, _: sf.airy_lambda_prime(x), None),
        "bessel_k": (lambda x, nu: sf.bessel_k(nu, x), 0.5),
        "bessel_k_1_3": (lambda x, _: _k_or_inf(1.0 / 3.0, x), None),
        "bessel_k_2_3": (lambda x, _: _k_or_inf(2.0 / 3.0, x), None),
        "ai": (_sf_airy(0), None),
        "ai_prime": (_sf_airy(1), None),
        "bi": (_sf_airy(2), None),
        "bi_prime": (_sf_airy(3), None),
        "hyp0f1": (lambda x, b: sf.hyp0f1_neg(b, x), 2.0 / 3.0),
        "hyp0f1_2_3": (lambda x, _: sf.hyp0f1_neg(2.0 / 3.0, x), None),
        "hyp0f1_4_3": (lambda x, _: sf.hyp0f1_neg(4.0 / 3.0, x), None),
        "gauss_hyp": (lambda x, g: sf.gauss_hyp_unit(g, x), 1.0 / 6.0),
    }


SPECFUN_REGISTRY = _registry()


def specfun_eval(name, xs, param=None):
    """Evaluate a registered special function; returns a list of floats."""
    if name not in SPECFUN_REGISTRY:
        raise UsageError("name", f"unknown function {name!r}; choose from {sorted(SPECFUN_REGISTRY)}")
    fn, default = SPECFUN_REGISTRY[name]
    arg = default if param is None else param
    vals = np.atleast_1d(np.asarray(fn(np.asarray(xs, dtype=float), arg), dtype=float))
    return [float(v) for v in vals]
