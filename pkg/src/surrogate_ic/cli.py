"""Command line front end.

A run is described by a JSON config; flags with the same names override
config keys::

    surrogate-ic --config run.json --out results/
    surrogate-ic --mode cluster --data builtin:faithful_subset --out results/

Exit codes: 0 success (unconverged runs included, see ``summary.json``),
2 configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from ._validation import check_seed_spec, check_smoother
from .continuation import ContinuationError
from .datasets import TOY_SEED, faithful_subset_path, make_regression_toy
from .estimators import SurrogateFusionClustering, SurrogateICRegression
from .io import DataError, read_numeric_csv, write_csv, write_json, write_path_csv
from .models import GaussMeansData, LinRegData
from .objective import Mode, PenaltySpec, SurrogateObjective, exact_count, exact_ic, resolve_ic_weight
from .oracle import OracleTooLarge, exhaustive_partition_ic, exhaustive_subset_ic

__all__ = ["main", "RunConfig", "ConfigError", "load_config", "run"]

MODES = ("select", "cluster", "oracle-subset", "oracle-partition", "surface")
EXIT_OK, EXIT_CONFIG, EXIT_DATA = 0, 2, 3


class ConfigError(ValueError):
    """The run configuration is malformed."""


@dataclass
class RunConfig:
    mode: str = "select"
    data: str = ""
    response: str | None = None
    predictors: list | None = None
    columns: list | None = None
    fit_intercept: bool = True
    objective: str = "aic"
    smoother: str = "sech"
    k0: float | None = None
    ratio: float = 1.25
    kmax: float | None = None
    tol: float | None = None
    max_iter: int = 200
    order: int = 3
    seeds: list = field(default_factory=lambda: ["ols"])
    snap_tol: float | None = None
    penalized: list | None = None
    sigma2: float | None = None
    sigma: object = None
    toy_n: int = 30
    toy_z: float = 1.0
    toy_seed: int = TOY_SEED
    coordinate: str | None = None
    ks: list = field(default_factory=lambda: [1.0, 5.0, 20.0, 60.0])
    grid: list | None = None


_KEYS = {f: RunConfig.__dataclass_fields__[f] for f in RunConfig.__dataclass_fields__}


def _line_of(text: str, key: str) -> int:
    needle = f'"{key}"'
    for i, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return i
    return 1


def load_config(path) -> tuple[dict, str, str]:
    """Parse a JSON config file into a dict of known keys.

    Returns the dict, the source label used in messages and the raw text.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}:1: config must be a JSON object")
    for key in raw:
        if key not in _KEYS:
            raise ConfigError(f"{path}:{_line_of(text, key)}: unknown key {key!r}")
    if isinstance(raw.get("data"), str) and raw["data"] and not raw["data"].startswith("builtin:"):
        data = Path(raw["data"])
        if not data.is_absolute():
            raw["data"] = str(path.parent / data)
    return raw, str(path), text


def _csv_list(s):
    return [v.strip() for v in s.split(",") if v.strip()]


def _float_list(s):
    try:
        return [float(v) for v in _csv_list(s)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}") from None


def _bool_list(s):
    table = {"1": True, "true": True, "0": False, "false": False}
    try:
        return [table[v.lower()] for v in _csv_list(s)]
    except KeyError:
        raise argparse.ArgumentTypeError(f"expected comma-separated true/false flags, got {s!r}") from None


def _sigma(s):
    vals = _float_list(s)
    return vals[0] if len(vals) == 1 else vals


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="surrogate-ic",
        description="Minimize AIC/BIC-type criteria through annealed smooth surrogates.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--out", default=".", help="output directory (default: current directory)")
    g = p.add_argument_group("config overrides")
    g.add_argument("--mode", choices=MODES)
    g.add_argument("--data", help="CSV file, or builtin:faithful_subset / builtin:regression_toy")
    g.add_argument("--response", help="response column (select, oracle-subset, surface)")
    g.add_argument("--predictors", type=_csv_list, help="comma-separated predictor columns")
    g.add_argument("--columns", type=_csv_list, help="comma-separated columns to cluster")
    g.add_argument("--no-intercept", dest="fit_intercept", action="store_const", const=False, default=None)
    g.add_argument("--objective", help="aic, bic or gic:<c>")
    g.add_argument("--smoother", help="sech, gaussian or rational")
    g.add_argument("--k0", type=float)
    g.add_argument("--ratio", type=float)
    g.add_argument("--kmax", type=float)
    g.add_argument("--tol", type=float, help="inner gradient tolerance")
    g.add_argument("--max-iter", dest="max_iter", type=int, help="coordinate sweeps per k")
    g.add_argument("--order", type=int, help="inversion series order")
    g.add_argument("--seeds", type=_csv_list, help="comma-separated seeds: ols, zero")
    g.add_argument("--snap-tol", dest="snap_tol", type=float)
    g.add_argument("--penalized", type=_bool_list, help="comma-separated flags, one per predictor")
    g.add_argument("--sigma2", type=float, help="known noise variance (select)")
    g.add_argument("--sigma", type=_sigma, help="known sd, one value or one per column (cluster)")
    g.add_argument("--toy-n", dest="toy_n", type=int)
    g.add_argument("--toy-z", dest="toy_z", type=float)
    g.add_argument("--toy-seed", dest="toy_seed", type=int)
    g.add_argument("--coordinate", help="predictor varied by surface mode")
    g.add_argument("--ks", type=_float_list, help="comma-separated k values for surface mode")
    g.add_argument("--grid", type=_float_list, help="lo,hi,num for surface mode")
    return p


def _type_error(key, expected):
    return f"{key!r} must be {expected}"


def resolve_config(args: argparse.Namespace) -> tuple[RunConfig, str]:
    """Merge config file values and flag overrides, then validate."""
    raw, source, text = ({}, "<flags>", "") if args.config is None else load_config(args.config)
    for key in _KEYS:
        val = getattr(args, key, None)
        if val is not None:
            raw[key] = val

    def fail(key, msg):
        if key in raw and text and key not in {k for k in _KEYS if getattr(args, k, None) is not None}:
            raise ConfigError(f"{source}:{_line_of(text, key)}: {msg}")
        raise ConfigError(f"{source}: {msg}")

    cfg = RunConfig(**raw)
    if cfg.mode not in MODES:
        fail("mode", f"unknown mode {cfg.mode!r}; choose one of {', '.join(MODES)}")
    if not isinstance(cfg.data, str) or not cfg.data:
        fail("data", "'data' must name a CSV file or builtin data set")
    for key in ("k0", "kmax", "tol", "snap_tol", "sigma2"):
        v = getattr(cfg, key)
        if v is not None and (isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0 or not math.isfinite(v)):
            fail(key, _type_error(key, "a positive number"))
    if isinstance(cfg.ratio, bool) or not isinstance(cfg.ratio, (int, float)) or not cfg.ratio > 1:
        fail("ratio", _type_error("ratio", "a number greater than 1"))
    for key in ("max_iter", "order", "toy_n"):
        v = getattr(cfg, key)
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            fail(key, _type_error(key, "a positive integer"))
    if not isinstance(cfg.fit_intercept, bool):
        fail("fit_intercept", _type_error("fit_intercept", "true or false"))
    try:
        resolve_ic_weight(cfg.objective, 2)
    except ValueError as exc:
        fail("objective", str(exc))
    try:
        check_smoother(cfg.smoother)
    except ValueError as exc:
        fail("smoother", str(exc))
    if isinstance(cfg.seeds, str):
        cfg.seeds = [cfg.seeds]
    try:
        check_seed_spec(cfg.seeds)
    except (ValueError, TypeError) as exc:
        fail("seeds", str(exc))
    if cfg.penalized is not None and not (
        isinstance(cfg.penalized, list) and all(isinstance(v, bool) for v in cfg.penalized)
    ):
        fail("penalized", _type_error("penalized", "a list of true/false flags"))
    if cfg.sigma is not None:
        vals = cfg.sigma if isinstance(cfg.sigma, list) else [cfg.sigma]
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) and v > 0 for v in vals):
            fail("sigma", _type_error("sigma", "a positive number or list of them"))
    if not (isinstance(cfg.ks, list) and cfg.ks and all(isinstance(v, (int, float)) and v > 0 for v in cfg.ks)):
        fail("ks", _type_error("ks", "a non-empty list of positive numbers"))
    if cfg.grid is not None:
        ok = isinstance(cfg.grid, list) and len(cfg.grid) == 3 and all(isinstance(v, (int, float)) for v in cfg.grid)
        if not ok or cfg.grid[0] >= cfg.grid[1] or int(cfg.grid[2]) != cfg.grid[2] or cfg.grid[2] < 2:
            fail("grid", _type_error("grid", "[lo, hi, num] with lo < hi and integer num >= 2"))
    return cfg, source


# ---------------------------------------------------------------- data


def _load_table(cfg: RunConfig) -> tuple[np.ndarray, list[str], dict]:
    """Return the numeric table, its header and provenance for the summary."""
    if cfg.data == "builtin:faithful_subset":
        X, header = read_numeric_csv(faithful_subset_path())
        return X, header, {"data": cfg.data}
    if cfg.data == "builtin:regression_toy":
        x, y = make_regression_toy(cfg.toy_n, cfg.toy_z, cfg.toy_seed)
        prov = {"data": cfg.data, "toy_n": cfg.toy_n, "toy_z": cfg.toy_z, "toy_seed": cfg.toy_seed}
        return np.column_stack([x, y]), ["x", "y"], prov
    if cfg.data.startswith("builtin:"):
        raise ConfigError(f"unknown builtin data set {cfg.data!r}")
    X, header = read_numeric_csv(cfg.data)
    return X, header, {"data": cfg.data}


def _pick(header, names, what):
    missing = [c for c in names if c not in header]
    if missing:
        raise DataError(f"{what} column(s) {missing} not found; available: {header}")
    return [header.index(c) for c in names]


def _regression_xy(cfg, X, header):
    response = cfg.response or header[-1]
    (iy,) = _pick(header, [response], "response")
    preds = cfg.predictors if cfg.predictors is not None else [h for h in header if h != response]
    if not preds:
        raise DataError("no predictor columns")
    ix = _pick(header, preds, "predictor")
    if cfg.penalized is not None and len(cfg.penalized) != len(preds):
        raise ConfigError(f"'penalized' has {len(cfg.penalized)} flags for {len(preds)} predictors")
    return X[:, ix], X[:, iy], list(preds), response


def _cluster_x(cfg, X, header):
    cols = cfg.columns if cfg.columns is not None else list(header)
    return X[:, _pick(header, cols, "cluster")], list(cols)


def _schedule_kwargs(cfg):
    return dict(
        k0=cfg.k0,
        k_max=cfg.kmax,
        ratio=cfg.ratio,
        inner_tol=cfg.tol,
        inner_max_iter=cfg.max_iter,
        series_order=cfg.order,
    )


def _path_summary(path):
    term = path.terminal
    return {
        "converged": path.converged,
        "n_steps": len(path.records),
        "n_jumps": sum(r.jump for r in path.records),
        "terminal_k": term.k,
        "terminal_objective": term.objective,
        "terminal_grad_norm": term.grad_norm,
        "polished_ic": path.polished_ic,
        "polished_theta": path.polished_theta,
    }


# ---------------------------------------------------------------- modes


def _run_select(cfg, X, header, out):
    x, y, preds, response = _regression_xy(cfg, X, header)
    est = SurrogateICRegression(
        criterion=cfg.objective,
        smoother=cfg.smoother,
        fit_intercept=cfg.fit_intercept,
        seeds=tuple(cfg.seeds) if all(isinstance(s, str) for s in cfg.seeds) else cfg.seeds,
        snap_tol=cfg.snap_tol,
        sigma2=cfg.sigma2,
        penalized=cfg.penalized,
        **_schedule_kwargs(cfg),
    ).fit(x, y)
    names = (["intercept"] if cfg.fit_intercept else []) + preds
    runs = {f"seed{i}": p for i, p in enumerate(est.paths_)}
    write_path_csv(out / "path.csv", runs)
    summary = {
        "mode": "select",
        "response": response,
        "parameters": names,
        "ic_weight": est.ic_weight_,
        "sigma2": est.sigma2_,
        "scale": est.scale_,
        "snap_tol": est.snap_tol_,
        "schedule": asdict(est.schedule_),
        "best_run": f"seed{est.best_seed_}",
        "converged": bool(est.converged_),
        "ic": est.ic_,
        "support": [bool(v) for v in est.paths_[est.best_seed_].pattern],
        "runs": [
            {"run": r, "seed": s if isinstance(s, str) else list(np.asarray(s, float)), "pattern": p.pattern.tolist(), **_path_summary(p)}
            for (r, p), s in zip(runs.items(), cfg.seeds)
        ],
    }
    return summary, ["path.csv"]


def _run_cluster(cfg, X, header, out):
    Xc, cols = _cluster_x(cfg, X, header)
    if cfg.sigma is not None and isinstance(cfg.sigma, list) and len(cfg.sigma) != len(cols):
        raise ConfigError(f"'sigma' has {len(cfg.sigma)} values for {len(cols)} columns")
    est = SurrogateFusionClustering(
        criterion=cfg.objective,
        smoother=cfg.smoother,
        sigma=cfg.sigma,
        snap_tol=cfg.snap_tol,
        **_schedule_kwargs(cfg),
    ).fit(Xc)
    write_path_csv(out / "path.csv", dict(zip(cols, est.paths_)))
    header_out = ["row", *[f"group_{c}" for c in cols], "cluster", "split"]
    rows = [
        [i, *est.coordinate_labels_[i], est.labels_[i], bool(est.split_flags_[i])]
        for i in range(Xc.shape[0])
    ]
    write_csv(out / "cluster.csv", header_out, rows)
    sizes = np.bincount(est.labels_)
    summary = {
        "mode": "cluster",
        "columns": cols,
        "ic_weight": est.ic_weight_,
        "converged": bool(est.converged_.all()),
        "n_clusters": int(sizes.size),
        "cluster_sizes": sizes,
        "n_split": int(est.split_flags_.sum()),
        "coordinates": [
            {"column": c, "n_groups": int(p.pattern.max()) + 1, "pattern": p.pattern.tolist(), **_path_summary(p)}
            for c, p in zip(cols, est.paths_)
        ],
    }
    return summary, ["path.csv", "cluster.csv"]


def _run_oracle_subset(cfg, X, header, out):
    x, y, preds, response = _regression_xy(cfg, X, header)
    design = np.column_stack([np.ones(len(y)), x]) if cfg.fit_intercept else x
    data = LinRegData(design, y, cfg.sigma2, cfg.fit_intercept)
    mask = data.default_penalized()
    if cfg.penalized is not None:
        mask[int(cfg.fit_intercept):] = cfg.penalized
    c = resolve_ic_weight(cfg.objective, data.n)
    res = exhaustive_subset_ic(data, c, mask)
    names = (["intercept"] if cfg.fit_intercept else []) + preds
    rows = [[*(bool(v) for v in s), p, ic] for s, p, ic in res.table]
    write_csv(out / "oracle.csv", [*names, "p", "ic"], rows)
    summary = {
        "mode": "oracle-subset",
        "parameters": names,
        "ic_weight": c,
        "sigma2": data.sigma2,
        "n_rows": len(rows),
        "best_support": [bool(v) for v in res.best_support],
        "best_ic": res.best_ic,
        "best_theta": res.best_theta,
    }
    return summary, ["oracle.csv"]


def _run_oracle_partition(cfg, X, header, out):
    Xc, cols = _cluster_x(cfg, X, header)
    sig = cfg.sigma if isinstance(cfg.sigma, list) else [cfg.sigma] * len(cols)
    if len(sig) != len(cols):
        raise ConfigError(f"'sigma' has {len(sig)} values for {len(cols)} columns")
    rows, best = [], []
    for col, name, s in zip(Xc.T, cols, sig):
        data = GaussMeansData(col, s)
        c = resolve_ic_weight(cfg.objective, data.n)
        res = exhaustive_partition_ic(data, c)
        rows += [[name, "-".join(map(str, lab)), g, ic] for lab, g, ic in res.table]
        best.append({"column": name, "ic_weight": c, "best_labels": res.best_labels, "best_ic": res.best_ic})
    write_csv(out / "oracle.csv", ["column", "labels", "groups", "ic"], rows)
    return {"mode": "oracle-partition", "n_rows": len(rows), "columns": best}, ["oracle.csv"]


def _run_surface(cfg, X, header, out):
    x, y, preds, response = _regression_xy(cfg, X, header)
    design = np.column_stack([np.ones(len(y)), x]) if cfg.fit_intercept else x
    data = LinRegData(design, y, cfg.sigma2, cfg.fit_intercept)
    mask = data.default_penalized()
    if cfg.penalized is not None:
        mask[int(cfg.fit_intercept):] = cfg.penalized
    coord = cfg.coordinate or preds[0]
    if coord not in preds:
        raise ConfigError(f"'coordinate' {coord!r} is not a predictor; choose one of {preds}")
    j = preds.index(coord) + int(cfg.fit_intercept)
    base = data.refit(np.ones(data.q, dtype=bool))
    if cfg.grid is None:
        half = 2 * abs(base[j]) or 1.0
        lo, hi, num = -half, half, 401
    else:
        lo, hi, num = float(cfg.grid[0]), float(cfg.grid[1]), int(cfg.grid[2])
    grid = np.linspace(lo, hi, num)
    c = resolve_ic_weight(cfg.objective, data.n)
    penalty = PenaltySpec(Mode.ZERO, cfg.smoother, c)
    rows = []
    for k in cfg.ks:
        obj = SurrogateObjective(data, penalty, float(k), mask)
        for t in grid:
            theta = base.copy()
            theta[j] = t
            rows.append([float(k), t, obj.value(theta)])
    for t in grid:
        theta = base.copy()
        theta[j] = t
        rows.append([math.inf, t, exact_ic(data, theta, c, exact_count(theta, Mode.ZERO, mask))])
    write_csv(out / "surface.csv", ["k", coord, "surrogate_ic"], rows)
    summary = {
        "mode": "surface",
        "coordinate": coord,
        "base_theta": base,
        "ks": [float(k) for k in cfg.ks],
        "grid": [lo, hi, num],
        "ic_weight": c,
        "sigma2": data.sigma2,
    }
    return summary, ["surface.csv"]


_RUNNERS = {
    "select": _run_select,
    "cluster": _run_cluster,
    "oracle-subset": _run_oracle_subset,
    "oracle-partition": _run_oracle_partition,
    "surface": _run_surface,
}


def run(cfg: RunConfig, out) -> dict:
    """Execute one configured run, writing its files into ``out``."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    X, header, prov = _load_table(cfg)
    try:
        summary, files = _RUNNERS[cfg.mode](cfg, X, header, out)
    except OracleTooLarge as exc:
        raise ConfigError(str(exc)) from None
    except ContinuationError as exc:
        raise DataError(f"continuation failed: {exc}") from None
    except (ValueError, np.linalg.LinAlgError) as exc:
        if isinstance(exc, (ConfigError, DataError)):
            raise
        raise DataError(str(exc)) from None
    summary.update(prov)
    summary["objective"] = cfg.objective
    summary["smoother"] = cfg.smoother
    summary["files"] = files
    summary["version"] = __version__
    write_json(out / "summary.json", summary)
    return summary


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg, _ = resolve_config(args)
        summary = run(cfg, args.out)
    except ConfigError as exc:
        print(f"surrogate-ic: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"surrogate-ic: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    conv = summary.get("converged", True)
    print(f"{cfg.mode}: wrote {', '.join(summary['files'])} and summary.json to {args.out}"
          + ("" if conv else " (not converged)"))
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
