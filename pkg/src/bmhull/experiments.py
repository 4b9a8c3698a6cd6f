"""Monte Carlo experiment drivers.

Each runner maps sample indices to per-sample values through a deterministic
RngStream derived from (seed, sample index), then folds the results in index
order, so output bytes do not depend on the worker count.  Statistics use
batch means throughout: per-sample areas are heavy tailed and naive i.i.d.
standard errors would be optimistic.
"""

from __future__ import annotations

import functools
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field, replace
from multiprocessing import get_context

import numpy as np

from . import kernels
from .errors import ConfigError, DegenerateSampleError
from .hulls import GridSpec, diameter, outer_decompose, trace_grid
from .occupation import green_hitting_estimate
from .paths import (
    DtRule,
    UNIT_SQUARE,
    loop_time_cutoffs,
    loop_truncation_report,
    rotate_path,
    sample_bridge,
    sample_loop_measure,
)
from .rng import RngStream

__all__ = [
    "EXPERIMENTS",
    "ExperimentConfig",
    "Estimate",
    "parse_config",
    "run_hull_area",
    "run_height_gap",
    "run_lambda0_ratio",
    "run_loop_functionals",
    "run_reflection_check",
    "run_green_hitting",
    "run_kernel_suite",
    "run_experiment",
    "write_csv",
    "write_summary",
]

TARGET_AREA = math.pi / 5.0
TARGET_GAP = 5.0 / math.pi

EXPERIMENTS = (
    "hull_area",
    "height_gap",
    "lambda0_ratio",
    "loop_functionals",
    "reflection_check",
    "green_hitting",
    "kernel_suite",
)

# stream ids per sample: 0 path, 1 rotation, 2-3 reserved
_STRIDE = 4

# grid cells across a loop's diameter when rasterizing its interior
_LOOP_CELLS = 192

_REFLECTION_GRID = tuple(
    (a, t) for a in (0.25, 0.5, 1.0) for t in (0.5, 1.0, 2.0)
)
_REFLECTION_STEPS = 64

_GREEN_PAIRS = ((0.0 + 0.0j, 0.5 + 0.0j), (0.3 + 0.0j, -0.3 + 0.0j))
_GREEN_RADIUS = 1e-3
_GREEN_CHUNKS = 16


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    samples: int = 500
    dt: float = 2e-5
    grid_h: float = 1.0 / 512
    eps_list: tuple = (0.04, 0.02, 0.01)
    seed: int = 20260814
    workers: int = 1
    output_path: str = "results"
    rotate: bool = True
    loop_eps: float = 1e-3
    t_max: float = 1.0
    inject_constant: float | None = None
    inject_fault: float = 0.0


@dataclass(frozen=True)
class Estimate:
    """Point estimate with a batch-means standard error."""

    mean: float
    stderr: float
    n: int
    batches: int

    @classmethod
    def from_values(cls, values, batches=None):
        arr = np.asarray(values, dtype=np.float64)
        n = arr.size
        if n == 0:
            raise DegenerateSampleError("no samples to estimate from")
        b = batches if batches is not None else (8 if n < 256 else 16)
        b = max(1, min(b, n))
        means = np.array([c.mean() for c in np.array_split(arr, b)])
        stderr = float(means.std(ddof=1) / math.sqrt(b)) if b > 1 else 0.0
        return cls(float(arr.mean()), stderr, n, b)


def _ratio_estimate(num, den, batches=None):
    """Delta-method stderr for sum(num)/sum(den) over batch means."""
    num = np.asarray(num, dtype=np.float64)
    den = np.asarray(den, dtype=np.float64)
    n = num.size
    b = batches if batches is not None else (8 if n < 256 else 16)
    b = max(2, min(b, n))
    nb = np.array([c.mean() for c in np.array_split(num, b)])
    db = np.array([c.mean() for c in np.array_split(den, b)])
    dbar = db.mean()
    if dbar == 0.0:
        raise DegenerateSampleError("denominator mass is zero in every batch")
    r = nb.mean() / dbar
    infl = (nb - r * db) / dbar
    stderr = float(infl.std(ddof=1) / math.sqrt(b))
    return Estimate(float(r), stderr, n, b)


# ---------------------------------------------------------------------------
# Config parsing

_DEFAULTS = ExperimentConfig(experiment="hull_area")

_FIELD_TYPES = {
    "experiment": str,
    "samples": int,
    "dt": float,
    "grid_h": float,
    "eps_list": tuple,
    "seed": int,
    "workers": int,
    "output_path": str,
    "rotate": bool,
    "loop_eps": float,
    "t_max": float,
    "inject_constant": float,
    "inject_fault": float,
}


def default_workers():
    """Worker count from the SIMULATE_WORKERS environment variable, else 1."""
    raw = os.environ.get("SIMULATE_WORKERS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def parse_config(text, overrides=None):
    """Parse a JSON config document into a validated ExperimentConfig.

    ``overrides`` (e.g. from CLI flags) take precedence over the document.
    Every violated invariant is collected and reported together in a
    ConfigError rather than stopping at the first.
    """
    violations = []
    doc = {}
    if text and text.strip():
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError([f"config is not valid JSON: {e}"]) from e
        if not isinstance(doc, dict):
            raise ConfigError(["config document must be a JSON object"])
    merged = dict(doc)
    for k, v in (overrides or {}).items():
        if v is not None:
            merged[k] = v
    if "workers" not in merged:
        merged["workers"] = default_workers()

    values = {}
    for key, raw in merged.items():
        if key not in _FIELD_TYPES:
            violations.append(f"unknown config key {key!r}")
            continue
        want = _FIELD_TYPES[key]
        try:
            if key == "eps_list":
                values[key] = tuple(float(v) for v in raw)
            elif key == "inject_constant":
                values[key] = None if raw is None else float(raw)
            elif want is bool:
                if not isinstance(raw, bool):
                    raise TypeError
                values[key] = raw
            elif want is int:
                if isinstance(raw, bool) or int(raw) != float(raw):
                    raise TypeError
                values[key] = int(raw)
            elif want is float:
                values[key] = float(raw)
            else:
                values[key] = str(raw)
        except (TypeError, ValueError):
            violations.append(f"malformed value for {key!r}: {raw!r}")

    if "experiment" not in values:
        violations.append("missing required key 'experiment'")
        cfg = None
    else:
        cfg = replace(_DEFAULTS, **values)
        if cfg.experiment not in EXPERIMENTS:
            violations.append(
                f"unknown experiment {cfg.experiment!r}; valid names: "
                + ", ".join(EXPERIMENTS)
            )
        if cfg.samples < 8:
            violations.append(
                f"samples must be >= 8 for batch-means errors, got {cfg.samples}"
            )
        if not cfg.dt > 0.0:
            violations.append(f"dt must be positive, got {cfg.dt}")
        if not cfg.grid_h > 0.0:
            violations.append(f"grid_h must be positive, got {cfg.grid_h}")
        if not cfg.eps_list:
            violations.append("eps_list must be nonempty")
        elif any(not e > 0.0 for e in cfg.eps_list):
            violations.append(f"eps_list entries must be positive: {cfg.eps_list}")
        elif any(
            a <= b for a, b in zip(cfg.eps_list, cfg.eps_list[1:])
        ):
            violations.append(f"eps_list must be sorted decreasing: {cfg.eps_list}")
        if cfg.workers < 1:
            violations.append(f"workers must be >= 1, got {cfg.workers}")
        if not cfg.loop_eps > 0.0:
            violations.append(f"loop_eps must be positive, got {cfg.loop_eps}")
        if not cfg.t_max > 0.0:
            violations.append(f"t_max must be positive, got {cfg.t_max}")
        if cfg.inject_fault < 0.0:
            violations.append(f"inject_fault must be >= 0, got {cfg.inject_fault}")

        # occupation-density experiments need the path resolved at cell scale
        if cfg.experiment == "height_gap" and cfg.dt > 0.0 and cfg.grid_h > 0.0:
            if cfg.dt > cfg.grid_h**2:
                violations.append(
                    f"dt={cfg.dt} exceeds grid_h^2={cfg.grid_h ** 2:.3g}; "
                    "occupation densities need dt <= grid_h^2"
                )
            for e in cfg.eps_list:
                if e < 4.0 * cfg.grid_h:
                    violations.append(
                        f"band eps={e} is thinner than 4*grid_h={4.0 * cfg.grid_h:.3g}"
                    )
        if cfg.experiment in ("lambda0_ratio", "loop_functionals"):
            t_min, _ = loop_time_cutoffs(cfg.loop_eps, cfg.t_max)
            if cfg.t_max <= t_min:
                violations.append(
                    f"t_max={cfg.t_max} is inside the proposal floor {t_min:.3g}"
                )

    if violations:
        raise ConfigError(violations)
    return cfg


# ---------------------------------------------------------------------------
# Worker pool


def _map_samples(fn, n, workers):
    """fn(i) for i in range(n), optionally on a process pool, in index order."""
    if workers <= 1:
        return [fn(i) for i in range(n)]
    ctx = get_context()
    out = []
    report = max(1, n // 10)
    with ctx.Pool(processes=workers) as pool:
        chunk = max(1, n // (workers * 8))
        for k, v in enumerate(pool.imap(fn, range(n), chunksize=chunk)):
            out.append(v)
            if (k + 1) % report == 0:
                print(f"  {k + 1}/{n} samples", file=sys.stderr, flush=True)
    return out


# ---------------------------------------------------------------------------
# Bridge hull experiments


def _bridge_hull(cfg, i):
    path = sample_bridge(1.0, 0j, cfg.dt, RngStream(cfg.seed, _STRIDE * i))
    if cfg.rotate:
        angle = RngStream(cfg.seed, _STRIDE * i + 1).generator().uniform(
            0.0, 2.0 * math.pi
        )
        path = rotate_path(path, angle)
    grid = GridSpec.for_path(path, cfg.grid_h)
    visited, fld = trace_grid(path, grid)
    return path, grid, visited, fld


def _hull_area_sample(i, cfg):
    _, grid, visited, _ = _bridge_hull(cfg, i)
    return outer_decompose(visited, grid).area


def run_hull_area(config):
    """Mean enclosed area of unit-duration bridge hulls; converges to pi/5."""
    _expect(config, "hull_area")
    vals = _map_samples(
        functools.partial(_hull_area_sample, cfg=config), config.samples, config.workers
    )
    return Estimate.from_values(vals)


def _height_gap_sample(i, cfg):
    from .hulls import boundary_band

    _, grid, visited, fld = _bridge_hull(cfg, i)
    hull = outer_decompose(visited, grid)
    if cfg.inject_constant is not None:
        fld = np.where(hull.interior, cfg.inject_constant * grid.cell_area, 0.0)
    out = []
    for eps in cfg.eps_list:
        band, area = boundary_band(hull, eps)
        out.append(float(fld[band].sum()) / area)
    return out


@dataclass(frozen=True)
class HeightGapResult:
    per_eps: tuple  # ((eps, Estimate), ...)
    extrapolated: float
    model: str = "affine in 1/|log eps| over the three largest eps"


def run_height_gap(config):
    """Band occupation density near the hull boundary, per eps, with a
    linear-in-1/|log eps| extrapolation; converges to 5/pi."""
    _expect(config, "height_gap")
    rows = _map_samples(
        functools.partial(_height_gap_sample, cfg=config),
        config.samples,
        config.workers,
    )
    table = np.asarray(rows, dtype=np.float64)  # samples x eps
    per_eps = tuple(
        (eps, Estimate.from_values(table[:, j]))
        for j, eps in enumerate(config.eps_list)
    )
    top = per_eps[:3]
    x = np.array([1.0 / abs(math.log(e)) for e, _ in top])
    y = np.array([est.mean for _, est in top])
    if len(top) >= 2:
        slope, intercept = np.polyfit(x, y, 1)
        extrapolated = float(intercept)
    else:
        extrapolated = float(y[0])
    return HeightGapResult(per_eps, extrapolated)


# ---------------------------------------------------------------------------
# Loop-measure experiments


def _loop_sample(i, cfg):
    rule = DtRule(cap=min(cfg.loop_eps**2, cfg.grid_h**2))
    s = sample_loop_measure(
        cfg.loop_eps, UNIT_SQUARE, cfg.t_max, rule, RngStream(cfg.seed, _STRIDE * i)
    )
    if s.weight == 0.0:
        return 0.0, 0.0
    t = s.proposal_params["duration"]
    # interior area on a grid scaled to the loop, so small loops stay resolved
    d = diameter(s.path)
    grid = GridSpec.for_path(s.path, max(d / _LOOP_CELLS, 1e-12))
    visited, _ = trace_grid(s.path, grid)
    area = outer_decompose(visited, grid).area
    return s.weight * t, s.weight * area


def _loop_terms(config):
    pairs = _map_samples(
        functools.partial(_loop_sample, cfg=config), config.samples, config.workers
    )
    num = np.array([p[0] for p in pairs])
    den = np.array([p[1] for p in pairs])
    if not (num != 0.0).any() and not (den != 0.0).any():
        raise DegenerateSampleError("every loop proposal fell outside the target set")
    return num, den


@dataclass(frozen=True)
class LoopResult:
    ratio: Estimate | None
    numerator_over_log: Estimate
    denominator_over_log: Estimate
    truncation: dict


def run_lambda0_ratio(config):
    """Ratio of loop-measure duration mass to enclosed-area mass over loops
    in the unit square with diameter above loop_eps; converges to 5/pi.

    The numerator and denominator divided by |log eps| approach 1/pi and
    1/5: both functionals grow logarithmically as the diameter cutoff
    shrinks, and the area ratio pi/5 cancels the gap scale.
    """
    _expect(config, "lambda0_ratio")
    num, den = _loop_terms(config)
    log_eps = abs(math.log(config.loop_eps))
    return LoopResult(
        ratio=_ratio_estimate(num, den),
        numerator_over_log=Estimate.from_values(num / log_eps),
        denominator_over_log=Estimate.from_values(den / log_eps),
        truncation=loop_truncation_report(config.loop_eps, config.t_max),
    )


def run_loop_functionals(config):
    """Raw importance-sampled loop functionals (duration and enclosed area
    mass) with the truncation audit, without forming the ratio."""
    _expect(config, "loop_functionals")
    num, den = _loop_terms(config)
    log_eps = abs(math.log(config.loop_eps))
    return LoopResult(
        ratio=None,
        numerator_over_log=Estimate.from_values(num / log_eps),
        denominator_over_log=Estimate.from_values(den / log_eps),
        truncation=loop_truncation_report(config.loop_eps, config.t_max),
    )


# ---------------------------------------------------------------------------
# Reflection principle


def _bridge_crossing_prob(a, t, n, rng):
    """Exact-in-law estimate of P(max of a duration-t bridge >= a).

    Walks the bridge on a coarse time grid and accounts for within-step
    crossings by the endpoint-conditioned barrier formula, so the step count
    does not bias the estimate.
    """
    m = _REFLECTION_STEPS
    gen = rng.generator()
    dt_step = t / m
    g = gen.standard_normal((n, m))
    w = np.cumsum(math.sqrt(dt_step) * g, axis=1)
    w -= (np.arange(1, m + 1) / m) * w[:, -1:]
    x = np.concatenate([np.zeros((n, 1)), w], axis=1)
    d1 = np.maximum(a - x[:, :-1], 0.0)
    d2 = np.maximum(a - x[:, 1:], 0.0)
    cross = np.exp(-2.0 * d1 * d2 / dt_step)
    # survival multiplies per-interval miss probabilities; a grid point at or
    # above the barrier gives cross = 1 and forces p_hit = 1
    with np.errstate(divide="ignore"):
        log_keep = np.log1p(-np.minimum(cross, 1.0))
    p_hit = 1.0 - np.exp(np.sum(log_keep, axis=1))
    return p_hit


def run_reflection_check(config):
    """Empirical bridge-maximum tail versus exp(-2 a^2 / t) on a 3x3 grid.

    Returns (rows, max_z); each row carries the Estimate, the analytic
    target, and the z-score.
    """
    _expect(config, "reflection_check")
    rows = []
    max_z = 0.0
    for k, (a, t) in enumerate(_REFLECTION_GRID):
        probs = _bridge_crossing_prob(
            a, t, config.samples, RngStream(config.seed, _STRIDE * k)
        )
        est = Estimate.from_values(probs)
        target = math.exp(-2.0 * a * a / t)
        z = (est.mean - target) / est.stderr if est.stderr > 0 else 0.0
        max_z = max(max_z, abs(z))
        rows.append({"a": a, "t": t, "estimate": est, "target": target, "z": z})
    return rows, max_z


# ---------------------------------------------------------------------------
# Green function via hitting probabilities


def run_green_hitting(config):
    """|log r| P(hit B(y,r) before exiting the disc) against pi G(x,y)."""
    _expect(config, "green_hitting")
    rows = []
    per_chunk = max(1, config.samples // _GREEN_CHUNKS)
    for k, (x, y) in enumerate(_GREEN_PAIRS):
        vals = [
            green_hitting_estimate(
                x, y, _GREEN_RADIUS, per_chunk, config.dt,
                RngStream(config.seed, _STRIDE * (k * _GREEN_CHUNKS + j) + 2),
            )
            for j in range(_GREEN_CHUNKS)
        ]
        est = Estimate.from_values(vals, batches=min(8, _GREEN_CHUNKS))
        analytic = math.pi * kernels.green(kernels.UNIT_DISC, x, y)
        rows.append(
            {
                "x": x,
                "y": y,
                "r": _GREEN_RADIUS,
                "estimate": est,
                "analytic": analytic,
                "rel_dev": est.mean / analytic - 1.0,
            }
        )
    return rows


# ---------------------------------------------------------------------------
# Kernel identity suite


def run_kernel_suite(config):
    """All analytic kernel identities as JSON-able records."""
    _expect(config, "kernel_suite")
    return kernels.kernel_checks(
        RngStream(config.seed),
        n=min(config.samples, 200),
        fault=config.inject_fault,
    )


# ---------------------------------------------------------------------------
# Dispatch, gating, output


def _expect(config, name):
    if config.experiment != name:
        raise ConfigError([f"config is for {config.experiment!r}, not {name!r}"])


def _rel(mean, target):
    return mean / target - 1.0


def _row(experiment, params, n, mean, stderr, target):
    rel = _rel(mean, target) if target else ""
    return {
        "experiment": experiment,
        "param_json": json.dumps(params, sort_keys=True, separators=(",", ":")),
        "n": n,
        "mean": mean,
        "stderr": stderr,
        "target": target,
        "rel_err": rel,
    }


def run_experiment(config):
    """Run the configured experiment.

    Returns (result, rows, gates, runtime) where rows are CSV-ready dicts
    and gates maps gate names to booleans; the process exit code is derived
    from the gates.
    """
    t0 = time.perf_counter()
    name = config.experiment
    rows = []
    gates = {}

    if name == "hull_area":
        est = run_hull_area(config)
        result = est
        rows.append(
            _row(name, {"dt": config.dt, "grid_h": config.grid_h}, est.n,
                 est.mean, est.stderr, TARGET_AREA)
        )
        gates["hull_area_within_3pct"] = abs(_rel(est.mean, TARGET_AREA)) <= 0.03

    elif name == "height_gap":
        result = run_height_gap(config)
        devs = []
        for eps, est in result.per_eps:
            rows.append(_row(name, {"eps": eps}, est.n, est.mean, est.stderr, TARGET_GAP))
            devs.append(abs(_rel(est.mean, TARGET_GAP)))
        rows.append(
            _row(name, {"extrapolated": True, "model": result.model},
                 config.samples, result.extrapolated, "", TARGET_GAP)
        )
        gates["deviation_shrinks_with_eps"] = all(
            a >= b for a, b in zip(devs, devs[1:])
        )
        gates["smallest_eps_within_10pct"] = devs[-1] <= 0.10
        gates["extrapolated_within_5pct"] = (
            abs(_rel(result.extrapolated, TARGET_GAP)) <= 0.05
        )

    elif name in ("lambda0_ratio", "loop_functionals"):
        runner = run_lambda0_ratio if name == "lambda0_ratio" else run_loop_functionals
        result = runner(config)
        ne, de = result.numerator_over_log, result.denominator_over_log
        rows.append(
            _row(name, {"functional": "duration_over_log", "eps": config.loop_eps},
                 ne.n, ne.mean, ne.stderr, 1.0 / math.pi)
        )
        rows.append(
            _row(name, {"functional": "area_over_log", "eps": config.loop_eps},
                 de.n, de.mean, de.stderr, 0.2)
        )
        if result.ratio is not None:
            r = result.ratio
            rows.append(
                _row(name, {"functional": "ratio", "eps": config.loop_eps},
                     r.n, r.mean, r.stderr, TARGET_GAP)
            )
            gates["ratio_within_5pct"] = abs(_rel(r.mean, TARGET_GAP)) <= 0.05
            gates["numerator_within_5pct"] = abs(_rel(ne.mean, 1.0 / math.pi)) <= 0.05
            gates["denominator_within_5pct"] = abs(_rel(de.mean, 0.2)) <= 0.05
        else:
            gates["weights_not_degenerate"] = True

    elif name == "reflection_check":
        rows_r, max_z = run_reflection_check(config)
        result = (rows_r, max_z)
        for r in rows_r:
            est = r["estimate"]
            rows.append(
                _row(name, {"a": r["a"], "t": r["t"], "z": r["z"]},
                     est.n, est.mean, est.stderr, r["target"])
            )
        gates["max_z_below_3p5"] = max_z < 3.5

    elif name == "green_hitting":
        result = run_green_hitting(config)
        ok = True
        for r in result:
            est = r["estimate"]
            rows.append(
                _row(name, {"x": [r["x"].real, r["x"].imag],
                            "y": [r["y"].real, r["y"].imag], "r": r["r"]},
                     est.n, est.mean, est.stderr, r["analytic"])
            )
            ok = ok and abs(r["rel_dev"]) <= 0.10
        gates["hitting_within_10pct"] = ok

    elif name == "kernel_suite":
        result = run_kernel_suite(config)
        for rec in result:
            rows.append(
                _row(name, {"check": rec["check"], "tolerance": rec["tolerance"]},
                     rec["n"], rec["max_residual"], "", "")
            )
        gates["all_kernel_checks_pass"] = all(rec["pass"] for rec in result)

    else:
        raise ConfigError([f"unknown experiment {name!r}"])

    runtime = time.perf_counter() - t0
    return result, rows, gates, runtime


_CSV_HEADER = "experiment,param_json,n,mean,stderr,target,rel_err"


def _csv_cell(v):
    if isinstance(v, float):
        return repr(v)
    s = str(v)
    if "," in s or '"' in s:
        s = '"' + s.replace('"', '""') + '"'
    return s


def write_csv(rows, stream):
    """CSV with stable float repr; byte-identical for identical rows."""
    stream.write(_CSV_HEADER + "\n")
    for row in rows:
        stream.write(
            ",".join(
                _csv_cell(row[k])
                for k in ("experiment", "param_json", "n", "mean", "stderr",
                          "target", "rel_err")
            )
            + "\n"
        )


def _jsonable(obj):
    if isinstance(obj, Estimate):
        return {"mean": obj.mean, "stderr": obj.stderr, "n": obj.n,
                "batches": obj.batches}
    if isinstance(obj, HeightGapResult):
        return {
            "per_eps": [[e, _jsonable(est)] for e, est in obj.per_eps],
            "extrapolated": obj.extrapolated,
            "model": obj.model,
        }
    if isinstance(obj, LoopResult):
        return {
            "ratio": _jsonable(obj.ratio) if obj.ratio else None,
            "numerator_over_log": _jsonable(obj.numerator_over_log),
            "denominator_over_log": _jsonable(obj.denominator_over_log),
            "truncation": obj.truncation,
        }
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def write_summary(config, result, gates, runtime, stream):
    doc = {
        "experiment": config.experiment,
        "config": {
            "samples": config.samples,
            "dt": config.dt,
            "grid_h": config.grid_h,
            "eps_list": list(config.eps_list),
            "seed": config.seed,
            "workers": config.workers,
            "rotate": config.rotate,
            "loop_eps": config.loop_eps,
            "t_max": config.t_max,
        },
        "result": _jsonable(result),
        "gates": gates,
        "all_pass": all(gates.values()),
        "runtime_seconds": round(runtime, 3),
    }
    json.dump(doc, stream, indent=2, sort_keys=True)
    stream.write("\n")
