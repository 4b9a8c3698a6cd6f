"""End-to-end acceptance gates, one test per criterion.

Each test prints a single summary line with the measured numbers before
asserting, so the verdicts and margins are visible in captured output.
Budgets are wall-clock seconds on a single core; tolerances are pinned in
the assertions, not computed.
"""

import io
import json
import math
import time

import numpy as np

import conftest

from bmhull import (
    GridSpec,
    RngStream,
    SlitHullMap,
    boundary_band,
    hull_map_scaling_check,
    imaginary_identity_check,
    minkowski_estimate,
    occupation_grid,
    outer_decompose,
    sample_bm,
    sample_bridge,
)
from bmhull import TestFunctionSpec as BandFn
from bmhull.experiments import (
    TARGET_AREA,
    TARGET_GAP,
    parse_config,
    run_experiment,
    run_height_gap,
    write_csv,
)
from bmhull.hulls import trace_grid
from bmhull.occupation import assumption_integral


def _cfg(**kw):
    return parse_config(json.dumps(kw))


def _report(num, ok, detail):
    line = f"criterion {num}: {'PASS' if ok else 'FAIL'} {detail}"
    print(line)
    conftest.CRITERION_LINES.append(line)
    return ok


def test_criterion_1_bridge_hull_area_default_profile():
    t0 = time.perf_counter()
    est, _, _, _ = run_experiment(_cfg(experiment="hull_area"))
    runtime = time.perf_counter() - t0
    lo, hi = 0.609, 0.648
    ok = lo <= est.mean <= hi and runtime < 600.0
    _report(
        1, ok,
        f"mean={est.mean:.4f} stderr={est.stderr:.4f} window=[{lo}, {hi}] "
        f"target={TARGET_AREA:.4f} runtime={runtime:.0f}s",
    )
    assert runtime < 600.0
    assert lo <= est.mean <= hi


def test_criterion_2_height_gap_band_density():
    t0 = time.perf_counter()
    result, _, gates, _ = run_experiment(_cfg(
        experiment="height_gap", samples=1000, dt=9.5e-7, grid_h=1.0 / 1024,
        eps_list=[0.04, 0.02, 0.01],
    ))
    runtime = time.perf_counter() - t0

    # synthetic injection: a constant density must come back exactly
    injected = run_height_gap(_cfg(
        experiment="height_gap", samples=8, dt=9e-4, grid_h=1.0 / 32,
        eps_list=[0.25, 0.2, 0.15], inject_constant=TARGET_GAP,
    ))
    inject_dev = max(
        abs(est.mean - TARGET_GAP) for _, est in injected.per_eps
    )

    devs = {eps: est.mean / TARGET_GAP - 1.0 for eps, est in result.per_eps}
    detail = " ".join(f"eps={e}: {d:+.2%}" for e, d in devs.items())
    ok = (
        all(gates.values())
        and inject_dev <= 1e-9
        and runtime < 1800.0
    )
    _report(
        2, ok,
        f"{detail} extrapolated={result.extrapolated:.4f} "
        f"gates={gates} inject_dev={inject_dev:.1e} runtime={runtime:.0f}s",
    )
    assert runtime < 1800.0
    assert inject_dev <= 1e-9
    # The signed deviation crosses zero between the two smallest widths at
    # this profile (+2.5% -> +0.7% -> -0.8% at seed 20260814), so the
    # absolute deviation can tick up at the crossing and the straight-line
    # extrapolation in 1/|log eps| overshoots past the limit even though
    # the smallest-width estimate sits within 1% of the target.
    assert gates["deviation_shrinks_with_eps"]
    assert gates["smallest_eps_within_10pct"]
    assert gates["extrapolated_within_5pct"]


def test_criterion_3_loop_measure_ratio():
    t0 = time.perf_counter()
    result, _, gates, _ = run_experiment(_cfg(
        experiment="lambda0_ratio", samples=20_000, loop_eps=1e-3, t_max=1.0,
    ))
    runtime = time.perf_counter() - t0
    r, ne, de = result.ratio, result.numerator_over_log, result.denominator_over_log
    ok = all(gates.values()) and runtime < 1200.0
    _report(
        3, ok,
        f"ratio={r.mean:.4f}({r.mean / TARGET_GAP - 1:+.2%}) "
        f"num={ne.mean:.4f}({ne.mean * math.pi - 1:+.2%}) "
        f"den={de.mean:.4f}({de.mean * 5 - 1:+.2%}) runtime={runtime:.0f}s",
    )
    assert runtime < 1200.0
    assert gates["ratio_within_5pct"]
    assert gates["numerator_within_5pct"]
    assert gates["denominator_within_5pct"]


def test_criterion_4_kernel_identity_suite():
    t0 = time.perf_counter()
    records, _, gates, _ = run_experiment(_cfg(experiment="kernel_suite", samples=200))
    runtime = time.perf_counter() - t0
    failed = [r["check"] for r in records if not r["pass"]]
    ok = not failed and runtime < 60.0
    _report(4, ok, f"checks={len(records)} failed={failed} runtime={runtime:.0f}s")
    assert runtime < 60.0
    assert failed == []


def test_criterion_5_slit_identity_monte_carlo():
    t0 = time.perf_counter()
    cases = (
        (SlitHullMap.vertical_slit(0.0, 1.0), 2j),
        (SlitHullMap.tilted_segment(0.5), -1 + 2j),
    )
    worst = 0.0
    for k, (hull, z) in enumerate(cases):
        res, se = imaginary_identity_check(
            hull, z, 100_000, 0.05, RngStream(20260814, k)
        )
        worst = max(worst, abs(res) / (3.0 * se))
    runtime = time.perf_counter() - t0
    ok = worst <= 1.0 and runtime < 120.0
    _report(5, ok, f"max |residual| / (3 se) = {worst:.2f} runtime={runtime:.0f}s")
    assert runtime < 120.0
    assert worst <= 1.0


def test_criterion_6_slit_map_scaling_table():
    t0 = time.perf_counter()
    rows = hull_map_scaling_check((0.1, 0.05, 0.025, 0.0125))
    runtime = time.perf_counter() - t0
    ratios = [row["ratio"] for row in rows]
    bound = 2.0 * ratios[0]
    ok = max(ratios) <= bound and runtime < 60.0
    _report(
        6, ok,
        "ratios=" + "/".join(f"{x:.3f}" for x in ratios)
        + f" bound={bound:.3f} runtime={runtime:.1f}s",
    )
    assert runtime < 60.0
    assert max(ratios) <= bound


def test_criterion_7_reflection_principle_grid():
    t0 = time.perf_counter()
    (rows, max_z), _, gates, _ = run_experiment(
        _cfg(experiment="reflection_check", samples=100_000)
    )
    runtime = time.perf_counter() - t0
    ok = max_z < 3.5 and runtime < 120.0
    _report(7, ok, f"max|z|={max_z:.2f} over {len(rows)} cells runtime={runtime:.0f}s")
    assert runtime < 120.0
    assert max_z < 3.5


def test_criterion_8_green_function_hitting():
    t0 = time.perf_counter()
    result, _, gates, _ = run_experiment(
        _cfg(experiment="green_hitting", samples=200_000, dt=0.01)
    )
    runtime = time.perf_counter() - t0
    detail = " ".join(
        f"G({r['x']:.1f},{r['y']:.1f}): {r['rel_dev']:+.2%}" for r in result
    )
    ok = gates["hitting_within_10pct"] and runtime < 300.0
    _report(8, ok, f"{detail} runtime={runtime:.0f}s")
    assert runtime < 300.0
    assert gates["hitting_within_10pct"]


def test_criterion_9_property_suite():
    t0 = time.perf_counter()
    notes = []

    # occupation conservation at 1e-12 relative
    path = sample_bridge(1.0, 0j, 1e-4, RngStream(909, 0))
    grid = GridSpec.for_path(path, 1.0 / 256)
    field = occupation_grid(path, grid)
    cons_dev = abs(field.total - 1.0)
    notes.append(f"conservation_dev={cons_dev:.1e}")

    # enlargement gauge against time binning on one fine sample
    fine = sample_bm(1.0, 2.5e-7, 0j, RngStream(20260814, 7))
    fgrid = GridSpec.for_path(fine, 2.5e-4)
    visited, ftimes = trace_grid(fine, fgrid)
    region = np.ones(visited.shape, dtype=bool)
    (_, value), = minkowski_estimate(visited, region, fgrid, [1e-3])
    mink_dev = abs(value - float(ftimes.sum()))
    notes.append(f"minkowski_dev={mink_dev:.3f}")

    # band monotonicity in eps: nested masks, growing area
    visited_b, _ = trace_grid(path, grid)
    hull = outer_decompose(visited_b, grid)
    bands = [boundary_band(hull, e) for e in (0.04, 0.06, 0.08)]
    nested = all(
        not (a & ~b).any() and ar <= br
        for (a, ar), (b, br) in zip(bands, bands[1:])
    )
    notes.append(f"bands_nested={nested}")

    # worker count must not change output bytes
    kw = dict(experiment="hull_area", samples=16, dt=1e-3, grid_h=1.0 / 64, seed=8)
    outs = []
    for w in (1, 2):
        _, rows, _, _ = run_experiment(_cfg(**kw, workers=w))
        buf = io.StringIO()
        write_csv(rows, buf)
        outs.append(buf.getvalue())
    notes.append(f"bytes_equal={outs[0] == outs[1]}")

    # kernel double integral stays bounded over the default band family
    bridge = sample_bridge(1.0, 0j, 2e-5, RngStream(909, 4))
    bgrid = GridSpec.for_path(bridge, 1.0 / 512)
    bhull = outer_decompose(trace_grid(bridge, bgrid)[0], bgrid)
    fulls = []
    for eps in (0.04, 0.02, 0.01):
        full, near = assumption_integral(
            BandFn("uniform_band", eps), bhull, delta=0.01, rng=RngStream(909, 5)
        )
        assert 0.0 <= near <= full
        fulls.append(full)
    bounded = max(fulls) <= 2.0 * min(fulls)
    notes.append(
        "assumption_fulls=" + "/".join(f"{x:.3f}" for x in fulls)
    )

    runtime = time.perf_counter() - t0
    ok = (
        cons_dev <= 1e-12 and mink_dev <= 0.15 and nested
        and outs[0] == outs[1] and bounded
    )
    _report(9, ok, " ".join(notes) + f" runtime={runtime:.0f}s")
    assert cons_dev <= 1e-12
    assert mink_dev <= 0.15
    assert nested
    assert outs[0] == outs[1]
    assert bounded
