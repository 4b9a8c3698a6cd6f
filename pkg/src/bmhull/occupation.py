"""Occupation measure on grids, boundary test functions, hitting estimates."""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DegenerateSampleError, ResolutionError
from .hulls import GridSpec, RasterHull, boundary_band, distance_counts, trace_grid
from .paths import Path
from .rng import RngStream


@dataclass(frozen=True)
class OccupationField:
    """Per-cell time spent by a path; totals the duration exactly."""

    grid: GridSpec
    cell_time: np.ndarray

    @property
    def total(self) -> float:
        return float(self.cell_time.sum())


def occupation_grid(path: Path, grid: GridSpec) -> OccupationField:
    """Bin a path's time by cell with exact crossing apportionment.

    Each segment's duration is split across the cells it traverses in
    proportion to intra-cell chord length (no endpoint snapping), so the
    field conserves total time to float rounding and vanishes off the trace.
    """
    _, field = trace_grid(path, grid)
    return OccupationField(grid, field)


def minkowski_estimate(visited, region, grid: GridSpec, radii):
    """Occupation-time estimates from enlargement areas.

    value(r) = (1/pi) |log r| |{x in region : dist(x, trace) <= r}|, the
    gauge under which the enlargement area of a Brownian trace measures its
    occupation time.  Returns [(r, value)] for each requested radius.
    """
    radii = sorted(float(r) for r in radii)
    if not radii or radii[0] < grid.h:
        raise ResolutionError(
            f"every radius must be >= cell pitch h={grid.h}, got {radii}"
        )
    if radii[-1] >= 1.0:
        raise ValueError("enlargement radii must be < 1 for a log gauge")
    counts = distance_counts(visited, region, grid.h, radii)
    return [
        (r, abs(math.log(r)) / math.pi * c * grid.cell_area)
        for r, c in zip(radii, counts)
    ]


@dataclass(frozen=True)
class TestFunctionSpec:
    """Boundary-band test function, normalized to unit integral.

    kind 'uniform_band' is the flat profile on {dist < eps}; kind
    'radial_profile' weights band cells by profile(dist/eps) with a
    user 1-d shape on [0, 1].
    """

    kind: str
    eps: float
    profile: Optional[Callable] = None

    def __post_init__(self):
        if self.kind not in ("uniform_band", "radial_profile"):
            raise ValueError(f"unknown test function kind {self.kind!r}")
        if self.kind == "radial_profile" and self.profile is None:
            raise ValueError("radial_profile needs a profile callable")
        if not self.eps > 0.0:
            raise ValueError(f"eps must be positive, got {self.eps}")


def discretize_test_function(spec: TestFunctionSpec, hull: RasterHull):
    """Evaluate the test function on the grid.

    Returns (values, normalization) where values sum to 1/h^2 over cells,
    i.e. the discrete integral sum(values) * h^2 equals 1 exactly, and
    normalization is the constant divided out.
    """
    band, _ = boundary_band(hull, spec.eps)
    h2 = hull.grid.cell_area
    w = np.zeros(hull.grid.shape, dtype=np.float64)
    if spec.kind == "uniform_band":
        w[band] = 1.0
    else:
        # the band reaches eps + h/2, so clamp the normalized radius to the
        # profile's domain [0, 1]
        u = np.minimum(hull.dist_to_boundary[band] / spec.eps, 1.0)
        vals = spec.profile(u)
        vals = np.asarray(vals, dtype=np.float64)
        if (vals < 0.0).any():
            raise ValueError("profile must be nonnegative on [0, 1]")
        w[band] = vals
    norm = float(w.sum()) * h2
    if norm <= 0.0:
        raise DegenerateSampleError("test function support carries no mass")
    return w / norm, norm


def integrate_test_function(
    field: OccupationField, hull: RasterHull, spec: TestFunctionSpec
) -> float:
    """Integrate the occupation measure against a band test function.

    For the uniform band this reduces exactly to
    (time spent in the band) / (band area).
    """
    f, _ = discretize_test_function(spec, hull)
    support = f > 0.0
    return float((f[support] * field.cell_time[support]).sum())


def assumption_integral(
    spec: TestFunctionSpec,
    hull: RasterHull,
    delta: float,
    rng: Optional[RngStream] = None,
    max_exact_cells: int = 10_000,
    subsample: int = 4096,
):
    """Double integral of max(1, -log|x-y|) against the test function.

    Returns (full, near_diagonal) where near_diagonal restricts to
    |x - y| < delta.  Coincident cells are excluded: they stand for the
    vanishing sub-cell diagonal of the continuum integral.  Supports larger
    than max_exact_cells are subsampled proportionally to cell mass, with
    rng fixing the draw (defaults to RngStream(0)).
    """
    if delta < 0.0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    f, _ = discretize_test_function(spec, hull)
    iy, ix = np.nonzero(f)
    h = hull.grid.h
    mass = f[iy, ix] * hull.grid.cell_area  # sums to 1
    zx = hull.grid.x0 + (ix + 0.5) * h
    zy = hull.grid.y0 + (iy + 0.5) * h
    pts = zx + 1j * zy

    if pts.size > max_exact_cells:
        gen = (rng or RngStream(0)).generator()
        a = gen.choice(pts.size, size=subsample, p=mass)
        b = gen.choice(pts.size, size=subsample, p=mass)
        full = near = 0.0
        pairs = 0
        for i in range(0, subsample, 256):
            d = np.abs(pts[a[i : i + 256], None] - pts[None, b])
            same = a[i : i + 256, None] == b[None, :]
            k = np.maximum(1.0, -np.log(np.where(same, 1.0, d)))
            k[same] = 0.0
            full += float(k.sum())
            near += float(k[d < delta].sum())
            pairs += k.size - int(same.sum())
        return full / pairs, near / pairs

    full = near = 0.0
    for i in range(0, pts.size, 512):
        d = np.abs(pts[i : i + 512, None] - pts[None, :])
        mm = mass[i : i + 512, None] * mass[None, :]
        same = np.zeros(d.shape, dtype=bool)
        rows = np.arange(i, min(i + 512, pts.size))
        same[rows - i, rows] = True
        k = np.maximum(1.0, -np.log(np.where(same, 1.0, d))) * mm
        k[same] = 0.0
        full += float(k.sum())
        near += float(k[d < delta].sum())
    return full, near


def green_hitting_estimate(x, y, r, n, dt, rng: RngStream):
    """|log r| times the chance of hitting B(y, r) before leaving the disc.

    Walkers jump uniformly on the largest circle around their position that
    avoids both the unit circle and the target ball (capped at sqrt(dt)),
    which is the exact Brownian exit law from that circle.  Circle jumps
    keep log-distance to the ball center a martingale, so the hit count is
    unbiased down to the absorption shells: walkers within r/1000 of the
    ball count as hits, walkers within 1e-6 of the unit circle as exits.
    Gaussian time stepping cannot do this affordably at small r: between
    sampling times it overshoots the ball and loses hits.
    """
    x = complex(x)
    y = complex(y)
    gap = abs(x - y)
    if not r > 0.0 or not r < gap / 4.0:
        raise ValueError(f"need 0 < r < |x-y|/4, got r={r}, |x-y|={gap}")
    for name, z in (("x", x), ("y", y)):
        if abs(z) > 1.0 - 2.0 * r:
            raise ValueError(f"{name}={z} is within 2r of the unit circle")
    if n < 1 or dt <= 0.0:
        raise ValueError("need n >= 1 walkers and dt > 0")

    gen = rng.generator()
    cap = math.sqrt(dt)
    shell_hit = 1e-3 * r
    shell_exit = 1e-6
    pos = np.full(n, x, dtype=np.complex128)
    idx = np.arange(n)
    hits = 0
    for _ in range(400_000):
        if idx.size == 0:
            break
        z = pos[idx]
        d_ball = np.abs(z - y) - r
        d_exit = 1.0 - np.abs(z)
        hit = d_ball <= shell_hit
        gone = ~hit & (d_exit <= shell_exit)
        hits += int(hit.sum())
        keep = ~(hit | gone)
        idx = idx[keep]
        if idx.size == 0:
            break
        z = z[keep]
        s = np.minimum(np.minimum(d_ball[keep], d_exit[keep]), cap)
        theta = (2.0 * math.pi) * gen.random(idx.size)
        pos[idx] = z + s * np.exp(1j * theta)
    else:
        raise RuntimeError("walkers failed to terminate")
    return abs(math.log(r)) * hits / n
