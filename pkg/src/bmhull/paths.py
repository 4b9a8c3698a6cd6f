"""Samplers for planar Brownian paths, bridges, and loop-measure proposals.

Conventions: points live in the complex plane, the generator is half the
Laplacian, so each coordinate of a free path has variance t at time t.
"""

import math
from dataclasses import dataclass

import numpy as np

from .rng import RngStream

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Path:
    """Piecewise-linear sampled path: strictly increasing times from 0."""

    times: np.ndarray
    points: np.ndarray

    def __post_init__(self):
        t = np.ascontiguousarray(np.asarray(self.times, dtype=np.float64))
        z = np.ascontiguousarray(np.asarray(self.points, dtype=np.complex128))
        if t.ndim != 1 or z.shape != t.shape:
            raise ValueError("times and points must be 1-d arrays of equal length")
        if t.size == 0:
            raise ValueError("a path needs at least one vertex")
        if t[0] != 0.0:
            raise ValueError("first vertex time must be 0")
        if t.size > 1 and not np.all(np.diff(t) > 0.0):
            raise ValueError("vertex times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "points", z)

    @property
    def duration(self) -> float:
        return float(self.times[-1])

    def __len__(self) -> int:
        return self.times.size


def _step_count(duration, dt):
    # ceil(duration/dt) with a relative guard against float quotients that
    # land a hair above an integer (e.g. 1/1e-3 -> 1000.0000000000001)
    q = duration / dt
    return max(1, int(math.ceil(q * (1.0 - 1e-12))))


def _time_grid(duration, dt):
    n = _step_count(duration, dt)
    t = dt * np.arange(n + 1)
    t[-1] = duration
    return t


def _free_motion(times, start, gen):
    steps = np.diff(times)
    g = gen.standard_normal((steps.size, 2))
    incr = (g[:, 0] + 1j * g[:, 1]) * np.sqrt(steps)
    z = np.empty(times.size, dtype=np.complex128)
    z[0] = start
    np.cumsum(incr, out=z[1:])
    z[1:] += start
    return z


def sample_bm(duration, dt, start, rng: RngStream) -> Path:
    """Sample a planar Brownian path on a uniform time grid.

    Produces ceil(duration/dt)+1 vertices; the final step is shortened when
    dt does not divide duration.  Increments are independent Gaussians with
    per-coordinate variance equal to the step length.
    """
    if duration <= 0.0:
        raise ValueError(f"duration must be positive, got {duration}")
    if dt <= 0.0 or dt > duration:
        raise ValueError(f"dt must lie in (0, duration], got {dt}")
    times = _time_grid(duration, dt)
    return Path(times, _free_motion(times, complex(start), rng.generator()))


def sample_bridge(duration, anchor, dt, rng: RngStream) -> Path:
    """Sample a Brownian bridge from anchor back to anchor.

    A free path X is pinned exactly: Z_s = anchor + X_s - (s/T) X_T, which
    has the exact bridge marginals (coordinate variance s(T-s)/T) rather
    than an approximation.  The final vertex equals anchor bit for bit.
    """
    if duration <= 0.0:
        raise ValueError(f"duration must be positive, got {duration}")
    if dt <= 0.0 or dt > duration / 2.0:
        raise ValueError(
            f"bridge needs dt <= duration/2, got dt={dt}, duration={duration}"
        )
    times = _time_grid(duration, dt)
    anchor = complex(anchor)
    free = _free_motion(times, 0.0, rng.generator())
    z = anchor + free - (times / duration) * free[-1]
    z[-1] = anchor
    return Path(times, z)


def refine_path(path: Path, factor: int, rng: RngStream) -> Path:
    """Insert factor-1 bridge points inside every step of an existing path.

    Original vertices are kept bit for bit; inserted points follow the
    conditional (Brownian bridge) law given the two enclosing vertices, so
    refinement commutes in distribution with sampling at the finer step.
    """
    if int(factor) != factor or factor < 1:
        raise ValueError(f"factor must be a positive integer, got {factor}")
    factor = int(factor)
    if factor == 1 or len(path) < 2:
        return path
    gen = rng.generator()
    t, z = path.times, path.points
    nseg = t.size - 1
    seg_dt = np.diff(t)
    sub = seg_dt / factor

    new_t = np.empty((nseg, factor), dtype=np.float64)
    new_z = np.empty((nseg, factor), dtype=np.complex128)
    new_t[:, 0] = t[:-1]
    new_z[:, 0] = z[:-1]
    cur = z[:-1].copy()
    for j in range(1, factor):
        remain = seg_dt - (j - 1) * sub  # time left to the segment endpoint
        mean = cur + (sub / remain) * (z[1:] - cur)
        var = sub * (remain - sub) / remain
        g = gen.standard_normal((nseg, 2))
        cur = mean + np.sqrt(var) * (g[:, 0] + 1j * g[:, 1])
        new_t[:, j] = t[:-1] + j * sub
        new_z[:, j] = cur
    times = np.append(new_t.ravel(), t[-1])
    points = np.append(new_z.ravel(), z[-1])
    return Path(times, points)


def rotate_path(path: Path, angle, about=0j) -> Path:
    """Rotate a path rigidly about a point. Times are unchanged."""
    about = complex(about)
    rot = complex(math.cos(angle), math.sin(angle))
    return Path(path.times, about + (path.points - about) * rot)


@dataclass(frozen=True)
class Square:
    """Axis-aligned square given by its lower-left corner and side."""

    corner: complex
    side: float

    def __post_init__(self):
        if self.side <= 0.0:
            raise ValueError(f"square side must be positive, got {self.side}")

    @property
    def area(self) -> float:
        return self.side * self.side

    def contains(self, points) -> bool:
        x = np.real(points) - self.corner.real
        y = np.imag(points) - self.corner.imag
        return bool(
            (x >= 0.0).all() and (y >= 0.0).all()
            and (x <= self.side).all() and (y <= self.side).all()
        )


UNIT_SQUARE = Square(0j, 1.0)


@dataclass(frozen=True)
class DtRule:
    """Step-resolution policy for loop proposals.

    Loops arrive at every duration scale, so the step is chosen relative to
    the duration (t / steps) and optionally capped by an absolute ceiling,
    e.g. min(eps^2, h^2) when a consumer grid of pitch h is known.
    """

    steps: int = 32768
    cap: float | None = None

    def step_for(self, duration: float) -> float:
        dt = duration / self.steps
        if self.cap is not None:
            dt = min(dt, self.cap)
        return min(dt, duration / 2.0)


@dataclass(frozen=True)
class WeightedLoopSample:
    """One importance-sampled rooted loop with its nonnegative weight.

    weight = 0 marks a proposal rejected by the containment or diameter
    indicator; such samples still count in importance-sampling averages.
    """

    path: Path
    weight: float
    proposal_params: dict

    def __post_init__(self):
        if not math.isfinite(self.weight) or self.weight < 0.0:
            raise ValueError(f"weight must be finite and >= 0, got {self.weight}")


def loop_time_cutoffs(eps, t_max):
    """Proposal support [t_min, t_max] with t_min = eps^2 / log(1/eps)^2."""
    log_eps = abs(math.log(eps))
    t_min = eps * eps / (log_eps * log_eps)
    return t_min, t_max


def sample_loop_measure(
    eps, square: Square, t_max, dt_rule: DtRule, rng: RngStream
) -> WeightedLoopSample:
    """Draw one weighted loop for the loop-measure restricted to a square.

    The target has density dz dt / (2 pi t^2) over rooted loops, restricted
    to loops inside the square with diameter above eps.  Proposal: duration
    log-uniform on [t_min, t_max], root uniform in the square.  The weight
    is the target/proposal density ratio, or 0 when an indicator fails.
    """
    if not (0.0 < eps < square.side):
        raise ValueError(f"need 0 < eps < side, got eps={eps}, side={square.side}")
    t_min, _ = loop_time_cutoffs(eps, t_max)
    if t_max <= t_min:
        raise ValueError(f"t_max={t_max} below proposal floor {t_min}")
    gen = rng.generator()
    span = math.log(t_max / t_min)
    u = gen.random(3)
    t = t_min * math.exp(span * u[0])
    root = square.corner + square.side * (u[1] + 1j * u[2])
    bridge = _loop_bridge(t, root, dt_rule, gen)

    weight = 0.0
    if square.contains(bridge.points):
        from .hulls import diameter

        if diameter(bridge) > eps:
            # (1/(2 pi t^2)) / [ 1/(t * span * |Q|) ]
            weight = square.area * span / (TWO_PI * t)
    return WeightedLoopSample(
        path=bridge,
        weight=weight,
        proposal_params={"t_min": t_min, "t_max": t_max, "span": span,
                         "square_side": square.side, "duration": t},
    )


def _loop_bridge(duration, anchor, dt_rule, gen):
    dt = dt_rule.step_for(duration)
    times = _time_grid(duration, dt)
    free = _free_motion(times, 0.0, gen)
    z = anchor + free - (times / duration) * free[-1]
    z[-1] = anchor
    return Path(times, z)


def loop_truncation_report(eps, t_max, square: Square = UNIT_SQUARE) -> dict:
    """Analytic bounds on loop-measure mass outside the proposal window.

    Below t_min the duration functional is bounded through the reflection
    tail of the one-dimensional bridge maximum; above t_max through the
    Dirichlet heat trace of the square (eigenvalues (m^2+n^2) pi^2 / (2 s^2)
    for side s).  Both bounds are tiny at the default settings and are
    reported so the truncation choice stays auditable.
    """
    from scipy.special import exp1

    log_eps = abs(math.log(eps))
    below = (2.0 / math.pi) * exp1(log_eps * log_eps / 4.0)
    s2 = square.side * square.side
    above = 0.0
    for m in range(1, 41):
        for n in range(1, 41):
            lam = (m * m + n * n) * math.pi * math.pi / (2.0 * s2)
            above += math.exp(-lam * t_max) / lam
    return {"below_t_min": float(below), "above_t_max": float(above)}


def path_to_csv(path: Path, stream) -> None:
    """Dump vertices as t,x,y rows with 17 significant digits."""
    stream.write("t,x,y\n")
    for t, z in zip(path.times, path.points):
        stream.write(f"{t:.17g},{z.real:.17g},{z.imag:.17g}\n")
