"""Closed-form planar potential theory: Green's functions, Poisson kernels,
Mobius maps, and explicit slit maps of the upper half-plane.

Everything here is deterministic analytic machinery.  The only Monte Carlo
entry points are ``imaginary_identity_check`` (random walkers verifying the
harmonic identity behind the slit maps) and ``conformal_covariance_check``
(random probe pairs).  All formulas are for Brownian motion with generator
(1/2)*Laplacian, so each coordinate has variance dt per unit time.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import OutOfBoundsError, SingularityError
from .rng import RngStream

__all__ = [
    "Domain",
    "UNIT_DISC",
    "UPPER_HALF_PLANE",
    "strip",
    "green",
    "poisson",
    "boundary_poisson",
    "strip_poisson",
    "poisson_normalization",
    "strip_bottom_integral",
    "MobiusMap",
    "disc_automorphism",
    "half_plane_automorphism",
    "cayley",
    "conformal_covariance_check",
    "SlitHullMap",
    "slit_map",
    "hydrodynamic_residual",
    "imaginary_identity_check",
    "hull_map_scaling_check",
    "kernel_checks",
]

_BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class Domain:
    """Reference domain: ``unit_disc``, ``upper_half_plane``, or ``strip``.

    For the strip, ``h`` parametrizes R + i(0, pi*h).
    """

    kind: str
    h: float = 0.0

    def __post_init__(self):
        if self.kind not in ("unit_disc", "upper_half_plane", "strip"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.kind == "strip" and not self.h > 0.0:
            raise ValueError("strip height parameter must be positive")


UNIT_DISC = Domain("unit_disc")
UPPER_HALF_PLANE = Domain("upper_half_plane")


def strip(h):
    """The horizontal strip R + i(0, pi*h)."""
    return Domain("strip", float(h))


def _require_interior(domain, z, name="point"):
    z = complex(z)
    if domain.kind == "unit_disc":
        if abs(z) >= 1.0:
            raise OutOfBoundsError(z, f"{name} must lie strictly inside the unit disc")
    elif domain.kind == "upper_half_plane":
        if z.imag <= 0.0:
            raise OutOfBoundsError(z, f"{name} must have positive imaginary part")
    else:
        if not 0.0 < z.imag < math.pi * domain.h:
            raise OutOfBoundsError(z, f"{name} must lie strictly inside the strip")
    return z


def _require_boundary(domain, z, name="point"):
    z = complex(z)
    if domain.kind == "unit_disc":
        if abs(abs(z) - 1.0) > _BOUNDARY_TOL:
            raise OutOfBoundsError(z, f"{name} must lie on the unit circle")
    elif domain.kind == "upper_half_plane":
        if abs(z.imag) > _BOUNDARY_TOL:
            raise OutOfBoundsError(z, f"{name} must lie on the real line")
    else:
        top = math.pi * domain.h
        if min(abs(z.imag), abs(z.imag - top)) > _BOUNDARY_TOL:
            raise OutOfBoundsError(z, f"{name} must lie on a strip edge")
    return z


def green(domain, x, y):
    """Green's function of the domain at interior points x != y.

    Normalized so that G(x, y) ~ -(1/pi) log|x - y| near the diagonal,
    matching the occupation density of Brownian motion killed on exit.
    The strip value comes from mapping onto the half-plane by exp(z/h);
    Green's functions are conformally invariant so this is exact.
    """
    x = _require_interior(domain, x, "x")
    y = _require_interior(domain, y, "y")
    if x == y:
        raise SingularityError("green is singular on the diagonal")
    if domain.kind == "unit_disc":
        return math.log(abs(1.0 - x * y.conjugate()) / abs(x - y)) / math.pi
    if domain.kind == "upper_half_plane":
        return math.log(abs(x - y.conjugate()) / abs(x - y)) / math.pi
    u = cmath.exp(x / domain.h)
    v = cmath.exp(y / domain.h)
    return math.log(abs(u - v.conjugate()) / abs(u - v)) / math.pi


def poisson(domain, x, z):
    """Poisson kernel: density of harmonic measure seen from interior x,
    per unit boundary length at z."""
    x = _require_interior(domain, x, "x")
    z = _require_boundary(domain, z, "z")
    if domain.kind == "unit_disc":
        return (1.0 - abs(x) ** 2) / (2.0 * math.pi * abs(x - z) ** 2)
    if domain.kind == "upper_half_plane":
        return x.imag / (math.pi * abs(x - z) ** 2)
    side = "bottom" if abs(z.imag) <= _BOUNDARY_TOL else "top"
    return strip_poisson(domain.h, x, z.real, side)


def strip_poisson(h, x, x0, side):
    """Poisson kernel of the strip R + i(0, pi*h) at the boundary point
    x0 (bottom edge) or x0 + i*pi*h (top edge)."""
    h = float(h)
    if h <= 0.0:
        raise ValueError("strip height parameter must be positive")
    if side not in ("bottom", "top"):
        raise ValueError(f"side must be 'bottom' or 'top', got {side!r}")
    x = _require_interior(strip(h), x, "x")
    a = (x.real - float(x0)) / h
    b = x.imag / h
    if abs(a) > 40.0:
        # cosh dominates the cosine beyond double precision
        return math.sin(b) * math.exp(-abs(a)) / (math.pi * h)
    c = math.cos(b)
    denom = math.cosh(a) - c if side == "bottom" else math.cosh(a) + c
    return math.sin(b) / (2.0 * math.pi * h * denom)


def boundary_poisson(domain, z, w):
    """Boundary-to-boundary (excursion) Poisson kernel at distinct boundary
    points.  Normal-derivative limit of the interior kernel."""
    z = _require_boundary(domain, z, "z")
    w = _require_boundary(domain, w, "w")
    if z == w:
        raise SingularityError("boundary kernel is singular at coincident points")
    if domain.kind == "unit_disc":
        return 1.0 / (math.pi * abs(z - w) ** 2)
    if domain.kind == "upper_half_plane":
        return 1.0 / (math.pi * (z.real - w.real) ** 2)
    h = domain.h
    top = math.pi * h
    same = (abs(z.imag) <= _BOUNDARY_TOL) == (abs(w.imag) <= _BOUNDARY_TOL)
    dd = (z.real - w.real) / h
    if abs(dd) > 40.0:
        return math.exp(-abs(dd)) / (math.pi * h * h)
    d = math.cosh(dd)
    if same:
        if z.real == w.real:
            raise SingularityError("boundary kernel is singular at coincident points")
        return 1.0 / (2.0 * math.pi * h * h * (d - 1.0))
    return 1.0 / (2.0 * math.pi * h * h * (d + 1.0))


def poisson_normalization(domain, x):
    """Total harmonic measure of the boundary seen from x, by adaptive
    quadrature.  Equals 1 for any interior point; used as a self-check."""
    x = _require_interior(domain, x, "x")
    if domain.kind == "unit_disc":
        val, _ = quad(
            lambda t: poisson(domain, x, cmath.exp(1j * t)),
            0.0, 2.0 * math.pi, epsabs=1e-9, epsrel=1e-12, limit=200,
        )
        return val
    if domain.kind == "upper_half_plane":
        val, _ = quad(
            lambda u: poisson(domain, x, complex(u, 0.0)),
            -np.inf, np.inf, epsabs=1e-9, epsrel=1e-12, limit=200,
        )
        return val
    bottom = strip_bottom_integral(domain.h, x)
    topv, _ = quad(
        lambda u: strip_poisson(domain.h, x, u, "top"),
        -np.inf, np.inf, epsabs=1e-9, epsrel=1e-12, limit=200,
    )
    return bottom + topv


def strip_bottom_integral(h, x):
    """Probability that Brownian motion started at x exits the strip
    through the bottom edge, by quadrature of the bottom kernel.
    Closed form: 1 - Im(x)/(pi*h)."""
    val, _ = quad(
        lambda u: strip_poisson(h, x, u, "bottom"),
        -np.inf, np.inf, epsabs=1e-9, epsrel=1e-12, limit=200,
    )
    return val


# ---------------------------------------------------------------------------
# Mobius maps


def _self_map_probes(domain):
    if domain.kind == "unit_disc":
        return tuple(
            r * cmath.exp(1j * t)
            for r in (0.15, 0.45, 0.7, 0.9)
            for t in (0.3, 1.7, 3.1, 5.0)
        )
    if domain.kind == "upper_half_plane":
        return tuple(
            complex(a, b) for a in (-2.0, -0.5, 0.5, 2.0) for b in (0.1, 0.6, 1.5, 4.0)
        )
    top = math.pi * domain.h
    return tuple(
        complex(a, f * top)
        for a in (-2.0, -0.5, 0.5, 2.0)
        for f in (0.1, 0.4, 0.6, 0.9)
    )


def _outside_by(domain, z):
    """How far z sits outside the closed domain (0 when inside)."""
    if domain.kind == "unit_disc":
        return max(0.0, abs(z) - 1.0)
    if domain.kind == "upper_half_plane":
        return max(0.0, -z.imag)
    top = math.pi * domain.h
    return max(0.0, -z.imag, z.imag - top)


@dataclass(frozen=True)
class MobiusMap:
    """z -> (a z + b) / (c z + d) with ad - bc != 0.

    When ``domain`` is set the map is verified at construction to send 16
    interior probe points back into the domain (within 1e-12), i.e. to be a
    self-map of that domain.
    """

    a: complex
    b: complex
    c: complex
    d: complex
    domain: Domain | None = None

    def __post_init__(self):
        if self.a * self.d - self.b * self.c == 0:
            raise ValueError("degenerate coefficients: ad - bc = 0")
        if self.domain is not None:
            worst = max(
                _outside_by(self.domain, self(z)) for z in _self_map_probes(self.domain)
            )
            if worst > 1e-12:
                raise ValueError(
                    f"not a self-map of {self.domain.kind}: probe escapes by {worst:.3g}"
                )

    def __call__(self, z):
        z = complex(z)
        return (self.a * z + self.b) / (self.c * z + self.d)

    def derivative(self, z):
        z = complex(z)
        return (self.a * self.d - self.b * self.c) / (self.c * z + self.d) ** 2

    def inverse(self):
        return MobiusMap(self.d, -self.b, -self.c, self.a, self.domain)

    def compose(self, other):
        """The map z -> self(other(z))."""
        dom = self.domain if self.domain == other.domain else None
        return MobiusMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            dom,
        )


def disc_automorphism(a, theta=0.0):
    """z -> e^{i theta} (z - a) / (1 - conj(a) z), an automorphism of the disc."""
    a = complex(a)
    if abs(a) >= 1.0:
        raise OutOfBoundsError(a, "automorphism parameter must lie inside the disc")
    rot = cmath.exp(1j * float(theta))
    return MobiusMap(rot, -rot * a, -a.conjugate(), 1.0, UNIT_DISC)


def half_plane_automorphism(a, b, c, d):
    """Real-coefficient map (az + b)/(cz + d) with ad - bc > 0."""
    if not a * d - b * c > 0:
        raise ValueError("need real coefficients with ad - bc > 0")
    return MobiusMap(float(a), float(b), float(c), float(d), UPPER_HALF_PLANE)


def cayley():
    """Standard map from the upper half-plane onto the unit disc, z -> (z-i)/(z+i)."""
    return MobiusMap(1.0, -1j, 1.0, 1j)


def _interior_samples(domain, n, gen):
    if domain.kind == "unit_disc":
        r = 0.92 * np.sqrt(gen.random(n))
        t = 2.0 * math.pi * gen.random(n)
        return r * np.exp(1j * t)
    if domain.kind == "upper_half_plane":
        return gen.uniform(-2.0, 2.0, n) + 1j * gen.uniform(0.05, 2.5, n)
    top = math.pi * domain.h
    return gen.uniform(-2.0, 2.0, n) + 1j * gen.uniform(0.05 * top, 0.95 * top, n)


def _boundary_samples(domain, n, gen):
    if domain.kind == "unit_disc":
        return np.exp(2j * math.pi * gen.random(n))
    if domain.kind == "upper_half_plane":
        return gen.uniform(-3.0, 3.0, n) + 0j
    raise ValueError("boundary sampling is only set up for disc and half-plane")


def conformal_covariance_check(f, source, target, n_pairs, rng, perturb=0.0):
    """Max residual of the conformal transformation rules over random probes.

    Green's functions are invariant, G_target(f x, f y) = G_source(x, y);
    Poisson kernels pick up one inverse derivative factor per boundary
    argument.  ``perturb`` adds a constant to the source Green values, which
    should trip the check (used for fault-injection sensitivity).
    """
    if source.kind == "strip" or target.kind == "strip":
        raise ValueError("covariance probes are only set up for disc and half-plane")
    gen = rng.generator()
    probes = _interior_samples(source, 8, gen)
    worst_escape = max(_outside_by(target, f(z)) for z in probes)
    if worst_escape > 1e-12:
        raise ValueError(f"map does not send {source.kind} into {target.kind}")

    worst = 0.0
    xs = _interior_samples(source, n_pairs, gen)
    ys = _interior_samples(source, n_pairs, gen)
    zs = _boundary_samples(source, n_pairs, gen)
    ws = _boundary_samples(source, n_pairs, gen)
    for x, y, z, w in zip(xs, ys, zs, ws):
        if x == y or z == w:
            continue
        g_res = abs(green(target, f(x), f(y)) - green(source, x, y) - perturb)
        dz = abs(f.derivative(z))
        p_res = abs(poisson(target, f(x), f(z)) * dz - poisson(source, x, z))
        dw = abs(f.derivative(w))
        b_res = abs(
            boundary_poisson(target, f(z), f(w)) * dz * dw
            - boundary_poisson(source, z, w)
        )
        worst = max(worst, g_res, p_res, b_res)
    return worst


# ---------------------------------------------------------------------------
# Slit maps of the upper half-plane


@dataclass(frozen=True)
class SlitHullMap:
    """Vertical segment hull {x0} x [0, height] in the closed upper half-plane,
    together with the closed-form map g(z) = x0 + sqrt((z - x0)^2 + height^2)
    removing it.

    The square root branch is fixed by continuity from Im(z) -> +infinity
    (image in the closed upper half-plane), which makes g hydrodynamically
    normalized: g(z) - z -> 0 at infinity.
    """

    kind: str
    x0: float
    height: float

    def __post_init__(self):
        if self.height < 0.0:
            raise ValueError("slit height must be nonnegative")

    @classmethod
    def vertical_slit(cls, x0, height):
        return cls("vertical_slit", float(x0), float(height))

    @classmethod
    def tilted_segment(cls, delta):
        """Segment hull rooted at -1, the degenerate-angle case with the
        explicit map ((z + 1)^2 + delta^2)^{1/2} - 1."""
        return cls("tilted_segment", -1.0, float(delta))

    def half_capacity(self):
        """Coefficient of 1/z in g(z) - z at infinity, times 1: height^2 / 2."""
        return 0.5 * self.height * self.height


def slit_map(hull, z):
    """Apply the slit map to z (scalar or array) in H minus the hull.

    Points with negative imaginary part, or strictly inside the slit, are
    rejected.  The slit tip and the real axis away from the slit foot are
    allowed; the map extends continuously there.
    """
    za = np.asarray(z, dtype=np.complex128)
    flat = np.ravel(za)
    neg = np.ravel(za.imag < 0.0)
    if neg.any():
        raise OutOfBoundsError(complex(flat[neg][0]), "point below the real axis")
    inside = np.ravel((za.real == hull.x0) & (za.imag < hull.height))
    if inside.any():
        raise OutOfBoundsError(complex(flat[inside][0]), "point inside the slit hull")
    w = (za - hull.x0) ** 2 + hull.height**2
    s = np.sqrt(w)
    s = np.where(s.imag < 0.0, -s, s)
    # real points left of the slit continue to the negative root
    left = (za.imag == 0.0) & (za.real < hull.x0)
    s = np.where(left, -np.abs(s), s)
    out = hull.x0 + s
    if np.isscalar(z) or np.ndim(z) == 0:
        return complex(out)
    return out


def hydrodynamic_residual(hull, radius=1e6, n_probes=8):
    """sup |g(z) - z| over probes on the arc |z| = radius in H."""
    t = np.linspace(0.15, math.pi - 0.15, n_probes)
    z = radius * np.exp(1j * t)
    return float(np.max(np.abs(slit_map(hull, z) - z)))


def imaginary_identity_check(hull, z, n, dt, rng):
    """Monte Carlo check that Im(z) - Im(g(z)) equals the expected height at
    which Brownian motion from z first hits the slit (zero if it hits the
    real axis first).

    Returns (residual, stderr) where residual = Im(z) - Im(g(z)) - estimate.
    Hits of the real axis and of the slit's supporting line use exact
    endpoint-conditioned crossing probabilities, so step size costs no bias
    there; steps are capped at ``dt`` within a few hull scales (resolving
    the O(sqrt(step)) placement of the hit height) and grow quadratically
    with distance outside, which keeps the heavy-tailed half-plane
    excursions cheap.  Walkers straying within 1e-7 of the slit tip are
    absorbed at the tip; harmonic measure makes that event, and hence its
    bias, vanishingly rare.
    """
    z = complex(z)
    gz = slit_map(hull, z)  # also validates z against the hull
    if z.imag <= 0.0:
        raise OutOfBoundsError(z, "start point must be in the open half-plane")
    x0, hgt = hull.x0, hull.height
    gen = rng.generator()
    pos = np.full(n, z, dtype=np.complex128)
    val = np.zeros(n)
    idx = np.arange(n)
    cap = float(dt)
    scale = max(1.0, hgt)
    tip_r = 1e-7 * scale
    near_ceiling = min(cap, (hgt / 8.0) ** 2) if hgt > 0.0 else cap
    for _ in range(400_000):
        if idx.size == 0:
            break
        p = pos[idx]
        x = p.real
        y = p.imag
        d_tip = np.hypot(x - x0, y - hgt)
        captured = d_tip <= tip_r
        if captured.any():
            val[idx[captured]] = hgt
            keep = ~captured
            idx = idx[keep]
            x = x[keep]
            y = y[keep]
            d_tip = d_tip[keep]
            if idx.size == 0:
                break
        step = 0.0625 * d_tip * d_tip
        near = d_tip <= 4.0 * scale
        step[near] = np.minimum(step[near], near_ceiling)
        g = gen.standard_normal((idx.size, 2))
        sq = np.sqrt(step)
        x2 = x + sq * g[:, 0]
        y2 = y + sq * g[:, 1]
        u_line = gen.random(idx.size)
        u_axis = gen.random(idx.size)

        slit_time = np.full(idx.size, np.inf)
        slit_height = np.zeros(idx.size)
        if hgt > 0.0:
            dx1 = x - x0
            dx2 = x2 - x0
            straddle = (dx1 > 0.0) != (dx2 > 0.0)
            den = dx1 - dx2
            s_cross = np.where(straddle & (den != 0.0), dx1 / np.where(den == 0.0, 1.0, den), np.inf)
            y_cross = y + s_cross * (y2 - y)
            trans = straddle & (y_cross >= 0.0) & (y_cross <= hgt)
            slit_time[trans] = s_cross[trans]
            slit_height[trans] = y_cross[trans]
            # conditioned touch of the supporting line without a sign change
            prod = dx1 * dx2
            graze = ~straddle & (u_line < np.exp(-2.0 * np.maximum(prod, 0.0) / step))
            den2 = np.abs(dx1) + np.abs(dx2)
            t_touch = np.where(den2 > 0.0, np.abs(dx1) / np.where(den2 == 0.0, 1.0, den2), 0.0)
            y_touch = y + t_touch * (y2 - y)
            graze &= (y_touch >= 0.0) & (y_touch <= hgt)
            upd = graze & (t_touch < slit_time)
            slit_time[upd] = t_touch[upd]
            slit_height[upd] = y_touch[upd]

        below = y2 <= 0.0
        axis_time = np.full(idx.size, np.inf)
        axis_time[below] = y[below] / np.maximum(y[below] - y2[below], 1e-300)
        dipped = ~below & (u_axis < np.exp(-2.0 * y * np.maximum(y2, 0.0) / step))
        axis_time[dipped] = y[dipped] / np.maximum(y[dipped] + y2[dipped], 1e-300)

        hit_slit = slit_time < axis_time
        hit_axis = np.isfinite(axis_time) & ~hit_slit
        val[idx[hit_slit]] = slit_height[hit_slit]
        done = hit_slit | hit_axis
        pos[idx] = x2 + 1j * y2
        idx = idx[~done]
    else:
        raise RuntimeError("walkers failed to terminate; dt likely too small")
    est = float(val.mean())
    se = float(val.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    residual = z.imag - gz.imag - est
    return residual, se


_SCALING_PROBES = (
    2j,
    -2.0 + 1j,
    1.0 + 0.5j,
    0.5 + 0.25j,
    -3.0 + 0.25j,
    3.0 + 2j,
    1000j,
)


def hull_map_scaling_check(eps_list, probes=_SCALING_PROBES):
    """Table of sup |g(z) - z| / (eps |log eps|) over slit hulls of height eps
    rooted at positions in [-1, eps], evaluated at probe points.

    Probes must keep distance from the hulls: they are rejected inside the
    enlarged rectangle [-1 - eps, 2 eps] x [0, 2 eps].  The ratio sequence
    should stay bounded as eps decreases.
    """
    rows = []
    for eps in eps_list:
        eps = float(eps)
        if not 0.0 < eps <= 0.1:
            raise ValueError(f"eps must lie in (0, 1/10], got {eps}")
        for z in probes:
            z = complex(z)
            if -1.0 - eps <= z.real <= 2.0 * eps and 0.0 <= z.imag <= 2.0 * eps:
                raise OutOfBoundsError(z, "probe too close to the hull rectangle")
        sup = 0.0
        for x0 in np.linspace(-1.0, eps, 9):
            hull = SlitHullMap.vertical_slit(x0, eps)
            for z in probes:
                sup = max(sup, abs(slit_map(hull, z) - complex(z)))
        rows.append(
            {
                "eps": eps,
                "sup_abs": sup,
                "ratio": sup / (eps * abs(math.log(eps))),
            }
        )
    return rows


# ---------------------------------------------------------------------------
# Check registry


def _record(check, n, max_residual, tolerance):
    return {
        "check": check,
        "n": int(n),
        "max_residual": float(max_residual),
        "tolerance": float(tolerance),
        "pass": bool(max_residual <= tolerance),
    }


def kernel_checks(rng, n=100, mc_n=20000, fault=0.0):
    """Run the full registry of analytic identity checks.

    Returns a list of records {check, n, max_residual, tolerance, pass}.
    ``fault`` perturbs the source Green values inside the covariance checks;
    any nonzero value large relative to 1e-10 must make them fail.
    """
    records = []
    gen = rng.generator()

    # symmetry and positivity of G on random interior pairs
    sym = 0.0
    neg = 0.0
    for domain in (UNIT_DISC, UPPER_HALF_PLANE):
        xs = _interior_samples(domain, n, gen)
        ys = _interior_samples(domain, n, gen)
        for x, y in zip(xs, ys):
            if x == y:
                continue
            a = green(domain, x, y)
            b = green(domain, y, x)
            sym = max(sym, abs(a - b))
            neg = max(neg, -min(a, b))
    records.append(_record("green_symmetry", 2 * n, sym, 1e-12))
    records.append(_record("green_positive", 2 * n, neg, 0.0))

    # harmonic measure normalization
    worst = 0.0
    for x in _interior_samples(UNIT_DISC, 10, gen):
        worst = max(worst, abs(poisson_normalization(UNIT_DISC, x) - 1.0))
    records.append(_record("poisson_normalization_disc", 10, worst, 1e-8))
    worst = 0.0
    for x in _interior_samples(UPPER_HALF_PLANE, 10, gen):
        worst = max(worst, abs(poisson_normalization(UPPER_HALF_PLANE, x) - 1.0))
    records.append(_record("poisson_normalization_half_plane", 10, worst, 1e-8))

    # strip exit-side splitting: bottom mass 1 - Im/(pi h), total mass 1
    h = 0.7
    dom = strip(h)
    worst_b = 0.0
    worst_t = 0.0
    for x in _interior_samples(dom, 20, gen):
        bottom = strip_bottom_integral(h, x)
        worst_b = max(worst_b, abs(bottom - (1.0 - x.imag / (math.pi * h))))
        worst_t = max(worst_t, abs(poisson_normalization(dom, x) - 1.0))
    records.append(_record("strip_bottom_integral", 20, worst_b, 1e-8))
    records.append(_record("strip_total_mass", 20, worst_t, 1e-8))

    # conformal invariance / covariance
    dev = conformal_covariance_check(
        cayley(), UPPER_HALF_PLANE, UNIT_DISC, n, RngStream(rng.seed, rng.stream_id + 1),
        perturb=fault,
    )
    records.append(_record("covariance_cayley", n, dev, 1e-10))
    auto = disc_automorphism(0.3 - 0.4j, 1.1)
    dev = conformal_covariance_check(
        auto, UNIT_DISC, UNIT_DISC, n, RngStream(rng.seed, rng.stream_id + 2),
        perturb=fault,
    )
    records.append(_record("covariance_disc_automorphism", n, dev, 1e-10))
    dev = conformal_covariance_check(
        MobiusMap(1.0, 0.0, 0.0, 1.0), UNIT_DISC, UNIT_DISC, 8,
        RngStream(rng.seed, rng.stream_id + 3),
    )
    records.append(_record("covariance_identity", 8, dev, 0.0))

    # slit map normalization: small at |z| = 1e6 and decaying in height
    hulls = (SlitHullMap.vertical_slit(0.0, 1.0), SlitHullMap.tilted_segment(0.5))
    far = max(hydrodynamic_residual(hl, 1e6) for hl in hulls)
    records.append(_record("slit_normalization_far", 2 * 8, far, 1e-4))
    worst = 0.0
    for hl in hulls:
        res = [hydrodynamic_residual(hl, 10.0**k) for k in (3, 4, 5, 6)]
        worst = max(worst, max(res[k + 1] - res[k] for k in range(3)))
    records.append(_record("slit_normalization_decay", 2 * 4, worst, 0.0))

    # harmonic identity for both slit kinds, residual in units of 3 SE
    worst = 0.0
    for k, (hl, z0) in enumerate(
        ((SlitHullMap.vertical_slit(0.0, 1.0), 2j), (SlitHullMap.tilted_segment(0.5), -1 + 2j))
    ):
        res, se = imaginary_identity_check(
            hl, z0, mc_n, 0.05, RngStream(rng.seed, rng.stream_id + 4 + k)
        )
        worst = max(worst, abs(res) / (3.0 * se + 1e-12))
    records.append(_record("slit_identity_mc", 2 * mc_n, worst, 1.0))

    # scaling table bounded by twice its first entry
    table = hull_map_scaling_check((0.1, 0.05, 0.025, 0.0125))
    bound = 2.0 * table[0]["ratio"]
    ratio = max(row["ratio"] for row in table) / bound
    records.append(_record("hull_scaling_bounded", len(table), ratio, 1.0))

    return records
