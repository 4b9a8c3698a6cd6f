"""Raster geometry against shapes whose areas are known in closed form."""

import math

import numpy as np
import pytest

from bmhull.errors import BandTooThinError, OutOfBoundsError, ResolutionError
from bmhull.hulls import (
    GridSpec,
    boundary_band,
    diameter,
    enlargement_area,
    outer_decompose,
    rasterize,
)
from bmhull.paths import Path, rotate_path
from bmhull.rng import RngStream


def _polyline(points):
    z = np.asarray(points, dtype=np.complex128)
    return Path(np.arange(z.size, dtype=np.float64), z)


def _circle_path(center, radius, n=4096):
    th = np.linspace(0.0, 2.0 * math.pi, n)
    return _polyline(center + radius * np.exp(1j * th))


def _square_path(corner, side):
    c = complex(corner)
    return _polyline([c, c + side, c + side + 1j * side, c + 1j * side, c])


def test_rasterize_single_point():
    grid = GridSpec.from_bounds(-1.0, 1.0, -1.0, 1.0, 0.25)
    mask = rasterize(_polyline([0.1 + 0.1j]), grid)
    assert mask.sum() == 1


def test_rasterize_subcell_path():
    grid = GridSpec.from_bounds(-1.0, 1.0, -1.0, 1.0, 0.25)
    p = _polyline([0.05 + 0.05j, 0.06 + 0.05j, 0.05 + 0.06j])
    assert rasterize(p, grid).sum() == 1


def test_rasterize_matches_supersampling():
    # horizontal unit segment on an edge-aligned grid; oracle marks the cell
    # containing each of 100-per-cell sample points
    h = 0.25
    grid = GridSpec.from_bounds(-1.0, 2.0, -1.0, 1.0, h)
    seg = _polyline([0.0j, 1.0 + 0.0j])
    mask = rasterize(seg, grid)
    want = np.zeros(grid.shape, dtype=bool)
    for s in np.linspace(0.0, 1.0, 401):
        ix = min(int((s - grid.x0) / h), grid.shape[1] - 1)
        iy = min(int((0.0 - grid.y0) / h), grid.shape[0] - 1)
        want[iy, ix] = True
    assert mask.sum() == want.sum()


def test_outer_decompose_square_area():
    h = 1.0 / 512.0
    grid = GridSpec.from_bounds(-0.25, 1.25, -0.25, 1.25, h)
    hull = outer_decompose(rasterize(_square_path(0j, 1.0), grid), grid)
    assert 1.0 - 8.0 * h <= hull.area <= 1.0 + 8.0 * h


def test_outer_decompose_segment_has_no_interior():
    grid = GridSpec.from_bounds(-1.0, 2.0, -1.0, 1.0, 0.05)
    hull = outer_decompose(rasterize(_polyline([0j, 1.0 + 0j]), grid), grid)
    assert hull.area == 0.0
    assert not hull.interior.any()


def test_outer_decompose_figure_eight():
    # two unit squares sharing one corner enclose total area 2
    h = 1.0 / 256.0
    grid = GridSpec.from_bounds(-0.5, 2.5, -0.5, 2.5, h)
    pts = list(_square_path(0j, 1.0).points) + list(_square_path(1.0 + 1j, 1.0).points)
    hull = outer_decompose(rasterize(_polyline(pts), grid), grid)
    assert abs(hull.area - 2.0) <= 8.0 * h * 8.0


def test_partition_and_boundary_subset():
    h = 1.0 / 128.0
    grid = GridSpec.from_bounds(-1.5, 1.5, -1.5, 1.5, h)
    hull = outer_decompose(rasterize(_circle_path(0j, 1.0), grid), grid)
    total = hull.exterior.sum() + hull.interior.sum() + hull.boundary_cells.sum()
    assert total == hull.grid.shape[0] * hull.grid.shape[1]
    assert (hull.boundary_cells & ~hull.visited).sum() == 0
    assert not (hull.interior & hull.exterior).any()


def test_resolution_convergence_on_disc():
    # raster area error is O(h * perimeter) for a smooth shape
    true = math.pi
    for h in (1.0 / 128.0, 1.0 / 256.0):
        grid = GridSpec.from_bounds(-1.5, 1.5, -1.5, 1.5, h)
        hull = outer_decompose(rasterize(_circle_path(0j, 1.0, 8192), grid), grid)
        assert abs(hull.area - true) <= 4.0 * h * (2.0 * math.pi)


def test_rotation_robustness_of_disc_area():
    h = 1.0 / 256.0
    grid = GridSpec.from_bounds(-2.0, 2.0, -2.0, 2.0, h)
    base = _circle_path(0.3 + 0.2j, 1.0, 8192)
    a0 = outer_decompose(rasterize(base, grid), grid).area
    rot = rotate_path(base, 0.7)
    a1 = outer_decompose(rasterize(rot, grid), grid).area
    assert abs(a1 - a0) / a0 < 0.01


def test_boundary_band_annulus():
    h = 1.0 / 512.0
    grid = GridSpec.from_bounds(-1.5, 1.5, -1.5, 1.5, h)
    hull = outer_decompose(rasterize(_circle_path(0j, 1.0, 16384), grid), grid)
    band, area = boundary_band(hull, 0.1)
    want = math.pi * (1.0 - 0.9**2)
    assert abs(area - want) / want < 0.05
    assert band.sum() > 0


def test_boundary_band_thinnest_allowed():
    h = 1.0 / 512.0
    grid = GridSpec.from_bounds(-1.5, 1.5, -1.5, 1.5, h)
    hull = outer_decompose(rasterize(_circle_path(0j, 1.0, 16384), grid), grid)
    eps = 4.0 * h
    _, area = boundary_band(hull, eps)
    want = math.pi * (1.0 - (1.0 - eps) ** 2)
    assert abs(area - want) / want < 0.10


def test_boundary_band_covers_interior_for_large_eps():
    h = 1.0 / 128.0
    grid = GridSpec.from_bounds(-1.5, 1.5, -1.5, 1.5, h)
    hull = outer_decompose(rasterize(_circle_path(0j, 1.0, 8192), grid), grid)
    band, area = boundary_band(hull, 2.0)
    assert np.array_equal(band, hull.interior)
    assert area == pytest.approx(hull.area)


def test_boundary_band_monotone_in_eps():
    h = 1.0 / 256.0
    grid = GridSpec.from_bounds(-1.5, 1.5, -1.5, 1.5, h)
    hull = outer_decompose(rasterize(_circle_path(0j, 1.0, 8192), grid), grid)
    areas = [boundary_band(hull, e)[1] for e in (0.05, 0.1, 0.2, 0.4)]
    assert all(a <= b for a, b in zip(areas, areas[1:]))


def test_boundary_band_rejects_thin_eps():
    h = 1.0 / 128.0
    grid = GridSpec.from_bounds(-1.5, 1.5, -1.5, 1.5, h)
    hull = outer_decompose(rasterize(_circle_path(0j, 1.0), grid), grid)
    with pytest.raises(BandTooThinError):
        boundary_band(hull, 3.0 * h)


def test_enlargement_disjoint_region_is_zero():
    h = 1.0 / 64.0
    grid = GridSpec.from_bounds(-2.0, 2.0, -2.0, 2.0, h)
    visited = rasterize(_polyline([0j]), grid)
    region = np.zeros(grid.shape, dtype=bool)
    region[:, -8:] = True  # strip at x ~ 2, far from the origin
    assert enlargement_area(visited, region, 0.25, grid) == 0.0


def test_enlargement_point_gives_disc():
    h = 1.0 / 128.0
    grid = GridSpec.from_bounds(-1.0, 1.0, -1.0, 1.0, h)
    visited = rasterize(_polyline([0j]), grid)
    r = 0.25  # >= 16 h
    area = enlargement_area(visited, None, r, grid)
    assert abs(area - math.pi * r * r) / (math.pi * r * r) < 0.05


def test_enlargement_segment_gives_stadium():
    h = 1.0 / 256.0
    grid = GridSpec.from_bounds(-0.5, 1.5, -0.5, 0.5, h)
    visited = rasterize(_polyline([0j, 1.0 + 0j]), grid)
    r = 0.1
    want = 2.0 * r * 1.0 + math.pi * r * r
    area = enlargement_area(visited, None, r, grid)
    assert abs(area - want) / want < 0.05


def test_enlargement_monotone_in_r():
    h = 1.0 / 128.0
    grid = GridSpec.from_bounds(-1.0, 1.0, -1.0, 1.0, h)
    visited = rasterize(_polyline([0j, 0.3 + 0.2j]), grid)
    areas = [enlargement_area(visited, None, r, grid) for r in (0.05, 0.1, 0.2)]
    assert areas[0] <= areas[1] <= areas[2]


def test_enlargement_rejects_subcell_radius():
    h = 1.0 / 64.0
    grid = GridSpec.from_bounds(-1.0, 1.0, -1.0, 1.0, h)
    visited = rasterize(_polyline([0j]), grid)
    with pytest.raises(ResolutionError):
        enlargement_area(visited, None, h / 2.0, grid)


def test_diameter_trivial_cases():
    assert diameter(_polyline([0.5 + 0.5j])) == 0.0
    assert diameter(_polyline([0j, 3.0 + 4.0j])) == 5.0


def test_diameter_matches_brute_force():
    gen = RngStream(20).generator()
    z = gen.standard_normal(10_000) + 1j * gen.standard_normal(10_000)
    p = Path(np.arange(z.size, dtype=np.float64), z)
    best = 0.0
    for lo in range(0, z.size, 512):
        chunk = z[lo : lo + 512]
        d = np.abs(chunk[:, None] - z[None, :])
        best = max(best, float(d.max()))
    assert diameter(p) == best


def test_out_of_bounds_carries_point():
    grid = GridSpec.from_bounds(-0.1, 0.1, -0.1, 0.1, 0.01)
    with pytest.raises(OutOfBoundsError):
        rasterize(_polyline([0j, 1.0 + 1.0j]), grid)


def test_empty_mask_rejected():
    grid = GridSpec.from_bounds(-1.0, 1.0, -1.0, 1.0, 0.1)
    with pytest.raises(ValueError):
        outer_decompose(np.zeros(grid.shape, dtype=bool), grid)
