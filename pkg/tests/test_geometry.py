from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nnrange.geometry import convex_hull_3d, polygon_union_boundary, quartic_real_roots, real_roots
from nnrange.shell import lift



def test_hull_tetrahedron():
    h = convex_hull_3d(lift(np.array([1, 1j, -1, 2])))
    assert h.dim == 3 and len(h.facets) == 4 and len(h.edges) == 6
    for f in h.facets:
        assert abs(np.linalg.norm(f.normal) - 1) <= 1e-12
        assert np.all(h.points @ f.normal - f.offset <= 1e-10)


def test_hull_low_dimensions():
    assert convex_hull_3d([[0, 0, 0], [1, 0, 0], [0, 1, 0]]).dim == 2
    h = convex_hull_3d([[0, 0, 0], [1, 2, 3]])
    assert h.dim == 1 and h.edges == [(0, 1)]
    assert convex_hull_3d([[1, 1, 1]]).dim == 0


def test_hull_cube_merges_coplanar_faces():
    pts = np.array([[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)], dtype=float)
    h = convex_hull_3d(pts)
    assert h.dim == 3 and len(h.facets) == 12 and len(h.edges) == 12
    h2 = convex_hull_3d(np.vstack([pts, [[0.5, 0.5, 0.5], [0.5, 0.5, 0]]]))
    assert sorted(h2.vertices) == list(range(8))


def test_hull_permutation_invariant():
    rng = np.random.default_rng(0)
    P = rng.standard_normal((12, 3))
    perm = rng.permutation(12)
    a = convex_hull_3d(P)
    b = convex_hull_3d(P[perm])
    assert sorted(map(tuple, P[a.vertices])) == sorted(map(tuple, P[perm][b.vertices]))
    assert len(a.facets) == len(b.facets)


def test_hull_idempotence():
    rng = np.random.default_rng(1)
    for k in range(1000):
        n = int(rng.integers(4, 12))
        P = rng.standard_normal((n, 3)) if k % 4 else lift(rng.standard_normal(n) + 1j * rng.standard_normal(n))
        h = convex_hull_3d(P)
        V = P[sorted(h.vertices)]
        h2 = convex_hull_3d(V)
        assert len(h2.vertices) == len(V)
        f1 = sorted(tuple(sorted(map(tuple, np.round(P[list(f.indices)], 12)))) for f in h.facets)
        f2 = sorted(tuple(sorted(map(tuple, np.round(V[list(f.indices)], 12)))) for f in h2.facets)
        assert f1 == f2


def test_root_examples():
    assert [r.value for r in quartic_real_roots([-1, 0, 0, 0, 1], (0, 2))] == pytest.approx([1])
    (r,) = quartic_real_roots([4, 0, -4, 0, 1], (0, 2))
    assert r.value == pytest.approx(math.sqrt(2), abs=1e-8) and r.multiple
    (r,) = quartic_real_roots([0, 0, 0.81 - 1, 0, 1], (1e-9, 1))
    assert r.value == pytest.approx(math.sqrt(0.19), abs=1e-12)


def test_root_completeness():
    # roots on a 1/64 grid keep the monic coefficients exact in floating point,
    # so any error comes from the solver and not from the planted polynomial
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(10**4):
        planted = np.sort(rng.choice(257, 4, replace=False)) / 64.0
        c = np.poly(planted)[::-1]
        lo, hi = sorted(rng.uniform(-0.5, 4.5, 2))
        want = planted[(planted >= lo) & (planted <= hi)]
        if np.any(np.abs(np.subtract.outer(want, [lo, hi])) < 1e-6):
            continue
        got = np.array([r.value for r in real_roots(c, lo, hi)])
        assert len(got) == len(want)
        if len(want):
            worst = max(worst, np.abs(got - want).max())
    assert worst <= 1e-10


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=2, max_size=5))
def test_roots_are_roots(coeffs):
    c = list(coeffs)
    if abs(c[-1]) < 1e-3:
        c[-1] = 1.0
    for r in real_roots(c, -4, 4):
        d = [k * c[k] for k in range(1, len(c))]
        p = sum(a * r.value**k for k, a in enumerate(c))
        scale = sum(abs(a) * abs(r.value) ** k for k, a in enumerate(c))
        slope = abs(sum(a * r.value**k for k, a in enumerate(d)))
        assert abs(p) <= 1e-9 * scale + 1e-300 or slope <= 1e-4


def test_union_overlapping_squares():
    sq = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
    res = polygon_union_boundary([sq, sq + [0.5, 0]])
    assert res.area == pytest.approx(1.5) and res.closed and not res.multi_component


def test_union_disjoint_flags_components():
    sq = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
    res = polygon_union_boundary([sq, 2 * sq + [5, 0]])
    assert res.multi_component and res.area == pytest.approx(4)


def test_union_of_segments_is_degenerate():
    res = polygon_union_boundary([np.array([0, 1], dtype=complex), np.array([0.5, 2], dtype=complex)])
    assert res.degenerate and not res.closed
    assert np.ptp(res.ring[:, 0]) == pytest.approx(2)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_union_monotone(seed):
    rng = np.random.default_rng(seed)
    polys = []
    for _ in range(int(rng.integers(1, 5))):
        c = rng.standard_normal(2)
        th = np.sort(rng.uniform(0, 2 * np.pi, 6))
        polys.append(c + np.column_stack([np.cos(th), np.sin(th)]) * rng.uniform(0.3, 1.5))
    res = polygon_union_boundary(polys)
    from shapely.geometry import Polygon
    areas = [Polygon(p).area for p in polys]
    assert res.area >= max(areas) - 1e-12
    # adding a shrunken copy of the first polygon changes nothing
    p0 = polys[0]
    sub = p0.mean(axis=0) + 0.5 * (p0 - p0.mean(axis=0))
    res2 = polygon_union_boundary(polys + [sub])
    assert res2.area == pytest.approx(res.area, rel=1e-12)
