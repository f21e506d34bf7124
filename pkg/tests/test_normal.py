from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import crandn, curve_hausdorff
from nnrange.core import h_map
from nnrange.errors import BothZero, DegenerateArc, EmptySpectrum, EqualEigenvalues, OutOfRange, ZeroSpectrum
from nnrange.normal import (ArcFragment, FlatSegment, arc_point, critical_level, facet_flat_segment,
                            flat_region_circles, hyperbolic_arc, membership_normal, membership_normal_many,
                            normal_boundary)
from nnrange.oracle import hausdorff_cloud_to_curve, sample_cloud
from nnrange.shell import Spectrum

SQ3 = math.sqrt(3)
L1, L2, L3 = complex(SQ3, SQ3), 3 + 4j, 10


def test_arc_one_i():
    arc = hyperbolic_arc(1, 1j)
    assert arc.theta == pytest.approx(math.pi / 4) and arc.phi == pytest.approx(math.pi / 4)
    assert arc.vertex == pytest.approx(0.5 + 0.5j)
    assert arc.endpoints == pytest.approx((1, 1j))
    z = sample_cloud(np.diag([1, 1j]), 10**5, 3).points
    assert np.abs(z).min() == pytest.approx(abs(arc.vertex), abs=1e-3)


def test_arc_opposite_pair_is_segment():
    arc = hyperbolic_arc(1, -1)
    assert arc.vertex == 0 and arc.degenerate == "segment"


def test_arc_with_zero_eigenvalue():
    arc = hyperbolic_arc(1, 0)
    assert arc.degenerate == "ray" and arc.endpoints == (1, None)
    with pytest.raises(DegenerateArc):
        arc_point(arc, 1.0)


def test_arc_errors():
    with pytest.raises(EqualEigenvalues):
        hyperbolic_arc(2j, 2j)
    with pytest.raises(BothZero):
        hyperbolic_arc(0, 0)


def test_arc_point_examples():
    arc = hyperbolic_arc(1, 2)
    assert arc_point(arc, 1.0) == pytest.approx(2 * math.sqrt(2) / 3, abs=1e-15)
    assert arc_point(arc, math.sqrt(2)) == pytest.approx(1, abs=1e-15)
    assert arc_point(hyperbolic_arc(1, 1j), 1.0) == pytest.approx(0.5 + 0.5j, abs=1e-15)
    with pytest.raises(OutOfRange):
        arc_point(arc, 2.0)


def test_arc_point_lies_on_arc():
    rng = np.random.default_rng(1)
    for _ in range(20):
        lam, mu = crandn(rng, 2)
        arc = hyperbolic_arc(lam, mu)
        g = math.sqrt(abs(lam * mu))
        lo, hi = sorted((abs(lam) / g, abs(mu) / g))
        for t in np.linspace(lo, hi, 5):
            assert arc.distance(arc_point(arc, t)) <= 1e-9


def test_critical_level_examples():
    cl = critical_level(L1, L2, L3)
    assert cl.kind == "value"
    assert cl.alpha == pytest.approx((350 * SQ3 - 240) / (40 - 11 * SQ3), abs=1e-9)
    cl = critical_level(1, 1j, -1)
    assert cl.kind == "value" and cl.alpha == pytest.approx(-1)
    assert np.allclose(np.abs(cl.eta), [0, 0, 1]) and abs(cl.b) == pytest.approx(1)
    # collinear spectrum through the origin: vertical plane with b = 0
    assert critical_level(1, 2, 3).kind == "indeterminate"
    # collinear spectrum off the origin: vertical plane, no critical level
    assert critical_level(1 + 1j, 2 + 1j, 3 + 1j).kind == "none"


def _tangency(arc, z, direction):
    t = arc.tangent(z)
    return max(arc.distance(z), abs((np.conj(t) * direction).imag))


def test_flat_segment_of_example_facet():
    seg = facet_flat_segment([L1, L2, L3])
    assert seg is not None and 6 < seg.alpha < 100
    # the level alpha cuts the lifted edges (l1, l2) and (l1, l3)
    assert seg.tangent_arcs == ((0, 1), (0, 2))
    d = (seg.z2 - seg.z1) / abs(seg.z2 - seg.z1)
    lams = [L1, L2, L3]
    for z, (i, j) in zip((seg.z1, seg.z2), seg.tangent_arcs):
        assert _tangency(hyperbolic_arc(lams[i], lams[j]), z, d) <= 1e-8


def test_no_flat_segment_cases():
    assert facet_flat_segment([1, 1j, -1]) is None
    assert facet_flat_segment([1, 2j, -2]) is None  # alpha = -2 is below the range {1, 4}


def test_no_flat_brute_force():
    s = Spectrum.from_values([1, 2j, -2])
    nb = normal_boundary(s, 2048)
    assert not nb.flat_segments
    # coverage shrinks like count^(-1/2): 5e-3 to 1e-2 at 10^6 samples depending on seed
    contain, cover = hausdorff_cloud_to_curve(sample_cloud(s.matrix(), 10**6, 5), nb.polyline)
    assert contain <= 1e-6 and cover <= 2e-2


def test_flat_region_circles_example():
    circ = flat_region_circles(L1, L3)
    assert circ.inside_exactly_one(L2)
    (c1, r1), (c2, r2) = circ.circles
    for c, r in circ.circles:
        assert abs(abs(L1 - c) - r) <= 1e-9 and abs(abs(L3 - c) - r) <= 1e-9
    # a point on a circle is a boundary case: no strict flat portion
    on = c1 + r1 * cmath.exp(0.3j)
    assert facet_flat_segment([L1, on, L3]) is None


def test_flat_circles_agree_with_facets_on_grid():
    circ = flat_region_circles(L1, L3)
    lo, hi = abs(L1), abs(L3)
    checked = 0
    for x in np.linspace(-10, 10, 50):
        for y in np.linspace(-10, 10, 50):
            z = complex(x, y)
            if not (lo < abs(z) < hi):
                continue
            if min(abs(abs(z - c) - r) for c, r in circ.circles) < 1e-6:
                continue
            if abs(((z - L1) * np.conj(L3 - L1)).imag) < 1e-9:  # collinear triple
                continue
            has_flat = facet_flat_segment([L1, z, L3]) is not None
            assert has_flat == circ.inside_exactly_one(z), z
            checked += 1
    assert checked > 1000


def test_boundary_unitary_triangle():
    nb = normal_boundary(Spectrum.from_values([1, 1j, -1]), 512)
    assert nb.closed and nb.contains_origin and not nb.flat_segments
    assert curve_hausdorff(nb.polyline, np.array([1, 1j, -1])) <= 1e-9


def test_boundary_two_eigenvalues_interval():
    nb = normal_boundary(Spectrum.from_values([1, 2]))
    assert nb.degenerate and nb.dim == 1
    assert nb.polyline.real.min() == pytest.approx(2 * math.sqrt(2) / 3, abs=1e-12)
    assert nb.polyline.real.max() == pytest.approx(1, abs=1e-12)


def test_boundary_flat_example_pieces():
    nb = normal_boundary(Spectrum.from_values([L1, L2, L3]), 2048)
    flats = [p for p in nb.pieces if isinstance(p, FlatSegment)]
    arcs = [p for p in nb.pieces if isinstance(p, ArcFragment)]
    assert len(flats) == 1 and nb.closed and not nb.multi_component
    assert {p.pair for p in arcs} >= {(0, 1), (0, 2)}
    contain, cover = hausdorff_cloud_to_curve(sample_cloud(np.diag([L1, L2, L3]), 10**6, 2), nb.polyline)
    assert contain <= 1e-6 and cover <= 5e-3


def test_boundary_singular_open_at_origin():
    nb = normal_boundary(Spectrum.from_values([0, 1, 1j]))
    assert not nb.closed and not nb.contains_origin
    nb = normal_boundary(Spectrum.from_values([0, 1, -1, 1j]))
    assert nb.closed and nb.contains_origin


def test_boundary_single_eigenvalue_and_errors():
    nb = normal_boundary(Spectrum.from_values([2j]))
    assert nb.polyline == pytest.approx([1j])
    with pytest.raises(ZeroSpectrum):
        normal_boundary(Spectrum.from_values([0]))
    with pytest.raises(EmptySpectrum):
        Spectrum.from_values([])


def test_boundary_tetrahedron_contains_cloud():
    s = Spectrum.from_values([1, 1j, -1, 2])
    nb = normal_boundary(s, 2048)
    assert nb.dim == 3 and nb.closed
    # samples thin out near the unit-circle contact points: coverage about 3e-2 at 10^6
    contain, cover = hausdorff_cloud_to_curve(sample_cloud(s.matrix(), 10**6, 4), nb.polyline)
    assert contain <= 1e-6 and cover <= 5e-2


def test_membership_examples():
    assert membership_normal(Spectrum.from_values([1, 1j, -1]), 0)
    assert not membership_normal(Spectrum.from_values([1, 2]), 0.5)
    s = Spectrum.from_values([L1, L2, L3])
    z = sample_cloud(s.matrix(), 10**4, 8).points
    assert membership_normal_many(s, z, 1e-7).all()
    assert not membership_normal(s, 0.99 * cmath.exp(2j))


@settings(max_examples=50, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(0.05, 5))
def test_segment_to_hyperbola_law(a, b, c, d, t):
    z = h_map((a + c * t * t, b + d * t * t, t * t))
    assert abs(z - (complex(a, b) / t + complex(c, d) * t)) <= 1e-12 * max(1, abs(z))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_arc_endpoints_unimodular(seed):
    lam, mu = crandn(np.random.default_rng(seed), 2)
    arc = hyperbolic_arc(lam, mu)
    p = arc.points(64)
    for e, want in zip(arc.endpoints, (lam, mu)):
        assert abs(abs(e) - 1) <= 1e-12 and abs(e - want / abs(want)) <= 1e-12
    assert abs(p[0] - arc.endpoints[0]) <= 1e-12 and abs(p[-1] - arc.endpoints[1]) <= 1e-12
    assert np.all(np.abs(p) <= 1 + 1e-12)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(3, 6))
def test_random_flat_segments_are_tangent(seed, m):
    rng = np.random.default_rng(seed)
    s = Spectrum.from_values(crandn(rng, m))
    nb = normal_boundary(s)
    assert not nb.multi_component
    lams = s.eigenvalues
    for seg in nb.flat_segments:
        d = (seg.z2 - seg.z1) / abs(seg.z2 - seg.z1)
        for z, (i, j) in zip((seg.z1, seg.z2), seg.tangent_arcs):
            assert _tangency(hyperbolic_arc(lams[i], lams[j]), z, d) <= 1e-8
