from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import crandn
from nnrange.core import g_values, sample_unit_vectors
from nnrange.errors import DimensionMismatch
from nnrange.shell import (GaussQ, Spectrum, ellipsoid_coeffs, jnr_commuting, lift, normal_shell,
                           polytope_contains, shell_dimension)
from nnrange.shell import _in_hull_lp


def test_ellipsoid_rank_one_projection():
    ell = ellipsoid_coeffs([[1, 0], [0, 0]])
    assert ell.coeffs == pytest.approx((1, 1, 1, 0, -2, 0, 0, 0, 0, 0))
    X = sample_unit_vectors(2, 1000, 3)
    assert np.abs(ell.residual(g_values([[1, 0], [0, 0]], X))).max() <= 1e-12


def test_ellipsoid_zero_matrix():
    assert ellipsoid_coeffs(np.zeros((2, 2))).coeffs == (0, 0, 1, 0, 0, 0, 0, 0, 0, 0)


def test_ellipsoid_unit_determinant_example():
    A = np.array([[2 + 2j, 1], [0, 1 / (2 + 2j)]])
    ell = ellipsoid_coeffs(A)
    assert ell.a(10) == pytest.approx(1, abs=1e-15)
    assert ell.a(3) == 1
    X = sample_unit_vectors(2, 1000, 4)
    assert np.abs(ell.residual(g_values(A, X))).max() <= 1e-9 * ell.scale


def test_ellipsoid_exact_matches_float():
    q = Fraction
    A = [[GaussQ(q(2), q(2)), GaussQ(q(1))], [GaussQ(q(0)), GaussQ(q(1, 4), q(-1, 4))]]
    ex = ellipsoid_coeffs(A)
    fl = ellipsoid_coeffs(np.array([[2 + 2j, 1], [0, 0.25 - 0.25j]]))
    assert ex.exact and not fl.exact
    assert [float(c) for c in ex.coeffs] == pytest.approx(fl.coeffs, abs=1e-14)
    assert ex.a(10) == 1


def test_ellipsoid_dimension_check():
    with pytest.raises(DimensionMismatch):
        ellipsoid_coeffs(np.eye(3))


def test_shell_unitary_triangle():
    p = normal_shell(Spectrum.from_values([1, 1j, -1]))
    assert p.dim == 2
    assert sorted(map(tuple, p.vertices)) == sorted([(1, 0, 1), (0, 1, 1), (-1, 0, 1)])
    eta, b = p.plane
    assert np.allclose(eta, [0, 0, 1]) and b == pytest.approx(1)


def test_shell_segment():
    p = normal_shell(Spectrum.from_values([1, 2]))
    assert p.dim == 1
    assert sorted(map(tuple, p.vertices)) == [(1, 0, 1), (2, 0, 4)]


def test_shell_flat_example_triangle():
    s3 = math.sqrt(3)
    p = normal_shell(Spectrum.from_values([complex(s3, s3), 3 + 4j, 10]))
    assert p.dim == 2
    want = sorted([(s3, s3, 6), (3, 4, 25), (10, 0, 100)])
    assert np.allclose(sorted(map(tuple, p.vertices)), want)


@pytest.mark.parametrize("values, dim", [([5], 0), ([1, 2], 1), ([1, 2, 3], 2), ([1, 1j, -1, 2], 3),
                                         ([1, 1j, -1, -1j], 2)])
def test_shell_dimension(values, dim):
    assert shell_dimension(Spectrum.from_values(values)) == dim


def test_tetrahedron_facets():
    p = normal_shell(Spectrum.from_values([1, 1j, -1, 2]))
    assert p.dim == 3 and len(p.facets) == 4 and len(p.edges) == 6


def test_multiplicities_ignored():
    a = normal_shell(Spectrum.from_values([1, 1j, -1], [3, 1, 2]))
    b = normal_shell(Spectrum.from_values([1, 1j, -1]))
    assert np.array_equal(a.vertices, b.vertices)


def test_jnr_commuting_examples():
    assert sorted(jnr_commuting([[3, 1, 2]]).ravel().tolist()) == [1, 3]
    assert sorted(map(tuple, jnr_commuting([[1, 0], [0, 1]]))) == [(0, 1), (1, 0)]
    lifted = lift(np.array([1, 1j, -1]))
    pts = jnr_commuting(lifted.T.tolist())
    assert sorted(map(tuple, pts)) == sorted(map(tuple, lifted))


def test_jnr_drops_duplicates_and_interior():
    pts = jnr_commuting([[0, 1, 0, 0.25, 1], [0, 0, 1, 0.25, 0]])
    assert sorted(map(tuple, pts)) == [(0, 0), (0, 1), (1, 0)]


def test_polytope_contains_examples():
    tri = normal_shell(Spectrum.from_values([1, 1j, -1]))
    assert polytope_contains(tri, (0, 1 / 3, 1), 1e-12)
    assert not polytope_contains(tri, (0, 1 / 3, 1.5), 1e-12)
    seg = normal_shell(Spectrum.from_values([1, 2]))
    assert polytope_contains(seg, (1.5, 0, 2.5), 1e-12)
    assert not polytope_contains(seg, (1.5, 0.1, 2.5), 1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_random_shells(seed, m):
    rng = np.random.default_rng(seed)
    ev = crandn(rng, m)
    s = Spectrum.from_values(ev)
    p = normal_shell(s)
    V = p.vertices
    # vertices on the paraboloid and all extreme
    assert np.allclose(V[:, 0] ** 2 + V[:, 1] ** 2, V[:, 2], rtol=1e-10, atol=1e-12)
    for k in range(len(V)):
        others = np.delete(V, k, axis=0)
        if len(others):
            assert not _in_hull_lp(V[k], others, 1e-9)
    # facets are triangles of lifted eigenvalues with every vertex inside
    for f in p.facets:
        assert len(f.indices) == 3
        assert np.all(V @ f.normal - f.offset <= 1e-10 * max(1, abs(f.offset)))
    # shell points of the diagonal matrix are contained
    X = sample_unit_vectors(m, 200, seed)
    G = g_values(np.diag(ev), X)
    assert all(polytope_contains(p, v, 1e-9) for v in G)
