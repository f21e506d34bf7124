"""Davis-Wielandt shell: quadric for 2x2 matrices, lifted polytope for normal ones."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from .core import as_matrix, is_normal
from .errors import DimensionMismatch, EmptySpectrum
from .geometry import Hull, affine_dimension, convex_hull_3d

SPECTRUM_RTOL = 1e-12


@dataclass(frozen=True)
class GaussQ:
    """Gaussian rational re + i*im with Fraction parts."""
    re: Fraction
    im: Fraction = Fraction(0)

    @classmethod
    def coerce(cls, z) -> "GaussQ":
        if isinstance(z, GaussQ):
            return z
        if isinstance(z, complex):
            return cls(Fraction(z.real), Fraction(z.imag))
        return cls(Fraction(z))

    @property
    def real(self):
        return self.re

    @property
    def imag(self):
        return self.im

    def __add__(self, o):
        o = GaussQ.coerce(o)
        return GaussQ(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-GaussQ.coerce(o))

    def __rsub__(self, o):
        return GaussQ.coerce(o) - self

    def __mul__(self, o):
        o = GaussQ.coerce(o)
        return GaussQ(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conjugate(self):
        return GaussQ(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __complex__(self):
        return complex(float(self.re), float(self.im))


def _abs2(z):
    return z.abs2() if isinstance(z, GaussQ) else abs(z) ** 2


def invariants_2x2(A):
    """(tr A, det A, tr A*A) as complex floats, or GaussQ for exact input."""
    if is_exact_matrix(A):
        a, b = A[0]
        c, d = A[1]
        return a + d, a * d - b * c, _abs2(a) + _abs2(b) + _abs2(c) + _abs2(d)
    M = as_matrix(A)
    if M.shape != (2, 2):
        raise DimensionMismatch("a 2x2 matrix is required")
    a, b, c, d = M[0, 0], M[0, 1], M[1, 0], M[1, 1]
    return complex(a + d), complex(a * d - b * c), float(np.sum(np.abs(M) ** 2))


def is_exact_matrix(A) -> bool:
    return isinstance(A, (list, tuple)) and len(A) > 0 and isinstance(A[0][0], GaussQ)


def exact_to_array(A) -> np.ndarray:
    return np.array([[complex(z) for z in row] for row in A], dtype=complex)


@dataclass(frozen=True)
class DWEllipsoid:
    """Quadric a1 v1^2 + a2 v2^2 + a3 v3^2 + a4 v1 v2 + a5 v1 v3 + a6 v2 v3
    + a7 v1 + a8 v2 + a9 v3 + a10 = 0 satisfied by the shell of a 2x2 matrix.
    Coefficients are floats, or Fractions when built from exact entries."""
    coeffs: tuple

    def a(self, k: int):
        return self.coeffs[k - 1]

    @property
    def exact(self) -> bool:
        return isinstance(self.coeffs[0], Fraction)

    @property
    def scale(self) -> float:
        return max(max(abs(float(c)) for c in self.coeffs), 1.0)

    def residual(self, V) -> np.ndarray:
        V = np.atleast_2d(np.asarray(V, dtype=float))
        a = [float(c) for c in self.coeffs]
        v1, v2, v3 = V[:, 0], V[:, 1], V[:, 2]
        return (a[0] * v1 ** 2 + a[1] * v2 ** 2 + a[2] * v3 ** 2 + a[3] * v1 * v2
                + a[4] * v1 * v3 + a[5] * v2 * v3 + a[6] * v1 + a[7] * v2 + a[8] * v3 + a[9])


def ellipsoid_coeffs(A) -> DWEllipsoid:
    tr, det, taa = invariants_2x2(A)
    dtc = det * tr.conjugate()
    one = Fraction(1) if isinstance(tr, GaussQ) else 1.0
    coeffs = (
        taa + 2 * det.real,
        taa - 2 * det.real,
        one,
        4 * det.imag,
        -2 * tr.real,
        -2 * tr.imag,
        -2 * dtc.real,
        -2 * dtc.imag,
        _abs2(tr) - taa,
        _abs2(det),
    )
    if not isinstance(tr, GaussQ):
        coeffs = tuple(float(c) for c in coeffs)
    return DWEllipsoid(coeffs)


# ---------------------------------------------------------------- normal case

@dataclass(frozen=True)
class Spectrum:
    eigenvalues: tuple[complex, ...]
    multiplicities: tuple[int, ...]

    def __post_init__(self):
        if len(self.eigenvalues) == 0:
            raise EmptySpectrum("a spectrum needs at least one eigenvalue")
        if len(self.multiplicities) != len(self.eigenvalues):
            raise ValueError("one multiplicity per eigenvalue")

    @classmethod
    def from_values(cls, values, multiplicities=None, rtol: float = SPECTRUM_RTOL) -> "Spectrum":
        """Merge values closer than rtol * max|lambda| and add up multiplicities."""
        vals = [complex(v) for v in values]
        if not vals:
            raise EmptySpectrum("a spectrum needs at least one eigenvalue")
        mult = list(multiplicities) if multiplicities is not None else [1] * len(vals)
        scale = max(abs(v) for v in vals)
        out: list[complex] = []
        cnt: list[int] = []
        for v, k in zip(vals, mult):
            for j, w in enumerate(out):
                if abs(v - w) <= rtol * scale:
                    cnt[j] += int(k)
                    break
            else:
                out.append(v)
                cnt.append(int(k))
        return cls(tuple(out), tuple(cnt))

    @classmethod
    def from_matrix(cls, A) -> "Spectrum":
        M = as_matrix(A)
        if not is_normal(M, 1e-10):
            raise ValueError("matrix is not normal")
        return cls.from_values(np.linalg.eigvals(M), rtol=1e-9)

    @property
    def m(self) -> int:
        return len(self.eigenvalues)

    @property
    def n(self) -> int:
        return sum(self.multiplicities)

    def matrix(self) -> np.ndarray:
        return np.diag([v for v, k in zip(self.eigenvalues, self.multiplicities) for _ in range(k)])


def lift(z) -> np.ndarray:
    """Paraboloid lift lambda -> (Re, Im, |lambda|^2); vectorised over arrays."""
    z = np.asarray(z, dtype=complex)
    return np.stack([z.real, z.imag, z.real ** 2 + z.imag ** 2], axis=-1)


@dataclass
class DWPolytope:
    """Convex hull of the lifted eigenvalues.

    Membership is described by ``equalities`` (rows (eta, b) with eta.v = b on
    the affine span) and ``inequalities`` (eta.v <= b), all with unit eta.
    """
    spectrum: Spectrum
    hull: Hull
    equalities: list[tuple[np.ndarray, float]]
    inequalities: list[tuple[np.ndarray, float]]

    @property
    def vertices(self) -> np.ndarray:
        return self.hull.points

    @property
    def dim(self) -> int:
        return self.hull.dim

    @property
    def facets(self):
        return self.hull.facets

    @property
    def edges(self):
        return self.hull.edges

    @property
    def plane(self):
        return self.hull.plane


def normal_shell(s: Spectrum) -> DWPolytope:
    pts = lift(np.array(s.eigenvalues))
    hull = convex_hull_3d(pts)
    eq: list[tuple[np.ndarray, float]] = []
    ineq: list[tuple[np.ndarray, float]] = []
    if hull.dim == 3:
        ineq = [(f.normal, f.offset) for f in hull.facets]
    elif hull.dim == 2:
        eta, b = hull.plane
        eq = [(eta, b)]
        poly = hull.polygon
        cen = pts[poly].mean(axis=0)
        for i in range(len(poly)):
            p, q = pts[poly[i]], pts[poly[(i + 1) % len(poly)]]
            n = np.cross(q - p, eta)
            n /= np.linalg.norm(n)
            if n @ (cen - p) > 0:
                n = -n
            ineq.append((n, float(n @ p)))
    elif hull.dim == 1:
        i, j = hull.edges[0]
        d = pts[j] - pts[i]
        d /= np.linalg.norm(d)
        _, _, vt = np.linalg.svd(d.reshape(1, 3))
        eq = [(vt[k], float(vt[k] @ pts[i])) for k in (1, 2)]
        ineq = [(d, float(d @ pts[j])), (-d, float(-d @ pts[i]))]
    else:
        p = pts[hull.vertices[0]]
        eq = [(e, float(e @ p)) for e in np.eye(3)]
    return DWPolytope(s, hull, eq, ineq)


def shell_dimension(s: Spectrum) -> int:
    return affine_dimension(lift(np.array(s.eigenvalues)))


def polytope_contains(p: DWPolytope, v, tol: float) -> bool:
    v = np.asarray(v, dtype=float)
    for eta, b in p.equalities:
        if abs(eta @ v - b) > tol:
            return False
    return all(eta @ v - b <= tol for eta, b in p.inequalities)


def jnr_commuting(diagonal_tuples, tol: float = 1e-9) -> np.ndarray:
    """Extreme points of the joint numerical range of commuting Hermitian
    diagonal matrices, one row per extreme point."""
    D = np.asarray(diagonal_tuples, dtype=float)
    if D.ndim != 2:
        raise ValueError("expected m lists of equal length n")
    pts = D.T
    uniq: list[np.ndarray] = []
    for q in pts:
        if not any(np.max(np.abs(q - u)) <= tol for u in uniq):
            uniq.append(q)
    keep = []
    for k, q in enumerate(uniq):
        others = [u for j, u in enumerate(uniq) if j != k]
        if not others or not _in_hull_lp(q, np.array(others), tol):
            keep.append(q)
    return np.array(keep)


def _in_hull_lp(q: np.ndarray, pts: np.ndarray, tol: float) -> bool:
    """Feasibility of q = sum w_i p_i, w >= 0, sum w = 1."""
    k = len(pts)
    A_eq = np.vstack([pts.T, np.ones((1, k))])
    b_eq = np.concatenate([q, [1.0]])
    res = linprog(np.zeros(k), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * k, method="highs",
                  options={"primal_feasibility_tolerance": max(tol, 1e-9)})
    return res.status == 0
