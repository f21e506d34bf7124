"""Bivariate polynomials and the Sylvester resultant of P and dP/dt."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DegreeOverflow

MAX_DEGREE = 16
FLOAT_TRIM = 1e-12


@dataclass(frozen=True)
class BivariatePoly:
    """Sparse real polynomial sum c[(i, j)] x^i y^j.

    ``exact`` polynomials hold Fractions and are never trimmed; float ones
    hold Python floats.
    """
    terms: dict
    exact: bool = False

    def __post_init__(self):
        for (i, j) in self.terms:
            if i + j > MAX_DEGREE:
                raise DegreeOverflow(f"monomial x^{i} y^{j} exceeds degree {MAX_DEGREE}")

    @classmethod
    def const(cls, c, exact: bool = False) -> "BivariatePoly":
        return cls({(0, 0): c} if c != 0 else {}, exact)

    @classmethod
    def linear(cls, cx, cy, c0=0, exact: bool = False) -> "BivariatePoly":
        return cls({k: v for k, v in {(1, 0): cx, (0, 1): cy, (0, 0): c0}.items() if v != 0}, exact)

    @property
    def degree(self) -> int:
        return max((i + j for i, j in self.terms), default=-1)

    def __add__(self, other: "BivariatePoly") -> "BivariatePoly":
        return poly_add(self, other)

    def __sub__(self, other: "BivariatePoly") -> "BivariatePoly":
        return poly_add(self, other.scale(-1))

    def __mul__(self, other: "BivariatePoly") -> "BivariatePoly":
        return poly_mul(self, other)

    def scale(self, c) -> "BivariatePoly":
        return BivariatePoly({k: v * c for k, v in self.terms.items() if v * c != 0}, self.exact)

    def to_float(self) -> "BivariatePoly":
        return BivariatePoly({k: float(v) for k, v in self.terms.items()}, False)

    def max_coeff(self) -> float:
        return max((abs(float(v)) for v in self.terms.values()), default=0.0)

    def trimmed(self, rel: float = FLOAT_TRIM) -> "BivariatePoly":
        if self.exact:
            return self
        big = self.max_coeff()
        return BivariatePoly({k: v for k, v in self.terms.items() if abs(v) > rel * big}, False)

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.zeros(np.broadcast(x, y).shape)
        for (i, j), c in self.terms.items():
            out = out + float(c) * x ** i * y ** j
        return out


def _check(p: BivariatePoly, q: BivariatePoly):
    if p.exact != q.exact:
        raise TypeError("cannot mix exact and float polynomials")


def poly_add(p: BivariatePoly, q: BivariatePoly) -> BivariatePoly:
    _check(p, q)
    out = dict(p.terms)
    for k, v in q.terms.items():
        s = out.get(k, 0) + v
        if s == 0:
            out.pop(k, None)
        else:
            out[k] = s
    return BivariatePoly(out, p.exact)


def poly_mul(p: BivariatePoly, q: BivariatePoly) -> BivariatePoly:
    _check(p, q)
    out: dict = {}
    for (i, j), a in p.terms.items():
        for (k, l), b in q.terms.items():
            key = (i + k, j + l)
            if key[0] + key[1] > MAX_DEGREE:
                raise DegreeOverflow("product exceeds the supported degree")
            out[key] = out.get(key, 0) + a * b
    return BivariatePoly({k: v for k, v in out.items() if v != 0}, p.exact)


def restrict_x(p: BivariatePoly, x0) -> list:
    """Coefficients (ascending in y) of p(x0, y); exact when p and x0 are."""
    if p.exact:
        x0 = Fraction(x0)
    deg = max((j for _, j in p.terms), default=0)
    out = [Fraction(0) if p.exact else 0.0 for _ in range(deg + 1)]
    for (i, j), c in p.terms.items():
        out[j] += c * x0 ** i
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def family_polys(ell) -> list[BivariatePoly]:
    """c0..c4 of the quartic P(x, y, t) = sum c_k t^k for a shell quadric."""
    a = ell.coeffs
    ex = ell.exact
    c0 = BivariatePoly.const(a[9], ex)
    c1 = BivariatePoly.linear(a[6], a[7], exact=ex)
    c2 = BivariatePoly({k: v for k, v in {(2, 0): a[0], (0, 2): a[1], (1, 1): a[3], (0, 0): a[8]}.items()
                        if v != 0}, ex)
    c3 = BivariatePoly.linear(a[4], a[5], exact=ex)
    c4 = BivariatePoly.const(a[2], ex)
    return [c0, c1, c2, c3, c4]


def sylvester_matrix(ell) -> list[list[BivariatePoly]]:
    """7x7 Sylvester matrix of P and dP/dt in t, indexed [row][column].

    Columns 0-2 hold shifted copies of (c0..c4), columns 3-6 shifted copies
    of (c1, 2c2, 3c3, 4c4).
    """
    c = family_polys(ell)
    zero = BivariatePoly({}, ell.exact)
    d = [c[1], c[2].scale(2), c[3].scale(3), c[4].scale(4)]
    cols = []
    for s in range(3):
        cols.append([zero] * s + c + [zero] * (2 - s))
    for s in range(4):
        cols.append([zero] * s + d + [zero] * (3 - s))
    return [[cols[j][i] for j in range(7)] for i in range(7)]


def determinant(M: list[list[BivariatePoly]]) -> BivariatePoly:
    """Division-free determinant by Laplace expansion along the last column,
    memoised over the surviving row sets."""
    n = len(M)
    exact = M[0][0].exact
    memo: dict = {}

    def det(rows: tuple, k: int) -> BivariatePoly:
        # minor built from `rows` and columns 0..k-1 (len(rows) == k)
        if k == 1:
            return M[rows[0]][0]
        key = rows
        if key in memo:
            return memo[key]
        acc = BivariatePoly({}, exact)
        for pos, r in enumerate(rows):
            e = M[r][k - 1]
            if not e.terms:
                continue
            sub = det(rows[:pos] + rows[pos + 1:], k - 1)
            if not sub.terms:
                continue
            term = e * sub
            sign = -1 if (pos + k - 1) % 2 else 1
            acc = acc + (term if sign > 0 else term.scale(-1))
        memo[key] = acc
        return acc

    return det(tuple(range(n)), n)


def sylvester_resultant(fam) -> BivariatePoly:
    """R(x, y) = det of the Sylvester matrix; its zero set contains the
    boundaries of F_N(A) and F_N(-A)."""
    ell = getattr(fam, "ellipsoid", fam)
    R = determinant(sylvester_matrix(ell))
    return R if R.exact else R.trimmed()


def boundary_residual(R: BivariatePoly, points) -> float:
    """max |R(x, y)| / max|coefficient| over the given complex points."""
    z = np.asarray(points, dtype=complex).reshape(-1)
    if z.size == 0:
        return 0.0
    Rf = R.to_float() if R.exact else R
    return float(np.max(np.abs(Rf(z.real, z.imag))) / max(Rf.max_coeff(), 1e-300))


def to_json(R: BivariatePoly) -> dict:
    terms = []
    for (i, j) in sorted(R.terms):
        c = R.terms[(i, j)]
        if R.exact:
            terms.append({"i": i, "j": j, "num": str(c.numerator), "den": str(c.denominator)})
        else:
            terms.append({"i": i, "j": j, "num": f"{c:.17g}", "den": "1"})
    return {"degree": R.degree, "exact": R.exact, "terms": terms}
