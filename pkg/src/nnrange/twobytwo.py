"""The 2x2 engine: ellipse family, classification, boundary conics, membership."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from shapely.geometry import LineString, Polygon
from shapely.ops import polygonize, unary_union

from .core import as_matrix, is_normal
from .errors import DimensionMismatch, NotNormalized, OutOfRange, WrongClass, ZeroMatrix
from .geometry import UnionResult, polygon_union_boundary, real_roots
from .shell import DWEllipsoid, ellipsoid_coeffs, exact_to_array, invariants_2x2, is_exact_matrix

NORMAL_RTOL = 1e-12
RATIO_RTOL = 1e-10
SINGULAR_RTOL = 1e-14

NORMAL_ARC = "NormalArc"
RANK_ONE = "RankOneCircles"
TWO_ARCS = "TwoEllipticArcs"
SAME_MODULUS = "EllipticalDiskSameModulus"
NEGATIVE_RATIO = "EllipticalDiskNegativeRatio"
GENERIC = "GenericDegree8"


def matrix_2x2(A) -> np.ndarray:
    M = exact_to_array(A) if is_exact_matrix(A) else as_matrix(A)
    if M.shape != (2, 2):
        raise DimensionMismatch("a 2x2 matrix is required")
    if not np.any(M):
        raise ZeroMatrix("F_N is empty for the zero matrix")
    return M


def singular_values_2x2(M: np.ndarray) -> tuple[float, float]:
    s = float(np.sum(np.abs(M) ** 2))
    d = abs(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])
    big = math.sqrt(max((s + math.sqrt(max(s * s - 4 * d * d, 0.0))) / 2, 0.0))
    return (d / big if big > 0 else 0.0), big


def eigenvalues_2x2(M: np.ndarray) -> tuple[complex, complex]:
    """Roots of z^2 - tr z + det with the cancellation-free branch first."""
    tr = complex(M[0, 0] + M[1, 1])
    det = complex(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])
    s = cmath.sqrt(tr * tr - 4 * det)
    if (tr.conjugate() * s).real < 0:
        s = -s
    l1 = (tr + s) / 2
    l2 = det / l1 if l1 != 0 else (tr - s) / 2
    return l1, l2


@dataclass(frozen=True)
class EllipseFamily:
    """P(x, y, t) = c0 + c1 t + c2 t^2 + c3 t^3 + c4 t^4 built from the shell quadric."""
    ellipsoid: DWEllipsoid
    sigma1: float
    sigma2: float

    def coefficients(self, x, y):
        a = [float(c) for c in self.ellipsoid.coeffs]
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        c0 = a[9] + 0 * x
        c1 = a[6] * x + a[7] * y
        c2 = a[0] * x * x + a[1] * y * y + a[3] * x * y + a[8]
        c3 = a[4] * x + a[5] * y
        c4 = a[2] + 0 * x
        return c0, c1, c2, c3, c4

    def evaluate(self, x, y, t):
        c = self.coefficients(x, y)
        t = np.asarray(t, dtype=float)
        return c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * c[4])))

    def scale(self, x, y, t):
        """Sum of the absolute values of the five terms, for relative checks."""
        c = self.coefficients(x, y)
        t = np.abs(np.asarray(t, dtype=float))
        return sum(np.abs(ck) * t ** k for k, ck in enumerate(c))


def ellipse_family(A) -> EllipseFamily:
    M = matrix_2x2(A)
    s1, s2 = singular_values_2x2(M)
    return EllipseFamily(ellipsoid_coeffs(A), s1, s2)


@dataclass(frozen=True)
class Conic:
    """qxx x^2 + qyy y^2 + qxy xy + qx x + qy y + q0."""
    qxx: float
    qyy: float
    qxy: float
    qx: float
    qy: float
    q0: float

    def __call__(self, x, y):
        return (self.qxx * x * x + self.qyy * y * y + self.qxy * x * y
                + self.qx * x + self.qy * y + self.q0)

    def at(self, z):
        z = np.asarray(z, dtype=complex)
        return self(z.real, z.imag)

    @property
    def discriminant(self) -> float:
        return self.qxy ** 2 - 4 * self.qxx * self.qyy

    @property
    def scale(self) -> float:
        return max(abs(self.qxx), abs(self.qyy), abs(self.qxy), abs(self.qx), abs(self.qy), abs(self.q0))

    def rotated(self, w: complex) -> "Conic":
        """The conic z -> F(w z)."""
        p, q = w.real, w.imag
        return Conic(
            self.qxx * p * p + self.qyy * q * q + self.qxy * p * q,
            self.qxx * q * q + self.qyy * p * p - self.qxy * p * q,
            2 * p * q * (self.qyy - self.qxx) + self.qxy * (p * p - q * q),
            self.qx * p + self.qy * q,
            -self.qx * q + self.qy * p,
            self.q0,
        )

    def as_tuple(self):
        return (self.qxx, self.qyy, self.qxy, self.qx, self.qy, self.q0)


def ellipse_at(fam: EllipseFamily, t: float) -> Conic:
    """E(t) as a conic in (x, y), i.e. P(x, y, t) / t^2 for fixed t."""
    lo, hi = fam.sigma1, fam.sigma2
    slack = 1e-12 * max(hi, 1.0)
    if not (t > 0 and lo - slack <= t <= hi + slack):
        raise OutOfRange(f"t = {t} is outside [{lo}, {hi}]")
    a = [float(c) for c in fam.ellipsoid.coeffs]
    return Conic(a[0], a[1], a[3], a[6] / t + a[4] * t, a[7] / t + a[5] * t,
                 a[8] + a[9] / (t * t) + a[2] * t * t)


def ellipse_center(A, t: float) -> complex:
    """Center of E(t) for a matrix with det A = 1."""
    tr, det, taa = invariants_2x2(A)
    tr, det, taa = complex(tr), complex(det), float(taa)
    if abs(det - 1) > 1e-10:
        raise NotNormalized("ellipse_center needs det A = 1")
    x = tr.real * (t + 1 / t) / (taa + 2)
    y = 0.0 if abs(taa - 2) <= 1e-12 else tr.imag * (t - 1 / t) / (taa - 2)
    return complex(x, y)


@dataclass(frozen=True)
class SymmetryAxis:
    direction: complex | None
    all_axes: bool = False


def symmetry_axis(A) -> SymmetryAxis:
    M = matrix_2x2(A)
    tr, det, taa = invariants_2x2(M)
    if abs(det) > SINGULAR_RTOL * taa:
        return SymmetryAxis(cmath.exp(0.5j * cmath.phase(det)))
    if abs(tr) > 1e-12 * math.sqrt(taa):
        return SymmetryAxis(tr / abs(tr))
    return SymmetryAxis(None, True)


@dataclass
class Classification2x2:
    case: str
    eigenvalues: tuple[complex, complex]
    closed: bool
    singular: bool
    notes: list[str] = field(default_factory=list)

    @property
    def elliptical(self) -> bool:
        return self.case in (SAME_MODULUS, NEGATIVE_RATIO)


def _same_modulus(l1, l2, floor) -> bool:
    m1, m2 = abs(l1), abs(l2)
    return abs(m1 - m2) <= RATIO_RTOL * max(m1, m2) + floor


def _negative_ratio(l1, l2, floor) -> bool:
    if abs(l1) <= floor or abs(l2) <= floor:
        return False
    r = l1 / l2
    return abs(r.imag) <= RATIO_RTOL * abs(r) and r.real < 0


def _frame(tr: complex, det: complex, taa: float):
    """Rotation w making det(wA) >= 0; the scale sqrt|det| (or ||A||_F if singular)."""
    if abs(det) > SINGULAR_RTOL * taa:
        return cmath.exp(-0.5j * cmath.phase(det)), math.sqrt(abs(det))
    w = tr.conjugate() / abs(tr) if abs(tr) > 1e-12 * math.sqrt(taa) else 1.0 + 0j
    return w, math.sqrt(taa)


def _collinear(tr, det, taa) -> bool:
    if abs(det) <= SINGULAR_RTOL * taa:
        return True
    w, s = _frame(tr, det, taa)
    t = w * tr / s
    return abs(t.imag) <= RATIO_RTOL * (abs(t) + 1)


def classify(A) -> Classification2x2:
    M = matrix_2x2(A)
    tr, det, taa = invariants_2x2(M)
    l1, l2 = eigenvalues_2x2(M)
    singular = abs(det) <= SINGULAR_RTOL * taa
    floor = SINGULAR_RTOL * math.sqrt(taa)
    closed = not singular
    notes: list[str] = []
    if is_normal(M, NORMAL_RTOL):
        case = NORMAL_ARC
        notes.append("normal: boundary is the hyperbolic arc through the two eigenvalue directions")
    elif _same_modulus(l1, l2, floor):
        case = SAME_MODULUS
        if singular:
            notes.append("nilpotent: open unit disk, boundary circle not attained")
        if _negative_ratio(l1, l2, floor):
            notes.append("overlap: eigenvalue ratio is also negative")
        if _collinear(tr, det, taa):
            notes.append("overlap: trace and square roots of det are collinear")
    elif _negative_ratio(l1, l2, floor):
        case = NEGATIVE_RATIO
    elif _collinear(tr, det, taa):
        case = RANK_ONE if singular else TWO_ARCS
        if singular:
            notes.append("rank one: circle part of the boundary is not attained")
    else:
        case = GENERIC
        notes.append("boundary lies on the degree-8 resultant curve")
    return Classification2x2(case, (l1, l2), closed, singular, notes)


# ---------------------------------------------------------------- conic pieces

@dataclass(frozen=True)
class HalfPlane:
    """Re(conj(normal) z) >= threshold when ``upper``, else <= threshold."""
    normal: complex
    threshold: float
    upper: bool

    def holds(self, z, tol: float = 0.0):
        v = (np.conj(self.normal) * np.asarray(z, dtype=complex)).real - self.threshold
        return v >= -tol if self.upper else v <= tol


@dataclass(frozen=True)
class ConicPiece:
    """An elliptic arc, given implicitly (``conic`` <= 0 inside) and by the
    parametrisation conj(w) * (center + rx cos(phi) + i ry sin(phi)),
    phi in [phi0, phi1]."""
    conic: Conic
    kind: str
    attained: bool
    halfplane: HalfPlane | None
    w: complex
    center: float
    rx: float
    ry: float
    phi0: float
    phi1: float

    def points(self, n: int) -> np.ndarray:
        phi = np.linspace(self.phi0, self.phi1, max(int(n), 2))
        zp = self.center + self.rx * np.cos(phi) + 1j * self.ry * np.sin(phi)
        return np.conj(self.w) * zp

    def start(self) -> complex:
        return complex(self.points(2)[0])

    def end(self) -> complex:
        return complex(self.points(2)[-1])


def _ellipse_conic(center: float, rx: float, ry: float, w: complex) -> Conic:
    """((x - c)/rx)^2 + (y/ry)^2 - 1 in the rotated frame, mapped back."""
    kx, ky = 1 / rx ** 2, 1 / ry ** 2
    return Conic(kx, ky, 0.0, -2 * center * kx, 0.0, center * center * kx - 1).rotated(w)


def boundary_two_arcs(A) -> list[ConicPiece]:
    """Boundary arcs for trace collinear with the square roots of det."""
    M = matrix_2x2(A)
    cls = classify(M)
    if cls.case not in (TWO_ARCS, RANK_ONE, SAME_MODULUS):
        raise WrongClass(f"{cls.case} does not have the two-arc form")
    tr, det, taa = invariants_2x2(M)
    singular = cls.singular
    w, _ = _frame(tr, det, taa)
    if not singular and (w * tr).real < 0:
        w = -w
    T = max((w * tr).real, 0.0)
    D = 0.0 if singular else abs(det)
    S = taa
    rd = math.sqrt(D)
    pieces: list[ConicPiece] = []

    # first arc: x^2 + k y^2 = 1 on x T >= 2 sqrt(D) (strict when singular)
    if T > 0:
        thr = 2 * rd / T
        if thr < 1 - 1e-12:
            k = (S - 2 * D) / (S - T * T + 2 * D)
            ry = 1 / math.sqrt(k)
            ph = math.acos(thr)
            pieces.append(ConicPiece(_ellipse_conic(0.0, 1.0, ry, w), "ellipse-arc", True,
                                     HalfPlane(np.conj(w), thr, True), w, 0.0, 1.0, ry, -ph, ph))

    # second arc: K (x - c)^2 + y^2 = rho^2 on x T <= 2 sqrt(D)
    K = (S + 2 * D) / (S - 2 * D)
    c = 2 * T * rd / (S + 2 * D)
    rho = math.sqrt((S - T * T + 2 * D) / (S + 2 * D))
    rx = rho / math.sqrt(K)
    conic = _ellipse_conic(c, rx, rho, w)
    kind = "circle-arc" if singular else "ellipse-arc"
    if T == 0 or (2 * rd / T - c) / rx >= 1 - 1e-12:
        pieces.append(ConicPiece(conic, "full-ellipse", not singular, None, w, c, rx, rho, 0.0, 2 * math.pi))
    else:
        thr = 2 * rd / T
        ph = math.acos(max(-1.0, (thr - c) / rx))
        pieces.append(ConicPiece(conic, kind, not singular, HalfPlane(np.conj(w), thr, False),
                                 w, c, rx, rho, ph, 2 * math.pi - ph))
    return pieces


def boundary_imag_tr(A) -> ConicPiece:
    """Closed elliptical disk when the eigenvalue ratio is negative."""
    M = matrix_2x2(A)
    if is_normal(M, NORMAL_RTOL):
        raise WrongClass("normal matrices have a hyperbolic-arc boundary")
    l1, l2 = eigenvalues_2x2(M)
    tr, det, taa = invariants_2x2(M)
    if not _negative_ratio(l1, l2, SINGULAR_RTOL * math.sqrt(taa)):
        raise WrongClass("the eigenvalue ratio is not negative")
    w = cmath.exp(-0.5j * cmath.phase(det))
    d = abs(det)
    T2 = abs(tr) ** 2 / d
    S = taa / d
    K = (S + 2) / (S - 2 - T2)
    rx = 1 / math.sqrt(K)
    return ConicPiece(_ellipse_conic(0.0, rx, 1.0, w), "full-ellipse", True, None,
                      w, 0.0, rx, 1.0, 0.0, 2 * math.pi)


# ---------------------------------------------------------------- membership

def membership_2x2(A, z, tol: float = 1e-9) -> bool:
    """z in F_N(A) iff P(Re z, Im z, t) has a root t in the singular-value range."""
    M = matrix_2x2(A)
    if is_normal(M, NORMAL_RTOL):
        from .normal import membership_normal
        from .shell import Spectrum
        return membership_normal(Spectrum.from_values(eigenvalues_2x2(M), rtol=1e-9), z, tol)
    fam = ellipse_family(M)
    z = complex(z)
    c = [float(v) for v in fam.coefficients(z.real, z.imag)]
    lo = max(fam.sigma1 - tol, tol)
    hi = fam.sigma2 + tol
    return bool(real_roots(c, lo, hi, tol))


def membership_2x2_many(A, zs, tol: float = 1e-9) -> np.ndarray:
    M = matrix_2x2(A)
    return np.array([membership_2x2(M, z, tol) for z in np.asarray(zs, dtype=complex).reshape(-1)])


# ---------------------------------------------------------------- boundary

@dataclass
class Boundary2x2:
    classification: Classification2x2
    pieces: list
    polyline: np.ndarray
    closed: bool
    attained: bool = True
    degenerate: bool = False
    multi_component: bool = False


def _polyline_from_pieces(pieces: list[ConicPiece], resolution: int) -> np.ndarray:
    spans = np.array([p.phi1 - p.phi0 for p in pieces])
    counts = np.maximum(2, np.round(resolution * spans / spans.sum()).astype(int))
    parts = [p.points(k)[:-1] for p, k in zip(pieces, counts)]
    return np.concatenate(parts)


def envelope_loops(A, samples: int = 1024) -> tuple[list[np.ndarray], complex]:
    """Envelope of the family E(t) in the frame where det = 1.

    Since d/dt (P / t^2) is affine in (x, y) there, every level t contributes
    the two points where E(t) meets a line. Levels are refined adaptively
    until neighbouring envelope points are about perimeter/samples apart.
    Returns closed loops (in the rotated frame) and the rotation w, so that
    original = conj(w) * point.
    """
    M = matrix_2x2(A)
    tr, det, taa = invariants_2x2(M)
    w = cmath.exp(-0.5j * cmath.phase(det))
    d = abs(det)
    T = w * tr / math.sqrt(d)
    S = taa / d
    a1, a2 = S + 2, S - 2
    a5, a6 = -2 * T.real, -2 * T.imag
    a9 = abs(T) ** 2 - S
    _, s2 = singular_values_2x2(M / math.sqrt(d))
    L = math.log(s2)

    def level_points(u):
        t = np.exp(u)
        al = a5 * (1 - 1 / t ** 2)
        be = a6 * (1 + 1 / t ** 2)
        ga = -2 * (t - 1 / t ** 3)
        nn = np.hypot(al, be)
        nn = np.where(nn > 0, nn, 1.0)
        px, py = ga * al / nn ** 2, ga * be / nn ** 2
        dx, dy = -be / nn, al / nn
        bx = a5 * (t + 1 / t)
        by = a6 * (t - 1 / t)
        q0 = t ** 2 + 1 / t ** 2 + a9
        A2 = a1 * dx ** 2 + a2 * dy ** 2
        B = 2 * a1 * px * dx + 2 * a2 * py * dy + bx * dx + by * dy
        C = a1 * px ** 2 + a2 * py ** 2 + bx * px + by * py + q0
        disc = B * B - 4 * A2 * C
        ok = disc >= -1e-10 * (B * B + np.abs(4 * A2 * C))
        # the extreme levels shrink E(t) to a point
        ok |= np.abs(np.abs(u) - L) <= 1e-15 * max(L, 1.0)
        root = np.sqrt(np.maximum(disc, 0.0))
        zp = (px + (-B + root) / (2 * A2) * dx) + 1j * (py + (-B + root) / (2 * A2) * dy)
        zm = (px + (-B - root) / (2 * A2) * dx) + 1j * (py + (-B - root) / (2 * A2) * dy)
        return zp, zm, ok

    u = L * np.cos(np.pi * np.arange(65) / 64)[::-1]
    u[0], u[-1] = -L, L
    zp, zm, ok = level_points(u)
    gap = np.maximum(np.abs(np.diff(zp)), np.abs(np.diff(zm)))
    h = 2 * float(np.sum(gap[ok[1:] & ok[:-1]])) / max(samples, 8)
    for _ in range(60):
        gap = np.maximum(np.abs(np.diff(zp)), np.abs(np.diff(zm)))
        both = ok[1:] & ok[:-1]
        split = ((gap > h) & both) | (ok[1:] != ok[:-1])
        split &= np.diff(u) > 1e-14 * max(L, 1.0)
        if not split.any() or len(u) > 64 * samples:
            break
        um = 0.5 * (u[:-1][split] + u[1:][split])
        zpm, zmm, okm = level_points(um)
        order = np.argsort(np.concatenate([u, um]), kind="stable")
        u = np.concatenate([u, um])[order]
        zp = np.concatenate([zp, zpm])[order]
        zm = np.concatenate([zm, zmm])[order]
        ok = np.concatenate([ok, okm])[order]
    loops = []
    k, n = 0, len(u)
    while k < n:
        if not ok[k]:
            k += 1
            continue
        j = k
        while j + 1 < n and ok[j + 1]:
            j += 1
        if j > k:
            loops.append(np.concatenate([zp[k:j + 1], zm[k:j + 1][::-1]]))
        k = j + 1
    return loops, w


def _generic_boundary(M: np.ndarray, resolution: int) -> UnionResult:
    loops, w = envelope_loops(M, max(64, resolution))
    faces = []
    for loop in loops:
        ring = list(zip(loop.real, loop.imag))
        ring.append(ring[0])
        faces.extend(polygonize(unary_union(LineString(ring))))
    res = polygon_union_boundary([np.asarray(f.exterior.coords) for f in faces])
    res.ring = np.conj(w) * (res.ring[:, 0] + 1j * res.ring[:, 1]) if len(res.ring) else np.zeros(0, complex)
    return res


def boundary_2x2(A, resolution: int = 2048) -> Boundary2x2:
    M = matrix_2x2(A)
    cls = classify(M)
    if cls.case == NORMAL_ARC:
        from .normal import normal_boundary
        from .shell import Spectrum
        nb = normal_boundary(Spectrum.from_values(cls.eigenvalues, rtol=1e-9), resolution)
        return Boundary2x2(cls, nb.pieces, nb.polyline, nb.closed, nb.closed, nb.degenerate, nb.multi_component)
    if cls.case in (TWO_ARCS, RANK_ONE, SAME_MODULUS):
        pieces = boundary_two_arcs(M)
        return Boundary2x2(cls, pieces, _polyline_from_pieces(pieces, resolution), cls.closed,
                           all(p.attained for p in pieces))
    if cls.case == NEGATIVE_RATIO:
        piece = boundary_imag_tr(M)
        return Boundary2x2(cls, [piece], _polyline_from_pieces([piece], resolution), cls.closed, True)
    res = _generic_boundary(M, resolution)
    return Boundary2x2(cls, [], res.ring, cls.closed, True, res.degenerate, res.multi_component)
