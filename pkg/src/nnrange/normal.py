"""Normal matrices: hyperbolic arcs, critical levels, flat segments, boundary assembly."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from shapely.geometry import LineString, Point

from .errors import (BothZero, DegenerateArc, DegenerateTriple, EqualEigenvalues, OutOfRange,
                     ZeroSpectrum)
from .geometry import polygon_union_boundary
from .shell import Spectrum, _in_hull_lp, lift, normal_shell

ZERO_RTOL = 1e-12


def h_safe(V: np.ndarray) -> np.ndarray:
    """h on rows of V with the limit value 0 at the apex v = 0."""
    V = np.atleast_2d(V)
    out = np.zeros(len(V), dtype=complex)
    pos = V[:, 2] > 0
    out[pos] = (V[pos, 0] + 1j * V[pos, 1]) / np.sqrt(V[pos, 2])
    return out


# ---------------------------------------------------------------- arcs

@dataclass(frozen=True)
class HyperbolicArc:
    """F_N of diag(lambda, mu): an origin-centred hyperbola arc from
    lambda/|lambda| to mu/|mu|, or a segment in the degenerate cases."""
    lam: complex
    mu: complex
    theta: float
    phi: float
    vertex: complex
    endpoints: tuple
    degenerate: str | None = None

    def points(self, n: int = 256) -> np.ndarray:
        """Image of the lifted segment, lambda-end first."""
        s = np.linspace(0.0, 1.0, max(int(n), 2))
        return h_safe(_lifted_segment(self.lam, self.mu, s))

    def tangent(self, z: complex) -> complex:
        """Unit tangent direction of the arc at its point nearest to z."""
        s = _nearest_parameter(self, z)
        p, q = lift(self.lam), lift(self.mu)
        v = p + s * (q - p)
        d = q - p
        dz = complex(d[0], d[1]) / math.sqrt(v[2]) - complex(v[0], v[1]) * d[2] / (2 * v[2] ** 1.5)
        return dz / abs(dz)

    def distance(self, z: complex) -> float:
        s = _nearest_parameter(self, z)
        return abs(h_safe(_lifted_segment(self.lam, self.mu, np.array([s])))[0] - z)


def _lifted_segment(lam, mu, s) -> np.ndarray:
    p, q = lift(lam), lift(mu)
    return p[None, :] + np.asarray(s, dtype=float)[:, None] * (q - p)[None, :]


def _nearest_parameter(arc: HyperbolicArc, z: complex) -> float:
    s = np.linspace(0.0, 1.0, 2049)
    pts = h_safe(_lifted_segment(arc.lam, arc.mu, s))
    k = int(np.argmin(np.abs(pts - z)))
    lo, hi = s[max(k - 1, 0)], s[min(k + 1, len(s) - 1)]
    for _ in range(80):
        m1, m2 = lo + (hi - lo) / 3, hi - (hi - lo) / 3
        d1, d2 = (abs(h_safe(_lifted_segment(arc.lam, arc.mu, np.array([m])))[0] - z) for m in (m1, m2))
        if d1 < d2:
            hi = m2
        else:
            lo = m1
    return 0.5 * (lo + hi)


def hyperbolic_arc(lam, mu) -> HyperbolicArc:
    lam, mu = complex(lam), complex(mu)
    if lam == 0 and mu == 0:
        raise BothZero("both eigenvalues are zero")
    if lam == mu:
        raise EqualEigenvalues("an arc needs two distinct eigenvalues")
    if lam == 0 or mu == 0:
        nz = mu if lam == 0 else lam
        u = nz / abs(nz)
        ends = (None, u) if lam == 0 else (u, None)
        return HyperbolicArc(lam, mu, cmath.phase(nz), 0.0, 0j, ends, "ray")
    theta = 0.5 * (cmath.phase(lam) + cmath.phase(mu))
    phi = 0.5 * (cmath.phase(mu) - cmath.phase(lam))
    a, b = abs(lam), abs(mu)
    # branch-free form of 2 e^{i theta} cos(phi) sqrt|lam mu| / (|lam| + |mu|)
    vertex = (lam / a + mu / b) * math.sqrt(a * b) / (a + b)
    r = mu / lam
    deg = None
    if abs(r.imag) <= 1e-14 * abs(r):
        deg = "segment" if r.real < 0 else "ray"
    return HyperbolicArc(lam, mu, theta, phi, vertex, (lam / a, mu / b), deg)


def arc_point(arc: HyperbolicArc, t: float) -> complex:
    """Point of the arc at level t of the det-normalized pair, t in [sigma1, sigma2]."""
    if arc.lam == 0 or arc.mu == 0:
        raise DegenerateArc("arcs through a zero eigenvalue are segments")
    rot = cmath.exp(1j * arc.theta)
    g = math.sqrt(abs(arc.lam * arc.mu))
    lp, mp = arc.lam / (rot * g), arc.mu / (rot * g)
    s1, s2 = sorted((abs(lp), abs(mp)))
    if not (s1 * (1 - 1e-12) <= t <= s2 * (1 + 1e-12)):
        raise OutOfRange(f"t = {t} outside [{s1}, {s2}]")
    tr = lp + mp
    taa = abs(lp) ** 2 + abs(mp) ** 2
    x = tr.real * (t + 1 / t) / (taa + 2)
    # equal moduli: the only level is t = 1 and E(1) is the whole chord; its
    # center (the midpoint) is taken, with y = 0 by continuity
    y = 0.0 if s2 - s1 <= 1e-12 * s2 else tr.imag * (t - 1 / t) / (taa - 2)
    return rot * complex(x, y)


# ---------------------------------------------------------------- flat parts

@dataclass(frozen=True)
class CriticalLevel:
    kind: str  # "value" | "none" | "indeterminate"
    alpha: float | None
    eta: np.ndarray
    b: float


def critical_level(l1, l2, l3) -> CriticalLevel:
    """Level alpha = -D1/D0 at which h restricted to the plane of the three
    lifted points has critical points."""
    P = lift(np.array([l1, l2, l3], dtype=complex))
    eta = np.cross(P[1] - P[0], P[2] - P[0])
    scale = max(np.max(np.abs(P)), 1e-300)
    ne = np.linalg.norm(eta)
    if ne <= 1e-14 * scale ** 2:
        raise DegenerateTriple("lifted points are collinear")
    D0 = float(np.linalg.det(np.column_stack([P[:, 0], P[:, 1], np.ones(3)])))
    D1 = float(np.linalg.det(P))
    eta_u = eta / ne
    b = D1 / ne
    if abs(b) <= 1e-12 * scale:
        return CriticalLevel("indeterminate", None, eta_u, 0.0)
    if abs(D0) <= 1e-12 * ne:
        return CriticalLevel("none", None, eta_u, b)
    return CriticalLevel("value", -D1 / D0, eta_u, b)


@dataclass(frozen=True)
class FlatSegment:
    z1: complex
    z2: complex
    alpha: float
    facet: int
    tangent_arcs: tuple  # two eigenvalue-index pairs, one per endpoint


def _flat_cut(lams, alpha):
    """Endpoints of {v3 = alpha} on the lifted triangle, with their edges."""
    P = lift(np.asarray(lams, dtype=complex))
    cuts = []
    for i, j in ((0, 1), (0, 2), (1, 2)):
        vi, vj = P[i, 2], P[j, 2]
        if (vi - alpha) * (vj - alpha) < 0:
            s = (alpha - vi) / (vj - vi)
            cuts.append(((i, j), s, P[i] + s * (P[j] - P[i])))
    return cuts


def facet_flat_segment(lams, facet: int = 0, index=(0, 1, 2)) -> FlatSegment | None:
    """Flat boundary segment contributed by the triangle of three lifted
    eigenvalues, when its critical level lies strictly inside their |lambda|^2 range."""
    lams = [complex(z) for z in lams]
    try:
        cl = critical_level(*lams)
    except DegenerateTriple:
        return None
    if cl.kind != "value":
        return None
    mods = [abs(z) ** 2 for z in lams]
    lo, hi = min(mods), max(mods)
    a = cl.alpha
    if not (lo + 1e-12 * hi < a < hi - 1e-12 * hi):
        return None
    cuts = _flat_cut(lams, a)
    if len(cuts) != 2:
        return None
    z = h_safe(np.array([c[2] for c in cuts]))
    pairs = tuple(tuple(sorted((index[i], index[j]))) for (i, j), _, _ in cuts)
    return FlatSegment(complex(z[0]), complex(z[1]), float(a), facet, pairs)


@dataclass(frozen=True)
class FlatRegionCircles:
    """The loci alpha(l1, z, l3) = |l1|^2 and = |l3|^2, as (center, radius)."""
    circles: tuple

    def inside_exactly_one(self, z) -> bool:
        ins = [abs(complex(z) - c) < r for c, r in self.circles]
        return ins[0] != ins[1]


def flat_region_circles(l1, l3) -> FlatRegionCircles:
    l1, l3 = complex(l1), complex(l3)
    a1, b1, a3, b3 = l1.real, l1.imag, l3.real, l3.imag
    K = a1 * b3 - b1 * a3
    if abs(K) <= 1e-14 * max(abs(l1), abs(l3)) ** 2:
        raise DegenerateTriple("l1 and l3 are collinear with the origin")
    out = []
    for c in (abs(l1) ** 2, abs(l3) ** 2):
        r1, r3 = abs(l1) ** 2 + c, abs(l3) ** 2 + c
        P = b1 * r3 - r1 * b3
        Q = a1 * r3 - r1 * a3
        center = complex(-P / (2 * K), Q / (2 * K))
        out.append((center, math.sqrt(max(abs(center) ** 2 - c, 0.0))))
    return FlatRegionCircles(tuple(out))


# ---------------------------------------------------------------- boundary

@dataclass
class ArcFragment:
    arc: HyperbolicArc
    pair: tuple
    points: np.ndarray


@dataclass
class NormalBoundary:
    pieces: list
    closed: bool
    contains_origin: bool
    polyline: np.ndarray
    flat_segments: list = field(default_factory=list)
    degenerate: bool = False
    multi_component: bool = False
    dim: int = 0


def _contains_origin(lams: np.ndarray) -> bool:
    nz = lams[np.abs(lams) > ZERO_RTOL * np.max(np.abs(lams))]
    if len(nz) == 0:
        return False
    pts = np.column_stack([nz.real, nz.imag])
    return _in_hull_lp(np.zeros(2), pts, 1e-12)


def normal_boundary(s: Spectrum, resolution: int = 256) -> NormalBoundary:
    """Boundary of F_N for a normal matrix with spectrum s.

    Every triangle of the hull boundary is mapped through h (split at its
    critical level when that level cuts it, so h is injective on each part),
    the images are united, and the outer ring is matched back to arcs and
    flat segments.
    """
    lams = np.array(s.eigenvalues, dtype=complex)
    big = float(np.max(np.abs(lams)))
    if big == 0:
        raise ZeroSpectrum("F_N of the zero matrix is empty")
    zero = np.abs(lams) <= ZERO_RTOL * big
    lams = np.where(zero, 0, lams)
    singular = bool(np.any(zero))
    origin_in = _contains_origin(lams)
    closed = not (singular and not origin_in)
    shell = normal_shell(Spectrum(tuple(complex(z) for z in lams), s.multiplicities))
    hull = shell.hull
    P = lift(lams)
    n_edge = max(int(resolution), 8)

    if hull.dim == 0:
        z = lams[hull.vertices[0]]
        pt = np.array([z / abs(z)])
        return NormalBoundary([pt], closed, origin_in, pt, degenerate=True, dim=0)
    if hull.dim == 1:
        i, j = hull.edges[0]
        arc = hyperbolic_arc(lams[i], lams[j])
        pts = arc.points(n_edge)
        return NormalBoundary([ArcFragment(arc, (i, j), pts)], closed, origin_in, pts,
                              degenerate=True, dim=1)

    tris = [f.indices for f in hull.facets]
    # flat candidates per triangle
    flats: dict[int, FlatSegment] = {}
    for k, t in enumerate(tris):
        fs = facet_flat_segment(lams[list(t)], k, t)
        if fs is not None:
            flats[k] = fs
    # shared edge samples, including every cut parameter
    svals: dict[tuple, set] = {}
    for t in tris:
        for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
            svals.setdefault((min(a, b), max(a, b)), set(np.linspace(0, 1, n_edge).tolist()))
    for k, fs in flats.items():
        t = tris[k]
        for (i, j), sv, _ in _flat_cut(lams[list(t)], fs.alpha):
            a, b = t[i], t[j]
            key = (min(a, b), max(a, b))
            svals[key].add(sv if a < b else 1.0 - sv)
    edge_v: dict[tuple, np.ndarray] = {}
    edge_z: dict[tuple, np.ndarray] = {}
    labels: dict[tuple, set] = {}
    for (a, b), ss in svals.items():
        sarr = np.array(sorted(ss))
        V = P[a][None, :] + sarr[:, None] * (P[b] - P[a])[None, :]
        Z = h_safe(V)
        edge_v[(a, b)], edge_z[(a, b)] = V, Z
        for z in Z:
            labels.setdefault((z.real, z.imag), set()).add(("arc", (a, b)))

    def directed(a, b):
        if a < b:
            return edge_v[(a, b)], edge_z[(a, b)]
        return edge_v[(b, a)][::-1], edge_z[(b, a)][::-1]

    polys, lines = [], []
    for k, t in enumerate(tris):
        vs, zs = [], []
        for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
            v, z = directed(a, b)
            vs.append(v[:-1])
            zs.append(z[:-1])
        V = np.concatenate(vs)
        Z = np.concatenate(zs)
        lines.append(np.concatenate([Z, Z[:1]]))
        if k in flats:
            fs = flats[k]
            for z in (fs.z1, fs.z2):
                labels.setdefault((z.real, z.imag), set()).add(("flat", k))
            eps = 1e-12 * max(fs.alpha, 1.0)
            for mask in (V[:, 2] <= fs.alpha + eps, V[:, 2] >= fs.alpha - eps):
                polys.append(_cyclic_run(Z, mask))
        else:
            polys.append(Z)
    res = polygon_union_boundary(polys, lines)
    if res.degenerate:
        return _interval_boundary(lams, hull, closed, origin_in, n_edge)
    ring = res.ring[:, 0] + 1j * res.ring[:, 1]
    curves = {("arc", key): LineString(np.column_stack([z.real, z.imag])) for key, z in edge_z.items()}
    pieces, on_ring = _match_pieces(ring, labels, curves, lams, flats)
    return NormalBoundary(pieces, closed, origin_in, ring, on_ring, False, res.multi_component, hull.dim)


def _interval_boundary(lams, hull, closed, origin_in, n):
    """All images collinear: F_N is a segment of a line through the origin."""
    zs = np.concatenate([hyperbolic_arc(lams[i], lams[j]).points(n) for i, j in hull.edges])
    u = zs[np.argmax(np.abs(zs))]
    u = u / abs(u)
    proj = (zs * np.conj(u)).real
    line = u * np.linspace(proj.min(), proj.max(), n)
    pieces = [ArcFragment(hyperbolic_arc(lams[i], lams[j]), (i, j), hyperbolic_arc(lams[i], lams[j]).points(n))
              for i, j in hull.edges]
    return NormalBoundary(pieces, closed, origin_in, line, [], True, False, hull.dim)


def _cyclic_run(Z: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """The contiguous cyclic run of Z where mask holds."""
    if mask.all():
        return Z
    k = int(np.flatnonzero(~mask)[0])
    Zr, mr = np.roll(Z, -k), np.roll(mask, -k)
    return Zr[mr]


def _match_pieces(ring, labels, curves, lams, flats):
    """Split the traced ring into runs lying on one arc or one flat segment.

    Ring vertices that are sample points carry the labels of the curves they
    were sampled from. An edge keeps the current label while it stays on that
    curve, which keeps overlapping arcs from alternating.
    """
    n = len(ring)
    diam = float(np.max(np.abs(ring[:, None] - ring[None, :: max(1, n // 64)]))) if n else 1.0
    tol = 1e-9 * max(diam, 1e-300)
    labs = [labels.get((z.real, z.imag), set()) for z in ring]

    def on_curve(lab, z):
        return curves[lab].distance(Point(z.real, z.imag)) <= tol

    edge_lab = []
    cur = None
    for k in range(n):
        a, b = labs[k], labs[(k + 1) % n]
        za, zb = ring[k], ring[(k + 1) % n]
        common = a & b
        flat = sorted(l for l in common if l[0] == "flat")
        if flat and za != zb:
            lab = flat[0]
        elif cur is not None and cur[0] == "arc" and (cur in a or on_curve(cur, za)) and (cur in b or on_curve(cur, zb)):
            lab = cur
        else:
            arcs = sorted(l for l in common if l[0] == "arc")
            if arcs:
                lab = arcs[0]
            else:
                mid = 0.5 * (za + zb)
                lab = min(curves, key=lambda l: curves[l].distance(Point(mid.real, mid.imag)))
        edge_lab.append(lab)
        cur = lab
    runs = []
    start = 0
    for k in range(1, n + 1):
        if k == n or edge_lab[k] != edge_lab[start]:
            runs.append((edge_lab[start], start, k))
            start = k
    if len(runs) > 1 and runs[0][0] == runs[-1][0]:
        lab, s0, _ = runs.pop()
        runs[0] = (lab, s0 - n, runs[0][2])
    pieces, on_ring = [], []
    for lab, s0, s1 in runs:
        pts = ring[np.arange(s0, s1 + 1) % n]
        if lab[0] == "flat":
            fs = flats[lab[1]]
            pieces.append(fs)
            on_ring.append(fs)
        else:
            i, j = lab[1]
            pieces.append(ArcFragment(hyperbolic_arc(lams[i], lams[j]), (i, j), pts))
    return pieces, on_ring


# ---------------------------------------------------------------- membership

def _sublevel(A: float, B: float, C: float, lo: float, hi: float) -> list[tuple[float, float]]:
    """{t in [lo, hi] : A t^2 + B t + C <= 0} as a list of intervals."""
    if lo > hi:
        return []
    scale = abs(A) * max(abs(lo), abs(hi)) ** 2 + abs(B) * max(abs(lo), abs(hi)) + abs(C)
    if abs(A) * max(abs(lo), abs(hi)) ** 2 <= 1e-15 * max(scale, 1e-300):
        A = 0.0
    if A == 0.0:
        if B == 0.0:
            return [(lo, hi)] if C <= 0 else []
        r = -C / B
        iv = (lo, min(hi, r)) if B > 0 else (max(lo, r), hi)
        return [iv] if iv[0] <= iv[1] else []
    disc = B * B - 4 * A * C
    if disc < 0:
        return [(lo, hi)] if A < 0 else []
    q = -0.5 * (B + math.copysign(math.sqrt(disc), B))
    r1, r2 = sorted((q / A, C / q if q != 0 else q / A))
    if A > 0:
        iv = (max(lo, r1), min(hi, r2))
        return [iv] if iv[0] <= iv[1] else []
    out = []
    if lo <= min(hi, r1):
        out.append((lo, min(hi, r1)))
    if max(lo, r2) <= hi:
        out.append((max(lo, r2), hi))
    return out


def _intersect(xs, ys):
    out = []
    for a, b in xs:
        for c, d in ys:
            lo, hi = max(a, c), min(b, d)
            if lo <= hi:
                out.append((lo, hi))
    return out


def membership_normal(s: Spectrum, z, tol: float = 1e-9, shell=None) -> bool:
    """z in F_N iff (x t, y t, t^2) lies in the shell for some t > 0.

    Each shell constraint is quadratic in t, so the feasible t form a
    finite union of intervals computed in closed form.
    """
    shell = shell or normal_shell(s)
    z = complex(z)
    mods = np.abs(np.array(s.eigenvalues))
    lo = max(tol, float(mods.min()) - tol)
    hi = float(mods.max()) + tol
    feas = [(lo, hi)]
    cons = [(eta, b) for eta, b in shell.inequalities]
    for eta, b in shell.equalities:
        cons.append((eta, b))
        cons.append((-eta, -b))
    for eta, b in cons:
        A = eta[2]
        B = eta[0] * z.real + eta[1] * z.imag
        feas = [iv for f in feas for iv in _intersect([f], _sublevel(A, B, -b - tol, f[0], f[1]))]
        if not feas:
            return False
    return True


def membership_normal_many(s: Spectrum, zs, tol: float = 1e-9) -> np.ndarray:
    shell = normal_shell(s)
    return np.array([membership_normal(s, z, tol, shell) for z in np.asarray(zs, dtype=complex).reshape(-1)])
