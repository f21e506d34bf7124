"""Root isolation, 3D convex hulls and planar polygon unions."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np
import shapely
from shapely.geometry import LineString, MultiLineString, Polygon
from shapely.geometry.polygon import orient
from shapely.ops import linemerge, unary_union

AFFINE_RTOL = 1e-10


# ---------------------------------------------------------------- roots

class Root(NamedTuple):
    value: float
    multiple: bool


def _horner(c, t):
    acc = 0.0
    for a in reversed(c):
        acc = acc * t + a
    return acc


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a):
    c = 134217729.0 * a
    h = c - (c - a)
    return h, a - h


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, al * bl - (((p - ah * bh) - al * bh) - ah * bl)


def _horner_comp(c, t):
    """Compensated Horner: as accurate as Horner in twice the working precision."""
    s = c[-1]
    r = 0.0
    for a in reversed(c[:-1]):
        p, pe = _two_prod(s, t)
        s, se = _two_sum(p, a)
        r = r * t + (pe + se)
    return s + r


def _abs_scale(c, t):
    at = abs(t)
    acc = 0.0
    for a in reversed(c):
        acc = acc * at + abs(a)
    return acc


def _trim(c):
    c = [float(a) for a in c]
    big = max((abs(a) for a in c), default=0.0)
    while len(c) > 1 and abs(c[-1]) <= 1e-300 + 0.0 * big:
        c.pop()
    return c


def _bisect(c, a, b, fa):
    """Root of c on [a, b] given a sign change; bisection then Newton."""
    dc = [k * c[k] for k in range(1, len(c))]
    for _ in range(200):
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        fm = _horner(c, m)
        if abs(fm) <= 1e-14 * _abs_scale(c, m):
            # plain Horner sign is unreliable this close to a root
            fm = _horner_comp(c, m)
        if fm == 0.0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
        if b - a <= 4e-16 * max(1.0, abs(m)):
            break
    x = 0.5 * (a + b)
    # Newton with an accurate residual removes the rounding of plain Horner
    # near clustered roots
    for _ in range(3):
        d = _horner(dc, x)
        if d == 0.0:
            break
        nx = x - _horner_comp(c, x) / d
        if not (a <= nx <= b) or nx == x:
            break
        x = nx
    return x


def real_roots(coeffs, lo: float, hi: float, tol: float = 1e-12) -> list[Root]:
    """Real roots of sum coeffs[k] t^k on [lo, hi].

    The interval is cut at the real roots of the derivative (found
    recursively) so the polynomial is monotone on every piece. Sign changes
    are bracketed and bisected. A critical point where |p| <= tol * scale is
    reported as a multiple root, which catches tangential contact.
    """
    c = _trim(coeffs)
    if lo > hi:
        return []
    deg = len(c) - 1
    if deg <= 0:
        return []
    if deg == 1:
        r = -c[0] / c[1]
        return [Root(r, False)] if lo <= r <= hi else []
    dc = [k * c[k] for k in range(1, deg + 1)]
    crit = [r.value for r in real_roots(dc, lo, hi, tol)]
    knots = [lo] + [x for x in crit if lo < x < hi] + [hi]
    vals = [_horner(c, x) for x in knots]
    found: list[Root] = []
    for x, v in zip(knots, vals):
        if abs(v) <= tol * max(_abs_scale(c, x), 1e-300):
            inner = lo < x < hi and x in crit
            found.append(Root(x, inner))
    for (a, fa), (b, fb) in zip(zip(knots, vals), zip(knots[1:], vals[1:])):
        if (fa < 0 < fb) or (fb < 0 < fa):
            found.append(Root(_bisect(c, a, b, fa), False))
    found.sort()
    merged: list[Root] = []
    for r in found:
        if merged and abs(r.value - merged[-1].value) <= 1e-10 * max(1.0, abs(r.value)):
            prev = merged[-1]
            merged[-1] = Root(prev.value if prev.multiple else r.value, prev.multiple or r.multiple)
        else:
            merged.append(r)
    return merged


def quartic_real_roots(coeffs, interval, tol: float = 1e-12) -> list[Root]:
    """Real roots in [lo, hi] of c0 + c1 t + ... + c4 t^4 (ascending order)."""
    c = [float(a) for a in coeffs]
    if len(c) != 5:
        raise ValueError("a quartic needs five coefficients")
    if c[4] != 0.0 and c[4] != 1.0:
        c = [a / c[4] for a in c]
    lo, hi = interval
    return real_roots(c, float(lo), float(hi), tol)


# ---------------------------------------------------------------- hulls

@dataclass(frozen=True)
class HullFacet:
    indices: tuple[int, int, int]
    normal: np.ndarray
    offset: float


@dataclass
class Hull:
    """Convex hull of a 3D point set.

    For dim 3 the facets are triangles with outward unit normals. For lower
    dimensions the affine span is kept: ``origin`` plus the orthonormal rows
    of ``basis``; dim 2 also carries a fan triangulation and ``plane``.
    """
    points: np.ndarray
    dim: int
    vertices: list[int]
    facets: list[HullFacet]
    edges: list[tuple[int, int]]
    origin: np.ndarray
    basis: np.ndarray
    plane: tuple[np.ndarray, float] | None = None
    polygon: list[int] = field(default_factory=list)


def affine_frame(points: np.ndarray, rtol: float = AFFINE_RTOL):
    """(dim, centroid, orthonormal basis rows of the span, complement rows)."""
    P = np.asarray(points, dtype=float)
    c = P.mean(axis=0)
    if len(P) == 1:
        return 0, c, np.zeros((0, 3)), np.eye(3)
    _, s, vt = np.linalg.svd(P - c)
    top = s[0] if len(s) else 0.0
    scale = max(top, 1e-300)
    dim = int(np.sum(s > rtol * scale)) if top > 0 else 0
    return dim, c, vt[:dim], vt[dim:]


def affine_dimension(points, rtol: float = AFFINE_RTOL) -> int:
    return affine_frame(np.asarray(points, dtype=float), rtol)[0]


def _sub(p, q):
    return (p[0] - q[0], p[1] - q[1], p[2] - q[2])


def _cross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def _dot(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def _orient(a, b, c, d):
    """Sign-exact det[b-a, c-a, d-a] on Fraction coordinates."""
    return _dot(_cross(_sub(b, a), _sub(c, a)), _sub(d, a))


def _hull2d_exact(pts2, idx):
    """Counter-clockwise extreme points (monotone chain, exact Fractions)."""
    order = sorted(idx, key=lambda i: pts2[i])
    if len(order) <= 2:
        return order

    def turn(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[int] = []
    for i in order:
        while len(lower) >= 2 and turn(pts2[lower[-2]], pts2[lower[-1]], pts2[i]) <= 0:
            lower.pop()
        lower.append(i)
    upper: list[int] = []
    for i in reversed(order):
        while len(upper) >= 2 and turn(pts2[upper[-2]], pts2[upper[-1]], pts2[i]) <= 0:
            upper.pop()
        upper.append(i)
    return lower[:-1] + upper[:-1]


def _facet(P, tri) -> HullFacet:
    a, b, c = (P[i] for i in tri)
    n = np.cross(b - a, c - a)
    n = n / np.linalg.norm(n)
    return HullFacet(tuple(int(i) for i in tri), n, float(np.mean([n @ a, n @ b, n @ c])))


def _fan(poly):
    """Fan triangulation from the smallest index, keeping orientation."""
    k = poly.index(min(poly))
    p = poly[k:] + poly[:k]
    return [(p[0], p[i], p[i + 1]) for i in range(1, len(p) - 1)]


def _ring_edges(poly):
    return [tuple(sorted((poly[i], poly[(i + 1) % len(poly)]))) for i in range(len(poly))]


def convex_hull_3d(points) -> Hull:
    """Exact combinatorial convex hull with lower-dimensional fallbacks.

    Orientation tests run on the exact rational values of the float inputs,
    so coplanar configurations (concyclic spectra on the paraboloid) are
    decided without rounding. Coplanar triangles are merged into polygon
    facets and re-triangulated canonically, which makes the output
    independent of the insertion history.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if P.shape[1] != 3 or len(P) < 1:
        raise ValueError("expected a nonempty list of 3-vectors")
    keys = [tuple(p) for p in P]
    first: dict[tuple, int] = {}
    for i, k in enumerate(keys):
        first.setdefault(k, i)
    uniq = sorted(first.values(), key=lambda i: keys[i])
    dim, origin, basis, normals = affine_frame(P[uniq])

    if dim == 0:
        return Hull(P, 0, [uniq[0]], [], [], P[uniq[0]].copy(), basis)
    if dim == 1:
        d = basis[0]
        proj = [(float(P[i] @ d), i) for i in uniq]
        lo, hi = min(proj)[1], max(proj)[1]
        a, b = sorted((lo, hi))
        return Hull(P, 1, [a, b], [], [(a, b)], origin, basis)

    F = {i: tuple(Fraction(float(x)) for x in P[i]) for i in uniq}
    if dim == 2:
        eta = normals[0].copy()
        nz = np.flatnonzero(np.abs(eta) > 1e-12)
        if eta[2] < -1e-12 or (abs(eta[2]) <= 1e-12 and eta[nz[0]] < 0):
            eta = -eta
        drop = int(np.argmax(np.abs(eta)))
        keep = [k for k in range(3) if k != drop]
        pts2 = {i: (F[i][keep[0]], F[i][keep[1]]) for i in uniq}
        poly = _hull2d_exact(pts2, uniq)
        # orient counter-clockwise when seen from the side eta points to
        sgn = 1 if (drop == 0 and eta[0] > 0) or (drop == 1 and eta[1] < 0) or (drop == 2 and eta[2] > 0) else -1
        if sgn < 0:
            poly = poly[::-1]
        b = float(np.mean([eta @ P[i] for i in poly]))
        facets = [HullFacet(t, eta, b) for t in _fan(poly)]
        return Hull(P, 2, sorted(poly), facets, sorted(_ring_edges(poly)), origin, basis,
                    plane=(eta, b), polygon=poly)

    # dim 3: incremental hull, faces stored so that (b-a)x(c-a) points outward
    order = list(uniq)
    a, b = order[0], order[1]
    c = next(i for i in order[2:] if any(x != 0 for x in _cross(_sub(F[b], F[a]), _sub(F[i], F[a]))))
    d = next(i for i in order if i not in (a, b, c) and _orient(F[a], F[b], F[c], F[i]) != 0)
    if _orient(F[a], F[b], F[c], F[d]) > 0:
        b, c = c, b
    faces = {(a, b, c), (a, d, b), (b, d, c), (c, d, a)}
    for p in order:
        if p in (a, b, c, d):
            continue
        visible = [f for f in faces if _orient(F[f[0]], F[f[1]], F[f[2]], F[p]) > 0]
        if not visible:
            continue
        directed = set()
        for f in visible:
            directed.update({(f[0], f[1]), (f[1], f[2]), (f[2], f[0])})
        horizon = [(u, v) for (u, v) in directed if (v, u) not in directed]
        faces.difference_update(visible)
        faces.update((u, v, p) for (u, v) in horizon)

    # merge coplanar neighbours into polygon facets
    flist = sorted(faces)
    parent = list(range(len(flist)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    nrm = [_cross(_sub(F[f[1]], F[f[0]]), _sub(F[f[2]], F[f[0]])) for f in flist]
    for i, f in enumerate(flist):
        for j in range(i + 1, len(flist)):
            g = flist[j]
            if all(_orient(F[f[0]], F[f[1]], F[f[2]], F[q]) == 0 for q in g) and _dot(nrm[i], nrm[j]) > 0:
                parent[find(j)] = find(i)
    groups: dict[int, list[int]] = {}
    for i in range(len(flist)):
        groups.setdefault(find(i), []).append(i)

    facets: list[HullFacet] = []
    edges: set[tuple[int, int]] = set()
    for members in groups.values():
        verts = sorted({v for m in members for v in flist[m]})
        n = nrm[members[0]]
        drop = max(range(3), key=lambda k: abs(n[k]))
        keep = [k for k in range(3) if k != drop]
        pts2 = {i: (F[i][keep[0]], F[i][keep[1]]) for i in verts}
        poly = _hull2d_exact(pts2, verts)
        # the projected ccw order matches the outward normal iff the dropped
        # component's sign agrees with the cyclic order of the kept axes
        s = n[drop] if drop != 1 else -n[drop]
        if s < 0:
            poly = poly[::-1]
        facets.extend(_facet(P, t) for t in _fan(poly))
        edges.update(_ring_edges(poly))
    facets.sort(key=lambda f: f.indices)
    vertices = sorted({i for f in facets for i in f.indices})
    return Hull(P, 3, vertices, facets, sorted(edges), origin, basis)


# ---------------------------------------------------------------- unions

@dataclass
class UnionResult:
    """Outer boundary of a planar union, counter-clockwise, not repeated.

    ``degenerate`` means every input had zero area and ``ring`` is then the
    merged polyline (open, ``closed`` false). ``multi_component`` is set
    when the union fell apart; the largest piece is returned.
    """
    ring: np.ndarray
    closed: bool
    area: float
    degenerate: bool = False
    multi_component: bool = False
    geometry: object = None


def polygon_union_boundary(polys, lines=(), grid_size: float | None = None) -> UnionResult:
    """Union of polygons given as (k, 2) vertex arrays or complex vectors.

    Optional ``lines`` are open polylines used only when no polygon has
    positive area.
    """
    shapes = []
    for p in polys:
        xy = _xy(p)
        if len(xy) < 3:
            continue
        g = Polygon(xy)
        if not g.is_valid:
            g = shapely.make_valid(g)
        if g.area > 0:
            shapes.append(g)
    if not shapes:
        segs = [LineString(_xy(l)) for l in list(polys) + list(lines) if len(_xy(l)) >= 2]
        merged = linemerge(unary_union(segs)) if segs else LineString()
        if isinstance(merged, MultiLineString):
            longest = max(merged.geoms, key=lambda g: g.length)
            multi = True
        else:
            longest, multi = merged, False
        return UnionResult(np.asarray(longest.coords), False, 0.0, True, multi, merged)
    try:
        u = shapely.unary_union(shapes, grid_size=grid_size)
    except shapely.errors.GEOSException:
        diam = max(s.length for s in shapes)
        u = shapely.unary_union(shapes, grid_size=1e-9 * diam)
    polys_out = [g for g in getattr(u, "geoms", [u]) if isinstance(g, Polygon) and g.area > 0]
    multi = len(polys_out) > 1
    main = orient(max(polys_out, key=lambda g: g.area), 1.0)
    ring = np.asarray(main.exterior.coords)[:-1]
    return UnionResult(ring, True, main.area, False, multi, u)


def _xy(p) -> np.ndarray:
    a = np.asarray(p)
    if np.iscomplexobj(a):
        return np.column_stack([a.real, a.imag])
    return np.asarray(a, dtype=float).reshape(-1, 2)
