from __future__ import annotations

import numpy as np
import shapely
from shapely.geometry import LinearRing, LineString, Polygon


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def haar_unitary(rng, n):
    q, r = np.linalg.qr(crandn(rng, n, n))
    d = np.diag(r)
    return q * (d / np.abs(d))


def det_normalize(M):
    det = np.linalg.det(M)
    return M * np.exp(-0.5j * np.angle(det)) / np.sqrt(abs(det))


def curve_hausdorff(z, w, closed=True):
    """Symmetric Hausdorff distance between two polylines, exact point-to-segment
    distances from the vertices of each to the other."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    make = LinearRing if closed else LineString
    cz = make(np.column_stack([z.real, z.imag]))
    cw = make(np.column_stack([w.real, w.imag]))
    d1 = shapely.distance(cw, shapely.points(z.real, z.imag)).max()
    d2 = shapely.distance(cz, shapely.points(w.real, w.imag)).max()
    return float(max(d1, d2))


def convexity_defect(z, stride=None):
    """Largest distance outside the region of a midpoint of two boundary points."""
    z = np.asarray(z, dtype=complex)
    if stride is None:
        stride = max(1, len(z) // 400)
    region = Polygon(np.column_stack([z.real, z.imag]))
    shapely.prepare(region)
    s = z[::stride]
    i, j = np.triu_indices(len(s), 1)
    mid = 0.5 * (s[i] + s[j])
    outside = ~shapely.contains_xy(region, mid.real, mid.imag)
    if not outside.any():
        return 0.0
    m = mid[outside]
    return float(shapely.distance(region, shapely.points(m.real, m.imag)).max())


def turning_angles(z):
    """Absolute turning angle in degrees at every vertex of a closed polyline."""
    z = np.asarray(z, dtype=complex)
    d = np.diff(np.concatenate([z, z[:1]]))
    d = d[np.abs(d) > 0]
    return np.abs(np.angle(np.roll(d, -1) / d, deg=True))
