"""Monte-Carlo ground truth: sampled F_N clouds and cloud-vs-curve metrics."""
from __future__ import annotations

import io
import os
from dataclasses import dataclass

import numpy as np
import shapely
from scipy.spatial import ConvexHull, QhullError, cKDTree
from shapely.geometry import LineString, Polygon

from .core import SAMPLE_BLOCK, as_matrix, f_n_values, sample_unit_vectors
from .errors import ZeroMatrix


@dataclass(frozen=True)
class SampleCloud:
    matrix: str
    seed: int
    count: int
    points: np.ndarray
    rejected: int


def describe(A: np.ndarray) -> str:
    return ";".join(",".join(f"{z.real:.17g}{z.imag:+.17g}j" for z in row) for row in A)


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("NNR_THREADS", "1")))
    except ValueError:
        return 1


def sample_cloud(A, count: int, seed: int = 42) -> SampleCloud:
    """f_N at `count` uniform unit vectors; kernel hits are dropped and counted.

    Work is split in sampler blocks; NNR_THREADS workers may evaluate them in
    parallel and the result does not depend on the worker count.
    """
    M = as_matrix(A)
    if not np.any(M):
        raise ZeroMatrix("F_N is empty for the zero matrix")
    n = M.shape[0]
    X = sample_unit_vectors(n, count, seed)
    starts = list(range(0, count, SAMPLE_BLOCK))

    def work(s):
        return f_n_values(M, X[s:s + SAMPLE_BLOCK])

    workers = thread_count()
    if workers > 1 and len(starts) > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(work, starts))
    else:
        parts = [work(s) for s in starts]
    pts = np.concatenate([p[0] for p in parts])
    return SampleCloud(describe(M), int(seed), int(count), pts, int(count - len(pts)))


def _points(cloud) -> np.ndarray:
    pts = cloud.points if isinstance(cloud, SampleCloud) else cloud
    return np.asarray(pts, dtype=complex).reshape(-1)


def directional_extremes(cloud, directions: int) -> np.ndarray:
    """For each of `directions` evenly spaced unit vectors d, the cloud
    point maximizing Re(conj(d) z)."""
    pts = _points(cloud)
    if len(pts) > 64:
        # maxima of linear functionals are attained at hull vertices
        try:
            hull = ConvexHull(np.column_stack([pts.real, pts.imag]))
            pts = pts[np.sort(hull.vertices)]
        except QhullError:
            pass
    d = np.exp(2j * np.pi * np.arange(directions) / directions)
    out = np.empty(directions, dtype=complex)
    for k in range(0, directions, 64):
        proj = (np.conj(d[k:k + 64])[:, None] * pts[None, :]).real
        out[k:k + 64] = pts[np.argmax(proj, axis=1)]
    return out


def _densify(z: np.ndarray, closed: bool, step: float) -> np.ndarray:
    pts = np.concatenate([z, z[:1]]) if closed and len(z) > 1 else z
    out = [pts[:1]]
    for a, b in zip(pts[:-1], pts[1:]):
        k = max(1, int(np.ceil(abs(b - a) / step)))
        out.append(a + (b - a) * np.arange(1, k + 1) / k)
    return np.concatenate(out)


def hausdorff_cloud_to_curve(cloud, polyline, closed: bool | None = None) -> tuple[float, float]:
    """(containment, coverage): the largest distance from a cloud point to the
    region bounded by the polyline (or to the curve itself when it encloses
    no area), and the largest distance from the polyline to the cloud."""
    pts = _points(cloud)
    z = np.asarray(polyline, dtype=complex).reshape(-1)
    xy = np.column_stack([z.real, z.imag])
    region = None
    if closed is not False and len(z) >= 3:
        poly = Polygon(xy)
        if poly.area > 0:
            region = poly if poly.is_valid else shapely.make_valid(poly)
    if region is None:
        region = LineString(xy) if len(z) >= 2 else shapely.points(xy[0])
    shapely.prepare(region)
    inside = shapely.contains_xy(region, pts.real, pts.imag) if region.area > 0 else np.zeros(len(pts), bool)
    out = pts[~inside]
    contain = 0.0
    if len(out):
        contain = float(np.max(shapely.distance(region, shapely.points(out.real, out.imag))))
    diam = float(np.ptp(z.real) + np.ptp(z.imag)) or 1.0
    dense = _densify(z, region.area > 0, diam / 4096)
    tree = cKDTree(np.column_stack([pts.real, pts.imag]))
    dist, _ = tree.query(np.column_stack([dense.real, dense.imag]))
    return contain, float(np.max(dist))


def cloud_csv(cloud) -> str:
    buf = io.StringIO()
    buf.write("re,im\n")
    for z in _points(cloud):
        buf.write(f"{z.real:.17g},{z.imag:.17g}\n")
    return buf.getvalue()
