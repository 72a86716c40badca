"""Pure-numpy geometry kernels (fallback backend).

Mirrors the API of the compiled `_fastkern` extension exactly; the backend
selector picks whichever is importable.  Keep both implementations in sync.
"""

import numpy as np

IMPLEMENTATION = "python"


def point_line_distance(r1, r2, p):
    """Distance from point ``p`` to the infinite line through ``r1``/``r2``.

    d = sqrt(|(r2-r1) x (r1-p)|^2 / |r2-r1|^2)
    """
    d = np.asarray(r2, dtype=np.float64) - np.asarray(r1, dtype=np.float64)
    w = np.asarray(r1, dtype=np.float64) - np.asarray(p, dtype=np.float64)
    cross = np.cross(d, w)
    return float(np.sqrt(np.dot(cross, cross) / np.dot(d, d)))


def point_line_distances(r1, r2, points):
    """Vectorized point_line_distance for an (N, 3) array of points."""
    r1 = np.asarray(r1, dtype=np.float64)
    d = np.asarray(r2, dtype=np.float64) - r1
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    w = r1[None, :] - pts
    cross = np.cross(np.broadcast_to(d, w.shape), w)
    return np.sqrt(np.einsum("ij,ij->i", cross, cross) / np.dot(d, d))


def segment_box_intersects(x0, y0, x1, y1, bx_lo, bx_hi, by_lo, by_hi):
    """True iff the 2D segment (x0,y0)-(x1,y1) touches the axis-aligned box."""
    tmin, tmax = 0.0, 1.0
    for p0, p1, lo, hi in ((x0, x1, bx_lo, bx_hi), (y0, y1, by_lo, by_hi)):
        d = p1 - p0
        if abs(d) < 1e-15:
            if p0 < lo or p0 > hi:
                return False
            continue
        ta = (lo - p0) / d
        tb = (hi - p0) / d
        if ta > tb:
            ta, tb = tb, ta
        tmin = max(tmin, ta)
        tmax = min(tmax, tb)
        if tmin > tmax:
            return False
    return True


def corridor_highest_obstacle(x0, y0, x1, y1, half_width, centers, half_extents, tops, exclude):
    """Index of the tallest box whose inflated footprint meets the corridor.

    The corridor is the 2D segment inflated (Minkowski) by ``half_width`` plus
    each box's own half extent.  The box at index ``exclude`` (-1 for none) is
    skipped.  Returns -1 when nothing intersects; first index wins on ties.
    """
    centers = np.asarray(centers, dtype=np.float64).reshape(-1, 2)
    half_extents = np.asarray(half_extents, dtype=np.float64)
    tops = np.asarray(tops, dtype=np.float64)
    best = -1
    for i in range(centers.shape[0]):
        if i == exclude:
            continue
        r = half_extents[i] + half_width
        if segment_box_intersects(
            x0, y0, x1, y1,
            centers[i, 0] - r, centers[i, 0] + r,
            centers[i, 1] - r, centers[i, 1] + r,
        ):
            if best < 0 or tops[i] > tops[best]:
                best = i
    return int(best)
