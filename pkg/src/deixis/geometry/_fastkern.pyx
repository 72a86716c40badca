# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled geometry kernels.

Same API as `_pykern`; this is the hot path for per-frame ray/object
distances and corridor clearance sweeps.
"""

from libc.math cimport sqrt, fabs

import numpy as np

IMPLEMENTATION = "compiled"


cdef inline double _dist_one(double dx, double dy, double dz,
                             double wx, double wy, double wz,
                             double dd) nogil:
    cdef double cx = dy * wz - dz * wy
    cdef double cy = dz * wx - dx * wz
    cdef double cz = dx * wy - dy * wx
    return sqrt((cx * cx + cy * cy + cz * cz) / dd)


def point_line_distance(r1, r2, p):
    """Distance from point ``p`` to the infinite line through ``r1``/``r2``."""
    cdef double dx = <double>r2[0] - <double>r1[0]
    cdef double dy = <double>r2[1] - <double>r1[1]
    cdef double dz = <double>r2[2] - <double>r1[2]
    cdef double wx = <double>r1[0] - <double>p[0]
    cdef double wy = <double>r1[1] - <double>p[1]
    cdef double wz = <double>r1[2] - <double>p[2]
    return _dist_one(dx, dy, dz, wx, wy, wz, dx * dx + dy * dy + dz * dz)


def point_line_distances(r1, r2, points):
    """Vectorized point_line_distance for an (N, 3) array of points."""
    pts_arr = np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 3)
    cdef double[:, ::1] pts = pts_arr
    cdef Py_ssize_t n = pts.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double ax = <double>r1[0], ay = <double>r1[1], az = <double>r1[2]
    cdef double dx = <double>r2[0] - ax
    cdef double dy = <double>r2[1] - ay
    cdef double dz = <double>r2[2] - az
    cdef double dd = dx * dx + dy * dy + dz * dz
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            out[i] = _dist_one(dx, dy, dz, ax - pts[i, 0], ay - pts[i, 1], az - pts[i, 2], dd)
    return out_arr


cdef bint _seg_box(double x0, double y0, double x1, double y1,
                   double bx_lo, double bx_hi, double by_lo, double by_hi) nogil:
    cdef double tmin = 0.0, tmax = 1.0
    cdef double d, ta, tb, tmp
    d = x1 - x0
    if fabs(d) < 1e-15:
        if x0 < bx_lo or x0 > bx_hi:
            return False
    else:
        ta = (bx_lo - x0) / d
        tb = (bx_hi - x0) / d
        if ta > tb:
            tmp = ta; ta = tb; tb = tmp
        if ta > tmin:
            tmin = ta
        if tb < tmax:
            tmax = tb
        if tmin > tmax:
            return False
    d = y1 - y0
    if fabs(d) < 1e-15:
        if y0 < by_lo or y0 > by_hi:
            return False
    else:
        ta = (by_lo - y0) / d
        tb = (by_hi - y0) / d
        if ta > tb:
            tmp = ta; ta = tb; tb = tmp
        if ta > tmin:
            tmin = ta
        if tb < tmax:
            tmax = tb
        if tmin > tmax:
            return False
    return True


def segment_box_intersects(double x0, double y0, double x1, double y1,
                           double bx_lo, double bx_hi, double by_lo, double by_hi):
    """True iff the 2D segment (x0,y0)-(x1,y1) touches the axis-aligned box."""
    return bool(_seg_box(x0, y0, x1, y1, bx_lo, bx_hi, by_lo, by_hi))


def corridor_highest_obstacle(double x0, double y0, double x1, double y1, double half_width,
                              centers, half_extents, tops, Py_ssize_t exclude):
    """Index of the tallest box whose inflated footprint meets the corridor (-1 if none)."""
    c_arr = np.ascontiguousarray(centers, dtype=np.float64).reshape(-1, 2)
    e_arr = np.ascontiguousarray(half_extents, dtype=np.float64)
    t_arr = np.ascontiguousarray(tops, dtype=np.float64)
    cdef double[:, ::1] c = c_arr
    cdef double[::1] e = e_arr
    cdef double[::1] t = t_arr
    cdef Py_ssize_t n = c.shape[0]
    cdef Py_ssize_t best = -1
    cdef double r
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            if i == exclude:
                continue
            r = e[i] + half_width
            if _seg_box(x0, y0, x1, y1, c[i, 0] - r, c[i, 0] + r, c[i, 1] - r, c[i, 1] + r):
                if best < 0 or t[i] > t[best]:
                    best = i
    return int(best)
