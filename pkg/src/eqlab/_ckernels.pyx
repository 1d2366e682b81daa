# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled radial-boundary kernels: radius evaluation, ray exits, orbits.

Kind codes and parameter layouts mirror ``geometry2d.KIND_*``.
"""

import numpy as np

from libc.math cimport atan2, cos, floor, fmod, hypot, sin, sqrt, M_PI

cdef double TWO_PI = 2.0 * M_PI

cdef enum:
    K_CIRCLE = 0
    K_ELLIPSE = 1
    K_LIMACON = 2
    K_PARABOLA_BODY = 3
    K_FOURIER = 4
    K_SECTORS = 5
    K_PPOLY = 6


cdef inline double _wrap(double t, double base) noexcept nogil:
    cdef double r = fmod(t - base, TWO_PI)
    if r < 0:
        r += TWO_PI
    return base + r


cdef inline double _parabola(double t) noexcept nogil:
    cdef double s = sin(t), c = cos(t)
    return 3.0 / (sqrt(1.0 + 2.0 * c * c) - s)


cdef inline double _induced(double t) noexcept nogil:
    cdef double s = sin(t), c = cos(t)
    cdef double u = (sqrt(1.0 + 2.0 * c * c) - s) / 3.0
    return 1.0 / sqrt(1.0 - u * u)


cdef double _radius(int kind, const double[::1] p, double t) noexcept nogil:
    cdef double a, b, c, s, q, tt, x, y, z, ck, sk, c1, s1, tmp, dt, val
    cdef int m, k, i, lo, hi, mid, sector
    if kind == K_CIRCLE:
        return p[0]
    if kind == K_ELLIPSE:
        a = p[0]
        b = p[1]
        c = cos(t)
        s = sin(t)
        return a * b / sqrt((b * c) * (b * c) + (a * s) * (a * s))
    if kind == K_LIMACON:
        return p[1] + p[0] * cos(t)
    if kind == K_PARABOLA_BODY:
        q = _wrap(t + M_PI / 4.0, 0.0)
        sector = <int>floor(q / (M_PI / 2.0))
        if sector > 3:
            sector = 3
        tt = q - M_PI / 4.0
        if sector == 0:
            return _induced(tt - M_PI / 2.0)
        if sector == 1:
            return _parabola(tt + M_PI)
        if sector == 2:
            return _induced(tt + M_PI / 2.0)
        return _parabola(tt)
    if kind == K_FOURIER:
        m = <int>p[0]
        c1 = cos(t)
        s1 = sin(t)
        ck = 1.0
        sk = 0.0
        val = p[1]
        for k in range(1, m + 1):
            tmp = ck * c1 - sk * s1
            sk = sk * c1 + ck * s1
            ck = tmp
            val += p[1 + k] * ck + p[1 + m + k] * sk
        return val
    if kind == K_SECTORS:
        m = <int>p[0]
        tt = _wrap(t, p[1])
        i = m - 1
        for k in range(1, m):
            if tt < p[1 + 5 * k]:
                i = k - 1
                break
        x = p[3 + 5 * i]
        y = p[4 + 5 * i]
        z = p[5 + 5 * i]
        c = cos(tt)
        s = sin(tt)
        q = x * c + y * s
        if p[2 + 5 * i] == 0.0:
            return z / q
        tmp = q * q - (x * x + y * y) + z * z
        if tmp < 0:
            tmp = 0
        return q + sqrt(tmp)
    if kind == K_PPOLY:
        m = <int>p[0]
        tt = _wrap(t, p[1])
        lo = 0
        hi = m
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if p[1 + mid] <= tt:
                lo = mid
            else:
                hi = mid
        dt = tt - p[1 + lo]
        # scipy PPoly layout: c[k, i] with k = 0 the cubic coefficient
        val = p[2 + m + lo]
        val = val * dt + p[2 + m + m + lo]
        val = val * dt + p[2 + m + 2 * m + lo]
        val = val * dt + p[2 + m + 3 * m + lo]
        return val
    return -1.0


cdef inline double _outside(int kind, const double[::1] p, double px, double py,
                            double rot, double x, double y) noexcept nogil:
    """Positive outside the body, negative inside."""
    cdef double dx = x - px, dy = y - py
    return hypot(dx, dy) - _radius(kind, p, atan2(dy, dx) - rot)


cdef double _ray_exit(int kind, const double[::1] p, double px, double py, double rot,
                      double rmax, double ox, double oy, double ux, double uy) noexcept nogil:
    """Bracketed Illinois iteration on the inside/outside function, bisection as a guard."""
    cdef double lo = 0.0, hi, m, flo, fhi, fm, w
    cdef int it, side = 0
    hi = rmax + hypot(ox - px, oy - py)
    for it in range(60):
        fhi = _outside(kind, p, px, py, rot, ox + hi * ux, oy + hi * uy)
        if fhi > 0:
            break
        hi *= 2.0
    flo = _outside(kind, p, px, py, rot, ox, oy)
    for it in range(400):
        w = hi - lo
        if it < 60:
            m = (lo * fhi - hi * flo) / (fhi - flo)
            if not (lo < m < hi):
                m = 0.5 * (lo + hi)
        else:
            m = 0.5 * (lo + hi)
        if m <= lo or m >= hi:
            break
        fm = _outside(kind, p, px, py, rot, ox + m * ux, oy + m * uy)
        if fm > 0:
            hi = m
            fhi = fm
            if side == 1:
                flo *= 0.5
            side = 1
        elif fm < 0:
            lo = m
            flo = fm
            if side == -1:
                fhi *= 0.5
            side = -1
        else:
            return m
        if hi - lo <= 2e-16 * hi:
            break
    return 0.5 * (lo + hi)


def radius(int kind, const double[::1] params, double rot, const double[::1] theta):
    cdef Py_ssize_t i, n = theta.shape[0]
    out = np.empty(n)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = _radius(kind, params, theta[i] - rot)
    return out


def ray_exit(int kind, const double[::1] params, double px, double py, double rot,
             double rmax, const double[::1] ox, const double[::1] oy,
             const double[::1] ux, const double[::1] uy):
    """Distance from each interior origin to the boundary along each unit direction."""
    cdef Py_ssize_t i, n = ox.shape[0]
    out = np.empty(n)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = _ray_exit(kind, params, px, py, rot, rmax, ox[i], oy[i], ux[i], uy[i])
    return out


def orbit(int kind, const double[::1] params, double px, double py, double rot, double rmax,
          double cx, double cy, double r, double theta0, Py_ssize_t n, bint inverse=False):
    """Lifted pole angles of ``n`` iterates of the tangent-chord map (or its inverse)."""
    out = np.empty(n + 1)
    cdef double[::1] o = out
    cdef double th = theta0, rho, ax, ay, vx, vy, t, phi, dx, dy, qx, qy, s, bx, by, tb, adv
    cdef Py_ssize_t i
    o[0] = th
    with nogil:
        for i in range(n):
            rho = _radius(kind, params, th - rot)
            ax = px + rho * cos(th)
            ay = py + rho * sin(th)
            vx = ax - cx
            vy = ay - cy
            t = sqrt(vx * vx + vy * vy - r * r)
            if inverse:
                phi = atan2(vy, vx) - atan2(t, r)
            else:
                phi = atan2(vy, vx) + atan2(t, r)
            qx = cx + r * cos(phi)
            qy = cy + r * sin(phi)
            dx = -sin(phi)
            dy = cos(phi)
            if inverse:
                dx = -dx
                dy = -dy
            s = _ray_exit(kind, params, px, py, rot, rmax, qx, qy, dx, dy)
            bx = qx + s * dx
            by = qy + s * dy
            tb = atan2(by - py, bx - px)
            if inverse:
                adv = fmod(th - tb, TWO_PI)
                if adv < 0:
                    adv += TWO_PI
                th = th - adv
            else:
                adv = fmod(tb - th, TWO_PI)
                if adv < 0:
                    adv += TWO_PI
                th = th + adv
            o[i + 1] = th
    return out
