# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled integration kernel; mirrors ``_kernel_py`` step for step."""
from libc.math cimport sqrt, hypot, fabs, pow, isfinite

cdef enum:
    CONVERGED = 0
    HORIZON = 1
    DIVERGED = 2
    NONFINITE = 3
    STEP_UNDERFLOW = 4

cdef double _A21 = 1.0 / 5
cdef double _A31 = 3.0 / 40, _A32 = 9.0 / 40
cdef double _A41 = 44.0 / 45, _A42 = -56.0 / 15, _A43 = 32.0 / 9
cdef double _A51 = 19372.0 / 6561, _A52 = -25360.0 / 2187, _A53 = 64448.0 / 6561
cdef double _A54 = -212.0 / 729
cdef double _A61 = 9017.0 / 3168, _A62 = -355.0 / 33, _A63 = 46732.0 / 5247
cdef double _A64 = 49.0 / 176, _A65 = -5103.0 / 18656
cdef double _B1 = 35.0 / 384, _B3 = 500.0 / 1113, _B4 = 125.0 / 192
cdef double _B5 = -2187.0 / 6784, _B6 = 11.0 / 84
cdef double _E1 = 71.0 / 57600, _E3 = -71.0 / 16695, _E4 = 71.0 / 1920
cdef double _E5 = -17253.0 / 339200, _E6 = 22.0 / 525, _E7 = -1.0 / 40


cdef inline void _rhs(const double* c, const double* y, double* out) noexcept nogil:
    cdef double hk1 = 0.5 * c[3]
    cdef double hk2 = 0.5 * c[4]
    cdef double w = c[2] + 2.0 * c[8] * (y[4] * y[4] + y[5] * y[5])
    out[0] = -hk1 * y[0] + c[0] * y[1] + c[5] * y[3] + c[7] * y[0] + c[9]
    out[1] = -c[0] * y[0] - hk1 * y[1] - c[5] * y[2] - c[7] * y[1]
    out[2] = -hk2 * y[2] + c[1] * y[3] + c[5] * y[1] + c[6] * y[5] + c[10]
    out[3] = -c[1] * y[2] - hk2 * y[3] - c[5] * y[0] - c[6] * y[4]
    out[4] = -0.5 * y[4] + w * y[5] + c[6] * y[3] + c[11]
    out[5] = -w * y[4] - 0.5 * y[5] - c[6] * y[2]


cdef double STABILITY_LIMIT = 1.5


cdef inline double _spectral_bound(const double* c, const double* y) noexcept nogil:
    cdef double n = y[4] * y[4] + y[5] * y[5]
    cdef double r1 = sqrt(c[0] * c[0] + 0.25 * c[3] * c[3]) + fabs(c[7]) + fabs(c[5])
    cdef double r2 = sqrt(c[1] * c[1] + 0.25 * c[4] * c[4]) + fabs(c[5]) + fabs(c[6])
    cdef double w = c[2] + 4.0 * c[8] * n
    cdef double r3 = sqrt(w * w + 0.25) + 2.0 * fabs(c[8]) * n + fabs(c[6])
    if r2 > r1:
        r1 = r2
    if r3 > r1:
        r1 = r3
    return r1


cdef inline bint _amp_change_ok(const double* y, const double* yref,
                                double conv_tol, double atol) noexcept nogil:
    cdef double big = 0.0, a, d, floor
    cdef int k
    for k in range(3):
        a = hypot(y[2 * k], y[2 * k + 1])
        if a > big:
            big = a
    floor = 1e-3 * big + atol
    for k in range(3):
        a = hypot(y[2 * k], y[2 * k + 1])
        d = hypot(y[2 * k] - yref[2 * k], y[2 * k + 1] - yref[2 * k + 1])
        if d > conv_tol * (a if a > floor else floor):
            return False
    return True


def rhs(coef, y):
    cdef double c[12]
    cdef double yy[6]
    cdef double out[6]
    cdef int i
    for i in range(12):
        c[i] = coef[i]
    for i in range(6):
        yy[i] = y[i]
    _rhs(c, yy, out)
    return [out[i] for i in range(6)]


def settle(coef, y0, double tau_max, double window, double conv_tol,
           double rtol, double atol, double ceiling,
           double h_max=1.0, double h0=1e-2, long max_steps=10000000):
    """See ``_kernel_py.settle``."""
    cdef double c[12]
    cdef double y[6]
    cdef double yn[6]
    cdef double yt[6]
    cdef double yref[6]
    cdef double k1[6]
    cdef double k2[6]
    cdef double k3[6]
    cdef double k4[6]
    cdef double k5[6]
    cdef double k6[6]
    cdef double k7[6]
    cdef double tau = 0.0, h, lim, err, e, sc, ay, ayn, fac, next_check
    cdef long steps = 0
    cdef int calm = 0, i, k, status = HORIZON
    for i in range(12):
        c[i] = coef[i]
    for i in range(6):
        y[i] = y0[i]
        yref[i] = y[i]
    h = h0
    if h > h_max:
        h = h_max
    if h > tau_max:
        h = tau_max
    next_check = window

    with nogil:
        _rhs(c, y, k1)
        while steps < max_steps:
            if tau >= tau_max:
                status = HORIZON
                break
            if tau + h > tau_max:
                h = tau_max - tau
            for i in range(6):
                yt[i] = y[i] + h * _A21 * k1[i]
            _rhs(c, yt, k2)
            for i in range(6):
                yt[i] = y[i] + h * (_A31 * k1[i] + _A32 * k2[i])
            _rhs(c, yt, k3)
            for i in range(6):
                yt[i] = y[i] + h * (_A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i])
            _rhs(c, yt, k4)
            for i in range(6):
                yt[i] = y[i] + h * (_A51 * k1[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i])
            _rhs(c, yt, k5)
            for i in range(6):
                yt[i] = y[i] + h * (_A61 * k1[i] + _A62 * k2[i] + _A63 * k3[i] + _A64 * k4[i]
                                    + _A65 * k5[i])
            _rhs(c, yt, k6)
            for i in range(6):
                yn[i] = y[i] + h * (_B1 * k1[i] + _B3 * k3[i] + _B4 * k4[i] + _B5 * k5[i]
                                    + _B6 * k6[i])
            _rhs(c, yn, k7)

            err = 0.0
            for i in range(6):
                e = h * (_E1 * k1[i] + _E3 * k3[i] + _E4 * k4[i] + _E5 * k5[i]
                         + _E6 * k6[i] + _E7 * k7[i])
                ay = fabs(y[i])
                ayn = fabs(yn[i])
                sc = atol + rtol * (ay if ay > ayn else ayn)
                err += (e / sc) * (e / sc)
            err = sqrt(err / 6.0)
            if not isfinite(err):
                status = NONFINITE
                break

            if err <= 1.0:
                tau += h
                for i in range(6):
                    y[i] = yn[i]
                    k1[i] = k7[i]
                steps += 1
                status = -1
                for k in range(3):
                    if y[2 * k] * y[2 * k] + y[2 * k + 1] * y[2 * k + 1] > ceiling:
                        status = DIVERGED
                if status == DIVERGED:
                    break
                if conv_tol > 0.0 and tau >= next_check:
                    if _amp_change_ok(y, yref, conv_tol, atol):
                        calm += 1
                        if calm >= 2:
                            status = CONVERGED
                            break
                    else:
                        calm = 0
                    for i in range(6):
                        yref[i] = y[i]
                    next_check = tau + window
                if err == 0.0:
                    fac = 5.0
                else:
                    fac = 0.9 * pow(err, -0.2)
                    if fac > 5.0:
                        fac = 5.0
            else:
                fac = 0.9 * pow(err, -0.2)
                if fac < 0.2:
                    fac = 0.2
            h = h * fac
            if h > h_max:
                h = h_max
            lim = STABILITY_LIMIT / _spectral_bound(c, y)
            if h > lim:
                h = lim
            if h < 1e-14 * (tau if tau > 1.0 else 1.0):
                status = STEP_UNDERFLOW
                break
        else:
            status = HORIZON

    return [y[i] for i in range(6)], tau, status, steps
