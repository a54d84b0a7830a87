"""Pure-Python integration kernel (fallback for the compiled ``_kernel``).

State is six reals (Re a1, Im a1, Re a2, Im a2, Re m, Im m) in scaled units;
time is tau = gamma_m * t.  ``coef`` holds, in order,
(delta1, delta2, delta_m, kappa1, kappa2, j, g, lambda, kerr, drive1, drive2,
drive_m), all divided by gamma_m, with kerr and the drives rescaled to the
amplitude unit.

Keep this file and ``_kernel.pyx`` arithmetically identical.
"""
import math

CONVERGED = 0
HORIZON = 1
DIVERGED = 2
NONFINITE = 3
STEP_UNDERFLOW = 4

# h * spectral radius kept inside the explicit method's stability region
STABILITY_LIMIT = 1.5

# Dormand-Prince 5(4)
_A21 = 1.0 / 5
_A31, _A32 = 3.0 / 40, 9.0 / 40
_A41, _A42, _A43 = 44.0 / 45, -56.0 / 15, 32.0 / 9
_A51, _A52, _A53, _A54 = 19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168, -355.0 / 33, 46732.0 / 5247,
                                49.0 / 176, -5103.0 / 18656)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600, -71.0 / 16695, 71.0 / 1920,
                                -17253.0 / 339200, 22.0 / 525, -1.0 / 40)


def rhs(coef, y):
    d1, d2, dm, k1, k2, j, g, lam, kerr, w1, w2, wm = coef
    x0, x1, x2, x3, x4, x5 = y
    hk1 = 0.5 * k1
    hk2 = 0.5 * k2
    w = dm + 2.0 * kerr * (x4 * x4 + x5 * x5)
    return [
        -hk1 * x0 + d1 * x1 + j * x3 + lam * x0 + w1,
        -d1 * x0 - hk1 * x1 - j * x2 - lam * x1,
        -hk2 * x2 + d2 * x3 + j * x1 + g * x5 + w2,
        -d2 * x2 - hk2 * x3 - j * x0 - g * x4,
        -0.5 * x4 + w * x5 + g * x3 + wm,
        -w * x4 - 0.5 * x5 - g * x2,
    ]


def _spectral_bound(coef, y):
    """Gershgorin bound on the Jacobian spectral radius at y."""
    d1, d2, dm, k1, k2, j, g, lam, kerr, _, _, _ = coef
    n = y[4] * y[4] + y[5] * y[5]
    r1 = math.sqrt(d1 * d1 + 0.25 * k1 * k1) + abs(lam) + abs(j)
    r2 = math.sqrt(d2 * d2 + 0.25 * k2 * k2) + abs(j) + abs(g)
    w = dm + 4.0 * kerr * n
    r3 = math.sqrt(w * w + 0.25) + 2.0 * abs(kerr) * n + abs(g)
    return max(r1, r2, r3)


def _amp_change_ok(y, yref, conv_tol, atol):
    big = 0.0
    for k in range(3):
        a = math.hypot(y[2 * k], y[2 * k + 1])
        if a > big:
            big = a
    floor = 1e-3 * big + atol
    for k in range(3):
        a = math.hypot(y[2 * k], y[2 * k + 1])
        d = math.hypot(y[2 * k] - yref[2 * k], y[2 * k + 1] - yref[2 * k + 1])
        if d > conv_tol * max(a, floor):
            return False
    return True


def settle(coef, y0, tau_max, window, conv_tol, rtol, atol, ceiling,
           h_max=1.0, h0=1e-2, max_steps=10_000_000):
    """Integrate until two consecutive windows show relative change below
    ``conv_tol`` (conv_tol <= 0 disables the test), ``tau_max`` is reached,
    or |amplitude|^2 exceeds ``ceiling``.

    Returns (y, tau, status, accepted_steps).
    """
    y = [float(v) for v in y0]
    tau = 0.0
    h = min(h0, h_max, tau_max)
    k1 = rhs(coef, y)
    yref = list(y)
    next_check = window
    calm = 0
    steps = 0
    while steps < max_steps:
        if tau >= tau_max:
            return y, tau, HORIZON, steps
        if tau + h > tau_max:
            h = tau_max - tau
        yt = [y[i] + h * _A21 * k1[i] for i in range(6)]
        k2 = rhs(coef, yt)
        yt = [y[i] + h * (_A31 * k1[i] + _A32 * k2[i]) for i in range(6)]
        k3 = rhs(coef, yt)
        yt = [y[i] + h * (_A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i]) for i in range(6)]
        k4 = rhs(coef, yt)
        yt = [y[i] + h * (_A51 * k1[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i])
              for i in range(6)]
        k5 = rhs(coef, yt)
        yt = [y[i] + h * (_A61 * k1[i] + _A62 * k2[i] + _A63 * k3[i] + _A64 * k4[i]
                          + _A65 * k5[i]) for i in range(6)]
        k6 = rhs(coef, yt)
        yn = [y[i] + h * (_B1 * k1[i] + _B3 * k3[i] + _B4 * k4[i] + _B5 * k5[i]
                          + _B6 * k6[i]) for i in range(6)]
        k7 = rhs(coef, yn)

        err = 0.0
        for i in range(6):
            e = h * (_E1 * k1[i] + _E3 * k3[i] + _E4 * k4[i] + _E5 * k5[i]
                     + _E6 * k6[i] + _E7 * k7[i])
            sc = atol + rtol * max(abs(y[i]), abs(yn[i]))
            err += (e / sc) ** 2
        err = math.sqrt(err / 6.0)
        if not math.isfinite(err):
            return y, tau, NONFINITE, steps

        if err <= 1.0:
            tau += h
            y = yn
            k1 = k7
            steps += 1
            for k in range(3):
                if y[2 * k] ** 2 + y[2 * k + 1] ** 2 > ceiling:
                    return y, tau, DIVERGED, steps
            if conv_tol > 0.0 and tau >= next_check:
                if _amp_change_ok(y, yref, conv_tol, atol):
                    calm += 1
                    if calm >= 2:
                        return y, tau, CONVERGED, steps
                else:
                    calm = 0
                yref = list(y)
                next_check = tau + window
            fac = 5.0 if err == 0.0 else min(5.0, 0.9 * err ** -0.2)
        else:
            fac = max(0.2, 0.9 * err ** -0.2)
        h = min(h * fac, h_max, STABILITY_LIMIT / _spectral_bound(coef, y))
        if h < 1e-14 * max(1.0, tau):
            return y, tau, STEP_UNDERFLOW, steps
    return y, tau, HORIZON, steps
