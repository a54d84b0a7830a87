"""Mean-field time evolution of the three coupled amplitudes.

    da1/dt = -(i D1 + k1/2) a1 - i J a2 + lambda a1* + W1
    da2/dt = -(i D2 + k2/2) a2 - i J a1 - i g m + W2
    dm/dt  = -[i (Dm + 2K|m|^2) + gm/2] m - i g a2 + Wm

Integration runs in tau = gamma_m t with amplitudes divided by sqrt(M*), in
the kernel chosen by :mod:`kerrmag._backend`.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

from . import _backend
from .errors import Diverged, KerrMagError
from .steady_state import characteristic_scale

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModeState:
    a1: complex = 0j
    a2: complex = 0j
    m: complex = 0j
    t: float = 0.0

    @property
    def magnon_number(self):
        return abs(self.m) ** 2

    def as_tuple(self):
        return (self.a1, self.a2, self.m)


@dataclass(frozen=True)
class IntegratorOptions:
    rtol: float = 1e-9
    atol: float = 1e-12
    # relative amplitude change per window that counts as settled
    conv_tol: float = 1e-9
    # window and horizon in units of 1/gamma_m
    window: float = 10.0
    horizon: float = 500.0
    # |amplitude|^2 ceiling in units of M*
    ceiling: float = 1e6
    h_max: float = 1.0


DEFAULT_OPTIONS = IntegratorOptions()


@dataclass(frozen=True)
class SettleResult:
    state: ModeState
    converged: bool
    steps: int = 0


class Direction(str, enum.Enum):
    FORWARD = "Forward"
    BACKWARD = "Backward"


def derivative(params, drives, state: ModeState) -> ModeState:
    """Time derivative of (a1, a2, m) at ``state``; ``t`` is carried through."""
    p = params
    a1, a2, m = state.a1, state.a2, state.m
    o1, o2, om = drives.amplitudes
    da1 = (-(1j * p.delta1 + p.kappa1 / 2) * a1 - 1j * p.j_coupling * a2
           + p.lambda_p * a1.conjugate() + o1)
    da2 = (-(1j * p.delta2 + p.kappa2 / 2) * a2 - 1j * p.j_coupling * a1
           - 1j * p.g * m + o2)
    dm = (-(1j * (p.delta_m + 2.0 * p.kerr_k * abs(m) ** 2) + p.gamma_m / 2) * m
          - 1j * p.g * a2 + om)
    return ModeState(da1, da2, dm, state.t)


def _amplitude_scale(params, drives, initial):
    if not drives.is_off:
        return math.sqrt(characteristic_scale(params, drives))
    biggest = max(abs(v) for v in initial.as_tuple())
    return biggest if biggest > 0 else 1.0


def kernel_coefficients(params, drives, amp_scale):
    gm = params.gamma_m
    o1, o2, om = drives.amplitudes
    s = 1.0 / (gm * amp_scale)
    return (params.delta1 / gm, params.delta2 / gm, params.delta_m / gm,
            params.kappa1 / gm, params.kappa2 / gm, params.j_coupling / gm,
            params.g / gm, params.lambda_p / gm,
            params.kerr_k * amp_scale ** 2 / gm, o1 * s, o2 * s, om * s)


def _run(params, drives, initial, tau_max, conv_tol, opts, amp_scale=None):
    if amp_scale is None:
        amp_scale = _amplitude_scale(params, drives, initial)
    coef = kernel_coefficients(params, drives, amp_scale)
    y0 = []
    for v in initial.as_tuple():
        y0 += [v.real / amp_scale, v.imag / amp_scale]
    y, tau, status, steps = _backend.kernel.settle(
        coef, y0, tau_max, opts.window, conv_tol, opts.rtol, opts.atol,
        opts.ceiling, opts.h_max)
    t = initial.t + tau / params.gamma_m
    state = ModeState(complex(y[0], y[1]) * amp_scale, complex(y[2], y[3]) * amp_scale,
                      complex(y[4], y[5]) * amp_scale, t)
    if status == _backend.DIVERGED:
        raise Diverged(f"amplitude exceeded the ceiling at t = {t:.4g} s", time=t)
    if status == _backend.NONFINITE:
        raise KerrMagError(f"non-finite state during integration at t = {t:.4g} s")
    return state, status, steps


def settle(params, drives, initial: ModeState | None = None, horizon=None,
           conv_tol=None, opts: IntegratorOptions = DEFAULT_OPTIONS) -> SettleResult:
    """Integrate until the amplitudes stop changing or the horizon is hit.

    ``horizon`` is in seconds (default ``opts.horizon / gamma_m``).  Hitting
    the horizon is reported through ``converged=False``; leaving the bounded
    region raises :class:`Diverged`.
    """
    initial = initial or ModeState()
    gm = params.gamma_m
    tau_max = opts.horizon if horizon is None else horizon * gm
    if tau_max <= 0:
        raise ValueError("horizon must be positive")
    tol = opts.conv_tol if conv_tol is None else conv_tol
    state, status, steps = _run(params, drives, initial, tau_max, tol, opts)
    return SettleResult(state, status == _backend.CONVERGED, steps)


def evolve(params, drives, initial: ModeState, duration,
           opts: IntegratorOptions = DEFAULT_OPTIONS, amp_scale=None) -> ModeState:
    """State after exactly ``duration`` seconds (no early stop)."""
    state, _, _ = _run(params, drives, initial, duration * params.gamma_m, 0.0, opts,
                       amp_scale)
    return state


def hysteresis_sweep(configure, abscissa, direction=Direction.FORWARD,
                     seed: ModeState | None = None,
                     opts: IntegratorOptions = DEFAULT_OPTIONS, return_states=False):
    """Adiabatic sweep: settle at each grid point from the previous end state.

    ``configure(x)`` returns the (SystemParams, DriveConfig) at abscissa x.
    The first point starts from ``seed`` (zero state by default).  Returns a
    list of (x, M), or (x, M, SettleResult) with ``return_states``.
    """
    direction = Direction(direction)
    xs = list(abscissa)
    steps = [b - a for a, b in zip(xs, xs[1:])]
    if direction is Direction.FORWARD and any(s <= 0 for s in steps):
        raise ValueError("forward sweep needs strictly increasing abscissa")
    if direction is Direction.BACKWARD and any(s >= 0 for s in steps):
        raise ValueError("backward sweep needs strictly decreasing abscissa")

    state = seed or ModeState()
    out = []
    for x in xs:
        params, drives = configure(x)
        try:
            res = settle(params, drives, state, opts=opts)
        except Diverged as exc:
            raise Diverged(f"diverged at abscissa {x!r}: {exc}", abscissa=x,
                           time=exc.time) from exc
        if not res.converged:
            log.warning("settle did not converge at abscissa %r", x)
        state = res.state
        out.append((x, state.magnon_number, res) if return_states
                   else (x, state.magnon_number))
    return out


def find_jumps(values, rel=0.2, factor=10.0):
    """Indices i where values[i] jumps away from values[i-1].

    A jump is a step larger than ``rel`` of the local magnitude and more than
    ``factor`` times the median step of the trace.
    """
    steps = [abs(b - a) for a, b in zip(values, values[1:])]
    if not steps:
        return []
    typical = sorted(steps)[len(steps) // 2]
    out = []
    for i, s in enumerate(steps, start=1):
        scale = max(abs(values[i]), abs(values[i - 1]))
        if s > rel * scale and s > factor * typical:
            out.append(i)
    return out
