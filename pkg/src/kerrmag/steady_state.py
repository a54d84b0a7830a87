"""Steady states of the driven three-mode chain.

Eliminating a2 and a1 from the stationary equations leaves the single complex
relation ``A m - B m* + Omega = 0``, solved by

    m_s = (A* Omega + B Omega*) / (|B|^2 - |A|^2)

with A, B affine in the Kerr-shifted magnon detuning.  Taking the modulus
gives a real quintic in the magnon number M = |m_s|^2:

    P(M) = M (|B|^2 - |A|^2)^2 - |A* Omega + B Omega*|^2 = 0.

Internally rates are measured in units of gamma_m and M in units of
M* = max(|Omega_k|)^2 / gamma_m^2, which keeps the quintic O(1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from .errors import Degenerate, NoPhysicalRoot, SingularPoint
from .params import DriveConfig, SystemParams
from .stability import Stability, build_jacobian, classify


@dataclass(frozen=True)
class ABOmega:
    a_val: complex
    b_val: complex
    omega_val: complex
    # Kerr-shifted magnon detuning at which A and B were evaluated
    effective_detuning: float


def eval_abomega(params: SystemParams, drives: DriveConfig, m_num: float) -> ABOmega:
    """A, B and Omega (rad^3/s^3) at magnon number ``m_num``, straight from the
    closed forms."""
    p = params
    t = p.delta_m + 2.0 * p.kerr_k * m_num
    pdc = p.kappa1 / 2 + 1j * p.delta1
    mc = p.kappa2 / 2 + 1j * p.delta2
    mag = p.gamma_m / 2 + 1j * t
    a = pdc * mc * mag + p.g ** 2 * pdc + p.j_coupling ** 2 * mag
    b = p.lambda_p * (mc.conjugate() * mag.conjugate() + p.g ** 2)
    o1, o2, om = drives.amplitudes
    omega = (p.g * p.j_coupling * o1
             + 1j * p.g * (pdc + p.lambda_p) * o2
             - (pdc * mc - p.lambda_p * mc.conjugate() + p.j_coupling ** 2) * om)
    return ABOmega(a, b, omega, t)


def defining_expression(params, drives, m_num):
    """Return (value, magnitude) of M(|B|^2-|A|^2)^2 - |A* Omega + B Omega*|^2.

    ``magnitude`` is the sum of the absolute sizes of the two terms, the natural
    scale against which a residual is judged.
    """
    ab = eval_abomega(params, drives, m_num)
    d = abs(ab.b_val) ** 2 - abs(ab.a_val) ** 2
    n = ab.a_val.conjugate() * ab.omega_val + ab.b_val * ab.omega_val.conjugate()
    first = m_num * d * d
    second = abs(n) ** 2
    return first - second, abs(first) + second


def characteristic_scale(params: SystemParams, drives: DriveConfig) -> float:
    """M* = max|Omega_k|^2 / gamma_m^2.

    With every drive off this falls back to the number at which the Kerr shift
    reaches gamma_m (or 1 without Kerr).
    """
    amp = max(abs(a) for a in drives.amplitudes)
    if amp == 0.0:
        return params.gamma_m / (2.0 * abs(params.kerr_k)) if params.kerr_k else 1.0
    return (amp / params.gamma_m) ** 2


@dataclass(frozen=True)
class _Affine:
    """A = a0 + a1 x, B = b0 + b1 x, Omega, in scaled units (M = m_scale * x)."""

    a0: complex
    a1: complex
    b0: complex
    b1: complex
    omega: complex


def _scaled_affine(params, drives, m_scale):
    gm = params.gamma_m
    k1, k2 = params.kappa1 / gm, params.kappa2 / gm
    d1, d2, dm = params.delta1 / gm, params.delta2 / gm, params.delta_m / gm
    g, j, lam = params.g / gm, params.j_coupling / gm, params.lambda_p / gm
    kerr = params.kerr_k * m_scale / gm

    pdc = k1 / 2 + 1j * d1
    mc = k2 / 2 + 1j * d2
    mcc = mc.conjugate()
    chain = pdc * mc + j * j
    a0 = chain * (0.5 + 1j * dm) + g * g * pdc
    a1 = 2j * kerr * chain
    b0 = lam * (mcc * (0.5 - 1j * dm) + g * g)
    b1 = -2j * kerr * lam * mcc

    s = 1.0 / (gm * math.sqrt(m_scale))
    o1, o2, om = (a * s for a in drives.amplitudes)
    omega = (g * j * o1 + 1j * g * (pdc + lam) * o2
             - (pdc * mc - lam * mcc + j * j) * om)
    return _Affine(a0, a1, b0, b1, omega)


def _expand(aff: _Affine):
    """Collect x D(x)^2 - |N(x)|^2 into (values, magnitudes), descending degree."""
    a0, a1, b0, b1, om = aff.a0, aff.a1, aff.b0, aff.b1, aff.omega
    # D = |B|^2 - |A|^2 = d0 + d1 x + d2 x^2
    d0 = abs(b0) ** 2 - abs(a0) ** 2
    d1 = 2.0 * ((b0.conjugate() * b1).real - (a0.conjugate() * a1).real)
    d2 = abs(b1) ** 2 - abs(a1) ** 2
    # N = A* Omega + B Omega* = n0 + n1 x
    n0 = a0.conjugate() * om + b0 * om.conjugate()
    n1 = a1.conjugate() * om + b1 * om.conjugate()
    vals = (
        d2 * d2,
        2.0 * d1 * d2,
        d1 * d1 + 2.0 * d0 * d2,
        2.0 * d0 * d1 - abs(n1) ** 2,
        d0 * d0 - 2.0 * (n0.conjugate() * n1).real,
        -abs(n0) ** 2,
    )

    e0 = abs(b0) ** 2 + abs(a0) ** 2
    e1 = 2.0 * (abs(b0) * abs(b1) + abs(a0) * abs(a1))
    e2 = abs(b1) ** 2 + abs(a1) ** 2
    w = abs(om)
    f0 = (abs(a0) + abs(b0)) * w
    f1 = (abs(a1) + abs(b1)) * w
    mags = (e2 * e2, 2 * e1 * e2, e1 * e1 + 2 * e0 * e2,
            2 * e0 * e1 + f1 * f1, e0 * e0 + 2 * f0 * f1, f0 * f0)
    return vals, mags


@dataclass(frozen=True)
class QuinticPoly:
    """Coefficients c5..c0 of P(M) together with their scaled form.

    ``c`` is in SI (rad/s)^12 per power of M.  ``scaled`` holds the same
    polynomial in x = M / m_scale with rates in units of gamma_m (and an
    overall factor gamma_m^12 m_scale removed); ``magnitude`` bounds the size
    of the terms that were summed into each scaled coefficient.
    """

    c: tuple
    scaled: tuple
    magnitude: tuple
    m_scale: float
    params: SystemParams
    drives: DriveConfig

    def __call__(self, m_num):
        return float(np.polyval(self.c, m_num))

    @property
    def c5(self):
        return self.c[0]

    @property
    def c0(self):
        return self.c[5]


def quintic_coefficients(params: SystemParams, drives: DriveConfig) -> QuinticPoly:
    m_scale = characteristic_scale(params, drives)
    aff = _scaled_affine(params, drives, m_scale)
    vals, mags = _expand(aff)
    factor = params.gamma_m ** 12 * m_scale
    c = tuple(v * factor * m_scale ** -(5 - i) for i, v in enumerate(vals))
    return QuinticPoly(c, vals, mags, m_scale, params, drives)


@dataclass(frozen=True)
class RootTolerances:
    # roots above -negativity_slack * M* are clamped to zero
    negativity_slack: float = 1e-6
    # relative spacing below which two roots are one
    merge: float = 1e-9
    # Newton target for |P| / scale on the unexpanded expression
    residual: float = 1e-13
    # roots whose polished residual stays above this are discarded
    accept: float = 1e-8
    # |Im z| <= imag * (1 + |Re z|) counts as real
    imag: float = 1e-8
    # scaled coefficients below noise * (term magnitude) are rounding residue
    noise: float = 1e-12


def _scaled_residual(aff: _Affine, x):
    a = aff.a0 + aff.a1 * x
    b = aff.b0 + aff.b1 * x
    d = abs(b) ** 2 - abs(a) ** 2
    n = a.conjugate() * aff.omega + b * aff.omega.conjugate()
    first = x * d * d
    second = abs(n) ** 2
    return first - second, abs(first) + second


def _companion_roots(coeffs):
    """Roots of a polynomial (descending, leading entry nonzero) via the
    eigenvalues of its balanced companion matrix."""
    q = np.asarray(coeffs, dtype=float)
    q = q / np.max(np.abs(q))
    q = q / q[0]
    n = len(q) - 1
    if n == 0:
        return np.empty(0, dtype=complex)
    comp = np.zeros((n, n))
    comp[0, :] = -q[1:]
    if n > 1:
        comp[np.arange(1, n), np.arange(n - 1)] = 1.0
    # scipy casts an unused permutation vector here, which can warn spuriously
    with np.errstate(invalid="ignore"):
        balanced, _ = scipy.linalg.matrix_balance(comp, permute=False)
    return scipy.linalg.eigvals(balanced, check_finite=True)


def solve_quintic(poly: QuinticPoly, tol: RootTolerances = RootTolerances()):
    """All physical (real, nonnegative) magnon numbers, ascending."""
    p = np.array(poly.scaled, dtype=float)
    mag = np.array(poly.magnitude, dtype=float)
    if not np.all(np.isfinite(p)):
        raise Degenerate("non-finite polynomial coefficients")
    p[np.abs(p) <= tol.noise * mag] = 0.0
    if not np.any(p[:5]):
        raise Degenerate("all non-constant coefficients vanish to rounding")
    lead = int(np.flatnonzero(p)[0])
    q = p[lead:]
    dq = np.polyder(q)

    aff = _scaled_affine(poly.params, poly.drives, poly.m_scale)
    found = []
    # exact zero roots are deflated before the eigen-solve
    nz = np.flatnonzero(q)
    if nz[-1] < len(q) - 1:
        found.append(0.0)
        q = q[:nz[-1] + 1]
    for z in _companion_roots(q):
        if abs(z.imag) > tol.imag * (1.0 + abs(z.real)):
            continue
        x = z.real
        if x < -tol.negativity_slack:
            continue
        x = max(x, 0.0)
        x, rel = _polish(aff, dq, x, tol)
        if rel > tol.accept:
            continue
        found.append(x)

    found.sort()
    merged = []
    for x in found:
        if merged and x - merged[-1] <= tol.merge * max(x, 1e-12):
            continue
        merged.append(x)
    if not merged:
        raise NoPhysicalRoot("no real nonnegative root of the magnon-number quintic")
    return [float(x * poly.m_scale) for x in merged]


def _polish(aff, dq, x, tol, max_iter=60):
    val, scale = _scaled_residual(aff, x)
    best_x, best_rel = x, abs(val) / scale if scale else 0.0
    for _ in range(max_iter):
        if best_rel < tol.residual:
            break
        slope = np.polyval(dq, x)
        if slope == 0.0:
            break
        step = val / slope
        x_new = max(x - step, 0.0)
        val, scale = _scaled_residual(aff, x_new)
        rel = abs(val) / scale if scale else 0.0
        if rel < best_rel:
            best_x, best_rel = x_new, rel
        if abs(x_new - x) <= 1e-16 * max(abs(x), 1e-300):
            break
        x = x_new
    return best_x, best_rel


# ---------------------------------------------------------------- branches

@dataclass(frozen=True)
class SteadyStateBranch:
    m_num: float
    ms: complex
    a1s: complex
    a2s: complex
    residual: float
    stability: Stability | None = None


def _normalized_residual(terms):
    total = abs(sum(terms))
    biggest = max(abs(t) for t in terms)
    return total / biggest if biggest else 0.0


def stationary_residual(params, drives, a1, a2, m):
    """Largest normalized residual of the three stationary equations."""
    p = params
    o1, o2, om = drives.amplitudes
    eff = p.delta_m + 2.0 * p.kerr_k * abs(m) ** 2
    r1 = _normalized_residual([-(1j * p.delta1 + p.kappa1 / 2) * a1,
                               -1j * p.j_coupling * a2,
                               p.lambda_p * a1.conjugate(), o1])
    r2 = _normalized_residual([-(1j * p.delta2 + p.kappa2 / 2) * a2,
                               -1j * p.j_coupling * a1, -1j * p.g * m, o2])
    r3 = _normalized_residual([-(1j * eff + p.gamma_m / 2) * m,
                               -1j * p.g * a2, om])
    return max(r1, r2, r3)


def _cavities_given_magnon(params, drives, ms):
    """Solve the two cavity equations for (a1, a2) at fixed m_s.

    Real 4x4 system; used where the printed back-substitution would divide by a
    vanishing g*J.
    """
    p = params
    o1, o2, _ = drives.amplitudes
    # unknowns (Re a1, Im a1, Re a2, Im a2)
    k1, d1, k2, d2 = p.kappa1 / 2, p.delta1, p.kappa2 / 2, p.delta2
    j, lam = p.j_coupling, p.lambda_p
    mat = np.array([
        [-k1 + lam, d1, 0.0, j],
        [-d1, -k1 - lam, -j, 0.0],
        [0.0, j, -k2, d2],
        [-j, 0.0, -d2, -k2],
    ])
    src = 1j * p.g * ms - o2
    rhs = np.array([-o1, 0.0, src.real, src.imag])
    sol = np.linalg.solve(mat, rhs)
    return complex(sol[0], sol[1]), complex(sol[2], sol[3])


def recover_branch(params: SystemParams, drives: DriveConfig, m_num: float,
                   with_stability=True, margin=None) -> SteadyStateBranch:
    """Complex amplitudes (and optionally stability) for a root ``m_num``."""
    p = params
    ab = eval_abomega(p, drives, m_num)
    abs_a, abs_b = abs(ab.a_val), abs(ab.b_val)
    if abs(abs_b - abs_a) < 1e-10 * abs_a:
        raise SingularPoint(f"|A| == |B| at M = {m_num:.6g}")
    ms = ((ab.a_val.conjugate() * ab.omega_val + ab.b_val * ab.omega_val.conjugate())
          / (abs_b ** 2 - abs_a ** 2))

    _, o2, om = drives.amplitudes
    mag = p.gamma_m / 2 + 1j * ab.effective_detuning
    mc = p.kappa2 / 2 + 1j * p.delta2
    gj = p.g * p.j_coupling
    if gj > 1e-6 * p.gamma_m ** 2:
        a2s = (om - mag * ms) / (1j * p.g)
        a1s = ((mc * om - 1j * p.g * o2) - (mc * mag + p.g ** 2) * ms) / gj
    else:
        a1s, a2s = _cavities_given_magnon(p, drives, ms)

    residual = stationary_residual(p, drives, a1s, a2s, ms)
    branch = SteadyStateBranch(m_num, complex(ms), complex(a1s), complex(a2s), residual)
    if with_stability:
        if margin is None:
            margin = 1e-9 * p.gamma_m
        branch = replace(branch, stability=classify(build_jacobian(p, branch), margin))
    return branch


def steady_states(params: SystemParams, drives: DriveConfig,
                  tol: RootTolerances = RootTolerances(), margin=None):
    """Every non-singular steady state, ascending in M, with stability."""
    out = []
    for m in solve_quintic(quintic_coefficients(params, drives), tol):
        try:
            out.append(recover_branch(params, drives, m, margin=margin))
        except SingularPoint:
            continue
    return out
