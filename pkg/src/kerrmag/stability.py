"""Linear stability of steady states and turning-point location."""
from __future__ import annotations

import enum

import numpy as np

from .errors import EigenSolverError


class Stability(str, enum.Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    MARGINAL = "Marginal"

    def __str__(self):
        return self.value


def build_jacobian(params, branch):
    """6x6 linearization in the basis (da1, da1*, da2, da2*, dm, dm*).

    ``branch`` is anything with an ``ms`` attribute, or the complex m_s itself.
    The doubled basis is required: the parametric term couples a1 to a1* and
    the Kerr term couples m to m*.
    """
    p = params
    ms = getattr(branch, "ms", branch)
    n = abs(ms) ** 2
    d1 = -(1j * p.delta1 + p.kappa1 / 2)
    d2 = -(1j * p.delta2 + p.kappa2 / 2)
    dm = -(1j * (p.delta_m + 4.0 * p.kerr_k * n) + p.gamma_m / 2)
    cross = -2j * p.kerr_k * ms ** 2
    j, g, lam = p.j_coupling, p.g, p.lambda_p

    jac = np.zeros((6, 6), dtype=complex)
    jac[0, 0], jac[0, 1], jac[0, 2] = d1, lam, -1j * j
    jac[2, 0], jac[2, 2], jac[2, 4] = -1j * j, d2, -1j * g
    jac[4, 2], jac[4, 4], jac[4, 5] = -1j * g, dm, cross
    # conjugate rows: swap each (x, x*) pair and conjugate
    for r in (0, 2, 4):
        row = jac[r]
        conj_row = np.empty(6, dtype=complex)
        conj_row[0::2] = row[1::2].conj()
        conj_row[1::2] = row[0::2].conj()
        jac[r + 1] = conj_row
    return jac


def eigenvalues(jac):
    try:
        vals = np.linalg.eigvals(jac)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(str(exc)) from exc
    if not np.all(np.isfinite(vals)):
        raise EigenSolverError("non-finite eigenvalues")
    return vals


def classify(jac, margin=None) -> Stability:
    """Stable if every Re(lambda) < -margin, Unstable if any > margin.

    Without an explicit margin, 1e-9 times the total damping |trace| is used.
    """
    if margin is None:
        margin = 1e-9 * abs(np.trace(jac).real)
    re = eigenvalues(jac).real
    if np.all(re < -margin):
        return Stability.STABLE
    if np.any(re > margin):
        return Stability.UNSTABLE
    return Stability.MARGINAL


def find_turning_points(sweep, count_roots=None, resolution=1e-6):
    """Abscissas where the number of real roots jumps by two.

    ``sweep`` is an ordered sequence of (abscissa, roots).  With
    ``count_roots(x) -> int`` each bracket is bisected down to
    ``resolution`` times the grid span; otherwise the bracket midpoint is
    returned.
    """
    pts = [(float(x), len(r)) for x, r in sweep]
    if len(pts) < 2:
        return []
    span = abs(pts[-1][0] - pts[0][0])
    out = []
    for (x0, n0), (x1, n1) in zip(pts, pts[1:]):
        if abs(n1 - n0) != 2:
            continue
        if count_roots is None:
            out.append(0.5 * (x0 + x1))
            continue
        lo, hi = x0, x1
        while abs(hi - lo) > resolution * span:
            mid = 0.5 * (lo + hi)
            if count_roots(mid) == n0:
                lo = mid
            else:
                hi = mid
        out.append(0.5 * (lo + hi))
    return out
