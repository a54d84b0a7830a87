"""Single-cavity drive reductions, reciprocity conditions and the
nonreciprocity metric M1 (PDC driven) versus M2 (MC driven)."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .dynamics import DEFAULT_OPTIONS, settle
from .errors import DomainError, NoStableBranch
from .params import DriveConfig
from .stability import Stability
from .steady_state import RootTolerances, quintic_coefficients, steady_states


class BranchPolicy(str, enum.Enum):
    FORWARD_SWEEP = "ForwardSweep"
    BACKWARD_SWEEP = "BackwardSweep"
    LOWEST_STABLE = "LowestStable"
    HIGHEST_STABLE = "HighestStable"


@dataclass(frozen=True)
class CriticalParams:
    """Coupling / parametric pairs that make the two single-drive quintics equal.

    ``j_c0`` pairs with ``lambda_c0 = 0``; ``j_c`` pairs with
    ``lambda_c = -kappa1 / 2``.  Both assume an undriven magnon;
    ``magnon_drive_warning`` is set when the template drives it.
    """

    j_c0: float
    lambda_c0: float
    j_c: float
    lambda_c: float
    ratio: float
    magnon_drive_warning: bool = False


def critical_couplings(delta1, kappa1, ratio):
    """(j_c0, lambda_c0, j_c, lambda_c) for drive ratio Omega2 / Omega1."""
    return (ratio * math.hypot(delta1, kappa1 / 2.0), 0.0,
            ratio * delta1, -kappa1 / 2.0)


def critical_params(params, drives) -> CriticalParams:
    o1, o2, _ = drives.amplitudes
    if o1 == 0:
        raise DomainError("critical parameters need a nonzero PDC drive amplitude")
    ratio = o2 / o1
    j_c0, lam_c0, j_c, lam_c = critical_couplings(params.delta1, params.kappa1, ratio)
    return CriticalParams(j_c0, lam_c0, j_c, lam_c, ratio,
                          magnon_drive_warning=drives.p_m > 0 or drives.omega_m_amp != 0)


def single_cavity_drives(template: DriveConfig):
    """(PDC-only, MC-only) copies of ``template``; the magnon drive is kept."""
    pdc = DriveConfig(template.p1, 0.0, template.p_m, template.omega_d,
                      template.omega1_amp, 0.0, template.omega_m_amp)
    mc = DriveConfig(0.0, template.p2, template.p_m, template.omega_d,
                     0.0, template.omega2_amp, template.omega_m_amp)
    return pdc, mc


@dataclass(frozen=True)
class CoefficientMatch:
    pdc: object
    mc: object
    mismatch: tuple  # relative (c2, c1, c0)
    reciprocal: bool


def _rel(a, b):
    big = max(abs(a), abs(b))
    return abs(a - b) / big if big else 0.0


def coefficient_match(params, drives, threshold=1e-9) -> CoefficientMatch:
    """Compare the drive-dependent coefficients (c2, c1, c0) under PDC-only and
    MC-only driving."""
    pdc, mc = single_cavity_drives(drives)
    q1 = quintic_coefficients(params, pdc)
    q2 = quintic_coefficients(params, mc)
    mism = tuple(_rel(q1.c[k], q2.c[k]) for k in (3, 4, 5))
    return CoefficientMatch(q1, q2, mism, all(m < threshold for m in mism))


@dataclass(frozen=True)
class NrRecord:
    m1: float
    m2: float
    nr_abs: float
    nr_db: float

    @classmethod
    def from_pair(cls, m1, m2):
        if m1 > 0 and m2 > 0:
            db = 10.0 * (math.log10(m1) - math.log10(m2))
        else:
            db = math.nan
        return cls(m1, m2, abs(m1 - m2), db)

    def swapped(self):
        return NrRecord.from_pair(self.m2, self.m1)


def stable_roots(branches):
    """Magnon numbers of the strictly stable branches (Marginal excluded)."""
    return [b.m_num for b in branches if b.stability is Stability.STABLE]


def nearest(candidates, target):
    """Candidate closest to ``target`` in relative distance."""
    def dist(m):
        big = max(abs(m), abs(target))
        return abs(m - target) / big if big else 0.0
    return min(candidates, key=dist)


def select_branch(params, drives, branches, policy=BranchPolicy.FORWARD_SWEEP,
                  opts=DEFAULT_OPTIONS):
    """Pick one stable magnon number at a single operating point.

    ForwardSweep settles from the empty cavity and snaps to the closest stable
    root; BackwardSweep at an isolated point means arriving from above, i.e.
    the highest stable root.  Returns (M, converged).
    """
    policy = BranchPolicy(policy)
    stable = stable_roots(branches)
    if not stable:
        raise NoStableBranch("no stable steady state")
    if policy is BranchPolicy.LOWEST_STABLE:
        return stable[0], True
    if policy in (BranchPolicy.HIGHEST_STABLE, BranchPolicy.BACKWARD_SWEEP):
        return stable[-1], True
    if len(stable) == 1:
        return stable[0], True
    res = settle(params, drives, opts=opts)
    return nearest(stable, res.state.magnon_number), res.converged


def response_pair(params, drives, policy=BranchPolicy.FORWARD_SWEEP,
                  tol=RootTolerances(), opts=DEFAULT_OPTIONS) -> NrRecord:
    pdc, mc = single_cavity_drives(drives)
    m1, _ = select_branch(params, pdc, steady_states(params, pdc, tol), policy, opts)
    m2, _ = select_branch(params, mc, steady_states(params, mc, tol), policy, opts)
    return NrRecord.from_pair(m1, m2)
