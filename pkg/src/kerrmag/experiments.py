"""Scenario engine: parameter sweeps under PDC-only and MC-only drive.

Each grid point is solved from the quintic; branch selection along a sweep is
done by root continuation (the stable root nearest the previous selection),
which is what an adiabatic sweep settles onto.
"""
from __future__ import annotations

import enum
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .dynamics import (DEFAULT_OPTIONS, Direction, IntegratorOptions,
                       hysteresis_sweep, settle)
from .errors import Degenerate, KerrMagError, NoPhysicalRoot, SingularPoint
from .nonreciprocity import (BranchPolicy, NrRecord, nearest, single_cavity_drives)
from .params import (CONSTANTS, TWO_PI, DriveConfig, SystemParams,
                     magnon_frequency_from_field)
from .stability import Stability, find_turning_points
from .steady_state import (RootTolerances, quintic_coefficients, recover_branch,
                           solve_quintic)

log = logging.getLogger(__name__)


class SweepVariable(str, enum.Enum):
    POWER = "Power"
    DETUNING = "Detuning"
    BIAS_FIELD = "BiasField"
    KERR = "KerrCoeff"


# SI unit of the abscissa, as stored in records
ABSCISSA_UNITS = {
    SweepVariable.POWER: "W",
    SweepVariable.DETUNING: "rad/s",
    SweepVariable.BIAS_FIELD: "T",
    SweepVariable.KERR: "rad/s",
}


@dataclass(frozen=True)
class Baseline:
    """Fixed system and drive settings a sweep perturbs (rad/s, W)."""

    kappa1: float = TWO_PI * 25e6
    kappa2: float = TWO_PI * 5e6
    gamma_m: float = TWO_PI * 20e6
    g: float = TWO_PI * 41e6
    omega_m: float = TWO_PI * 10.1e9
    omega_d: float = TWO_PI * 10.1e9
    kerr_k: float = TWO_PI * 0.5e-6
    eta1: float = 0.5
    eta2: float = 0.5
    eta_m: float = 0.5
    # common cavity detuning, delta1 = delta2
    delta: float = TWO_PI * 80e6
    # common cavity input power p1 = p2
    power: float = 0.1
    p_m: float = 0.0


@dataclass(frozen=True)
class SweepSpec:
    name: str = "custom"
    variable: SweepVariable = SweepVariable.POWER
    lo: float = 0.05
    hi: float = 0.35
    points: int = 400
    spacing: str = "linear"
    j_mult: float = 1.0
    lambda_mult: float = 1.0
    policy: BranchPolicy = BranchPolicy.FORWARD_SWEEP
    base: Baseline = field(default_factory=Baseline)
    # absolute overrides (rad/s) for the multiplier rules
    j_abs: float | None = None
    lambda_abs: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "variable", SweepVariable(self.variable))
        object.__setattr__(self, "policy", BranchPolicy(self.policy))
        if self.points < 2:
            raise ValueError("a sweep needs at least 2 points")
        if not self.lo < self.hi:
            raise ValueError("sweep range needs lo < hi")
        if self.spacing not in ("linear", "log"):
            raise ValueError("spacing must be 'linear' or 'log'")
        if self.spacing == "log" and self.lo <= 0:
            raise ValueError("log spacing needs lo > 0")
        for name in ("j_mult", "lambda_mult"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    def grid(self):
        if self.spacing == "log":
            return np.geomspace(self.lo, self.hi, self.points)
        return np.linspace(self.lo, self.hi, self.points)

    def base_abscissa(self):
        """Abscissa value that reproduces the baseline itself."""
        b = self.base
        return {
            SweepVariable.POWER: b.power,
            SweepVariable.DETUNING: b.delta,
            SweepVariable.BIAS_FIELD: b.omega_m / CONSTANTS.gyromagnetic_gamma,
            SweepVariable.KERR: b.kerr_k,
        }[self.variable]

    def configure(self, x):
        """(SystemParams, drive template with p1 = p2) at abscissa ``x``."""
        b = self.base
        delta, power, kerr = b.delta, b.power, b.kerr_k
        omega_m, omega_d = b.omega_m, b.omega_d
        delta_m = None
        v = self.variable
        x = float(x)
        if v is SweepVariable.POWER:
            power = x
        elif v is SweepVariable.DETUNING:
            # delta_m = delta1 = delta2 = x with omega_d = omega_m - x
            delta = delta_m = x
            omega_d = omega_m - x
        elif v is SweepVariable.BIAS_FIELD:
            omega_m = magnon_frequency_from_field(x)
        else:
            kerr = x
        if delta_m is None:
            delta_m = omega_m - omega_d

        if self.j_abs is not None:
            j = self.j_abs
        else:
            # Omega2 / Omega1 at equal powers
            ratio = math.sqrt(b.eta2 * b.kappa2 / (b.eta1 * b.kappa1))
            j = self.j_mult * ratio * abs(delta)
        lam = self.lambda_abs if self.lambda_abs is not None else \
            self.lambda_mult * (-b.kappa1 / 2.0)

        params = SystemParams(
            delta1=delta, delta2=delta, delta_m=delta_m, kappa1=b.kappa1,
            kappa2=b.kappa2, gamma_m=b.gamma_m, g=b.g, j_coupling=j, lambda_p=lam,
            kerr_k=kerr, eta1=b.eta1, eta2=b.eta2, eta_m=b.eta_m)
        drives = DriveConfig.from_powers(params, power, power, b.p_m, omega_d)
        return params, drives

    def configure_single(self, x, which):
        """(params, drives) with only the 'pdc' or 'mc' cavity driven."""
        params, template = self.configure(x)
        pdc, mc = single_cavity_drives(template)
        return params, (pdc if which == "pdc" else mc)


@dataclass(frozen=True)
class SweepRecord:
    abscissa: float
    # PDC-only roots as (M, Stability), ascending
    roots: tuple
    # MC-only roots, same layout
    roots_mc: tuple
    m1: float
    m2: float
    nr_abs: float
    nr_db: float
    flags: tuple = ()


def _roots_at(params, drives, tol):
    flags = []
    try:
        ms = solve_quintic(quintic_coefficients(params, drives), tol)
    except Degenerate:
        return (), ["Degenerate"]
    except NoPhysicalRoot:
        return (), ["NoPhysicalRoot"]
    out = []
    for m in ms:
        try:
            br = recover_branch(params, drives, m)
        except SingularPoint:
            flags.append("SingularPoint")
            continue
        except KerrMagError:
            flags.append("EigenSolverError")
            continue
        out.append((m, br.stability))
    return tuple(out), flags


def _point_task(args):
    spec, x, tol = args
    params, template = spec.configure(x)
    pdc, mc = single_cavity_drives(template)
    r1, f1 = _roots_at(params, pdc, tol)
    r2, f2 = _roots_at(params, mc, tol)
    flags = []
    for f in f1 + f2:
        if f not in flags:
            flags.append(f)
    return r1, r2, flags


def _stable(roots):
    return [m for m, s in roots if s is Stability.STABLE]


def _continue(xs_roots, seed_fn, order):
    """Root continuation along ``order``; returns (selected dict, flags dict)."""
    chosen, flags = {}, {}
    prev = None
    for i in order:
        stable = _stable(xs_roots[i])
        if not stable:
            chosen[i] = math.nan
            flags[i] = ["NoStableBranch"] if xs_roots[i] else []
            continue
        if prev is None:
            m, ok = seed_fn(i, stable)
            flags[i] = [] if ok else ["Unconverged"]
        else:
            m = nearest(stable, prev)
            flags[i] = []
        chosen[i] = prev = m
    return chosen, flags


def _select(spec, xs, roots, which, opts):
    n = len(xs)
    policy = spec.policy

    if policy in (BranchPolicy.LOWEST_STABLE, BranchPolicy.HIGHEST_STABLE):
        pick = 0 if policy is BranchPolicy.LOWEST_STABLE else -1
        chosen, flags = {}, {}
        for i in range(n):
            stable = _stable(roots[i])
            chosen[i] = stable[pick] if stable else math.nan
            flags[i] = [] if stable or not roots[i] else ["NoStableBranch"]
        return chosen, flags

    def zero_seed(i, stable):
        if len(stable) == 1:
            return stable[0], True
        params, drives = spec.configure_single(xs[i], which)
        res = settle(params, drives, opts=opts)
        return nearest(stable, res.state.magnon_number), res.converged

    fwd, fflags = _continue(roots, zero_seed, range(n))
    if policy is BranchPolicy.FORWARD_SWEEP:
        return fwd, fflags

    # the backward sweep starts where the forward sweep ended
    def from_top(i, stable):
        top = fwd[n - 1]
        return (nearest(stable, top) if math.isfinite(top) else stable[-1]), True

    return _continue(roots, from_top, range(n - 1, -1, -1))


def run_sweep(spec: SweepSpec, threads=1, tol=RootTolerances(),
              opts: IntegratorOptions = DEFAULT_OPTIONS):
    """One SweepRecord per grid point, in grid order.

    Root sets are computed independently per point (in ``threads`` worker
    processes when > 1); per-point failures become flags.
    """
    xs = [float(x) for x in spec.grid()]
    tasks = [(spec, x, tol) for x in xs]
    if threads and threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_point_task, tasks,
                                    chunksize=max(1, len(tasks) // (4 * threads))))
    else:
        results = [_point_task(t) for t in tasks]

    roots1 = [r[0] for r in results]
    roots2 = [r[1] for r in results]
    sel1, fl1 = _select(spec, xs, roots1, "pdc", opts)
    sel2, fl2 = _select(spec, xs, roots2, "mc", opts)

    records = []
    for i, x in enumerate(xs):
        flags = list(results[i][2])
        for f in fl1[i] + fl2[i]:
            if f not in flags:
                flags.append(f)
        m1, m2 = sel1[i], sel2[i]
        if math.isfinite(m1) and math.isfinite(m2):
            nr = NrRecord.from_pair(m1, m2)
            nr_abs, nr_db = nr.nr_abs, nr.nr_db
        else:
            nr_abs = nr_db = math.nan
        records.append(SweepRecord(x, roots1[i], roots2[i], m1, m2, nr_abs, nr_db,
                                   tuple(flags)))
    return records


def turning_points(spec: SweepSpec, which="pdc", resolution=1e-6):
    """Saddle-node abscissas of the single-drive root count along ``spec``."""
    def count(x):
        params, drives = spec.configure_single(x, which)
        try:
            return len(solve_quintic(quintic_coefficients(params, drives)))
        except (Degenerate, NoPhysicalRoot):
            return 0

    sweep = [(float(x), range(count(x))) for x in spec.grid()]
    return find_turning_points(sweep, count, resolution)


def hysteresis_traces(spec: SweepSpec, which="pdc",
                      opts: IntegratorOptions = DEFAULT_OPTIONS):
    """Forward and backward adiabatic ODE sweeps over ``spec.grid()``.

    The backward sweep starts from the forward end state.  Returns
    (abscissas ascending, M_forward, M_backward).
    """
    xs = [float(x) for x in spec.grid()]

    def configure(x):
        return spec.configure_single(x, which)

    fwd = hysteresis_sweep(configure, xs, Direction.FORWARD, opts=opts,
                           return_states=True)
    seed = fwd[-1][2].state
    bwd = hysteresis_sweep(configure, xs[::-1], Direction.BACKWARD, seed=seed,
                           opts=opts)
    return xs, [m for _, m, _ in fwd], [m for _, m in bwd][::-1]


# ---------------------------------------------------------------- catalog

_PANELS = {"a": ("1.0", "1.0"), "b": ("0.8", "1.0"), "c": ("1.0", "0.2"),
           "d": ("0.8", "0.2")}

# sweep families, written as config entries with caption units
_FAMILIES = {
    "power": {"variable": "Power", "lo": "50 mW", "hi": "350 mW"},
    "detuning": {"variable": "Detuning", "lo": "-200 MHz", "hi": "200 MHz",
                 "power": "100 mW"},
    "field": {"variable": "BiasField", "lo": "340 mT", "hi": "400 mT",
              "delta": "2 MHz", "power": "100 mW"},
    "kerr": {"variable": "KerrCoeff", "lo": "-5 uHz", "hi": "5 uHz",
             "delta": "20 MHz", "power": "100 mW"},
}

_FIGURES = {
    2: ("power", None), 3: ("detuning", None), 4: ("field", None), 5: ("kerr", None),
    6: ("power", ("1 uW", "10 uW", "50 uW", "100 uW")),
    7: ("detuning", ("1 mW", "10 mW", "50 mW", "100 mW")),
    8: ("field", ("1 mW", "10 mW", "50 mW", "100 mW")),
    9: ("kerr", ("1 mW", "10 mW", "50 mW", "100 mW")),
}


def catalog_entries():
    """Raw key/value overrides for every built-in scenario, by name."""
    out = {}
    for fig, (family, magnon) in _FIGURES.items():
        for k, panel in enumerate("abcd"):
            entry = {"name": f"fig{fig}{panel}"}
            entry.update(_FAMILIES[family])
            if magnon is None:
                entry["j_mult"], entry["lambda_mult"] = _PANELS[panel]
            else:
                # magnon-drive figures keep the critical condition
                entry["p_m"] = magnon[k]
            out[entry["name"]] = entry
    return out


def scenario_catalog():
    """Every built-in scenario as a SweepSpec, keyed by name."""
    from .config import RunConfig
    return {name: RunConfig.from_entries(e).to_spec()
            for name, e in catalog_entries().items()}


def with_points(spec: SweepSpec, points):
    return replace(spec, points=points)
