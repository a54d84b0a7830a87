import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from kerrmag import DriveConfig
from kerrmag.errors import DomainError, NoStableBranch
from kerrmag.nonreciprocity import (BranchPolicy, NrRecord, coefficient_match,
                                    critical_couplings, critical_params, response_pair,
                                    select_branch, single_cavity_drives)
from kerrmag.params import TWO_PI
from kerrmag.stability import Stability
from kerrmag.steady_state import quintic_coefficients, solve_quintic, steady_states
from oracles import random_params

MHZ = TWO_PI * 1e6


def with_coupling(spec, x, j, lam):
    p, d = spec.configure(x)
    return p.replace(j_coupling=j, lambda_p=lam), d


def test_critical_params_fig2_caption(fig2a):
    p, d = fig2a.configure(0.1)
    cp = critical_params(p, d)
    assert cp.ratio == pytest.approx(math.sqrt(0.2), rel=1e-12)
    assert cp.j_c / MHZ == pytest.approx(35.78, abs=5e-3)
    assert cp.j_c0 / MHZ == pytest.approx(36.21, abs=5e-3)
    assert cp.lambda_c == -p.kappa1 / 2
    assert cp.lambda_c0 == 0.0
    assert not cp.magnon_drive_warning


def test_critical_params_degenerate_limit():
    j0, _, j, _ = critical_couplings(80 * MHZ, 0.0, 1.0)
    assert j0 == j == 80 * MHZ


def test_critical_params_requires_pdc_drive(fig2a):
    p, d = fig2a.configure(0.1)
    with pytest.raises(DomainError):
        critical_params(p, single_cavity_drives(d)[1])


def test_critical_params_magnon_warning(catalog):
    p, d = catalog["fig6c"].configure(0.1)
    assert critical_params(p, d).magnon_drive_warning


@given(st.floats(1e-3, 1e9), st.floats(1e-3, 1e9), st.floats(1e-3, 10.0))
def test_relaxation_gap(delta1, kappa1, ratio):
    # the gap is ~kappa1^2 / (8 delta1); keep it above double resolution
    assume(kappa1 > 1e-6 * delta1)
    j0, _, j, _ = critical_couplings(delta1, kappa1, ratio)
    assert j0 > j
    assert j0 - j == pytest.approx(ratio * (math.hypot(delta1, kappa1 / 2) - delta1),
                                   rel=1e-9, abs=1e-12 * j0)


def test_coefficient_match_examples(fig2a):
    p, d = fig2a.configure(0.2)
    cp = critical_params(p, d)
    m = coefficient_match(*with_coupling(fig2a, 0.2, cp.j_c, cp.lambda_c))
    assert m.reciprocal and max(m.mismatch) < 1e-12
    assert not coefficient_match(*with_coupling(fig2a, 0.2, 0.8 * cp.j_c,
                                                cp.lambda_c)).reciprocal
    assert coefficient_match(*with_coupling(fig2a, 0.2, cp.j_c0, 0.0)).reciprocal


def test_magnon_drive_breaks_reciprocity(catalog):
    for name in ("fig6a", "fig6d", "fig7c", "fig8b", "fig9d"):
        spec = catalog[name]
        p, d = spec.configure(spec.base_abscissa())
        assert not coefficient_match(p, d).reciprocal


def test_reciprocal_roots_random_points(fig2a):
    rng = np.random.default_rng(11)
    for _ in range(50):
        power = rng.uniform(0.01, 0.5)
        delta = rng.uniform(0.5, 8) * 20 * MHZ * rng.choice([-1, 1])
        p, d = fig2a.configure(power)
        p = p.replace(delta1=delta, delta2=delta)
        cp = critical_params(p, d)
        p = p.replace(j_coupling=abs(cp.j_c), lambda_p=cp.lambda_c)
        pdc, mc = single_cavity_drives(d)
        r1 = solve_quintic(quintic_coefficients(p, pdc))
        r2 = solve_quintic(quintic_coefficients(p, mc))
        assert len(r1) == len(r2)
        for a, b in zip(r1, r2):
            assert abs(a - b) <= 1e-9 * max(a, b)


@pytest.mark.parametrize("policy", list(BranchPolicy))
def test_response_pair_reciprocal_point(fig2a, policy):
    p, d = fig2a.configure(0.175)
    nr = response_pair(p, d, policy)
    assert nr.nr_abs / nr.m1 < 1e-9
    assert abs(nr.nr_db) < 1e-8


def test_response_pair_policies_pick_different_branches(fig2a):
    p, d = fig2a.configure(0.175)
    low = response_pair(p, d, BranchPolicy.LOWEST_STABLE)
    high = response_pair(p, d, BranchPolicy.HIGHEST_STABLE)
    assert high.m1 > 2 * low.m1
    assert response_pair(p, d, BranchPolicy.BACKWARD_SWEEP).m1 == high.m1
    # an empty cavity settles onto the lower branch
    assert response_pair(p, d, BranchPolicy.FORWARD_SWEEP).m1 == low.m1


def test_cooperative_breaking(catalog):
    x = 0.175
    nr = {k: response_pair(*catalog["fig2" + k].configure(x)).nr_abs for k in "bcd"}
    assert nr["d"] > nr["b"] and nr["d"] > nr["c"]


def test_uncoupled_magnon_gives_no_response():
    # the symmetric linear chain with a detached magnon responds with M = 0
    p = random_params(np.random.default_rng(2), kerr=False).replace(
        g=1e-30, lambda_p=0.0, delta2=0.0, delta1=0.0)
    p = p.replace(kappa2=p.kappa1, eta2=p.eta1)
    d = DriveConfig.from_powers(p, 0.1, 0.1)
    nr = response_pair(p, d, BranchPolicy.LOWEST_STABLE)
    assert nr.m1 == pytest.approx(0.0, abs=1e-30) and nr.m2 == pytest.approx(0.0, abs=1e-30)


def test_no_stable_branch(catalog):
    spec = catalog["fig7d"]
    p, d = spec.configure(-80 * MHZ)
    pdc, _ = single_cavity_drives(d)
    branches = steady_states(p, pdc)
    assert all(b.stability is not Stability.STABLE for b in branches)
    with pytest.raises(NoStableBranch):
        select_branch(p, pdc, branches)
    with pytest.raises(NoStableBranch):
        response_pair(p, d)


@given(st.floats(1e-3, 1e16), st.floats(1e-3, 1e16))
def test_nr_db_antisymmetry(m1, m2):
    nr = NrRecord.from_pair(m1, m2)
    assert nr.swapped().nr_db == -nr.nr_db
    assert nr.swapped().nr_abs == nr.nr_abs


def test_nr_db_needs_positive_numbers():
    assert math.isnan(NrRecord.from_pair(0.0, 3.0).nr_db)
    assert NrRecord.from_pair(0.0, 3.0).nr_abs == 3.0
