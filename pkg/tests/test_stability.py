import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given

from kerrmag import DriveConfig
from kerrmag.dynamics import ModeState, evolve
from kerrmag.stability import (Stability, build_jacobian, classify, eigenvalues,
                               find_turning_points)
from kerrmag.steady_state import steady_states
from oracles import pdc_threshold, random_params
from strategies import MHZ, params_and_drives

OFF = DriveConfig()


def decoupled(**kw):
    vals = dict(delta1=30 * MHZ, delta2=-20 * MHZ, delta_m=10 * MHZ, kappa1=25 * MHZ,
                kappa2=5 * MHZ, gamma_m=20 * MHZ, g=0.0, j_coupling=0.0,
                lambda_p=0.0, kerr_k=0.0)
    vals.update(kw)
    return SimpleNamespace(**vals)


def test_decoupled_eigenvalues():
    p = decoupled()
    ev = sorted(eigenvalues(build_jacobian(p, 0j)), key=lambda z: (z.real, z.imag))
    expect = []
    for k, d in ((p.kappa1, p.delta1), (p.kappa2, p.delta2), (p.gamma_m, p.delta_m)):
        expect += [complex(-k / 2, d), complex(-k / 2, -d)]
    expect.sort(key=lambda z: (z.real, z.imag))
    assert np.allclose(ev, expect, rtol=1e-12, atol=1e-6)
    assert classify(build_jacobian(p, 0j)) is Stability.STABLE


def test_kerr_cross_term_vanishes_at_zero_amplitude():
    p = decoupled(kerr_k=1e-5, g=3 * MHZ)
    assert build_jacobian(p, 0j)[4, 5] == 0
    assert build_jacobian(p, 1e6 + 2e6j)[4, 5] != 0


@given(params_and_drives())
def test_conjugate_pairs_and_trace(pd):
    p, d = pd
    for b in steady_states(p, d):
        jac = build_jacobian(p, b)
        assert abs(np.trace(jac) + (p.kappa1 + p.kappa2 + p.gamma_m)) <= \
            1e-12 * (p.kappa1 + p.kappa2 + p.gamma_m)
        ev = eigenvalues(jac)
        scale = np.max(np.abs(ev))
        for z in ev:
            assert np.min(np.abs(ev - z.conjugate())) <= 1e-10 * scale


@pytest.mark.parametrize("above", [True, False])
def test_isolated_pdc_threshold(above):
    p = random_params(np.random.default_rng(5)).replace(j_coupling=0.0)
    lam = pdc_threshold(p.delta1, p.kappa1) * (1.05 if above else 0.95)
    jac = build_jacobian(p.replace(lambda_p=lam), 0j)
    expected = Stability.UNSTABLE if above else Stability.STABLE
    assert classify(jac) is expected


def test_marginal_verdict():
    jac = np.diag([-1.0, -1.0, 0.0, 0.0, -2.0, -2.0]).astype(complex)
    assert classify(jac, margin=1e-9) is Stability.MARGINAL


def test_fig2a_middle_root_is_repelling(fig2a_mid):
    p, d = fig2a_mid
    lo, mid, hi = steady_states(p, d)
    assert max(eigenvalues(build_jacobian(p, mid)).real) > 0
    # the time-domain oracle agrees: a small push drives the state away
    start = ModeState(mid.a1s * (1 + 1e-6), mid.a2s, mid.ms)
    end = evolve(p, d, start, 200 / p.gamma_m)
    assert abs(end.magnon_number - mid.m_num) > 1e-2 * mid.m_num


def test_stable_branches_attract(fig2a_mid):
    p, d = fig2a_mid
    for b in steady_states(p, d):
        if b.stability is not Stability.STABLE:
            continue
        start = ModeState(b.a1s * (1 + 1e-3), b.a2s * (1 - 1e-3), b.ms * (1 + 1e-3))
        end = evolve(p, d, start, 50 / p.gamma_m)
        assert abs(end.magnon_number - b.m_num) < 1e-6 * b.m_num


def test_middle_root_unstable_across_window(fig2a):
    for x in np.linspace(0.16, 0.19, 61):
        p, d = fig2a.configure_single(x, "pdc")
        branches = steady_states(p, d)
        if len(branches) == 3:
            assert [b.stability for b in branches] == [
                Stability.STABLE, Stability.UNSTABLE, Stability.STABLE]


def test_turning_points_linear_sweep_empty():
    sweep = [(x, [1.0]) for x in np.linspace(0, 1, 20)]
    assert find_turning_points(sweep) == []


def test_turning_points_bisection():
    def count(x):
        return 3 if 0.32 < x < 0.68 else 1

    sweep = [(x, range(count(x))) for x in np.linspace(0, 1, 11)]
    tp = find_turning_points(sweep, count, resolution=1e-9)
    assert tp == pytest.approx([0.32, 0.68], abs=1e-8)
    assert find_turning_points(sweep) == pytest.approx([0.35, 0.65])
