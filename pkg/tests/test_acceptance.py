"""Acceptance suite: one test per numbered criterion, each printing a PASS/FAIL line.

Run standalone with ``python tests/test_acceptance.py`` for the summary
lines only; under pytest the lines are collected and repeated in the
terminal summary.
"""
import sys
import time

import numpy as np
import pytest

from vopsnc.correlations import (
    bell_b,
    chsh_bruteforce,
    concurrence,
    horodecki_m,
    negativity,
    steering_s3,
    uwe,
)
from vopsnc.fit import add_noise, fit_model, model_state
from vopsnc.phasespace import (
    bs_phase_space_map,
    marginal,
    qpd_grid,
    qpd_two,
    qpd_two_outer,
    reconstruct_from_qpd,
    wigner_displaced_parity_outer,
    wigner_vops,
)
from vopsnc.potentials import (
    Regime,
    bp,
    bp_qr,
    cp,
    cp_qr,
    kappa0,
    np_closed,
    potential_threshold,
    potentials,
    sp,
    sp_qr,
    uwep_qr,
    x_b,
    x_s,
)
from vopsnc.states import (
    ChannelParams,
    bs_unitary_fock,
    mix_with_vacuum,
    phase_damp,
    pure_vops,
    scissors_output,
    two_mode_closed_form,
    vops,
)

from _util import embed, random_density, random_low_photon, random_params, random_vops

RESULTS = {}


def report(n, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n:2d} {title}: {detail}"
    RESULTS[n] = line
    print(line)
    return ok


# 1 -------------------------------------------------------------------------


def test_c01_pure_state_collapse():
    rng = np.random.default_rng(101)
    worst = 0.0
    for p in rng.uniform(0, 1, 100):
        x = np.sqrt(p * (1 - p))
        worst = max(worst, *(abs(f(p, x) - p) for f in (cp, np_closed, sp, bp)))
    ok = report(1, "pure-state collapse CP=NP=SP=BP=p", worst <= 1e-10, f"max deviation {worst:.2e} (tol 1e-10)")
    assert ok


# 2 -------------------------------------------------------------------------


def _hierarchy_violation(pot):
    return max(pot.bp - pot.sp, pot.sp - pot.np, pot.np - pot.cp)


def test_c02_hierarchy():
    rng = np.random.default_rng(102)
    ideal_bad = gen_bad = 0
    worst = -np.inf
    ideal = ChannelParams()
    for _ in range(10_000):
        s = random_vops(rng)
        v = _hierarchy_violation(potentials(s.p, s.x, ideal))
        worst = max(worst, v)
        ideal_bad += v > 1e-12
    for _ in range(10_000):
        s = random_vops(rng)
        v = _hierarchy_violation(potentials(s.p, s.x, random_params(rng)))
        worst = max(worst, v)
        gen_bad += v > 1e-12
    ok = report(2, "hierarchy BP<=SP<=NP<=CP", ideal_bad == 0 and gen_bad == 0,
                f"violations ideal={ideal_bad}, generalized={gen_bad} of 10^4 each (max excess {worst:.1e})")
    assert ok


# 3 -------------------------------------------------------------------------


def test_c03_closed_form_oracles():
    rng = np.random.default_rng(103)
    err = dict.fromkeys(["cp", "np_closed", "sp", "bp", "sp_qr", "bp_qr", "cp_qr", "uwep_qr"], 0.0)
    for _ in range(10_000):
        s = random_vops(rng)
        rho = mix_with_vacuum(s)
        err["cp"] = max(err["cp"], abs(cp(s.p, s.x) - concurrence(rho)))
        err["np_closed"] = max(err["np_closed"], abs(np_closed(s.p, s.x) - negativity(rho)))
        err["sp"] = max(err["sp"], abs(sp(s.p, s.x) - steering_s3(rho)))
        err["bp"] = max(err["bp"], abs(bp(s.p, s.x) - bell_b(rho)))
    for _ in range(10_000):
        s = random_vops(rng)
        par = random_params(rng)
        rho = phase_damp(mix_with_vacuum(s, par.theta), par.q)
        err["cp_qr"] = max(err["cp_qr"], abs(cp_qr(s.p, s.x, par) - concurrence(rho)))
        err["sp_qr"] = max(err["sp_qr"], abs(sp_qr(s.p, s.x, par) - steering_s3(rho)))
        err["bp_qr"] = max(err["bp_qr"], abs(bp_qr(s.p, s.x, par) - bell_b(rho)))
        err["uwep_qr"] = max(err["uwep_qr"], abs(uwep_qr(s.p, s.x, par) - uwe(rho)))
    worst = max(err.values())
    detail = ", ".join(f"{k} {v:.1e}" for k, v in err.items())
    ok = report(3, "closed forms vs matrix measures", worst <= 1e-10, detail + " (tol 1e-10)")
    assert ok


# 4 -------------------------------------------------------------------------


def test_c04_thresholds_x0():
    s_root = potential_threshold("sp", curve="x0").p
    b_root = potential_threshold("bp", curve="x0").p
    e1, e2 = abs(s_root - 2 / 3), abs(b_root - 1 / np.sqrt(2))
    ok = report(4, "x=0 thresholds 2/3 and 1/sqrt2", max(e1, e2) <= 1e-9,
                f"SP root {s_root:.15f} (err {e1:.1e}), BP root {b_root:.15f} (err {e2:.1e})")
    assert ok


# 5 -------------------------------------------------------------------------


def test_c05_lossy_thresholds():
    par = ChannelParams.from_rsq(0.1, 0.6)
    s_root = potential_threshold("sp_qr", par, curve="pure").p
    b_root = potential_threshold("bp_qr", par, curve="pure").p
    ok = abs(s_root - 0.204) <= 1e-3 and abs(b_root - 0.339) <= 1e-3
    report(5, "lossy pure-curve thresholds 0.204/0.339", ok, f"SP_qr {s_root:.6f}, BP_qr {b_root:.6f} (tol 1e-3)")
    assert ok


# 6 -------------------------------------------------------------------------


def test_c06_fig8h_value():
    par = ChannelParams.from_r(0.0, 0.25)
    vals = [f(1.0, 0.0, par) for f in (cp_qr, sp_qr, bp_qr)]
    exact = np.sqrt(15) / 8
    ok = all(abs(v - 0.4841) <= 5e-4 for v in vals) and all(abs(v - exact) <= 1e-12 for v in vals)
    report(6, "lossy value sqrt(15)/8", ok, f"cp/sp/bp = {vals[0]:.12f}/{vals[1]:.12f}/{vals[2]:.12f}, sqrt15/8 = {exact:.12f}")
    assert ok


# 7 -------------------------------------------------------------------------

WIGNER_RANGES = [
    ((0.5, 0.0), (0.0, 0.23)),
    ((0.5, 0.37), (-0.14, 0.50)),
    ((0.5, 0.5), (-0.23, 0.60)),
    ((0.7, 0.0), (-0.25, 0.25)),
    ((0.7, np.sqrt(0.21)), (-0.39, 0.54)),
    ((1.0, 0.0), (-0.64, 0.28)),
]
GRID = np.round(np.arange(-150, 151) * 0.02, 12)


def test_c07_wigner_extrema():
    worst = 0.0
    parts = []
    for (p, x), (lo, hi) in WIGNER_RANGES:
        g = qpd_grid(vops(p, x), 0.0, GRID)
        X, Y = np.meshgrid(GRID, GRID, indexing="ij")
        closed = wigner_vops(p, x, X + 1j * Y)
        assert np.max(np.abs(closed - g.values)) < 1e-12
        dev = max(abs(g.min - lo), abs(g.max - hi))
        worst = max(worst, dev)
        parts.append(f"[{g.min:.3f},{g.max:.3f}]")
    ok = report(7, "Wigner ranges of six states", worst <= 0.01, " ".join(parts) + f" (max dev {worst:.4f}, tol 0.01)")
    assert ok


# 8 -------------------------------------------------------------------------


def test_c08_cahill_extrema():
    parts, worst = [], 0.0
    for (p, x), (lo, hi) in [((0.5, 0.0), (-1.27, 0.57)), ((0.5, 0.37), (-1.49, 1.17))]:
        g = qpd_grid(vops(p, x), 0.5, GRID)
        worst = max(worst, abs(g.min - lo), abs(g.max - hi))
        parts.append(f"[{g.min:.4f},{g.max:.4f}]")
    ok = report(8, "s=1/2 ranges", worst <= 0.01, " ".join(parts) + f" (max dev {worst:.4f})")
    assert ok


# 9 -------------------------------------------------------------------------


def test_c09_marginal_maxima():
    rho = mix_with_vacuum(vops(0.5, 0.37))
    expected = {"X1Y1": 0.50, "X2Y2": 0.50, "X1X2": 0.67, "Y1Y2": 0.39}
    got, norms = {}, {}
    for pair in expected:
        mg = marginal(rho, pair, GRID)
        got[pair], norms[pair] = mg.max, mg.integral()
    worst = max(abs(got[k] - v) for k, v in expected.items())
    ok = worst <= 0.01 and all(abs(n - 1) <= 2e-3 for n in norms.values())
    report(9, "marginal maxima 0.50/0.50/0.67/0.39", ok,
           ", ".join(f"{k} {v:.4f}" for k, v in got.items()) + f" (max dev {worst:.4f})")
    assert ok


# 10 ------------------------------------------------------------------------


def test_c10_channel_composition():
    rng = np.random.default_rng(110)
    worst = 0.0
    for _ in range(10_000):
        s = random_vops(rng)
        par = random_params(rng)
        a = two_mode_closed_form(s.p, s.x, par).rho
        b = phase_damp(mix_with_vacuum(s, par.theta), par.q).rho
        worst = max(worst, float(np.max(np.abs(a - b))))
    ok = report(10, "closed form = dephasing after splitter", worst <= 1e-12, f"max entry error {worst:.2e} (tol 1e-12)")
    assert ok


# 11 ------------------------------------------------------------------------


def _covariance_error(rho_in, theta, s, axis, mirror):
    U = bs_unitary_fock(theta, 3)
    rho_out = U @ rho_in @ U.conj().T
    if mirror:
        P = np.kron(np.eye(3), np.diag([1.0, -1.0, 1.0]))
        rho_out = P @ rho_out @ P
    X, Y = np.meshgrid(axis, axis, indexing="ij")
    pts = (X + 1j * Y).ravel()
    lhs = qpd_two_outer(rho_out, s, pts, pts, dims=(3, 3))
    worst = 0.0
    for start in range(0, pts.size, 200):
        a1 = pts[start:start + 200, None]
        b1, b2 = bs_phase_space_map(a1, pts[None, :], theta, mirror_second=mirror)
        rhs = qpd_two(rho_in, s, b1, b2, dims=(3, 3))
        worst = max(worst, float(np.max(np.abs(lhs[start:start + 200] - rhs))))
    return worst


def test_c11_bs_covariance():
    rng = np.random.default_rng(111)
    axis = np.linspace(-2, 2, 41)
    states = [
        (embed(random_density(rng)), rng.uniform(0, np.pi)),
        (random_low_photon(rng), rng.uniform(0, np.pi)),
        (embed(np.kron(random_vops(rng).matrix, np.diag([1.0, 0.0]))), np.pi / 2),
    ]
    worst = {False: 0.0, True: 0.0}
    for rho, theta in states:
        for s in (-1.0, -0.5, 0.0, 0.5):
            for mirror in (False, True):
                worst[mirror] = max(worst[mirror], _covariance_error(rho, theta, s, axis, mirror))
    ok = max(worst.values()) <= 1e-10
    report(11, "beam-splitter covariance on 41^4 grid", ok,
           f"max error {worst[False]:.1e} (splitter as built), {worst[True]:.1e} (reflecting convention)")
    assert ok


# 12 ------------------------------------------------------------------------


def test_c12_reconstruction():
    rng = np.random.default_rng(112)
    s = random_vops(rng)
    par = random_params(rng)
    targets = [mix_with_vacuum(vops(0.5, 0.37)), two_mode_closed_form(s.p, s.x, par)]
    errs = []
    for rho in targets:
        rec = reconstruct_from_qpd(lambda a, b, r=rho: qpd_two(r, 0.0, a, b), 0.0)
        errs.append(float(np.max(np.abs(rec.rho - rho.rho))))
    ok = report(12, "QPD reconstruction round trip", max(errs) <= 1e-6,
                f"max entry errors {errs[0]:.1e}, {errs[1]:.1e} (tol 1e-6)")
    assert ok


# 13 ------------------------------------------------------------------------


def test_c13_displaced_parity():
    rng = np.random.default_rng(113)
    ax = np.arange(-8, 9) * 0.25
    X, Y = np.meshgrid(ax, ax, indexing="ij")
    pts = (X + 1j * Y).ravel()
    pts = pts[np.abs(pts) <= 2 + 1e-12]
    states = [mix_with_vacuum(vops(0.5, 0.37)), mix_with_vacuum(vops(1.0, 0.0)), random_density(rng)]
    worst = 0.0
    for rho in states:
        a = wigner_displaced_parity_outer(rho, pts, pts)
        b = qpd_two_outer(rho, 0.0, pts, pts)
        worst = max(worst, float(np.max(np.abs(a - b))))
    ok = report(13, "displaced parity = Fock-representation Wigner", worst <= 1e-8,
                f"max difference {worst:.1e} over {pts.size}^2 points per state (tol 1e-8)")
    assert ok


# 14 ------------------------------------------------------------------------


def test_c14_chsh_oracle():
    rng = np.random.default_rng(114)
    states = [mix_with_vacuum(vops(1.0, 0.0))]
    while len(states) < 3:
        s = random_vops(rng)
        par = random_params(rng)
        if potentials(s.p, s.x, par).regime is Regime.IV:
            states.append(two_mode_closed_form(s.p, s.x, par))
    parts, ok = [], True
    for k, rho in enumerate(states):
        bound = 2 * np.sqrt(horodecki_m(rho))
        best = chsh_bruteforce(rho, n_settings=100_000, seed=1400 + k)
        ok &= bound - 0.02 <= best <= bound + 1e-9
        parts.append(f"{best:.5f}/{bound:.5f}")
    report(14, "CHSH search vs 2 sqrt(M)", ok, "found/bound " + ", ".join(parts))
    assert ok


# 15 ------------------------------------------------------------------------


def test_c15_fit_identifiability():
    r0 = np.sqrt(0.55)
    res = fit_model(model_state(0.3, 0.2, 0.1, r0), restarts=16, seed=0)
    e_clean = max(abs(res.p - 0.3), abs(res.x - 0.2), abs(res.q - 0.1), abs(res.r - r0))
    noisy = add_noise(model_state(0.5, 0.3, 0.2, 0.7), 1e-3, seed=15)
    res2 = fit_model(noisy, restarts=16, seed=0)
    e_noisy = max(abs(res2.p - 0.5), abs(abs(res2.x) - 0.3), abs(res2.q - 0.2), abs(res2.r - 0.7))
    ok = e_clean <= 1e-4 and res.fidelity >= 1 - 1e-8 and e_noisy <= 0.02 and res2.fidelity >= 1 - 5e-3
    report(15, "fit identifiability", ok,
           f"noiseless max err {e_clean:.1e}, 1-F {1 - res.fidelity:.1e}; noisy max err {e_noisy:.1e}, 1-F {1 - res2.fidelity:.1e}")
    assert ok


# 16 ------------------------------------------------------------------------


def test_c16_scissors():
    vac = scissors_output(0.0, cutoff=12)
    p = 0.5
    alpha = np.sqrt(p / (1 - p))
    out = scissors_output(alpha, cutoff=12)
    target = pure_vops(p).matrix
    fid = float(np.trace(target @ out.state.matrix).real)  # target is pure
    ok = abs(vac.success_prob - 0.25) <= 1e-10 and vac.state.p <= 1e-12 and fid >= 1 - 1e-8
    report(16, "quantum scissors", ok,
           f"alpha=0: P={vac.success_prob:.12f}, p_out={vac.state.p:.1e}; p=0.5: fidelity 1-{1 - fid:.1e}")
    assert ok


# 17 ------------------------------------------------------------------------


def _criterion_17():
    bad = 0
    for p in np.linspace(0, 2 / 3, 52)[1:-1]:
        xs = x_s(p)
        bad += not (sp(p, xs - 1e-6) == 0 and sp(p, xs + 1e-6) > 0)
    for p in np.linspace(0, 1 / np.sqrt(2), 52)[1:-1]:
        xb = x_b(p)
        bad += not (bp(p, xb - 1e-6) == 0 and bp(p, xb + 1e-6) > 0)
    k0 = kappa0(0.1)
    xm = np.sqrt(0.1 * 0.9)
    sp_just_above = sp(0.1, 0.945 * xm)
    ok_kappa = abs(k0 - 0.944) < 1e-3 and sp_just_above > 0 and sp(0.1, 0.935 * xm) == 0
    ok = bad == 0 and ok_kappa
    report(17, "boundary functions", ok,
           f"x_s/x_b sign-change failures {bad}/100; kappa0(0.1)={k0:.4f} but SP(0.1, kappa=0.945)={sp_just_above:.3g}; "
           f"SP turns on at kappa={np.sqrt(k0):.4f} = sqrt(kappa0)")
    return ok, bad


def test_c17_boundary_xs_xb():
    _, bad = _criterion_17()
    assert bad == 0


@pytest.mark.xfail(strict=True, reason="the kappa > 0.94 statement contradicts the SP closed form (threshold is sqrt(kappa0))")
def test_c17_kappa_claim():
    ok, _ = _criterion_17()
    assert ok


if __name__ == "__main__":
    t0 = time.time()
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_c") and k != "test_c17_kappa_claim"]
    for fn in tests:
        try:
            fn()
        except AssertionError:
            pass
    print(f"{sum('[PASS]' in v for v in RESULTS.values())}/{len(RESULTS)} criteria pass ({time.time() - t0:.0f}s)")
    sys.exit(0 if all("[PASS]" in v for v in RESULTS.values()) else 1)
