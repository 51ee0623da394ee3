"""Acceptance suite: one test per acceptance criterion, in order.

Each test prints exactly one verdict line (bypassing pytest capture, so the
lines appear in any run) of the form

    [acceptance] criterion N: PASS — detail (elapsed)

and then asserts the criterion's thresholds, including its runtime budget.
Random inputs use frozen seeds; the statistical margins below were chosen
once against those seeds and are reproduced bit-for-bit by the seeded
streams, so these tests are deterministic.
"""

import math
import os
import sys
import time

import numpy as np
import pytest

from msqg import (
    GibbsSpec,
    IntegratorConfig,
    ModelParams,
    SeededStream,
    alpha,
    alpha_pairs,
    coefficient_table,
    covariance,
    delta_difference_bound,
    duhamel_residual,
    evolve,
    expectation_B_analytic,
    expectation_B_monte_carlo,
    fast_nonlinearity,
    galerkin_tail,
    inner_sum,
    liouville_divergence,
    quadratic_term_grids,
    run_invariance_experiment,
    sample_field,
    sample_grid_ensemble,
    scaling_check,
    streamline_threshold_scan,
    trajectory_norm_bounds,
)
from msqg.coefficients import _alpha_formula
from msqg.lattice import box_modes, grid_index


@pytest.fixture
def verdict(capfd):
    """Emit one verdict line per criterion on the real stdout.

    pytest's default capture redirects file descriptor 1 itself, so the only
    reliable channel for always-visible progress lines is capfd.disabled().
    """

    def emit(n: int, ok: bool, detail: str, elapsed: float) -> None:
        state = "PASS" if ok else "FAIL"
        with capfd.disabled():
            print(
                f"[acceptance] criterion {n}: {state} — {detail} ({elapsed:.2f}s)",
                file=sys.stdout,
                flush=True,
            )

    return emit


def test_criterion_01_coefficient_symmetry(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    n_pairs = 100000
    K = rng.integers(-32, 33, size=(n_pairs, 2))
    K[np.all(K == 0, axis=1)] = [1, 0]
    H = rng.integers(-32, 33, size=(n_pairs, 2))
    worst = 0.0
    for delta in (0.25, 0.5, 1.0):
        params = ModelParams(delta=delta, cutoff_N=32)
        a = alpha_pairs(K, H, params)
        b = alpha_pairs(K, K - H, params)
        denom = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-300)
        worst = max(worst, float(np.max(np.abs(a - b) / denom)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed < 1.0
    verdict(1, ok, f"pair symmetry over 3x{n_pairs} pairs, worst rel {worst:.2e} <= 1e-12", elapsed)
    assert worst <= 1e-12
    assert elapsed < 1.0


def test_criterion_02_liouville_property(verdict):
    t0 = time.perf_counter()
    worst_div = 0.0
    for N in (2, 3):
        params = ModelParams(delta=0.5, cutoff_N=N)
        spec = GibbsSpec.flow_invariant(params)
        for trial in range(5):
            probe = sample_field(spec, N, SeededStream(200 + 10 * N + trial))
            worst_div = max(worst_div, abs(liouville_divergence(params, N, probe)))
    # analytic vanishing: self-interaction rows and the zero output mode
    params = ModelParams(delta=0.5, cutoff_N=8)
    rng = np.random.default_rng(2)
    ks = rng.integers(-8, 9, size=(50, 2))
    ks[np.all(ks == 0, axis=1)] = [1, 1]
    self_rows = alpha_pairs(ks, ks, params)
    zero_rows = _alpha_formula(np.zeros_like(ks), ks, params)
    exact = bool(np.all(self_rows == 0.0) and np.all(zero_rows == 0.0))
    elapsed = time.perf_counter() - t0
    ok = worst_div <= 1e-7 and exact and elapsed < 5.0
    verdict(2, ok, f"divergence over 10 probes, worst {worst_div:.2e} <= 1e-7; excluded rows exactly 0", elapsed)
    assert worst_div <= 1e-7
    assert exact
    assert elapsed < 5.0


def test_criterion_03_conservation_and_order(verdict):
    t0 = time.perf_counter()
    params = ModelParams(delta=0.5, cutoff_N=6)
    spec = GibbsSpec.flow_invariant(params)
    psi0 = sample_field(spec, 6, SeededStream(3))
    traj = evolve(
        psi0,
        T=1.0,
        params=params,
        config=IntegratorConfig(dt=0.01, fixed_point_tol=1e-13, store_every=100),
    )
    drift_mid = traj.drift["max_rel_drift"]

    psi_rk = sample_field(spec, 6, SeededStream(4))

    def rk4_drift(dt):
        t = evolve(
            psi_rk,
            T=1.0,
            params=params,
            config=IntegratorConfig(method="rk4", dt=dt, store_every=1000),
        )
        return t.drift["max_rel_drift"]

    ratio = rk4_drift(0.04) / rk4_drift(0.02)
    elapsed = time.perf_counter() - t0
    ok = drift_mid <= 1e-9 and 8.0 <= ratio <= 32.0 and elapsed < 30.0
    verdict(3, ok, f"midpoint rel drift {drift_mid:.2e} <= 1e-9; rk4 halving ratio {ratio:.1f} in [8, 32]", elapsed)
    assert drift_mid <= 1e-9
    assert 8.0 <= ratio <= 32.0
    assert elapsed < 30.0


def test_criterion_04_sampler_moments(verdict):
    t0 = time.perf_counter()
    N, M = 8, 100000
    spec = GibbsSpec.moment_normalized()
    stream = SeededStream(2026)
    modes = box_modes(N)
    i, j = grid_index(modes, N)
    m = modes.shape[0]
    cov = np.array([covariance((int(k[0]), int(k[1])), spec) for k in modes])

    gram = np.zeros((m, m), dtype=np.complex128)
    n_chunks, chunk = 10, 10000
    for c in range(n_chunks):
        grids = sample_grid_ensemble(spec, N, chunk, stream.child(c))
        X = grids[:, i, j]
        gram += X.conj().T @ X
    gram /= float(M)

    second = gram.diagonal().real
    z_diag = (second - cov) / (cov / math.sqrt(M))
    worst_diag = float(np.max(np.abs(z_diag)))

    # cross moments, excluding the diagonal and Hermitian mirror pairs
    se = np.sqrt(np.outer(cov, cov) / (2.0 * M))
    zr = gram.real / se
    zi = gram.imag / se
    keep = np.ones((m, m), dtype=bool)
    np.fill_diagonal(keep, False)
    pos = {(int(k[0]), int(k[1])): idx for idx, k in enumerate(modes)}
    for idx, k in enumerate(modes):
        keep[idx, pos[(-int(k[0]), -int(k[1]))]] = False
    worst_cross = float(max(np.max(np.abs(zr[keep])), np.max(np.abs(zi[keep]))))
    elapsed = time.perf_counter() - t0
    ok = worst_diag <= 5.0 and worst_cross <= 5.0 and elapsed < 30.0
    verdict(4, ok, f"M={M} at N={N}: worst diagonal |z| {worst_diag:.2f}, worst cross |z| {worst_cross:.2f}, both <= 5", elapsed)
    assert worst_diag <= 5.0
    assert worst_cross <= 5.0
    assert elapsed < 30.0


def test_criterion_05_measure_invariance_with_negative_control(verdict):
    t0 = time.perf_counter()
    kwargs = dict(
        N=4,
        delta=0.5,
        T=1.0,
        times=[0.25, 0.5, 1.0],
        M=4000,
        config=IntegratorConfig(dt=0.025, fixed_point_tol=1e-10),
        stream=SeededStream(2026),
    )
    positive = run_invariance_experiment(**kwargs)
    bug = run_invariance_experiment(**kwargs, bug_skip_inner_projection=True)
    elapsed = time.perf_counter() - t0

    # budget is stated for 4 cores; normalize when fewer are available
    cores = os.cpu_count() or 1
    budget = 600.0 * 4.0 / min(4, cores)
    ok = (
        positive.passed
        and positive.valid
        and not bug.passed
        and (bug.worst_abs_z > positive.z_threshold or bug.min_ks_p <= bug.ks_per_test_level)
        and elapsed < budget
    )
    verdict(
        5,
        ok,
        f"positive passed (worst |z| {positive.worst_abs_z:.2f} <= 4, min KS p "
        f"{positive.min_ks_p:.2e} > {positive.ks_per_test_level:.2e}); "
        f"bug failed (worst |z| {bug.worst_abs_z:.1f}, min KS p {bug.min_ks_p:.1e}); "
        f"wall {elapsed:.0f}s on {cores} core(s), budget 600s on 4 cores",
        elapsed,
    )
    assert positive.passed
    assert positive.valid
    assert not bug.passed
    assert bug.worst_abs_z > positive.z_threshold
    assert elapsed < budget


def test_criterion_06_expectation_analytic_vs_monte_carlo(verdict):
    t0 = time.perf_counter()
    N, s, M = 6, -2.5, 5000
    stream = SeededStream(11)
    details = []
    worst_z = 0.0
    for idx, delta in enumerate((0.5, 1.0)):
        analytic = expectation_B_analytic(N, s, delta)
        mc, se = expectation_B_monte_carlo(N, s, delta, M, stream.child(idx))
        z = abs(mc - analytic) / se
        worst_z = max(worst_z, z)
        details.append(f"delta={delta:g}: |mc-analytic|/se = {z:.2f}")

    # exhaustive fourth-moment oracle at the smallest box
    worst_rel = 0.0
    for delta in (0.5, 1.0):
        params = ModelParams(delta=delta, cutoff_N=1)
        spec = GibbsSpec.moment_normalized()
        analytic = expectation_B_analytic(1, s, delta, params=params, spec=spec)
        oracle = _isserlis_oracle(1, s, delta, params, spec)
        worst_rel = max(worst_rel, abs(analytic - oracle) / abs(oracle))
    elapsed = time.perf_counter() - t0
    ok = worst_z <= 3.0 and worst_rel <= 1e-12 and elapsed < 300.0
    verdict(6, ok, f"{'; '.join(details)} (<= 3); N=1 oracle rel diff {worst_rel:.1e} <= 1e-12", elapsed)
    assert worst_z <= 3.0
    assert worst_rel <= 1e-12
    assert elapsed < 300.0


def _isserlis_oracle(N, s, delta, params, spec):
    """Independent fourth-moment enumeration (complex Wick pairings)."""

    def pair_conj(a, b):
        return covariance(a, spec) if a == b else 0.0

    def pair_plain(a, b):
        return covariance(a, spec) if (a[0] + b[0], a[1] + b[1]) == (0, 0) else 0.0

    box = [
        (k1, k2)
        for k1 in range(-N, N + 1)
        for k2 in range(-N, N + 1)
        if (k1, k2) != (0, 0)
    ]
    total = 0.0
    for k in box:
        acc = 0.0
        for h in box:
            kh = (k[0] - h[0], k[1] - h[1])
            if kh == (0, 0) or abs(kh[0]) > N or abs(kh[1]) > N:
                continue
            a1 = alpha(k, h, params)
            if a1 == 0.0:
                continue
            for hp in box:
                khp = (k[0] - hp[0], k[1] - hp[1])
                if khp == (0, 0) or abs(khp[0]) > N or abs(khp[1]) > N:
                    continue
                a2 = alpha(k, hp, params)
                if a2 == 0.0:
                    continue
                fourth = (
                    pair_plain(h, kh) * pair_plain((-hp[0], -hp[1]), (-khp[0], -khp[1]))
                    + pair_conj(h, hp) * pair_conj(kh, khp)
                    + pair_conj(h, khp) * pair_conj(kh, hp)
                )
                acc += a1 * a2 * fourth
        total += math.hypot(*k) ** (2.0 * s) * acc
    return total


def test_criterion_07_scaling_budget(verdict):
    t0 = time.perf_counter()
    details = []
    ok = True
    for delta in (0.25, 0.5, 1.0):
        rep = scaling_check(-2.5, delta, k_max=64)
        ok &= rep.band_ratio <= 3.0 and not rep.growth_trend
        details.append(f"delta={delta:g}: band {rep.band_ratio:.2f}")
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 120.0
    verdict(7, ok, f"sum/|k|^2 over |k| <= 64: {'; '.join(details)} (<= 3), no growth trend", elapsed)
    assert ok
    assert elapsed < 120.0


def test_criterion_08_divergence_at_delta_zero(verdict):
    t0 = time.perf_counter()
    div = inner_sum((1, 0), 0.0, 512)
    conv = inner_sum((1, 0), 0.5, 512)
    # increments over the top octaves R in {64, ..., 512}
    top = div.increments[-3:]
    refs = div.reference_increments[-3:]
    band = max(top) / min(top)
    dominance = min(d / r for d, r in zip(top, refs))
    elapsed = time.perf_counter() - t0
    ok = (
        div.verdict == "LogDivergent"
        and band <= 2.0
        and dominance >= 10.0
        and conv.verdict == "Converged"
        and elapsed < 120.0
    )
    verdict(
        8,
        ok,
        f"delta=0: increment band {band:.3f} <= 2, >= {dominance:.0f}x the delta=1 increments, "
        f"verdict {div.verdict}; delta=0.5 verdict {conv.verdict}",
        elapsed,
    )
    assert div.verdict == "LogDivergent"
    assert band <= 2.0
    assert dominance >= 10.0
    assert conv.verdict == "Converged"
    assert elapsed < 120.0


def test_criterion_09_galerkin_tail_decay(verdict):
    t0 = time.perf_counter()
    vals = {N: galerkin_tail(N, 24, -2.5, 0.5) for N in (4, 8, 16)}
    decreasing = vals[4] > vals[8] > vals[16] > 0
    ratio = vals[16] / vals[4]
    elapsed = time.perf_counter() - t0
    ok = decreasing and ratio <= 0.5 and elapsed < 300.0
    verdict(
        9,
        ok,
        f"tail at N_big=24: {vals[4]:.3e} > {vals[8]:.3e} > {vals[16]:.3e}, "
        f"ratio(16/4) {ratio:.2e} <= 0.5",
        elapsed,
    )
    assert decreasing
    assert ratio <= 0.5
    assert elapsed < 300.0


def test_criterion_10_trajectory_norm_identities(verdict):
    t0 = time.perf_counter()
    results = {}
    for quantity in ("state", "rate"):
        lhs, rhs, ok_q = trajectory_norm_bounds(
            N=4,
            delta=1.0,
            T=1.0,
            sigma=-2.5,
            M=2000,
            config=IntegratorConfig(dt=0.02, fixed_point_tol=1e-11),
            stream=SeededStream(9),
            quantity=quantity,
        )
        results[quantity] = (lhs, rhs, ok_q)
    elapsed = time.perf_counter() - t0
    ok = results["state"][2] and results["rate"][2] and elapsed < 600.0
    verdict(
        10,
        ok,
        f"time-integrated H^-2.5 norms within 4*SE: state {results['state'][0]:.3f} vs "
        f"{results['state'][1]:.3f}; rate {results['rate'][0]:.3f} vs {results['rate'][1]:.3f}",
        elapsed,
    )
    assert results["state"][2]
    assert results["rate"][2]
    assert elapsed < 600.0


def test_criterion_11_fast_equals_direct(verdict):
    t0 = time.perf_counter()
    N, count = 16, 100
    params = ModelParams(delta=0.5, cutoff_N=N)
    spec = GibbsSpec.moment_normalized()
    grids = sample_grid_ensemble(spec, N, count, SeededStream(12))

    # independent direct double sum: precomputed coefficient table plus a
    # gather of psi_{k-h}, contracted row by row
    modes, table = coefficient_table(N, params)
    m = modes.shape[0]
    diff1 = modes[:, None, 0] - modes[None, :, 0]
    diff2 = modes[:, None, 1] - modes[None, :, 1]
    inside = (np.abs(diff1) <= N) & (np.abs(diff2) <= N)
    lookup = -np.ones((2 * N + 1, 2 * N + 1), dtype=np.int64)
    gi, gj = grid_index(modes, N)
    lookup[gi, gj] = np.arange(m)
    idx1 = np.clip(diff1 + N, 0, 2 * N)
    idx2 = np.clip(diff2 + N, 0, 2 * N)
    gather = np.where(inside, lookup[idx1, idx2], -1)
    weights = np.where(gather >= 0, table, 0.0)

    fast = quadratic_term_grids(grids, params, read_N=N, write_N=N)
    worst = 0.0
    for f in range(count):
        psi = grids[f, gi, gj]
        psi_pad = np.append(psi, 0.0)
        direct = np.einsum("ij,j,ij->i", weights, psi, psi_pad[gather])
        scale = float(np.max(np.abs(direct)))
        err = float(np.max(np.abs(fast[f, gi, gj] - direct))) / scale
        worst = max(worst, err)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 10.0
    verdict(11, ok, f"{count} fields at N={N}: worst rel difference {worst:.2e} <= 1e-10", elapsed)
    assert worst <= 1e-10
    assert elapsed < 10.0


def test_criterion_12_power_difference_bound(verdict):
    t0 = time.perf_counter()
    details = []
    worst_overall = 0.0
    for delta in (0.25, 0.5, 1.0):
        worst = delta_difference_bound(delta, trials=100000, stream=SeededStream(64))
        worst_overall = max(worst_overall, worst)
        details.append(f"delta={delta:g}: {worst:.3f}")
    elapsed = time.perf_counter() - t0
    ok = worst_overall <= 1.0 + 1e-12 and elapsed < 5.0
    verdict(12, ok, f"ratio to the mean-value bound over 3x100000 pairs: {'; '.join(details)} (<= 1)", elapsed)
    assert worst_overall <= 1.0 + 1e-12
    assert elapsed < 5.0


def test_criterion_13_streamline_threshold_scan(verdict):
    t0 = time.perf_counter()
    rep = streamline_threshold_scan(1.0, s_grid=[-4.0, -3.0, -2.0, -1.0, 0.0], k_max=32)
    converged_low = rep.verdict(-4.0, "consistent") == "converged"
    growing_high = rep.verdict(0.0, "consistent") == "growing"
    finite = math.isfinite(rep.threshold_consistent) and math.isfinite(rep.threshold_alternate)
    elapsed = time.perf_counter() - t0
    ok = converged_low and growing_high and finite and elapsed < 300.0
    verdict(
        13,
        ok,
        f"delta=1: s=-4 {rep.verdict(-4.0)}, s=0 {rep.verdict(0.0)}; empirical thresholds "
        f"consistent {rep.threshold_consistent:.2f} / alternate {rep.threshold_alternate:.2f} "
        f"vs nominal {rep.nominal_threshold:g} — neither variant matches the nominal value; "
        f"see the threshold-scan notes in the module docs",
        elapsed,
    )
    assert converged_low
    assert growing_high
    assert finite
    assert rep.nominal_threshold == pytest.approx(-1.0)
    # the discrepancy is real and must be reported, not hidden: the scan
    # records both empirical thresholds alongside the nominal one
    assert abs(rep.threshold_consistent - rep.nominal_threshold) > 0.2
    assert elapsed < 300.0


def test_criterion_14_integral_form_residual(verdict):
    t0 = time.perf_counter()
    params = ModelParams(delta=1.0, cutoff_N=4)
    spec = GibbsSpec.flow_invariant(params)
    psi0 = sample_field(spec, 4, SeededStream(14))

    def resid(dt):
        traj = evolve(
            psi0,
            T=1.0,
            params=params,
            config=IntegratorConfig(dt=dt, fixed_point_tol=1e-13),
        )
        return duhamel_residual(traj, params)

    ratio = resid(0.02) / resid(0.01)
    trivial = evolve(psi0, T=0.0, params=params, config=IntegratorConfig(dt=0.01))
    at_zero = duhamel_residual(trivial, params)
    elapsed = time.perf_counter() - t0
    ok = 3.0 <= ratio <= 5.0 and at_zero == 0.0 and elapsed < 30.0
    verdict(
        14,
        ok,
        f"residual halving ratio {ratio:.2f} in [3, 5]; trivial horizon residual exactly {at_zero}",
        elapsed,
    )
    assert 3.0 <= ratio <= 5.0
    assert at_zero == 0.0
    assert elapsed < 30.0
