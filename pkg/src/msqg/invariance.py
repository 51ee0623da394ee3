"""Ensemble verification of measure invariance and trajectory-norm identities.

The truncated flow conserves the quadratic form that defines the Gaussian
measure on the box, so pushing an ensemble of samples forward in time must
leave every observable's distribution unchanged.  This module draws such
ensembles (box part random, high-frequency complement frozen), evolves them,
and runs a pre-registered battery of paired z-tests and two-sample KS tests.
A deliberate-bug switch (skipping the inner projection of the quadratic
term) provides the negative control: the battery must detect it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .expectations import expectation_B_analytic
from .flow import IntegratorConfig, NonConvergence, _step_grids, evolve_grid_ensemble
from .gibbs import GibbsSpec, SeededStream, expected_sobolev_norm_sq, sample_grid_ensemble
from .lattice import box_modes, euclid_norm, grid_index
from .nonlinearity import quadratic_term_grids
from .params import ModelParams

__all__ = [
    "ObservablePanel",
    "default_panel",
    "EnsembleReport",
    "run_invariance_experiment",
    "two_sample_test",
    "trajectory_norm_bounds",
]


# ---------------------------------------------------------------------------
# observable panels
# ---------------------------------------------------------------------------

_KINDS = ("re", "im", "abs2", "cos_re", "cos_im", "norm")


@dataclass(frozen=True)
class ObservablePanel:
    """A list of named scalar observables evaluated on spectral grids.

    Each entry is (name, kind, payload): kind "re"/"im"/"abs2"/"cos_re"/
    "cos_im" takes a mode payload (k1, k2, c); kind "norm" takes a Sobolev
    index payload (sigma,).  evaluate() is batched over an ensemble.
    """

    entries: tuple = ()

    @property
    def names(self) -> list[str]:
        return [e[0] for e in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def evaluate(self, grids: np.ndarray) -> np.ndarray:
        """Evaluate all observables on (M, 2R+1, 2R+1) grids -> (M, n_obs)."""
        grids = np.asarray(grids)
        if grids.ndim == 2:
            grids = grids[None, ...]
        R = (grids.shape[-1] - 1) // 2
        out = np.empty((grids.shape[0], len(self.entries)))
        norm_cache: dict[float, np.ndarray] = {}
        modes = None
        for col, (name, kind, payload) in enumerate(self.entries):
            if kind == "norm":
                (sigma,) = payload
                if sigma not in norm_cache:
                    if modes is None:
                        modes = box_modes(R)
                        mi, mj = grid_index(modes, R)
                    w = euclid_norm(modes) ** (2.0 * sigma)
                    c = grids[:, mi, mj]
                    norm_cache[sigma] = np.sum(w * (c.real**2 + c.imag**2), axis=1)
                out[:, col] = norm_cache[sigma]
                continue
            k1, k2, c = payload
            if max(abs(k1), abs(k2)) > R:
                raise ValueError(f"observable {name} targets a mode outside the grid")
            z = grids[:, k1 + R, k2 + R]
            if kind == "re":
                out[:, col] = z.real
            elif kind == "im":
                out[:, col] = z.imag
            elif kind == "abs2":
                out[:, col] = z.real**2 + z.imag**2
            elif kind == "cos_re":
                out[:, col] = np.cos(c * z.real)
            elif kind == "cos_im":
                out[:, col] = np.cos(c * z.imag)
            else:
                raise ValueError(f"unknown observable kind {kind!r}")
        return out


def default_panel(
    modes=((1, 0), (0, 1), (1, 1), (2, 1)),
    sigmas=(-2.5, -3.0),
    c: float = 1.0,
) -> ObservablePanel:
    """The 20-observable default battery.

    Re, Im, |.|^2 and cos(c Re) on each listed mode, the squared H^sigma
    norms, and cos(c Im) on the first two modes: bounded observables probe
    the full distribution, moments probe the covariance structure, and the
    low modes carry the largest share of the measure's variance.
    """
    entries = []
    for k in modes:
        k = (int(k[0]), int(k[1]))
        entries.append((f"Re psi[{k[0]},{k[1]}]", "re", (k[0], k[1], c)))
        entries.append((f"Im psi[{k[0]},{k[1]}]", "im", (k[0], k[1], c)))
        entries.append((f"|psi[{k[0]},{k[1]}]|^2", "abs2", (k[0], k[1], c)))
        entries.append((f"cos({c:g} Re psi[{k[0]},{k[1]}])", "cos_re", (k[0], k[1], c)))
    for sigma in sigmas:
        entries.append((f"||psi||^2_H{sigma:g}", "norm", (float(sigma),)))
    for k in list(modes)[:2]:
        k = (int(k[0]), int(k[1]))
        entries.append((f"cos({c:g} Im psi[{k[0]},{k[1]}])", "cos_im", (k[0], k[1], c)))
    return ObservablePanel(entries=tuple(entries))


# ---------------------------------------------------------------------------
# statistical tests
# ---------------------------------------------------------------------------

def two_sample_test(a, b) -> tuple[float, float]:
    """Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size < 30 or b.size < 30:
        raise ValueError("two_sample_test needs at least 30 samples on each side")
    res = stats.ks_2samp(a, b, method="asymp")
    return float(res.statistic), float(res.pvalue)


def _paired_z(at_t: np.ndarray, at_0: np.ndarray) -> np.ndarray:
    """Paired z-scores per observable column; exactly 0 for identical data."""
    d = at_t - at_0
    mean = d.mean(axis=0)
    sd = d.std(axis=0, ddof=1)
    se = sd / math.sqrt(d.shape[0])
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, mean / np.where(se > 0, se, 1.0), np.where(mean == 0, 0.0, np.inf))
    return z


# ---------------------------------------------------------------------------
# invariance experiment
# ---------------------------------------------------------------------------

@dataclass
class EnsembleReport:
    """Results of one invariance experiment.

    Rows of the per-time matrices follow `times`; columns follow
    `observable_names`.  `passed` is the global verdict: the run is valid
    (failure rate at most `max_failure_rate`), every |z| is at most
    `z_threshold`, and every KS p-value clears the Bonferroni-corrected
    per-test level `ks_family_level / (n_obs * n_times)`.
    """

    N: int
    delta: float
    T: float
    times: list[float]
    M: int
    observable_names: list[str]
    z_threshold: float
    ks_family_level: float
    master_seed: int
    method: str
    dt: float
    bug_skip_inner_projection: bool
    mean_initial: list[float]
    var_initial: list[float]
    means: list[list[float]]
    variances: list[list[float]]
    standard_errors: list[list[float]]
    z_scores: list[list[float]]
    ks_statistics: list[list[float]]
    ks_p_values: list[list[float]]
    failure_count: int
    failure_rate: float
    max_failure_rate: float
    valid: bool
    max_conserved_drift: float
    passed: bool
    worst_abs_z: float
    min_ks_p: float

    @property
    def ks_per_test_level(self) -> float:
        n = max(1, len(self.observable_names) * len(self.times))
        return self.ks_family_level / n

    def to_json(self) -> dict:
        out = dict(self.__dict__)
        out["ks_per_test_level"] = self.ks_per_test_level
        return out


def run_invariance_experiment(
    N: int,
    delta: float,
    T: float,
    times,
    M: int,
    panel: ObservablePanel | None = None,
    config: IntegratorConfig | None = None,
    stream: SeededStream | None = None,
    params: ModelParams | None = None,
    z_threshold: float = 4.0,
    ks_family_level: float = 0.01,
    max_failure_rate: float = 1e-3,
    bug_skip_inner_projection: bool = False,
) -> EnsembleReport:
    """Test that the truncated flow leaves the Gaussian measure invariant.

    Draws M fields on the reporting box of radius 2N from the flow-invariant
    spectral law (the complement of the dynamical box stays frozen along the
    flow), evolves the ensemble to each requested time, evaluates the panel,
    and compares against t = 0 with paired z-tests and two-sample KS tests.
    With bug_skip_inner_projection the quadratic term reads the full stored
    field instead of its box projection — an inconsistent truncation that
    does not conserve the box quadratic form, which the battery must flag.
    """
    if M < 100:
        raise ValueError(f"need at least 100 ensemble members, got {M}")
    times = sorted(float(t) for t in times)
    if times and times[0] < 0:
        raise ValueError("times must be nonnegative")
    if times and times[-1] > T + 1e-12:
        raise ValueError("times must not exceed the horizon T")
    if panel is None:
        panel = default_panel()
    if config is None:
        config = IntegratorConfig()
    if stream is None:
        stream = SeededStream(master_seed=0)
    if params is None:
        params = ModelParams(delta=delta, cutoff_N=N)
    else:
        params = ModelParams(
            delta=delta,
            formulation=params.formulation,
            cutoff_N=N,
            streamline_variant=params.streamline_variant,
        )
    params.require_dynamics()
    spec = GibbsSpec.flow_invariant(params)

    R = 2 * N  # reporting box: dynamical box plus a frozen complement ring
    grids0 = sample_grid_ensemble(spec, R, M, stream.child(0), hermitian=True)

    read_N = R if bug_skip_inner_projection else N

    def rhs(g):
        return quadratic_term_grids(g, params, read_N=read_N, write_N=N)

    checkpoints = [t for t in times if t > 0]
    states, failed = evolve_grid_ensemble(grids0, checkpoints, params, config, rhs=rhs)
    by_time = {}
    for t, g in zip(checkpoints, states):
        by_time[t] = g
    for t in times:
        if t == 0.0:
            by_time[t] = grids0

    n_fail = int(np.sum(failed))
    rate = n_fail / M
    valid = rate <= max_failure_rate
    ok = ~failed

    vals0 = panel.evaluate(grids0[ok])
    n_obs = len(panel)
    n_times = len(times)
    per_level = ks_family_level / max(1, n_obs * n_times)

    means, variances, ses, zs, ks_s, ks_p = [], [], [], [], [], []
    for t in times:
        vals_t = panel.evaluate(by_time[t][ok])
        means.append(vals_t.mean(axis=0).tolist())
        variances.append(vals_t.var(axis=0, ddof=1).tolist())
        d = vals_t - vals0
        ses.append((d.std(axis=0, ddof=1) / math.sqrt(d.shape[0])).tolist())
        zs.append(_paired_z(vals_t, vals0).tolist())
        row_s, row_p = [], []
        for col in range(n_obs):
            if t == 0.0:
                row_s.append(0.0)
                row_p.append(1.0)
            else:
                s_val, p_val = two_sample_test(vals_t[:, col], vals0[:, col])
                row_s.append(s_val)
                row_p.append(p_val)
        ks_s.append(row_s)
        ks_p.append(row_p)

    # conservation shadow: the box quadratic form should be flat per member
    e = params.conserved_exponent()
    drift = 0.0
    box = box_modes(N)
    bi, bj = grid_index(box, R)
    w = euclid_norm(box) ** (2.0 * e)
    c0 = grids0[ok][:, bi, bj]
    f0 = np.sum(w * (c0.real**2 + c0.imag**2), axis=1)
    for t in times:
        if t == 0.0:
            continue
        ct = by_time[t][ok][:, bi, bj]
        ft = np.sum(w * (ct.real**2 + ct.imag**2), axis=1)
        drift = max(drift, float(np.max(np.abs(ft - f0) / np.maximum(f0, 1e-300))))

    z_arr = np.asarray(zs)
    p_arr = np.asarray(ks_p)
    worst_z = float(np.max(np.abs(z_arr))) if z_arr.size else 0.0
    min_p = float(np.min(p_arr)) if p_arr.size else 1.0
    passed = bool(valid and worst_z <= z_threshold and min_p > per_level)

    return EnsembleReport(
        N=N,
        delta=float(delta),
        T=float(T),
        times=times,
        M=M,
        observable_names=panel.names,
        z_threshold=z_threshold,
        ks_family_level=ks_family_level,
        master_seed=stream.master_seed,
        method=config.method,
        dt=config.dt,
        bug_skip_inner_projection=bug_skip_inner_projection,
        mean_initial=vals0.mean(axis=0).tolist(),
        var_initial=vals0.var(axis=0, ddof=1).tolist(),
        means=means,
        variances=variances,
        standard_errors=ses,
        z_scores=zs,
        ks_statistics=ks_s,
        ks_p_values=ks_p,
        failure_count=n_fail,
        failure_rate=rate,
        max_failure_rate=max_failure_rate,
        valid=valid,
        max_conserved_drift=drift,
        passed=passed,
        worst_abs_z=worst_z,
        min_ks_p=min_p,
    )


# ---------------------------------------------------------------------------
# trajectory-norm identities
# ---------------------------------------------------------------------------

def trajectory_norm_bounds(
    N: int,
    delta: float,
    T: float,
    sigma: float,
    M: int,
    config: IntegratorConfig | None = None,
    stream: SeededStream | None = None,
    params: ModelParams | None = None,
    quantity: str = "state",
    max_failure_rate: float = 1e-3,
) -> tuple[float, float, bool]:
    """Check a time-integrated ensemble norm against its invariance value.

    quantity="state" compares (1/M) sum_m int_0^T ||Psi_m(tau)||^2_{H^sigma}
    dtau with T * E||psi||^2_{H^sigma} (closed-form covariance sum);
    quantity="rate" does the same for the time derivative, i.e. the
    quadratic term along the trajectory, against T * E||B^N||^2_{H^sigma}
    (Wick expectation).  Under the invariant measure the time marginals are
    stationary, so both identities are exact in expectation; the verdict is
    agreement within 4 standard errors of the member integrals.
    """
    if sigma >= -2.0:
        raise ValueError("sigma must be below -2 for a trace-class comparison")
    if M < 100:
        raise ValueError(f"need at least 100 ensemble members, got {M}")
    if quantity not in ("state", "rate"):
        raise ValueError(f"quantity must be 'state' or 'rate', got {quantity!r}")
    if config is None:
        config = IntegratorConfig(dt=0.02)
    if stream is None:
        stream = SeededStream(master_seed=0)
    if params is None:
        params = ModelParams(delta=delta, cutoff_N=N)
    else:
        params = ModelParams(
            delta=delta,
            formulation=params.formulation,
            cutoff_N=N,
            streamline_variant=params.streamline_variant,
        )
    params.require_dynamics()
    spec = GibbsSpec.flow_invariant(params)

    n_steps = int(round(T / config.dt))
    if n_steps < 1 or abs(n_steps * config.dt - T) > 1e-9 * max(T, 1.0):
        raise ValueError("T must be a positive multiple of the time step")

    modes = box_modes(N)
    mi, mj = grid_index(modes, N)
    w = euclid_norm(modes) ** (2.0 * sigma)

    def rhs(g):
        return quadratic_term_grids(g, params, read_N=N, write_N=N)

    def integrand(g):
        c = rhs(g)[:, mi, mj] if quantity == "rate" else g[:, mi, mj]
        return np.sum(w * (c.real**2 + c.imag**2), axis=1)

    grids = sample_grid_ensemble(spec, N, M, stream.child(0), hermitian=True)
    acc = np.zeros(M)
    failed = np.zeros(M, dtype=bool)
    f_prev = integrand(grids)
    for _ in range(n_steps):
        grids, step_failed = _step_grids(grids, config.dt, config, rhs)
        failed |= step_failed
        f_cur = integrand(grids)
        acc += 0.5 * config.dt * (f_prev + f_cur)
        f_prev = f_cur

    if np.mean(failed) > max_failure_rate:
        raise NonConvergence(
            f"{int(np.sum(failed))} of {M} members failed to converge"
        )
    vals = acc[~failed]
    lhs = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / math.sqrt(vals.size))
    if quantity == "state":
        rhs_val = T * expected_sobolev_norm_sq(spec, N, sigma)
    else:
        rhs_val = T * expectation_B_analytic(N, sigma, delta, params=params, spec=spec)
    verdict = bool(abs(lhs - rhs_val) <= 4.0 * se)
    return lhs, rhs_val, verdict
