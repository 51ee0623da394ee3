"""Time integration of the truncated flow d/dt psi = B^N(psi).

The default integrator is the implicit midpoint rule solved by fixed-point
iteration: the update x' = 2m - x with m the midpoint fixed point conserves
every quadratic invariant of the flow up to the solver tolerance, because the
interaction is exactly orthogonal to the state in the conserved form.  RK4 is
provided for speed and convergence-order checks.

Steps act on the cutoff box only; coefficients outside the box ride along
frozen.  States must be Hermitian (real physical fields) — the conservation
structure fails on non-Hermitian states, so they are rejected rather than
silently evolved.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import SpectralField, is_hermitian
from .lattice import box_modes, grid_index, representatives
from .nonlinearity import quadratic_term_grids, truncated_nonlinearity
from .params import ModelParams

__all__ = [
    "NonConvergence",
    "IntegratorConfig",
    "Trajectory",
    "step",
    "evolve",
    "evolve_grid_ensemble",
    "liouville_divergence",
    "duhamel_residual",
]

METHODS = ("implicit_midpoint", "rk4")


class NonConvergence(RuntimeError):
    """The midpoint fixed-point iteration failed to reach tolerance."""


@dataclass(frozen=True)
class IntegratorConfig:
    """Time-stepping configuration.

    fixed_point_tol is an absolute sup-norm tolerance on the midpoint
    iteration increment; max_fixed_point_iters bounds the iteration count
    before NonConvergence is raised (usually a sign that dt is too large).
    """

    method: str = "implicit_midpoint"
    dt: float = 0.01
    fixed_point_tol: float = 1e-13
    max_fixed_point_iters: int = 100
    store_every: int = 1

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.fixed_point_tol <= 0 or self.max_fixed_point_iters < 1:
            raise ValueError("tolerances must be positive")
        if self.store_every < 1:
            raise ValueError("store_every must be >= 1")


@dataclass
class Trajectory:
    """Time-stamped states plus integrator provenance.

    Coefficients outside the cutoff box are identical across all states; the
    drift dict records the relative drift of the conserved quadratic form.
    """

    times: np.ndarray
    states: list[SpectralField]
    params: ModelParams
    config: IntegratorConfig
    provenance: dict | None = None
    drift: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.states)


# ---------------------------------------------------------------------------
# batched grid stepping
# ---------------------------------------------------------------------------

def _default_rhs(params: ModelParams, N: int, workers: int | None = None):
    def rhs(grids: np.ndarray) -> np.ndarray:
        return quadratic_term_grids(grids, params, N, N, workers=workers)

    return rhs


def _midpoint_step_grids(grids, dt, rhs, tol, max_iters):
    """One implicit midpoint step on batched grids.

    Returns (new_grids, failed) where failed is a boolean mask over leading
    batch axes marking members whose fixed point did not reach tolerance.
    """
    m = grids + (0.5 * dt) * rhs(grids)  # one Euler half-step as initial guess
    for _ in range(max_iters):
        m_next = grids + (0.5 * dt) * rhs(m)
        worst = np.max(np.abs(m_next - m), axis=(-1, -2))
        m = m_next
        if np.all(worst <= tol):
            break
    # NaN-safe: a diverged member (worst = nan) must count as failed
    failed = ~(worst <= tol)
    return 2.0 * m - grids, failed


def _rk4_step_grids(grids, dt, rhs):
    k1 = rhs(grids)
    k2 = rhs(grids + (0.5 * dt) * k1)
    k3 = rhs(grids + (0.5 * dt) * k2)
    k4 = rhs(grids + dt * k3)
    return grids + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), np.zeros(
        grids.shape[:-2], dtype=bool
    )


def _step_grids(grids, dt, config: IntegratorConfig, rhs):
    if config.method == "implicit_midpoint":
        return _midpoint_step_grids(
            grids, dt, rhs, config.fixed_point_tol, config.max_fixed_point_iters
        )
    return _rk4_step_grids(grids, dt, rhs)


def evolve_grid_ensemble(
    grids: np.ndarray,
    checkpoints,
    params: ModelParams,
    config: IntegratorConfig,
    rhs=None,
    workers: int | None = None,
):
    """Advance batched grids to each checkpoint time; lockstep, uniform dt.

    Checkpoints must be (near-)integer multiples of dt.  Returns
    (list of grid arrays at the checkpoints, failure mask over members).
    The rhs callable defaults to the cutoff-box quadratic term; a caller may
    substitute any derivative map that vanishes outside the evolved box.
    """
    params.require_dynamics()
    checkpoints = [float(t) for t in checkpoints]
    if any(t < 0 for t in checkpoints) or sorted(checkpoints) != checkpoints:
        raise ValueError("checkpoints must be nonnegative and increasing")
    if rhs is None:
        rhs = _default_rhs(params, params.cutoff_N, workers)
    state = np.array(grids, dtype=np.complex128)
    failed = np.zeros(state.shape[:-2], dtype=bool)
    out = []
    t = 0.0
    for target in checkpoints:
        span = target - t
        n_steps = int(round(span / config.dt))
        if abs(n_steps * config.dt - span) > 1e-9 * max(1.0, abs(target)):
            raise ValueError(
                f"checkpoint {target} is not an integer number of dt={config.dt} steps"
            )
        for _ in range(n_steps):
            state, bad = _step_grids(state, config.dt, config, rhs)
            failed |= bad
        t = target
        out.append(state.copy())
    return out, failed


# ---------------------------------------------------------------------------
# single-state API
# ---------------------------------------------------------------------------

def _require_dynamical_state(state: SpectralField, params: ModelParams) -> None:
    params.require_dynamics()
    if not state.hermitian or not is_hermitian(state, tol=1e-10):
        raise ValueError(
            "dynamics requires Hermitian states (real physical fields); "
            "non-Hermitian inputs are rejected rather than silently evolved"
        )


def step(state: SpectralField, params: ModelParams, config: IntegratorConfig) -> SpectralField:
    """One time step; acts on the cutoff box, complement coefficients frozen."""
    _require_dynamical_state(state, params)
    N = max(state.box_N, params.cutoff_N)
    grid = state.resized(N).grid
    new, failed = _step_grids(grid, config.dt, config, _default_rhs(params, params.cutoff_N))
    if np.any(failed):
        raise NonConvergence(
            f"midpoint iteration did not reach {config.fixed_point_tol:g} in "
            f"{config.max_fixed_point_iters} iterations; try a smaller dt"
        )
    return SpectralField(new, state.hermitian)


def evolve(
    initial: SpectralField,
    T: float,
    params: ModelParams,
    config: IntegratorConfig,
    provenance: dict | None = None,
) -> Trajectory:
    """Integrate on [0, T] with uniform steps (last step shortened).

    Stores every ``config.store_every``-th state (plus the endpoints) and
    records the relative drift of the conserved quadratic form.
    """
    _require_dynamical_state(initial, params)
    if T < 0:
        raise ValueError(f"T must be nonnegative, got {T}")
    N = max(initial.box_N, params.cutoff_N)
    state = initial.resized(N).grid
    rhs = _default_rhs(params, params.cutoff_N)

    if T == 0:
        dts = []  # degenerate horizon: the trajectory is just the initial state
    else:
        n_round = round(T / config.dt)
        if n_round >= 1 and abs(n_round * config.dt - T) <= 1e-12 * max(T, 1.0):
            dts = [config.dt] * n_round
        else:
            n_full = int(T / config.dt)
            dts = [config.dt] * n_full + [T - n_full * config.dt]

    times = [0.0]
    states = [SpectralField(state.copy(), initial.hermitian)]
    t = 0.0
    for i, dt in enumerate(dts):
        state, failed = _step_grids(state, dt, config, rhs)
        if np.any(failed):
            raise NonConvergence(
                f"midpoint iteration stalled at t={t:g}; try a smaller dt"
            )
        t += dt
        if (i + 1) % config.store_every == 0 or (i + 1) == len(dts):
            times.append(t)
            states.append(SpectralField(state.copy(), initial.hermitian))

    traj = Trajectory(
        times=np.asarray(times),
        states=states,
        params=params,
        config=config,
        provenance=provenance,
    )
    e = params.conserved_exponent()
    vals = [_box_form(s, params.cutoff_N, e) for s in states]
    v0 = vals[0]
    rel = max(abs(v - v0) for v in vals) / v0 if v0 > 0 else 0.0
    traj.drift = {
        "conserved_exponent": e,
        "initial_value": v0,
        "max_rel_drift": rel,
    }
    return traj


def _box_form(state: SpectralField, N: int, exponent: float) -> float:
    """Conserved quadratic form sum |k|^{2e} |psi_k|^2 over the cutoff box."""
    n = min(N, state.box_N)
    modes = box_modes(n).astype(np.float64)
    i, j = grid_index(box_modes(n), state.box_N)
    w = np.hypot(modes[:, 0], modes[:, 1]) ** (2.0 * exponent)
    c = state.grid[i, j]
    return float(np.sum(w * (c.real**2 + c.imag**2)))


# ---------------------------------------------------------------------------
# Liouville property
# ---------------------------------------------------------------------------

def liouville_divergence(
    params: ModelParams,
    N: int,
    probe: SpectralField,
    rel_step: float = 1e-5,
) -> float:
    """Finite-difference divergence (Jacobian trace) of the box vector field.

    Coordinates are Re psi_k, Im psi_k over the lex-positive representatives
    of the box; the trace is estimated by central differences with step
    rel_step * max(1, |x_i|) per coordinate.  The flow is divergence-free, so
    the result is zero up to round-off of the differencing.
    """
    params.require_dynamics()
    if probe.support_radius() > N:
        raise ValueError(f"probe must be supported in the box N={N}")
    work = ModelParams(
        delta=params.delta,
        formulation=params.formulation,
        cutoff_N=N,
        streamline_variant=params.streamline_variant,
    )
    base = probe.resized(N).grid
    reps = representatives(N)
    i_idx, j_idx = grid_index(reps, N)

    def rhs_coord(grid: np.ndarray, r: int, part: int) -> float:
        out = quadratic_term_grids(grid, work, N, N)
        v = out[i_idx[r], j_idx[r]]
        return float(v.real) if part == 0 else float(v.imag)

    total = 0.0
    for r in range(reps.shape[0]):
        for part in (0, 1):  # Re, Im
            x = base[i_idx[r], j_idx[r]]
            x_i = x.real if part == 0 else x.imag
            h = rel_step * max(1.0, abs(x_i))
            bump = h if part == 0 else 1j * h
            plus, minus = base.copy(), base.copy()
            plus[i_idx[r], j_idx[r]] += bump
            plus[2 * N - i_idx[r], 2 * N - j_idx[r]] += np.conj(bump)
            minus[i_idx[r], j_idx[r]] -= bump
            minus[2 * N - i_idx[r], 2 * N - j_idx[r]] -= np.conj(bump)
            total += (rhs_coord(plus, r, part) - rhs_coord(minus, r, part)) / (2.0 * h)
    return total


# ---------------------------------------------------------------------------
# integral-form residual
# ---------------------------------------------------------------------------

def duhamel_residual(traj: Trajectory, params: ModelParams, sigma: float = -2.5) -> float:
    """Max over stored times of || psi(t) - psi(0) - trapz(B^N o psi) ||_{H^sigma}.

    The quadrature is the composite trapezoid rule on the stored time grid,
    so the residual decays at second order in the step.  Returns 0 for a
    single-time trajectory.
    """
    if len(traj.states) < 2:
        return 0.0
    G = traj.states[0].box_N
    stack = np.stack([s.grid for s in traj.states])  # (T, 2G+1, 2G+1)
    B = quadratic_term_grids(stack, params, params.cutoff_N, params.cutoff_N)
    t = np.asarray(traj.times)
    dt = np.diff(t)[:, None, None]
    increments = 0.5 * dt * (B[:-1] + B[1:])
    integral = np.concatenate([np.zeros_like(B[:1]), np.cumsum(increments, axis=0)])
    resid = stack - stack[0] - integral

    modes = box_modes(G).astype(np.float64)
    i, j = grid_index(box_modes(G), G)
    w = np.hypot(modes[:, 0], modes[:, 1]) ** (2.0 * sigma)
    vals = resid[:, i, j]
    norms = np.sqrt(np.sum(w * (vals.real**2 + vals.imag**2), axis=1))
    return float(np.max(norms))
