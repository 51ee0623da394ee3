"""Gaussian spectral measures: covariance laws, sampling, and log-density.

A measure is specified by a power-law mode covariance E|psi_k|^2 =
scale * |k|^{-2a}.  Two named laws matter in practice:

* ``GibbsSpec.moment_normalized`` — the reference law for static moment
  checks (a = 2 regularized; a = 2 + 2*delta streamline; scale 2);
* ``GibbsSpec.flow_invariant`` — the law whose density is a function of the
  quadratic form conserved by the truncated flow (a = 1 regularized,
  a = 1 + delta streamline; scale 2).  This is the measure the dynamics
  actually leaves invariant, and the one the invariance harness samples.

Sampling is Hermitian by default: one complex Gaussian per mode pair {k, -k}
(real and imaginary parts independent with variance cov/2), conjugated at the
mirror mode, so the physical field is real.  A fully-independent-complex mode
exists for static moment checks only; the flow module rejects such states.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import SpectralField
from .lattice import box_modes, euclid_norm, grid_index, lex_positive, representatives
from .params import Formulation, ModelParams

__all__ = [
    "GibbsSpec",
    "SeededStream",
    "covariance",
    "sample_field",
    "sample_grid_ensemble",
    "log_density_truncated",
    "expected_sobolev_norm_sq",
]


@dataclass(frozen=True)
class GibbsSpec:
    """Covariance law of a centered Gaussian spectral measure.

    E|psi_k|^2 = scale * |k|^{-2 * covariance_exponent}, Euclidean |k|.
    """

    covariance_exponent: float
    scale: float = 2.0
    formulation: Formulation = Formulation.REGULARIZED

    def __post_init__(self) -> None:
        if self.scale <= 0:
            raise ValueError(f"scale must be positive, got {self.scale}")
        if not isinstance(self.formulation, Formulation):
            object.__setattr__(self, "formulation", Formulation(self.formulation))

    @property
    def is_trace_class(self) -> bool:
        """Whether sum_k E|psi_k|^2 converges over all of Z^2 (a > 1).

        Box-restricted sampling is well defined either way; the condition
        matters only for the measure on the full lattice.
        """
        return self.covariance_exponent > 1.0

    @classmethod
    def moment_normalized(
        cls,
        formulation: Formulation = Formulation.REGULARIZED,
        delta: float | None = None,
    ) -> "GibbsSpec":
        """The reference static-moment law: E|psi_k|^2 = 2/|k|^4 in
        regularized variables, 2/|k|^{4+4*delta} in streamline variables."""
        formulation = Formulation(formulation)
        if formulation is Formulation.REGULARIZED:
            a = 2.0
        else:
            if delta is None:
                raise ValueError("streamline moment law needs delta")
            a = 2.0 + 2.0 * delta
        spec = cls(a, 2.0, formulation)
        assert spec.is_trace_class
        return spec

    @classmethod
    def flow_invariant(cls, params: ModelParams) -> "GibbsSpec":
        """The law preserved by the truncated flow.

        Its density is exp(-H/(2*scale)) with H the conserved quadratic form
        (sum |k|^{2e} |psi_k|^2, e the conserved exponent), i.e. covariance
        exponent a = e.  In regularized variables a = 1: borderline
        non-trace-class on the full lattice, but the box measure rho_N that
        is actually sampled is a perfectly good finite-dimensional Gaussian.
        """
        return cls(params.conserved_exponent(), 2.0, params.formulation)


@dataclass(frozen=True)
class SeededStream:
    """Reproducible random stream: (master_seed, stream_id) -> bit-identical
    samples on a platform.  Children derive independent substreams."""

    master_seed: int
    stream_id: int = 0
    _path: tuple[int, ...] = field(default=(), repr=False)

    def rng(self) -> np.random.Generator:
        return np.random.default_rng((self.master_seed, self.stream_id) + self._path)

    def child(self, index: int) -> "SeededStream":
        return SeededStream(self.master_seed, self.stream_id, self._path + (index,))


def covariance(k: tuple[int, int], spec: GibbsSpec) -> float:
    """Mode covariance E|psi_k|^2 = scale * |k|^{-2a}; rejects k = 0."""
    if k[0] == 0 and k[1] == 0:
        raise ValueError("the zero mode carries no coefficient (mean-free fields)")
    nk = float(np.hypot(k[0], k[1]))
    return spec.scale * nk ** (-2.0 * spec.covariance_exponent)


def _covariance_grid(spec: GibbsSpec, N: int) -> np.ndarray:
    """Covariance on the centered box grid, 0 at the zero mode."""
    r = np.arange(-N, N + 1, dtype=np.float64)
    nk = np.hypot(r[:, None], r[None, :])
    nk[N, N] = 1.0
    cov = spec.scale * nk ** (-2.0 * spec.covariance_exponent)
    cov[N, N] = 0.0
    return cov


def sample_grid_ensemble(
    spec: GibbsSpec,
    N: int,
    M: int,
    stream: SeededStream,
    hermitian: bool = True,
) -> np.ndarray:
    """M independent samples as a (M, 2N+1, 2N+1) complex array.

    Hermitian mode: one complex Gaussian per lex-positive representative with
    E|psi_k|^2 = covariance(k), conjugated at -k.  Non-Hermitian mode: every
    nonzero mode drawn independently (static moment checks only).
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    rng = stream.rng()
    cov = _covariance_grid(spec, N)
    out = np.zeros((M, 2 * N + 1, 2 * N + 1), dtype=np.complex128)
    if hermitian:
        reps = representatives(N)
        i, j = grid_index(reps, N)
        sd = np.sqrt(cov[i, j] / 2.0)
        z = rng.standard_normal((M, reps.shape[0], 2))
        vals = (z[..., 0] + 1j * z[..., 1]) * sd
        out[:, i, j] = vals
        out[:, 2 * N - i, 2 * N - j] = np.conj(vals)
    else:
        modes = box_modes(N)
        i, j = grid_index(modes, N)
        sd = np.sqrt(cov[i, j] / 2.0)
        z = rng.standard_normal((M, modes.shape[0], 2))
        out[:, i, j] = (z[..., 0] + 1j * z[..., 1]) * sd
    return out


def sample_field(
    spec: GibbsSpec,
    N: int,
    stream: SeededStream,
    hermitian: bool = True,
) -> SpectralField:
    """One sample of the box measure rho_N as a SpectralField."""
    grid = sample_grid_ensemble(spec, N, 1, stream, hermitian)[0]
    return SpectralField(grid, hermitian)


def log_density_truncated(psi_N: SpectralField, spec: GibbsSpec, N: int) -> float:
    """Log-density (up to the normalization constant) of the box measure.

    Returns -sum |psi_k|^2 / covariance(k) over the independent lex-positive
    representatives in the box.  Constant along exact trajectories when the
    covariance is a function of the conserved form (the flow_invariant law).
    Rejects fields supported outside the box.
    """
    if psi_N.support_radius() > N:
        raise ValueError(f"field has support outside the box N={N}")
    reps = representatives(min(N, psi_N.box_N))
    i, j = grid_index(reps, psi_N.box_N)
    vals = psi_N.grid[i, j]
    nk = euclid_norm(reps)
    cov = spec.scale * nk ** (-2.0 * spec.covariance_exponent)
    return float(-np.sum((vals.real**2 + vals.imag**2) / cov))


def expected_sobolev_norm_sq(spec: GibbsSpec, N: int, sigma: float) -> float:
    """Closed form E ||psi||^2_{H^sigma} = sum_{box N} covariance(k) |k|^{2 sigma}."""
    modes = box_modes(N)
    nk = euclid_norm(modes)
    cov = spec.scale * nk ** (-2.0 * spec.covariance_exponent)
    return float(np.sum(cov * nk ** (2.0 * sigma)))
