"""The quadratic interaction term B and its Galerkin truncation B^N.

Three equivalent evaluation paths are provided:

* ``nonlinearity`` — direct coefficient double sum over the support sum-set
  (the defining formula B_k = sum_h alpha_{k,h} psi_h psi_{k-h});
* ``truncated_nonlinearity`` — Pi_N B Pi_N by the same direct sum;
* ``fast_nonlinearity`` — exact zero-padded transform-space products (grid
  size >= 2*(2N+1) per axis so quadratic products are alias-free), identical
  to the truncated sum up to round-off.

The transform path treats coefficient arrays as plain convolution operands:
the coefficient form of B is the definition, and no basis-normalization
constants enter (they are absorbed into the covariance scale of the Gaussian
measure).
"""

from __future__ import annotations

import numpy as np
import scipy.fft

from .coefficients import alpha_pairs
from .fields import SpectralField, project
from .lattice import box_modes, grid_index
from .params import Formulation, ModelParams

__all__ = [
    "nonlinearity",
    "truncated_nonlinearity",
    "fast_nonlinearity",
    "quadratic_term_grids",
    "conserved_form_rate",
]


# ---------------------------------------------------------------------------
# direct coefficient sums
# ---------------------------------------------------------------------------

def _direct_quadratic(psi: SpectralField, params: ModelParams, out_N: int) -> SpectralField:
    """B on the box [-out_N, out_N]^2 by the direct double sum."""
    N_in = psi.box_N
    support = psi.modes()
    coeffs = psi.coefficients()
    nz = coeffs != 0
    support, coeffs = support[nz], coeffs[nz]
    out = SpectralField.zeros(max(out_N, 1), psi.hermitian)
    if support.size == 0:
        return out
    for k in box_modes(out_N):
        kh = k[None, :] - support  # k - h for every support mode h
        inside = (np.abs(kh[:, 0]) <= N_in) & (np.abs(kh[:, 1]) <= N_in)
        if not np.any(inside):
            continue
        h = support[inside]
        a = alpha_pairs(np.broadcast_to(k, h.shape), h, params)
        i, j = grid_index(kh[inside], N_in)
        val = np.sum(a * coeffs[inside] * psi.grid[i, j])
        out.grid[k[0] + out_N, k[1] + out_N] = val
    return out


def nonlinearity(psi: SpectralField, params: ModelParams) -> SpectralField:
    """Full quadratic term B(psi) over the support sum-set.

    The output is supported in the doubled box of the input support.  Rejects
    delta = 0: there the mode-wise lattice sums lose square-integrability and
    the term has no dynamical meaning (see msqg.expectations for the
    divergence diagnostics).
    """
    params.require_dynamics()
    return _direct_quadratic(psi, params, 2 * psi.support_radius())


def truncated_nonlinearity(psi: SpectralField, params: ModelParams) -> SpectralField:
    """Galerkin truncation B^N(psi) = Pi_N B(Pi_N psi), N = params.cutoff_N."""
    params.require_dynamics()
    low = project(psi, params.cutoff_N)
    return _direct_quadratic(low, params, params.cutoff_N)


# ---------------------------------------------------------------------------
# transform-space path
# ---------------------------------------------------------------------------

def _multipliers(N: int, params: ModelParams) -> tuple[np.ndarray, ...]:
    """Spectral multipliers on the centered box for the product factors.

    Returns (mh1, mh2, u_pow, q_pow, out_mult): the velocity factor is
    (-i h2, i h1) * u_pow(h), the gradient factor is (i h1, i h2) * q_pow(h),
    and the result of the product is scaled by out_mult(k).
    """
    r = np.arange(-N, N + 1, dtype=np.float64)
    h1, h2 = r[:, None], r[None, :]
    nh = np.hypot(h1, h2)
    safe = nh.copy()
    safe[N, N] = 1.0
    d = params.delta
    if params.formulation is Formulation.REGULARIZED:
        u_pow = safe ** (-d)
        q_pow = nh
        out = -(safe ** (-1.0))
    else:
        u_pow = np.ones_like(nh)
        q_pow = safe ** (1.0 + d)
        p = -(1.0 + d) if params.streamline_variant == "consistent" else (1.0 + d)
        out = -(safe**p)
    u_pow[N, N] = 0.0
    q_pow[N, N] = 0.0
    out[N, N] = 0.0
    return h1, h2, u_pow, q_pow, out


def quadratic_term_grids(
    grids: np.ndarray,
    params: ModelParams,
    read_N: int,
    write_N: int | None = None,
    grid_size: int | None = None,
    workers: int | None = None,
) -> np.ndarray:
    """Batched B^N on centered coefficient grids of shape (..., 2M+1, 2M+1).

    Reads the [-read_N, read_N]^2 part of each grid, evaluates the quadratic
    term alias-free on a padded transform grid, and returns arrays of the
    input shape holding Pi_{write_N} B(Pi_{read_N} psi) — zero outside the
    write box, so adding a multiple of the result to a state automatically
    leaves complement modes frozen.

    grid_size must be at least 2*(2*read_N+1) for the products to be exact;
    smaller requests are rejected.
    """
    grids = np.asarray(grids, dtype=np.complex128)
    M = grids.shape[-1] // 2
    if grids.shape[-1] != grids.shape[-2] or grids.shape[-1] % 2 == 0:
        raise ValueError(f"grids must be centered odd square boxes, got {grids.shape}")
    write_N = read_N if write_N is None else write_N
    if write_N > read_N:
        raise ValueError("write box cannot exceed read box")
    if write_N > M:
        raise ValueError("stored grid smaller than the write box")
    min_grid = 2 * (2 * read_N + 1)
    if grid_size is None:
        grid_size = scipy.fft.next_fast_len(min_grid)
    if grid_size < min_grid:
        raise ValueError(
            f"grid_size {grid_size} too small for exact products (need >= {min_grid})"
        )
    G = grid_size

    n = min(read_N, M)
    box = grids[..., M - n : M + n + 1, M - n : M + n + 1]
    if n < read_N:  # zero-pad the read box if the stored grid is smaller
        pad = read_N - n
        width = [(0, 0)] * (grids.ndim - 2) + [(pad, pad), (pad, pad)]
        box = np.pad(box, width)
    R = read_N

    h1, h2, u_pow, q_pow, out_mult = _multipliers(R, params)
    # spectral factors on the read box
    u1 = (-1j * h2) * u_pow * box
    u2 = (1j * h1) * u_pow * box
    q1 = (1j * h1) * q_pow * box
    q2 = (1j * h2) * q_pow * box

    idx = np.arange(-R, R + 1) % G
    scatter = np.ix_(idx, idx)

    def to_physical(spec: np.ndarray) -> np.ndarray:
        padded = np.zeros(grids.shape[:-2] + (G, G), dtype=np.complex128)
        padded[(...,) + scatter] = spec
        return scipy.fft.ifft2(padded, norm="forward", workers=workers)

    prod = to_physical(u1) * to_physical(q1) + to_physical(u2) * to_physical(q2)
    conv = scipy.fft.fft2(prod, norm="forward", workers=workers)

    out = np.zeros_like(grids)
    w = write_N
    sel = np.arange(-w, w + 1) % G
    out[..., M - w : M + w + 1, M - w : M + w + 1] = (
        conv[(...,) + np.ix_(sel, sel)] * out_mult[R - w : R + w + 1, R - w : R + w + 1]
    )
    return out


def fast_nonlinearity(
    psi: SpectralField,
    params: ModelParams,
    grid_size: int | None = None,
    workers: int | None = None,
) -> SpectralField:
    """Transform-space evaluation of B^N, identical to the truncated sum.

    The input is projected to the cutoff box first, so the result equals
    ``truncated_nonlinearity`` on every input.
    """
    params.require_dynamics()
    N = params.cutoff_N
    low = project(psi, N)
    out_grid = quadratic_term_grids(low.grid, params, N, N, grid_size, workers)
    return SpectralField(out_grid, psi.hermitian)


# ---------------------------------------------------------------------------
# conservation diagnostic
# ---------------------------------------------------------------------------

def conserved_form_rate(psi: SpectralField, params: ModelParams) -> float:
    """Instantaneous rate of the conserved quadratic form along the flow.

    Computes Re sum_k |k|^{2e} B^N_k conj(psi_k) with e the formulation's
    conserved exponent; the exact flow keeps this identically 0, so the value
    measures round-off of the evaluation path.
    """
    B = fast_nonlinearity(psi, params)
    N = params.cutoff_N
    low = project(psi, N)
    m = box_modes(N).astype(np.float64)
    w = np.hypot(m[:, 0], m[:, 1]) ** (2.0 * params.conserved_exponent())
    i, j = grid_index(box_modes(N), N)
    return float(np.sum(w * (B.grid[i, j] * np.conj(low.grid[i, j])).real))
