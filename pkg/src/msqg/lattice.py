"""Lattice geometry helpers for centered Fourier boxes on Z^2.

Fields live on the nonzero modes of the centered box [-N, N]^2.  The cutoff
box is always measured in the max norm; every analytic symbol (|k| in the
coefficients, Sobolev weights, covariances) uses the Euclidean norm.
"""

from __future__ import annotations

import numpy as np


def box_modes(N: int, include_zero: bool = False) -> np.ndarray:
    """All modes of the centered box [-N, N]^2 in row-major order.

    Row-major means k1 varies slowest (k1 = -N..N, then k2 = -N..N), with the
    zero mode skipped unless requested.  This order is the canonical mode
    order of the binary snapshot format.  Returns an integer array (m, 2).
    """
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    r = np.arange(-N, N + 1)
    k1, k2 = np.meshgrid(r, r, indexing="ij")
    modes = np.column_stack([k1.ravel(), k2.ravel()])
    if not include_zero:
        modes = modes[(modes[:, 0] != 0) | (modes[:, 1] != 0)]
    return modes


def euclid_norm(modes: np.ndarray) -> np.ndarray:
    """Euclidean norm |k| = sqrt(k1^2 + k2^2), vectorized over rows."""
    modes = np.asarray(modes, dtype=np.float64)
    return np.hypot(modes[..., 0], modes[..., 1])


def box_norm(modes: np.ndarray) -> np.ndarray:
    """Max norm max(|k1|, |k2|), vectorized over rows."""
    modes = np.asarray(modes)
    return np.maximum(np.abs(modes[..., 0]), np.abs(modes[..., 1]))


def lex_positive(modes: np.ndarray) -> np.ndarray:
    """Boolean mask selecting one representative per pair {k, -k}.

    A mode is a representative when k1 > 0, or k1 = 0 and k2 > 0.  The
    representatives index the independent complex coordinates of a Hermitian
    field.
    """
    modes = np.asarray(modes)
    k1, k2 = modes[..., 0], modes[..., 1]
    return (k1 > 0) | ((k1 == 0) & (k2 > 0))


def representatives(N: int) -> np.ndarray:
    """Lex-positive representatives of the nonzero box modes, row-major."""
    modes = box_modes(N)
    return modes[lex_positive(modes)]


def grid_index(modes: np.ndarray, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Indices of modes into a centered (2N+1, 2N+1) grid (k + N per axis)."""
    modes = np.asarray(modes)
    return modes[..., 0] + N, modes[..., 1] + N
