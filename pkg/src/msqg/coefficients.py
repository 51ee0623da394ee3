"""Interaction coefficients of the spectral quadratic term.

The evolution of mode k couples pairs (h, k-h) through a real coefficient
alpha_{k,h}.  In regularized variables

    alpha_{k,h} = -1/2 * (h_perp . k / |k|) * (|k-h|^{-delta} |h| - |h|^{-delta} |k-h|),

with h_perp = (-h2, h1) and Euclidean norms.  In streamline variables the
coefficient is

    alpha_{k,h} = 1/2 * |k|^{p} * (h_perp . k) * (|k-h|^{1+delta} - |h|^{1+delta}),

where p = -(1+delta) for the "consistent" normalization (the one implied by
u = grad^perp phi with theta = |D|^{1+delta} phi) and p = +(1+delta) for the
"alternate" one, kept for comparison.

Conventions shared by both: alpha is 0 for the excluded pairs h in {0, k} and
whenever h is parallel to k (the cross product vanishes); k = 0 is rejected —
the zero mode never carries dynamics.
"""

from __future__ import annotations

import numpy as np

from .params import Formulation, ModelParams

__all__ = ["alpha", "alpha_pairs", "coefficient_table"]


def _alpha_formula(K: np.ndarray, H: np.ndarray, params: ModelParams) -> np.ndarray:
    """Vectorized coefficient formula; K, H integer arrays of shape (m, 2).

    Evaluates the formula for every row, including k = 0 rows (which are
    exactly 0 because the cross product carries the factor).  Callers decide
    whether k = 0 is legal.
    """
    K = np.asarray(K, dtype=np.int64)
    H = np.asarray(H, dtype=np.int64)
    # cross = h_perp . k = h1 k2 - h2 k1, exact in integers
    cross = (H[..., 0] * K[..., 1] - H[..., 1] * K[..., 0]).astype(np.float64)
    KH = K - H
    nk = np.hypot(K[..., 0].astype(np.float64), K[..., 1].astype(np.float64))
    nh = np.hypot(H[..., 0].astype(np.float64), H[..., 1].astype(np.float64))
    nkh = np.hypot(KH[..., 0].astype(np.float64), KH[..., 1].astype(np.float64))

    excluded = (nh == 0.0) | (nkh == 0.0) | (cross == 0.0)
    # safe positive placeholders under the excluded mask
    nk_s = np.where(nk == 0.0, 1.0, nk)
    nh_s = np.where(excluded, 1.0, nh)
    nkh_s = np.where(excluded, 1.0, nkh)

    d = params.delta
    if params.formulation is Formulation.REGULARIZED:
        diff = nkh_s ** (-d) * nh_s - nh_s ** (-d) * nkh_s
        out = -0.5 * (cross / nk_s) * diff
    else:
        diff = nkh_s ** (1.0 + d) - nh_s ** (1.0 + d)
        p = -(1.0 + d) if params.streamline_variant == "consistent" else (1.0 + d)
        out = 0.5 * (nk_s**p) * cross * diff
    return np.where(excluded, 0.0, out)


def alpha(k: tuple[int, int], h: tuple[int, int], params: ModelParams) -> float:
    """Interaction coefficient alpha_{k,h} for a single mode pair.

    Returns exactly 0.0 for the excluded pairs h in {0, k} and whenever h is
    parallel to k.  Raises for k = 0.
    """
    if k[0] == 0 and k[1] == 0:
        raise ValueError("alpha is undefined at k = 0 (the zero mode has no dynamics)")
    return float(_alpha_formula(np.asarray([k]), np.asarray([h]), params)[0])


def alpha_pairs(K: np.ndarray, H: np.ndarray, params: ModelParams) -> np.ndarray:
    """Vectorized alpha over row-aligned arrays of modes (m, 2) -> (m,).

    Every row of K must be nonzero.
    """
    K = np.asarray(K, dtype=np.int64)
    H = np.asarray(H, dtype=np.int64)
    if np.any((K[..., 0] == 0) & (K[..., 1] == 0)):
        raise ValueError("alpha is undefined at k = 0")
    return _alpha_formula(K, H, params)


def coefficient_table(N: int, params: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """Dense table A[i, j] = alpha_{k_i, h_j} over the nonzero box modes.

    Returns (modes, table) with modes the canonical row-major nonzero box
    enumeration and table of shape (m, m).  Useful for repeated direct
    evaluations of the quadratic term at small N.
    """
    from .lattice import box_modes

    modes = box_modes(N)
    m = modes.shape[0]
    K = np.repeat(modes, m, axis=0)
    H = np.tile(modes, (m, 1))
    table = alpha_pairs(K, H, params).reshape(m, m)
    return modes, table
