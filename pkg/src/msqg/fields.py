"""Spectral fields: finite maps from nonzero lattice modes to amplitudes.

A field is stored densely on the centered box [-N, N]^2 with the zero mode
pinned to 0 (all fields are mean-free).  ``hermitian=True`` declares that
psi_{-k} = conj(psi_k), i.e. the represented physical field is real valued;
the flag is asserted by the dynamics and preserved by every operation here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import box_modes, grid_index

Mode = tuple[int, int]


@dataclass
class SpectralField:
    """Dense centered spectral representation of a mean-free field.

    Attributes
    ----------
    grid : complex ndarray of shape (2N+1, 2N+1)
        grid[k1+N, k2+N] is the coefficient of mode (k1, k2).
    hermitian : bool
        Whether the field satisfies psi_{-k} = conj(psi_k).
    """

    grid: np.ndarray
    hermitian: bool = True

    def __post_init__(self) -> None:
        g = np.asarray(self.grid, dtype=np.complex128)
        if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] % 2 == 0:
            raise ValueError(f"grid must be square odd-sized, got {g.shape}")
        self.grid = g
        n = self.box_N
        g[n, n] = 0.0  # zero mode never carries a coefficient

    @property
    def box_N(self) -> int:
        return self.grid.shape[0] // 2

    # -- constructors -------------------------------------------------------

    @classmethod
    def zeros(cls, N: int, hermitian: bool = True) -> "SpectralField":
        if N < 1:
            raise ValueError(f"N must be >= 1, got {N}")
        return cls(np.zeros((2 * N + 1, 2 * N + 1), dtype=np.complex128), hermitian)

    @classmethod
    def from_modes(
        cls,
        coeffs: dict[Mode, complex],
        N: int | None = None,
        hermitian: bool = True,
    ) -> "SpectralField":
        """Build a field from a sparse mode -> coefficient map.

        When ``hermitian`` is set, only one member of each pair {k, -k} needs
        to be given; the mirror is filled with the conjugate (and consistency
        is checked when both are present).
        """
        if any(k == (0, 0) for k in coeffs):
            raise ValueError("fields are mean-free: no coefficient at mode (0, 0)")
        if N is None:
            N = max(max(abs(k1), abs(k2)) for (k1, k2) in coeffs) if coeffs else 1
            N = max(N, 1)
        out = cls.zeros(N, hermitian)
        for (k1, k2), v in coeffs.items():
            if max(abs(k1), abs(k2)) > N:
                raise ValueError(f"mode {(k1, k2)} outside box N={N}")
            out.grid[k1 + N, k2 + N] = v
        if hermitian:
            mirrored = np.conj(out.grid[::-1, ::-1])
            given = out.grid != 0
            both = given & (mirrored != 0) & (out.grid != mirrored)
            # fill only the empty mirrors; a conflicting explicit pair is an error
            conflict = both & (np.abs(out.grid - mirrored) > 1e-12 * np.abs(out.grid))
            if np.any(conflict):
                raise ValueError("explicit coefficients violate Hermitian symmetry")
            out.grid = np.where(given, out.grid, mirrored)
            out.grid[N, N] = 0.0
        return out

    # -- access --------------------------------------------------------------

    def __getitem__(self, mode: Mode) -> complex:
        k1, k2 = mode
        n = self.box_N
        if max(abs(k1), abs(k2)) > n:
            return 0.0 + 0.0j
        return complex(self.grid[k1 + n, k2 + n])

    def copy(self) -> "SpectralField":
        return SpectralField(self.grid.copy(), self.hermitian)

    def modes(self) -> np.ndarray:
        """Nonzero box modes in canonical (row-major) order."""
        return box_modes(self.box_N)

    def coefficients(self) -> np.ndarray:
        """Coefficients aligned with ``modes()``."""
        m = self.modes()
        i, j = grid_index(m, self.box_N)
        return self.grid[i, j]

    def resized(self, N: int) -> "SpectralField":
        """Same field on a [-N, N]^2 box (crop or zero-pad)."""
        out = SpectralField.zeros(N, self.hermitian)
        n, m = self.box_N, min(self.box_N, N)
        out.grid[N - m : N + m + 1, N - m : N + m + 1] = self.grid[
            n - m : n + m + 1, n - m : n + m + 1
        ]
        return out

    def support_radius(self) -> int:
        """Smallest max-norm box containing every nonzero coefficient."""
        nz = np.argwhere(self.grid != 0)
        if nz.size == 0:
            return 0
        return int(np.max(np.abs(nz - self.box_N)))


def is_hermitian(field: SpectralField, tol: float = 1e-12) -> bool:
    """Check psi_{-k} = conj(psi_k) on the grid (within absolute tol)."""
    flipped = np.conj(field.grid[::-1, ::-1])
    scale = np.max(np.abs(field.grid)) or 1.0
    return bool(np.max(np.abs(field.grid - flipped)) <= tol * max(1.0, scale))


def project(psi: SpectralField, N: int) -> SpectralField:
    """Box projection Pi_N: keep modes with max(|k1|, |k2|) <= N.

    N = 0 gives the zero field (the zero mode is excluded by construction).
    """
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    if N == 0:
        return SpectralField.zeros(1, psi.hermitian)
    return psi.resized(N)


def project_complement(psi: SpectralField, N: int) -> SpectralField:
    """Complement projection: keep modes with max(|k1|, |k2|) > N."""
    out = psi.copy()
    n = out.box_N
    m = min(N, n)
    out.grid[n - m : n + m + 1, n - m : n + m + 1] = 0.0
    return out


def add(a: SpectralField, b: SpectralField) -> SpectralField:
    """Coefficient-wise sum on the enclosing box."""
    N = max(a.box_N, b.box_N)
    out = a.resized(N)
    out.grid += b.resized(N).grid
    out.hermitian = a.hermitian and b.hermitian
    return out


def sobolev_norm_sq(psi: SpectralField, s: float) -> float:
    """Squared Sobolev norm sum_k |k|^{2s} |psi_k|^2 over stored modes."""
    m = psi.modes().astype(np.float64)
    c = psi.coefficients()
    w = np.hypot(m[:, 0], m[:, 1]) ** (2.0 * s)
    return float(np.sum(w * (c.real**2 + c.imag**2)))
