"""Binary field snapshots and trajectory persistence.

Snapshot layout (little-endian throughout): magic ``MSQG``, format version
(u32), box size N (u32), delta (f64), formulation (u8: 0 regularized,
1 streamline), Hermitian flag (u8), then for each nonzero box mode in
row-major order (k1 = -N..N outermost, k2 = -N..N, zero mode skipped) the
coefficient as two f64 (re, im).

A trajectory is a directory of snapshots plus a JSON sidecar holding times,
parameters, integrator configuration, seeds, and drift diagnostics.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .fields import SpectralField
from .params import Formulation, ModelParams

__all__ = ["write_snapshot", "read_snapshot", "write_trajectory", "read_trajectory"]

MAGIC = b"MSQG"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIIdBB")
_FORM_CODE = {Formulation.REGULARIZED: 0, Formulation.STREAMLINE: 1}
_CODE_FORM = {v: k for k, v in _FORM_CODE.items()}


def write_snapshot(
    field: SpectralField,
    path: str | Path,
    delta: float,
    formulation: Formulation = Formulation.REGULARIZED,
) -> None:
    """Serialize a field (its full box, both members of each mode pair)."""
    path = Path(path)
    N = field.box_N
    header = _HEADER.pack(
        MAGIC,
        FORMAT_VERSION,
        N,
        float(delta),
        _FORM_CODE[Formulation(formulation)],
        1 if field.hermitian else 0,
    )
    coeffs = field.coefficients()  # canonical row-major nonzero-mode order
    payload = np.column_stack([coeffs.real, coeffs.imag]).astype("<f8").tobytes()
    path.write_bytes(header + payload)


def read_snapshot(path: str | Path) -> tuple[SpectralField, dict]:
    """Read a snapshot; returns (field, metadata dict)."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated snapshot header")
    magic, version, N, delta, form_code, herm = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported format version {version}")
    n_modes = (2 * N + 1) ** 2 - 1
    expected = _HEADER.size + 16 * n_modes
    if len(raw) != expected:
        raise ValueError(f"{path}: expected {expected} bytes, got {len(raw)}")
    flat = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size).reshape(n_modes, 2)
    field = SpectralField.zeros(N, bool(herm))
    from .lattice import box_modes, grid_index

    i, j = grid_index(box_modes(N), N)
    field.grid[i, j] = flat[:, 0] + 1j * flat[:, 1]
    meta = {
        "version": version,
        "N": int(N),
        "delta": float(delta),
        "formulation": _CODE_FORM[form_code].value,
        "hermitian": bool(herm),
    }
    return field, meta


def write_trajectory(traj, directory: str | Path, basename: str = "state") -> Path:
    """Persist a trajectory: one snapshot per stored time plus a sidecar.

    Returns the sidecar path.  ``traj`` is a msqg.flow.Trajectory.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    files = []
    for idx, state in enumerate(traj.states):
        name = f"{basename}_{idx:06d}.msqg"
        write_snapshot(
            state, directory / name, traj.params.delta, traj.params.formulation
        )
        files.append(name)
    sidecar = {
        "times": [float(t) for t in traj.times],
        "files": files,
        "params": {
            "delta": traj.params.delta,
            "formulation": traj.params.formulation.value,
            "cutoff_N": traj.params.cutoff_N,
            "streamline_variant": traj.params.streamline_variant,
        },
        "config": {
            "method": traj.config.method,
            "dt": traj.config.dt,
            "fixed_point_tol": traj.config.fixed_point_tol,
            "max_fixed_point_iters": traj.config.max_fixed_point_iters,
        },
        "seeds": traj.provenance,
        "drift": traj.drift,
    }
    sidecar_path = directory / f"{basename}_trajectory.json"
    sidecar_path.write_text(json.dumps(sidecar, indent=2) + "\n", encoding="utf-8")
    return sidecar_path


def read_trajectory(sidecar_path: str | Path):
    """Load a trajectory persisted by ``write_trajectory``."""
    from .flow import IntegratorConfig, Trajectory

    sidecar_path = Path(sidecar_path)
    meta = json.loads(sidecar_path.read_text(encoding="utf-8"))
    directory = sidecar_path.parent
    states = [read_snapshot(directory / name)[0] for name in meta["files"]]
    params = ModelParams(
        delta=meta["params"]["delta"],
        formulation=Formulation(meta["params"]["formulation"]),
        cutoff_N=meta["params"]["cutoff_N"],
        streamline_variant=meta["params"]["streamline_variant"],
    )
    config = IntegratorConfig(
        method=meta["config"]["method"],
        dt=meta["config"]["dt"],
        fixed_point_tol=meta["config"]["fixed_point_tol"],
        max_fixed_point_iters=meta["config"]["max_fixed_point_iters"],
    )
    return Trajectory(
        times=np.asarray(meta["times"], dtype=np.float64),
        states=states,
        params=params,
        config=config,
        provenance=meta.get("seeds"),
        drift=meta.get("drift", {}),
    )
