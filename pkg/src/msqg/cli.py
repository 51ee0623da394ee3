"""Command-line entry point for sampling, evolution, and verification runs.

Subcommands: coefficients | sample | evolve | expectation | invariance.
Configuration is a TOML file (--config) with flag overrides; the fully
resolved configuration is echoed into every output artifact together with
its SHA-256 hash, so any run is reproducible from its outputs alone.  All
floating-point output uses 17 significant digits (exact round-trips).

Exit codes: 0 pass, 2 statistical test failure, 3 numerical failure,
4 invalid configuration.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np
import scipy.fft
import tomli

from .coefficients import alpha_pairs
from .expectations import (
    expectation_B_analytic,
    expectation_B_monte_carlo,
    inner_sum,
)
from .flow import IntegratorConfig, NonConvergence, evolve
from .gibbs import GibbsSpec, SeededStream, covariance, sample_field, sample_grid_ensemble
from .invariance import run_invariance_experiment
from .lattice import box_modes, grid_index
from .params import Formulation, ModelParams
from .snapshots import write_snapshot, write_trajectory

__all__ = ["main"]

EXIT_PASS = 0
EXIT_STATISTICAL = 2
EXIT_NUMERICAL = 3
EXIT_CONFIG = 4


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; that code is taken
        raise ConfigError(message)


# ---------------------------------------------------------------------------
# formatting and config plumbing
# ---------------------------------------------------------------------------

def _fmt(x) -> str:
    """Render a scalar for output files: floats at 17 significant digits."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _json_text(obj, indent: int = 0) -> str:
    """JSON serialization with 17-significant-digit floats."""
    pad = " " * indent
    inner = " " * (indent + 2)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        rows = [f'{inner}{json.dumps(str(k))}: {_json_text(v, indent + 2)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(rows) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        rows = [f"{inner}{_json_text(v, indent + 2)}" for v in obj]
        return "[\n" + ",\n".join(rows) + f"\n{pad}]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return '"nan"'
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return format(x, ".17g")
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def _config_hash(cfg: dict) -> str:
    return hashlib.sha256(_json_text(cfg).encode("utf-8")).hexdigest()


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(_json_text(payload) + "\n", encoding="utf-8")


def _write_csv(path: Path, header: list[str], rows, cfg_hash: str) -> None:
    lines = [f"# config_sha256={cfg_hash}", ",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


_DEFAULTS = {
    "delta": 0.5,
    "formulation": "regularized",
    "seed": 0,
    "threads": 1,
    "out": "msqg-out",
    "coefficients": {"k": [[1, 0]], "h_box": 8},
    "sample": {"N": 8, "M": 100000, "hermitian": True, "law": "moment", "save_count": 4},
    "evolve": {
        "N": 6,
        "T": 1.0,
        "dt": 0.01,
        "method": "implicit_midpoint",
        "initial": "sample",
        "store_every": 10,
    },
    "expectation": {
        "sum_k": [[1, 0]],
        "sum_R": 256,
        "sum_deltas": [0.0, 0.5, 1.0],
        "N": 6,
        "s": -2.5,
        "M": 2000,
        "mc_deltas": [0.5, 1.0],
    },
    "invariance": {
        "N": 4,
        "T": 1.0,
        "times": [0.25, 0.5, 1.0],
        "M": 4000,
        "dt": 0.01,
        "method": "implicit_midpoint",
        "bug": False,
        "z_threshold": 4.0,
        "ks_family_level": 0.01,
    },
}


def _merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def _load_config(args) -> dict:
    cfg = dict(_DEFAULTS)
    if args.config is not None:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            with path.open("rb") as fh:
                cfg = _merge(cfg, tomli.load(fh))
        except tomli.TOMLDecodeError as exc:
            raise ConfigError(f"config file is not valid TOML: {exc}") from exc
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.threads is not None:
        cfg["threads"] = args.threads
    if args.out is not None:
        cfg["out"] = args.out
    if args.formulation is not None:
        cfg["formulation"] = args.formulation
    if not isinstance(cfg["seed"], int) or cfg["seed"] < 0 or cfg["seed"] >= 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    if not isinstance(cfg["threads"], int) or cfg["threads"] < 1:
        raise ConfigError("threads must be a positive integer")
    return cfg


def _model_params(cfg: dict, N: int) -> ModelParams:
    try:
        return ModelParams(
            delta=float(cfg["delta"]),
            formulation=cfg["formulation"],
            cutoff_N=int(N),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _out_dir(cfg: dict) -> Path:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_coefficients(cfg: dict) -> int:
    """Interaction coefficients over an index window, with symmetry check."""
    sub = cfg["coefficients"]
    try:
        ks = [(int(k[0]), int(k[1])) for k in sub["k"]]
        h_box = int(sub["h_box"])
    except (TypeError, ValueError, IndexError, KeyError) as exc:
        raise ConfigError(f"bad coefficients window: {exc}") from exc
    if h_box < 1:
        raise ConfigError("h_box must be at least 1")
    if any(k == (0, 0) for k in ks):
        raise ConfigError("the zero mode has no interaction coefficients")

    params = _model_params(cfg, h_box)
    rows = []
    if ks:
        H = box_modes(h_box)
        for k in ks:
            K = np.broadcast_to(np.asarray(k), H.shape)
            a = alpha_pairs(K, H, params)
            a_mirror = alpha_pairs(K, K - H, params)
            for (h1, h2), v, vm in zip(H, a, a_mirror):
                rows.append((k[0], k[1], int(h1), int(h2), float(v), float(vm)))
    cfg_hash = _config_hash(cfg)
    out = _out_dir(cfg)
    _write_csv(out / "coefficients.csv", ["k1", "k2", "h1", "h2", "alpha", "alpha_mirror"], rows, cfg_hash)
    print(f"coefficients: {len(rows)} rows -> {out / 'coefficients.csv'}")
    return EXIT_PASS


def cmd_sample(cfg: dict) -> int:
    """Draw an ensemble, write snapshots, and summarize empirical moments."""
    sub = cfg["sample"]
    N, M = int(sub["N"]), int(sub["M"])
    if N < 1 or M < 2:
        raise ConfigError("sample needs N >= 1 and M >= 2")
    params = _model_params(cfg, N)
    if sub["law"] == "moment":
        spec = GibbsSpec.moment_normalized(params.formulation, params.delta)
    elif sub["law"] == "invariant":
        spec = GibbsSpec.flow_invariant(params)
    else:
        raise ConfigError(f"unknown sampling law {sub['law']!r}")
    hermitian = bool(sub["hermitian"])
    stream = SeededStream(master_seed=int(cfg["seed"]))
    grids = sample_grid_ensemble(spec, N, M, stream, hermitian=hermitian)

    modes = box_modes(N)
    i, j = grid_index(modes, N)
    coeffs = grids[:, i, j]
    second = np.mean(coeffs.real**2 + coeffs.imag**2, axis=0)
    mean_re = np.mean(coeffs.real, axis=0)
    mean_im = np.mean(coeffs.imag, axis=0)

    rows = []
    worst = 0.0
    for idx, k in enumerate(modes):
        expected = covariance((int(k[0]), int(k[1])), spec)
        se = expected / math.sqrt(M)
        z = (second[idx] - expected) / se
        worst = max(worst, abs(z))
        rows.append(
            (int(k[0]), int(k[1]), float(mean_re[idx]), float(mean_im[idx]),
             float(second[idx]), float(expected), float(se), float(z))
        )
    cfg_hash = _config_hash(cfg)
    out = _out_dir(cfg)
    _write_csv(
        out / "moments.csv",
        ["k1", "k2", "mean_re", "mean_im", "second_moment", "expected", "se", "z"],
        rows,
        cfg_hash,
    )
    from .fields import SpectralField

    for m in range(min(M, int(sub["save_count"]))):
        field = SpectralField(grids[m].copy(), hermitian)
        write_snapshot(field, out / f"sample_{m:06d}.msqg", params.delta, params.formulation)
    print(f"sample: {M} draws at N={N}, worst |z| = {worst:.3g} -> {out / 'moments.csv'}")
    return EXIT_PASS if worst <= 5.0 else EXIT_STATISTICAL


def cmd_evolve(cfg: dict) -> int:
    """Evolve one field and write the trajectory plus a drift report."""
    sub = cfg["evolve"]
    N = int(sub["N"])
    params = _model_params(cfg, N)
    try:
        params.require_dynamics()
        config = IntegratorConfig(
            method=sub["method"], dt=float(sub["dt"]), store_every=int(sub["store_every"])
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    stream = SeededStream(master_seed=int(cfg["seed"]))
    initial_key = sub["initial"]
    from .fields import SpectralField
    from .snapshots import read_snapshot

    if initial_key == "zero":
        initial = SpectralField.zeros(N)
    elif initial_key == "sample":
        initial = sample_field(GibbsSpec.flow_invariant(params), N, stream)
    else:
        path = Path(str(initial_key))
        if not path.is_file():
            raise ConfigError(f"initial snapshot not found: {path}")
        initial, _meta = read_snapshot(path)

    cfg_hash = _config_hash(cfg)
    out = _out_dir(cfg)
    traj = evolve(initial, float(sub["T"]), params, config,
                  provenance={"master_seed": int(cfg["seed"])})
    sidecar = write_trajectory(traj, out / "trajectory")
    report = {
        "config": cfg,
        "config_sha256": cfg_hash,
        "times": list(traj.times),
        "states_stored": len(traj.states),
        "drift": traj.drift,
        "sidecar": str(sidecar),
    }
    _write_json(out / "drift.json", report)
    print(
        f"evolve: T={float(sub['T']):g}, {len(traj.states)} states, "
        f"max relative drift {traj.drift['max_rel_drift']:.3g} -> {out / 'drift.json'}"
    )
    return EXIT_PASS


def cmd_expectation(cfg: dict) -> int:
    """Mode-wise sum table and analytic-vs-Monte-Carlo expectation table."""
    sub = cfg["expectation"]
    cfg_hash = _config_hash(cfg)
    out = _out_dir(cfg)

    sum_rows = []
    for d in sub["sum_deltas"]:
        for k in sub["sum_k"]:
            rep = inner_sum((int(k[0]), int(k[1])), float(d), int(sub["sum_R"]))
            sum_rows.append(
                (rep.k[0], rep.k[1], rep.radii[-1], rep.partial_sums[-1],
                 rep.s1, rep.s2, rep.s3, rep.verdict)
            )
    _write_csv(
        out / "sums.csv",
        ["k1", "k2", "R", "S", "S1", "S2", "S3", "verdict"],
        sum_rows,
        cfg_hash,
    )

    N, s, M = int(sub["N"]), float(sub["s"]), int(sub["M"])
    stream = SeededStream(master_seed=int(cfg["seed"]))
    mc_rows = []
    ok = True
    for idx, d in enumerate(sub["mc_deltas"]):
        params = ModelParams(delta=float(d), formulation=cfg["formulation"], cutoff_N=N)
        analytic = expectation_B_analytic(N, s, float(d), params=params)
        mc, se = expectation_B_monte_carlo(N, s, float(d), M, stream.child(idx), params=params)
        ok &= abs(mc - analytic) <= 3.0 * se
        mc_rows.append((N, s, float(d), analytic, mc, se))
    _write_csv(
        out / "expectation.csv",
        ["N", "s", "delta", "analytic", "mc", "se"],
        mc_rows,
        cfg_hash,
    )
    print(
        f"expectation: {len(sum_rows)} sum rows, {len(mc_rows)} comparison rows "
        f"({'all within 3*SE' if ok else 'MISMATCH beyond 3*SE'}) -> {out}"
    )
    return EXIT_PASS if ok else EXIT_STATISTICAL


def cmd_invariance(cfg: dict) -> int:
    """Run the invariance battery and write the full report as JSON."""
    sub = cfg["invariance"]
    try:
        config = IntegratorConfig(method=sub["method"], dt=float(sub["dt"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    params = _model_params(cfg, int(sub["N"]))
    try:
        params.require_dynamics()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    report = run_invariance_experiment(
        N=int(sub["N"]),
        delta=params.delta,
        T=float(sub["T"]),
        times=[float(t) for t in sub["times"]],
        M=int(sub["M"]),
        config=config,
        stream=SeededStream(master_seed=int(cfg["seed"])),
        params=params,
        z_threshold=float(sub["z_threshold"]),
        ks_family_level=float(sub["ks_family_level"]),
        bug_skip_inner_projection=bool(sub["bug"]),
    )
    cfg_hash = _config_hash(cfg)
    out = _out_dir(cfg)
    payload = {"config": cfg, "config_sha256": cfg_hash, "report": report.to_json()}
    _write_json(out / "invariance.json", payload)
    print(
        f"invariance: worst |z| = {report.worst_abs_z:.3g}, min KS p = "
        f"{report.min_ks_p:.3g}, passed = {report.passed} -> {out / 'invariance.json'}"
    )
    if not report.valid:
        return EXIT_NUMERICAL
    return EXIT_PASS if report.passed else EXIT_STATISTICAL


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

_COMMANDS = {
    "coefficients": cmd_coefficients,
    "sample": cmd_sample,
    "evolve": cmd_evolve,
    "expectation": cmd_expectation,
    "invariance": cmd_invariance,
}


def _build_parser() -> _Parser:
    parser = _Parser(prog="msqg", description=__doc__.splitlines()[0])
    parser.add_argument("--config", metavar="PATH", help="TOML configuration file")
    parser.add_argument("--seed", type=int, metavar="U64", help="master seed override")
    parser.add_argument("--threads", type=int, metavar="INT", help="worker pool size")
    parser.add_argument("--out", metavar="DIR", help="output directory override")
    parser.add_argument(
        "--formulation",
        choices=[f.value for f in Formulation],
        help="model formulation override",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS), help="subcommand to run")
    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        cfg = _load_config(args)
        with scipy.fft.set_workers(cfg["threads"]):
            return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonConvergence as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
